"""Module entry point for python -m lanczos_plateau."""

import sys

from .cli import main

sys.exit(main())
