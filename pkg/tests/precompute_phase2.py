"""Second-phase cache fills: zero-mode chain variants for criterion 6b."""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from accept_cache import lanczos_b  # noqa: E402


def step(label, fn):
    t0 = time.time()
    fn()
    print(f"[{time.strftime('%H:%M:%S')}] {label:55s} {time.time() - t0:8.1f}s", flush=True)


step("SA zero_mode_chain L=10 n=3000",
     lambda: lanczos_b("zero_mode_chain", 10, "sigma_x_1", "SA", 3000))
step("FO zero_mode_chain L=10 n=1000",
     lambda: lanczos_b("zero_mode_chain", 10, "sigma_x_1", "FO", 1000))
print("phase 2 complete")
