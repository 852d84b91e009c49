"""Fill the acceptance cache, cheapest entries first.

Run from the repository root:  python3 tests/precompute_acceptance.py
Safe to re-run; finished entries are skipped.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from accept_cache import ed_autocorrelation, ed_plateau, lanczos_b  # noqa: E402


def step(label, fn):
    t0 = time.time()
    fn()
    print(f"[{time.strftime('%H:%M:%S')}] {label:55s} {time.time() - t0:8.1f}s", flush=True)


def main():
    # ED plateaus (criteria 5 and 7)
    for obs in ("sigma_z_1", "sigma_z_1z_2", "sigma_y_1"):
        for L in (6, 8, 9, 10):
            step(f"ed_plateau ising L={L} {obs}", lambda L=L, o=obs: ed_plateau("ising", L, o))

    # ED autocorrelations on the method-agreement grid (criterion 2)
    for obs in ("sigma_z_1", "sigma_z_1z_2"):
        for L in (8, 9, 10):
            step(f"ed_autocorr ising L={L} {obs}",
                 lambda L=L, o=obs: ed_autocorrelation("ising", L, o, 50.0, 501))

    # SA runs (criteria 2, 5, 6b)
    for obs in ("sigma_z_1", "sigma_z_1z_2", "sigma_y_1"):
        for L in (8, 9, 10):
            step(f"SA ising L={L} {obs}",
                 lambda L=L, o=obs: lanczos_b("ising", L, o, "SA", 1000))
    step("SA zero_mode_chain L=10 sigma_x_1",
         lambda: lanczos_b("zero_mode_chain", 10, "sigma_x_1", "SA", 1000))

    # FO runs, small to large (criteria 2, 3, 4)
    step("FO ising L=7 sigma_z_1", lambda: lanczos_b("ising", 7, "sigma_z_1", "FO", 1000))
    for obs in ("sigma_z_1", "sigma_z_1z_2"):
        for L in (8, 9, 10):
            step(f"FO ising L={L} {obs}",
                 lambda L=L, o=obs: lanczos_b("ising", L, o, "FO", 1000))
    print("acceptance cache complete")


if __name__ == "__main__":
    main()
