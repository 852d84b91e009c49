"""Compare the three-term recurrence (SA) with full reorthogonalisation (FO).

The two produce identical coefficients while SA's orthogonality drift is
negligible, then part ways; both reconstruct the same autocorrelation.
"""

import numpy as np

from lanczos_plateau import (
    autocorrelation_ed,
    autocorrelation_from_b,
    build_ising,
    lanczos_fo,
    lanczos_sa,
    observable,
)

L = 6
model = build_ising(J=1.0, h_x=1.0, h_z=1.5, L=L, boundary="periodic")
obs = observable("sigma_z_1", L)

res_sa = lanczos_sa(model, obs, n_max=150, drift_sample_every=10)
res_fo, basis = lanczos_fo(model, obs, n_max=150)

print(f"sector dimension: {res_sa.sector_dim} strings (4^{L} - 1 = {4**L - 1})")
print(f"first coefficients: {np.round(res_fo.b[:6], 4)}")

rel = np.abs(res_sa.b / res_fo.b - 1.0)
drift = res_sa.orthogonality_drift
print("\n   n   b_n(FO)      SA drift     |SA/FO - 1|")
for n in (1, 20, 40, 60, 80, 100, 140):
    print(f"{n:4d}   {res_fo.b[n-1]:9.5f}   {drift[n-1]:10.2e}   {rel[n-1]:10.2e}")
print("-> identical while the drift is small, divergent after it blows up")

ts = np.linspace(0, 30, 301)
c_sa = autocorrelation_from_b(res_sa.b, ts)
c_fo = autocorrelation_from_b(res_fo.b, ts)
c_ed = autocorrelation_ed(model, obs, ts)
print(f"\nmax |C_SA - C_ED| = {np.max(np.abs(c_sa - c_ed)):.2e}")
print(f"max |C_FO - C_ED| = {np.max(np.abs(c_fo - c_ed)):.2e}")
print("-> the b values differ at large n, the autocorrelation does not care")
