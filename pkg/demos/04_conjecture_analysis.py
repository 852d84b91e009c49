"""Rates, cumulative products, fits and the convergence classifier.

Synthetic coefficient families with known asymptotics exercise the whole
analysis chain: Gamma_n on odd indices, the crossover n*, F(n) beyond it,
the bi-exponential fit with averaged rate, and the (alpha, beta) verdict.
"""

import numpy as np

from lanczos_plateau import (
    AsymptoticFamily,
    asymptotic_regime_check,
    biexp_fit,
    classify_convergence,
    cumulative_product,
    detect_nstar,
    rates,
    synthetic_bn,
)

print("== staggered linear family: the zero-mode signature ==")
c = 0.4
b = synthetic_bn("staggered_linear", 100_001, c=c)
rs = rates(b)
tail = rs.ns > 50_000
print(f"b_n = n + (-1)^n c, c={c}: n Gamma_n -> {np.mean(rs.ns[tail] * rs.gammas[tail]):.4f}"
      f"   (prediction 2 + 4c = {2 + 4 * c})")
print(f"classifier at (alpha={2 + 4 * c}, beta=1):",
      classify_convergence(2 + 4 * c, 1.0))

print("\n== subleading log-corrected family ==")
rho = 1.0
b = synthetic_bn("subleading", 1_000_001, rho=rho)
rs = rates(b)
sel = rs.ns > 500_000
corr = (rs.ns[sel] * rs.gammas[sel] - 2.0) * np.log(rs.ns[sel])
print(f"(n Gamma_n - 2) ln n -> {np.median(corr):+.3f}   (prediction -2(1+rho) = {-2 * (1 + rho)})")
print("-> corrections vanish at the rate level: they cannot produce a plateau")

print("\n== crossover detection and F(n) on a synthetic crossover sequence ==")
gamma = 0.04
n_star_true = 30
bb = np.concatenate([
    np.arange(1.0, n_star_true + 1.0),
    30.0 * np.exp(np.where(np.arange(n_star_true, 400) % 2 == 0, -gamma / 4, gamma / 4)),
])
n_star = detect_nstar(bb)
cp = cumulative_product(rates(bb), n_star)
fit = biexp_fit(cp)
print(f"detected n* = {n_star}; fitted rates c1={fit.c1:.4f}, c2={fit.c2:.4f}; "
      f"averaged rate {fit.gamma_bar:.4f} (true {gamma})")

print("\n== asymptotic regime table ==")
print("alpha beta   regime       slope(fit)  slope(pred)  series   classifier")
for alpha, beta in ((1.0, 0.5), (2.0, 1.0), (3.0, 1.0), (0.3, 2.0)):
    rep = asymptotic_regime_check(AsymptoticFamily(alpha, beta), n_max=100_000)
    fs = "      -  " if rep.fitted_slope is None else f"{rep.fitted_slope:9.3f}"
    ps = "      -  " if rep.predicted_slope is None else f"{rep.predicted_slope:9.3f}"
    series = "diverges" if rep.series_diverges else "converges"
    print(f"{alpha:4.1f} {beta:4.1f}   {rep.regime:11s} {fs}  {ps}   {series:9s} {rep.classifier}")
