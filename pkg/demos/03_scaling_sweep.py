"""
How age scales with the number of jammers
=========================================

With ``round(n^alpha)`` jammers the average age grows like ``sqrt(n)`` for
``alpha < 1/2`` and like ``n^alpha`` beyond.  This sweeps ``n = 2^6 ..
2^14`` for both regimes, fits the log-log slope of each series and draws
the age curves (line model solid, mini-ring model dashed).
"""

from ringgossip.experiments import SweepSpec, emit, fit_exponent, run_sweep, series

ns = tuple(2 ** k for k in range(6, 15))

for alpha in (0.3, 0.8):
    spec = SweepSpec(ns, alpha)
    records = run_sweep(spec)
    emit(records, "out", stem=f"scaling_alpha{alpha}", plot=True, spec=spec)
    for pl in ("equidistant", "random", "adjacent"):
        for model in ("line", "miniring"):
            slope, r2 = fit_exponent(series(records, pl, model))
            print(f"alpha={alpha}  {pl:11s} {model:8s}  slope={slope:.3f}  R^2={r2:.5f}")
