"""Decay rates of the damped wave equation on Heisenberg groups.

For data in L^1 and L^2 the solution decays like t^(-Q/4), with Q = 2n + 2
the homogeneous dimension. Each derivative in space gains t^(-1/2) and a time
derivative gains t^(-1). This script fits the exponents from the bundled
scenarios and prints them next to the predicted values.
"""

from heisenberg_damped import decay_lab
from heisenberg_damped.config import load_config
from heisenberg_damped.group import GroupParams
from heisenberg_damped.plancherel import build_grid

for name in ("n1_flat", "n2_flat"):
    cfg = load_config(name)
    params = GroupParams(cfg.n, cfg.plancherel_constant)
    grid = build_grid(params, cfg.lambda_min, cfg.lambda_max, cfg.panels, cfg.points, cfg.symmetric)
    u0 = decay_lab.synth_field(cfg.u0.spec("u0"), grid, cfg.k_max, cfg.l_max)
    u1 = decay_lab.synth_field(cfg.u1.spec("u1"), grid, cfg.k_max, cfg.l_max)
    report = decay_lab.make_report(decay_lab.run_scenario(u0, u1, cfg.times()), cfg.fit_window, cfg.tol)
    print(f"{name}: Q = {params.Q}")
    for obs, fit in report.fits.items():
        print(f"  {obs:<6} slope {fit.slope:+.4f}  expected {fit.expected:+.2f}  {'ok' if fit.passed else 'off'}")
