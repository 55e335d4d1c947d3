"""Single Fourier mode of the damped wave equation.

Each mode obeys v'' + v' + z v = 0. Depending on z the closed-form solution is
overdamped (z < 1/4), critically damped (z = 1/4) or oscillating (z > 1/4).
This script follows the three regimes, compares the closed form against the
adaptive integrator and shows that the formula stays smooth across z = 1/4.
"""

import numpy as np

from heisenberg_damped.oracle import IntegratorConfig, integrate_mode
from heisenberg_damped.propagator import classify_regime, damped_fg, energy, evolve_mode

print("regimes and agreement with the integrator at t = 20")
for z in (1e-4, 0.2, 0.25, 0.3, 50.0):
    closed = evolve_mode(20.0, z, 1.0, 0.0)
    ref = integrate_mode(20.0, z, 1.0, 0.0, IntegratorConfig())
    dev = abs(closed.v - ref.v) + abs(closed.v_dot - ref.v_dot)
    print(f"  z={z:<8g} {classify_regime(z).value:<11} v={closed.v.real:+.6e}  dev={dev:.1e}")

print("\nsmoothness across the double root: damped F at t = 10")
for dz in (-1e-6, -1e-10, 0.0, 1e-10, 1e-6):
    eF, _, _ = damped_fg(10.0, 0.25 + dz)
    print(f"  z = 1/4 {dz:+.0e}   e^(-t/2) F = {float(eF):.15f}")

print("\nenergy of a single oscillating mode (z = 4) never increases")
t = np.linspace(0, 10, 6)
states = [evolve_mode(s, 4.0, 1.0, 0.0) for s in t]
for s, st in zip(t, states):
    print(f"  t={s:4.1f}  E={energy(4.0, st.v, st.v_dot):.6e}")
