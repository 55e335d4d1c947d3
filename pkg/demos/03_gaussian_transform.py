"""Group Fourier transform of a Gaussian on the first Heisenberg group.

The transform at frequency lambda is an operator on L^2(R). For the Gaussian it
is diagonal in the Hermite basis, with entries decaying geometrically in k.
Integrating the Hilbert-Schmidt norms against |lambda| recovers the L^2 norm
of the function, up to the normalising constant of the measure.
"""

import math

from heisenberg_damped.cli import gft_run
from heisenberg_damped.config import load_config
from heisenberg_damped.heisenberg_fourier import gaussian, group_fourier

f = gaussian()
block = group_fourier(f, 1.0, 4, 4)
print("transform at lambda = 1, top-left block (real part):")
for row in block.real:
    print("  " + "  ".join(f"{x:+.6f}" for x in row))

print("\nfull sweep of the bundled gauss_h1 run (about 20 s)")
res = gft_run(load_config("gauss_h1"))
print(f"  L2 norm on the group         {res['l2']:.8f}")
for label, c in (("(2 pi)^-4", (2 * math.pi) ** -4), ("(2 pi)^-2", (2 * math.pi) ** -2)):
    norm = math.sqrt(c * res["integral"])
    print(f"  frequency side, c = {label}  {norm:.8f}  gap {abs(norm - res['l2']) / res['l2']:.2%}")
print(f"  smallest Riemann-Lebesgue margin {min(res['l1'] - res['op_norm']):.4f}")
