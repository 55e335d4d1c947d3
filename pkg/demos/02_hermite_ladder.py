"""Hermite functions and the ladder operators behind the sub-Laplacian spectrum.

Hermite functions diagonalise the harmonic oscillator with eigenvalue 2|k| + n.
The ladder operators move between neighbouring indices. The ladder route gives
the same gradient energy as the spectral weight (2|k| + n)|lambda|.
"""

import numpy as np

from heisenberg_damped.group import GroupParams
from heisenberg_damped.hermite import MultiIndex, apply_ladder, gauss_hermite, hermite_functions
from heisenberg_damped.plancherel import CoefficientField, apply_Xj, apply_Yj, build_grid, weighted_norm

rule = gauss_hermite(90)
psi = hermite_functions(60, rule.nodes)
gram = (psi * rule.scaled_weights) @ psi.T
print(f"orthonormality defect for m <= 60: {np.max(np.abs(gram - np.eye(61))):.1e}")

k = MultiIndex.of(3)
print(f"\nladder images of |{k.k[0]}>:")
print("  derivative:", {key.k: round(c, 6) for key, c in apply_ladder({k: 1.0}, 0, "d").items()})
print("  multiply:  ", {key.k: round(c, 6) for key, c in apply_ladder({k: 1.0}, 0, "w").items()})

rng = np.random.default_rng(1)
grid = build_grid(GroupParams(2), 0.01, 2.0, 4, 6)
fld = CoefficientField.zeros(grid, 8, 2)
vals = rng.standard_normal(fld.values.shape) + 0j
vals[:, [m.order > 6 for m in fld.k_lattice], :] = 0.0
fld = fld.with_values(vals)
ladder = sum(weighted_norm(op(fld, j)) ** 2 for j in range(2) for op in (apply_Xj, apply_Yj))
spectral = weighted_norm(fld, 1, 1) ** 2
print(f"\ngradient energy: ladder {ladder:.12e}  spectral {spectral:.12e}")
