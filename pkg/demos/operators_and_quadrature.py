"""Tour of the building blocks: Lobatto rules, nodal operators, and the
telescoped form of the split volume operator.

Run:  python demos/operators_and_quadrature.py
"""

import numpy as np

from gmmshock import physics as ph
from gmmshock.mesh import build_cartesian_mesh
from gmmshock.quadrature import build_lobatto_rule, build_operator_set
from gmmshock.spatial import SpatialDiscretization

# A degree-4 Lobatto rule: endpoints plus the roots of P4'. The weights sum
# to the length of the reference interval and integrate degree-7 polynomials
# exactly.
rule = build_lobatto_rule(4)
print("nodes:   ", np.array2string(rule.nodes, precision=6))
print("weights: ", np.array2string(rule.weights, precision=6))
print("sum of weights - 2 =", rule.weights.sum() - 2.0)
for degree in (5, 6, 7):
    exact = 2.0 / (degree + 1) if degree % 2 == 0 else 0.0
    quad = (rule.weights * rule.nodes**degree).sum()
    print(f"  integral of xi^{degree}: quadrature error = {quad - exact:+.2e}")

# The differentiation matrix is exact on the polynomial space.
ops = build_operator_set(rule)
coeffs = np.array([0.3, -1.0, 0.5, 2.0, -0.7])
values = np.polynomial.polynomial.polyval(rule.nodes, coeffs)
deriv = np.polynomial.polynomial.polyval(rule.nodes, np.polynomial.polynomial.polyder(coeffs))
print("max derivative error on a degree-4 polynomial:",
      np.abs(ops.diff_matrix @ values - deriv).max())

# Nodal <-> Legendre transforms are exact inverses; sampling P3 yields the
# unit third coefficient.
p3 = np.polynomial.legendre.legval(rule.nodes, [0, 0, 0, 1])
print("Legendre coefficients of P3 samples:", np.round(ops.to_legendre @ p3, 12))

# The split-form volume operator telescopes into differences of sub-cell
# fluxes; this identity is what the DG/FV blending rides on.
mesh = build_cartesian_mesh(2, 2, 0.0, 1.0, 0.0, 1.0)
disc = SpatialDiscretization(mesh, ops, ph.GasModel(), periodic_x=True, periodic_y=True)
rng = np.random.default_rng(1)
shape = (4, 5, 5)
q = ph.conservative_from_primitive(rng.uniform(0.5, 2, shape), rng.uniform(-1, 1, shape),
                                   rng.uniform(-1, 1, shape), rng.uniform(0.5, 2, shape))
vol = disc.volume_splitform(q)
fx, fy = disc.subcell_dg_fluxes(q)
tele = (2 / mesh.dx) * np.diff(fx, axis=1) / rule.weights[None, :, None, None] \
    + (2 / mesh.dy) * np.diff(fy, axis=2) / rule.weights[None, None, :, None]
print("telescoping identity residual:", np.abs(tele - vol).max())
