"""The two-point flux at the heart of the solver: consistency, symmetry,
the Tadmor shuffle condition, and the sign of the dissipation added by the
interface Riemann solver.

Run:  python demos/entropy_stable_fluxes.py
"""

import numpy as np

from gmmshock import physics as ph

rng = np.random.default_rng(7)
n = 50000
ql = ph.conservative_from_primitive(rng.uniform(0.1, 3, n), rng.uniform(-2, 2, n),
                                    rng.uniform(-2, 2, n), rng.uniform(0.1, 3, n))
qr = ph.conservative_from_primitive(rng.uniform(0.1, 3, n), rng.uniform(-2, 2, n),
                                    rng.uniform(-2, 2, n), rng.uniform(0.1, 3, n))
theta = rng.uniform(0, 2 * np.pi, n)
normal = np.stack([np.cos(theta), np.sin(theta)], axis=-1)

flux = ph.ec_two_point_flux(ql, qr, normal)
print("symmetry residual:   ", np.abs(flux - ph.ec_two_point_flux(qr, ql, normal)).max())
print("consistency residual:", np.abs(ph.ec_two_point_flux(ql, ql, normal)
                                      - ph.euler_flux(ql, normal)).max())

# Entropy shuffle: the jump in entropy variables contracted with the flux
# must equal the jump in the entropy flux potential psi = rho v.n.
w_jump = ph.entropy_variables(qr) - ph.entropy_variables(ql)
psi_jump = (qr[:, 1] - ql[:, 1]) * normal[:, 0] + (qr[:, 2] - ql[:, 2]) * normal[:, 1]
print("Tadmor residual:     ", np.abs((w_jump * flux).sum(-1) - psi_jump).max())

# The dissipative interface solver only ever removes entropy.
es = ph.riemann_solver_es(ql, qr, normal)
production = (w_jump * es).sum(-1) - psi_jump
print("max entropy production (should be <= 0):", production.max())
print("mean entropy production:", production.mean())

# Logarithmic means stay between the geometric structure of the two states.
a, b = rng.uniform(0.01, 10, n), rng.uniform(0.01, 10, n)
lm = ph.log_mean(a, b)
print("log-mean bounds hold:", bool(np.all(lm <= 0.5 * (a + b)) and np.all(lm >= np.minimum(a, b))))
