"""Explicit time integration: three-stage SSP Runge-Kutta, the positivity
limiter applied after every stage, and CFL reporting.

The Runge-Kutta update is the optimal three-stage, third-order strong
stability preserving scheme in its convex Shu-Osher form, so admissibility
of limited forward-Euler substeps carries over to the full step.
"""

from dataclasses import dataclass

import numpy as np

from . import physics as ph

_BISECT_ITERS = 60  # theta resolved well below 1e-12


class UnrepairableStateError(RuntimeError):
    """Element mean is outside the admissible set; the limiter cannot help."""

    def __init__(self, what: str, element: int, time: float = float("nan")):
        super().__init__(f"{what} (element {element}, t={time:.6g})")
        self.element = element
        self.time = time


@dataclass(frozen=True)
class LimiterConfig:
    eps_star: float = 1e-13

    def __post_init__(self):
        if self.eps_star <= 0.0:
            raise ValueError("admissibility floor must be positive")


def ssprk33_step(u, t: float, dt: float, rhs, limiter=None):
    """One SSPRK33 step; ``limiter`` (if any) runs at the end of each stage."""
    def stage(v):
        return limiter(v) if limiter is not None else v

    u1 = stage(u + dt * rhs(u, t))
    u2 = stage(0.75 * u + 0.25 * (u1 + dt * rhs(u1, t + dt)))
    return stage(u / 3.0 + 2.0 / 3.0 * (u2 + dt * rhs(u2, t + 0.5 * dt)))


def element_means(q, weights_2d):
    """Cell averages of the conserved variables, (E, 4)."""
    return np.einsum("ij,eijc->ec", weights_2d, q) / weights_2d.sum()


def positivity_limit(q, weights_2d, eps_star: float, gas: ph.GasModel = ph.GasModel(),
                     time: float = float("nan")):
    """Convex rescale toward the element mean enforcing density and
    pressure floors eps(u) = min(mean(u), eps_star).

    The density pass shrinks only the density; the pressure pass shrinks
    the full state vector with the largest factor restoring p >= eps at
    every node (found by bisection, robust near vacuum). Element means are
    untouched by construction.
    """
    q = np.array(q)
    means = element_means(q, weights_2d)
    rho_bar = means[:, 0]
    if np.any(rho_bar <= 0.0):
        raise UnrepairableStateError("negative mean density",
                                     int(np.argmax(rho_bar <= 0.0)), time)
    p_bar = ph.pressure(means, gas)
    if np.any(p_bar <= 0.0):
        raise UnrepairableStateError("negative mean pressure",
                                     int(np.argmax(p_bar <= 0.0)), time)

    eps_rho = np.minimum(rho_bar, eps_star)
    rho_min = q[..., 0].min(axis=(1, 2))
    fix = rho_min < eps_rho
    if fix.any():
        theta = (rho_bar[fix] - eps_rho[fix]) / (rho_bar[fix] - rho_min[fix])
        q[fix, :, :, 0] = rho_bar[fix, None, None] \
            + theta[:, None, None] * (q[fix, :, :, 0] - rho_bar[fix, None, None])

    eps_p = np.minimum(p_bar, eps_star)
    p_min = ph.pressure(q, gas).min(axis=(1, 2))
    fix = p_min < eps_p
    if fix.any():
        qf = q[fix]
        qb = means[fix][:, None, None, :]
        lo = np.zeros(fix.sum())
        hi = np.ones(fix.sum())
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            pm = ph.pressure(qb + mid[:, None, None, None] * (qf - qb), gas).min(axis=(1, 2))
            ok = pm >= eps_p[fix]
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        q[fix] = qb + lo[:, None, None, None] * (qf - qb)
    return q


def make_positivity_limiter(weights_2d, eps_star: float, gas: ph.GasModel = ph.GasModel()):
    def limiter(q):
        return positivity_limit(q, weights_2d, eps_star, gas)
    return limiter


def cfl_report(q, mesh, order: int, dt: float, mu_total: float = 0.0,
               gas: ph.GasModel = ph.GasModel()):
    """Maximum advective and viscous CFL numbers over the domain.

    Both are based on the sub-cell resolution h = V^(1/d)/(P+1):
    CFL_i = dt max(|v| + c)/h and CFL_v = dt max(mu/rho)/h^2.
    """
    rho, u, v, p = ph.primitive_from_conservative(q, gas)
    h = ph.subcell_resolution(mesh.element_volume, order)
    lam = np.sqrt(u * u + v * v) + ph.sound_speed(rho, p, gas)
    cfl_i = dt * lam.max() / h
    cfl_v = dt * (mu_total / rho).max() / h**2
    return float(cfl_i), float(cfl_v)
