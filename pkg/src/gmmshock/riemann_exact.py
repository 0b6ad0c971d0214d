"""Exact solution of the 1D Euler Riemann problem.

Star-region pressure is found with Newton iterations on the standard
pressure function (shock branches use the Rankine-Hugoniot relations,
rarefaction branches the isentropic ones), and the similarity solution is
sampled by wave structure. Used as the independent oracle for the shock
tube verification and by the plotting scripts.
"""

from dataclasses import dataclass

import numpy as np

from .physics import GasModel

_NEWTON_TOL = 1e-12
_NEWTON_MAX = 100


@dataclass(frozen=True)
class RiemannSide:
    rho: float
    u: float
    p: float

    def sound_speed(self, gas: GasModel) -> float:
        return np.sqrt(gas.gamma * self.p / self.rho)


SOD_LEFT = RiemannSide(rho=1.0, u=0.0, p=1.0)
SOD_RIGHT = RiemannSide(rho=0.125, u=0.0, p=0.1)


def _pressure_function(p, side: RiemannSide, gas: GasModel):
    """f_K(p) and its derivative for one side of the discontinuity."""
    g = gas.gamma
    if p > side.p:  # shock
        a = 2.0 / ((g + 1.0) * side.rho)
        b = (g - 1.0) / (g + 1.0) * side.p
        root = np.sqrt(a / (p + b))
        f = (p - side.p) * root
        df = root * (1.0 - 0.5 * (p - side.p) / (p + b))
    else:  # rarefaction
        c = side.sound_speed(gas)
        ratio = (p / side.p) ** ((g - 1.0) / (2.0 * g))
        f = 2.0 * c / (g - 1.0) * (ratio - 1.0)
        df = 1.0 / (side.rho * c) * (p / side.p) ** (-(g + 1.0) / (2.0 * g))
    return f, df


def solve_star(left: RiemannSide, right: RiemannSide, gas: GasModel = GasModel()):
    """Star-region pressure and velocity."""
    g = gas.gamma
    cl, cr = left.sound_speed(gas), right.sound_speed(gas)
    # two-rarefaction guess, positive by construction
    p = ((cl + cr - 0.5 * (g - 1.0) * (right.u - left.u))
         / (cl / left.p ** ((g - 1.0) / (2.0 * g)) + cr / right.p ** ((g - 1.0) / (2.0 * g)))) \
        ** (2.0 * g / (g - 1.0))
    p = max(p, 1e-12)
    for _ in range(_NEWTON_MAX):
        fl, dfl = _pressure_function(p, left, gas)
        fr, dfr = _pressure_function(p, right, gas)
        dp = (fl + fr + right.u - left.u) / (dfl + dfr)
        p_new = max(p - dp, 1e-14)
        if abs(p_new - p) < _NEWTON_TOL * max(p, 1.0):
            p = p_new
            break
        p = p_new
    fl, _ = _pressure_function(p, left, gas)
    fr, _ = _pressure_function(p, right, gas)
    u = 0.5 * (left.u + right.u) + 0.5 * (fr - fl)
    return p, u


def sample(left: RiemannSide, right: RiemannSide, xi, gas: GasModel = GasModel()):
    """Self-similar solution at speeds xi = x/t; returns (rho, u, p) arrays."""
    g = gas.gamma
    beta = (g - 1.0) / (g + 1.0)
    p_star, u_star = solve_star(left, right, gas)
    xi = np.asarray(xi, dtype=float)
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    def fill(mask, r_, u_, p_):
        rho[mask] = r_
        u[mask] = u_
        p[mask] = p_

    left_side = xi <= u_star
    for on_left, side, sgn in ((True, left, 1.0), (False, right, -1.0)):
        region = left_side if on_left else ~left_side
        c = side.sound_speed(gas)
        pr = p_star / side.p
        if p_star > side.p:  # shock wave
            rho_star = side.rho * (pr + beta) / (beta * pr + 1.0)
            speed = side.u - sgn * c * np.sqrt((g + 1.0) / (2.0 * g) * pr + (g - 1.0) / (2.0 * g))
            ahead = region & (sgn * (xi - speed) <= 0.0)
            behind = region & (sgn * (xi - speed) > 0.0)
            fill(ahead, side.rho, side.u, side.p)
            fill(behind, rho_star, u_star, p_star)
        else:  # rarefaction fan
            rho_star = side.rho * pr ** (1.0 / g)
            c_star = np.sqrt(g * p_star / rho_star)
            head = side.u - sgn * c
            tail = u_star - sgn * c_star
            ahead = region & (sgn * (xi - head) <= 0.0)
            behind = region & (sgn * (xi - tail) >= 0.0)
            inside = region & ~ahead & ~behind
            fill(ahead, side.rho, side.u, side.p)
            fill(behind, rho_star, u_star, p_star)
            if inside.any():
                cx = beta * (side.u - xi[inside]) * sgn + (1.0 - beta) * c
                u[inside] = xi[inside] + sgn * cx
                rho[inside] = side.rho * (cx / c) ** (2.0 / (g - 1.0))
                p[inside] = side.p * (cx / c) ** (2.0 * g / (g - 1.0))
    return rho, u, p


def sod_solution(x, t: float, x_interface: float = 0.5, gas: GasModel = GasModel()):
    """Density, velocity and pressure of the Sod problem at time t."""
    x = np.asarray(x, dtype=float)
    if t <= 0.0:
        left = x < x_interface
        rho = np.where(left, SOD_LEFT.rho, SOD_RIGHT.rho)
        u = np.zeros_like(x)
        p = np.where(left, SOD_LEFT.p, SOD_RIGHT.p)
        return rho, u, p
    return sample(SOD_LEFT, SOD_RIGHT, (x - x_interface) / t, gas)
