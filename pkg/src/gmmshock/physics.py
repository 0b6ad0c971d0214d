"""Compressible-flow state algebra and numerical fluxes.

Conservative states are arrays whose last axis holds (rho, rho*u, rho*v,
rho*E); every function broadcasts over arbitrary leading axes so the same
code serves scalar sanity checks and whole-domain kernels. The two-point
flux is the kinetic-energy/entropy-consistent flux built from arithmetic
means of (rho, u, v, beta) and logarithmic means of rho and beta, with
beta = rho/(2p); it satisfies the Tadmor shuffle condition

    (wR - wL) . F = psi(qR) - psi(qL),   psi = rho (v . n),

which the test suite checks on randomized admissible pairs.
"""

from dataclasses import dataclass

import numpy as np

LOG_MEAN_SWITCH = 1e-4  # relative jump below which the series branch is used


class NonAdmissibleStateError(ValueError):
    """Density or pressure is non-positive where an admissible state is required."""


class BoundaryConfigError(ValueError):
    """Unknown boundary-condition kind."""


@dataclass(frozen=True)
class GasModel:
    """Nondimensional perfect-gas constants. theta scales conductivity: kappa = theta*mu*R."""

    gamma: float = 1.4
    prandtl: float = 0.72
    gas_constant: float = 1.0

    @property
    def theta(self) -> float:
        return self.gamma / ((self.gamma - 1.0) * self.prandtl)


@dataclass(frozen=True)
class ArtificialViscosityConfig:
    mu0: float = 0.1

    def __post_init__(self):
        if self.mu0 < 0.0:
            raise ValueError("mu0 must be non-negative")


def conservative_from_primitive(rho, u, v, p, gas: GasModel = GasModel()):
    rho, u, v, p = np.broadcast_arrays(rho, u, v, p)
    q = np.empty(rho.shape + (4,))
    q[..., 0] = rho
    q[..., 1] = rho * u
    q[..., 2] = rho * v
    q[..., 3] = p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v)
    return q


def primitive_from_conservative(q, gas: GasModel = GasModel(), check: bool = True):
    """(rho, u, v, p) from a conservative state; rejects non-admissible input.

    With ``check`` the conversion raises instead of silently producing a
    negative pressure, so callers on the hot path that have already
    validated the state can skip the scan.
    """
    q = np.asarray(q, dtype=float)
    rho = q[..., 0]
    if check and not np.all(rho > 0.0):
        raise NonAdmissibleStateError("non-positive density encountered")
    u = q[..., 1] / rho
    v = q[..., 2] / rho
    p = (gas.gamma - 1.0) * (q[..., 3] - 0.5 * rho * (u * u + v * v))
    if check and not np.all(p > 0.0):
        raise NonAdmissibleStateError("non-positive pressure encountered")
    return rho, u, v, p


def pressure(q, gas: GasModel = GasModel()):
    rho = q[..., 0]
    return (gas.gamma - 1.0) * (q[..., 3] - 0.5 * (q[..., 1] ** 2 + q[..., 2] ** 2) / rho)


def sound_speed(rho, p, gas: GasModel = GasModel()):
    return np.sqrt(gas.gamma * p / rho)


def mathematical_entropy(q, gas: GasModel = GasModel()):
    """S = -rho*s/(gamma-1) with s = ln p - gamma ln rho."""
    rho, _, _, p = primitive_from_conservative(q, gas)
    s = np.log(p) - gas.gamma * np.log(rho)
    return -rho * s / (gas.gamma - 1.0)


def entropy_variables(q, gas: GasModel = GasModel(), check: bool = True):
    rho, u, v, p = primitive_from_conservative(q, gas, check=check)
    s = np.log(p) - gas.gamma * np.log(rho)
    w = np.empty_like(np.asarray(q, dtype=float))
    w[..., 0] = (gas.gamma - s) / (gas.gamma - 1.0) - 0.5 * rho * (u * u + v * v) / p
    w[..., 1] = rho * u / p
    w[..., 2] = rho * v / p
    w[..., 3] = -rho / p
    return w


def primitives_from_entropy(w, gas: GasModel = GasModel()):
    """Invert the entropy-variable map; round-trips with entropy_variables."""
    w = np.asarray(w, dtype=float)
    w1, w2, w3, w4 = w[..., 0], w[..., 1], w[..., 2], w[..., 3]
    u = -w2 / w4
    v = -w3 / w4
    s = gas.gamma - (gas.gamma - 1.0) * (w1 - 0.5 * (w2 * w2 + w3 * w3) / w4)
    rho = np.exp((s + np.log(-w4)) / (1.0 - gas.gamma))
    p = -rho / w4
    return rho, u, v, p


def primitive_gradients_from_entropy(w, grad_w, gas: GasModel = GasModel()):
    """Chain rule from entropy-variable gradients to primitive gradients.

    ``grad_w`` has shape (..., 4, 2). Returns a dict with grad_rho, grad_u,
    grad_v, grad_p, grad_rhoe (internal energy density) and grad_t, each
    (..., 2), so one lifted gradient serves the viscous, artificial and
    sensor paths.
    """
    w = np.asarray(w, dtype=float)
    w1, w2, w3, w4 = (w[..., k, None] for k in range(4))
    g1, g2, g3, g4 = (grad_w[..., k, :] for k in range(4))
    u = -w2 / w4
    v = -w3 / w4
    grad_u = -(g2 + u * g4) / w4
    grad_v = -(g3 + v * g4) / w4
    gm1 = gas.gamma - 1.0
    grad_s = -gm1 * (g1 - (w2 * g2 + w3 * g3) / w4 + 0.5 * (w2 * w2 + w3 * w3) / (w4 * w4) * g4)
    s = gas.gamma - gm1 * (w1 - 0.5 * (w2 * w2 + w3 * w3) / w4)
    rho = np.exp((s + np.log(-w4)) / (1.0 - gas.gamma))
    grad_rho = rho * (grad_s + g4 / w4) / (1.0 - gas.gamma)
    p = -rho / w4
    grad_p = -(grad_rho + p * g4) / w4
    rr = gas.gas_constant
    grad_t = grad_p / (rho * rr) - p / (rho * rho * rr) * grad_rho
    return {
        "rho": rho[..., 0],
        "u": u[..., 0],
        "v": v[..., 0],
        "p": p[..., 0],
        "grad_rho": grad_rho,
        "grad_u": grad_u,
        "grad_v": grad_v,
        "grad_p": grad_p,
        "grad_rhoe": grad_p / gm1,
        "grad_t": grad_t,
    }


def euler_flux(q, normal, gas: GasModel = GasModel(), check: bool = True):
    """Inviscid flux projected on a unit direction ``normal`` (..., 2)."""
    rho, u, v, p = primitive_from_conservative(q, gas, check=check)
    normal = np.asarray(normal, dtype=float)
    nx, ny = normal[..., 0], normal[..., 1]
    vn = u * nx + v * ny
    f = np.empty_like(np.asarray(q, dtype=float))
    f[..., 0] = rho * vn
    f[..., 1] = rho * u * vn + p * nx
    f[..., 2] = rho * v * vn + p * ny
    f[..., 3] = (np.asarray(q)[..., 3] + p) * vn
    return f


def log_mean(a, b, log_a=None, log_b=None, check: bool = True):
    """Logarithmic mean (a-b)/(ln a - ln b) with a series branch near a = b.

    Passing precomputed logarithms avoids re-evaluating them in kernels
    that form many pairs from the same nodal values.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if check and (np.any(a <= 0.0) or np.any(b <= 0.0)):
        raise NonAdmissibleStateError("log_mean requires positive arguments")
    if log_a is None:
        log_a = np.log(a)
    if log_b is None:
        log_b = np.log(b)
    f = (a - b) / (a + b)
    u = f * f
    series = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0
    near = np.abs(f) < LOG_MEAN_SWITCH
    denom = np.where(near, 1.0, log_a - log_b)
    direct = np.where(near, 1.0, (a - b) / denom)
    return np.where(near, (a + b) / (2.0 * series), direct)


def _log_mean_fast(a, b, log_a, log_b):
    """log_mean for positive arrays with precomputed logarithms."""
    diff = a - b
    add = a + b
    f = diff / add
    u = f * f
    near = u < LOG_MEAN_SWITCH**2
    series = 2.0 * (1.0 + u * (1.0 / 3.0 + u * (0.2 + u / 7.0)))
    denom = np.where(near, 1.0, log_a - log_b)
    return np.where(near, add / series, diff / denom)


def _ec_flux_from_means(rho_ln, beta_ln, rho_avg, beta_avg, u_avg, v_avg,
                        u2_avg, v2_avg, nx, ny, gamma, out=None):
    p_tilde = 0.5 * rho_avg / beta_avg
    vn = u_avg * nx + v_avg * ny
    f = out if out is not None else np.empty(np.broadcast(rho_ln, vn).shape + (4,))
    f[..., 0] = rho_ln * vn
    f[..., 1] = u_avg * f[..., 0] + p_tilde * nx
    f[..., 2] = v_avg * f[..., 0] + p_tilde * ny
    f[..., 3] = (0.5 / ((gamma - 1.0) * beta_ln) - 0.5 * (u2_avg + v2_avg)) * f[..., 0] \
        + u_avg * f[..., 1] + v_avg * f[..., 2]
    return f


def _fast_interface_flux(q_l, q_r, nx: float, ny: float, gamma: float,
                         dissipative: bool = True):
    """EC (optionally entropy-stable) flux for batched faces, axis-aligned
    scalar normal, primitives computed inline without admissibility scans."""
    rho_l = q_l[..., 0]
    inv_l = 1.0 / rho_l
    u_l = q_l[..., 1] * inv_l
    v_l = q_l[..., 2] * inv_l
    p_l = (gamma - 1.0) * (q_l[..., 3] - 0.5 * (q_l[..., 1] * u_l + q_l[..., 2] * v_l))
    beta_l = 0.5 * rho_l / p_l
    rho_r = q_r[..., 0]
    inv_r = 1.0 / rho_r
    u_r = q_r[..., 1] * inv_r
    v_r = q_r[..., 2] * inv_r
    p_r = (gamma - 1.0) * (q_r[..., 3] - 0.5 * (q_r[..., 1] * u_r + q_r[..., 2] * v_r))
    beta_r = 0.5 * rho_r / p_r
    f = _ec_flux_from_means(
        _log_mean_fast(rho_l, rho_r, np.log(rho_l), np.log(rho_r)),
        _log_mean_fast(beta_l, beta_r, np.log(beta_l), np.log(beta_r)),
        0.5 * (rho_l + rho_r), 0.5 * (beta_l + beta_r),
        0.5 * (u_l + u_r), 0.5 * (v_l + v_r),
        0.5 * (u_l * u_l + u_r * u_r), 0.5 * (v_l * v_l + v_r * v_r),
        nx, ny, gamma)
    if dissipative:
        lam = np.maximum(np.abs(u_l * nx + v_l * ny) + np.sqrt(gamma * p_l * inv_l),
                         np.abs(u_r * nx + v_r * ny) + np.sqrt(gamma * p_r * inv_r))
        f -= 0.5 * lam[..., None] * (q_r - q_l)
    return f


def ec_two_point_flux(q_left, q_right, normal, gas: GasModel = GasModel(), check: bool = True):
    """Entropy-conservative two-point flux (consistent and symmetric)."""
    rho_l, u_l, v_l, p_l = primitive_from_conservative(q_left, gas, check=check)
    rho_r, u_r, v_r, p_r = primitive_from_conservative(q_right, gas, check=check)
    beta_l = 0.5 * rho_l / p_l
    beta_r = 0.5 * rho_r / p_r
    normal = np.asarray(normal, dtype=float)
    return _ec_flux_from_means(
        log_mean(rho_l, rho_r, check=False),
        log_mean(beta_l, beta_r, check=False),
        0.5 * (rho_l + rho_r),
        0.5 * (beta_l + beta_r),
        0.5 * (u_l + u_r),
        0.5 * (v_l + v_r),
        0.5 * (u_l * u_l + u_r * u_r),
        0.5 * (v_l * v_l + v_r * v_r),
        normal[..., 0],
        normal[..., 1],
        gas.gamma,
    )


def max_wave_speed(q_left, q_right, normal, gas: GasModel = GasModel()):
    rho_l, u_l, v_l, p_l = primitive_from_conservative(q_left, gas, check=False)
    rho_r, u_r, v_r, p_r = primitive_from_conservative(q_right, gas, check=False)
    normal = np.asarray(normal, dtype=float)
    nx, ny = normal[..., 0], normal[..., 1]
    lam_l = np.abs(u_l * nx + v_l * ny) + sound_speed(rho_l, p_l, gas)
    lam_r = np.abs(u_r * nx + v_r * ny) + sound_speed(rho_r, p_r, gas)
    return np.maximum(lam_l, lam_r)


def riemann_solver_es(q_left, q_right, normal, gas: GasModel = GasModel(), check: bool = True):
    """Entropy-stable interface flux: EC flux plus Rusanov dissipation."""
    q_left = np.asarray(q_left, dtype=float)
    q_right = np.asarray(q_right, dtype=float)
    f = ec_two_point_flux(q_left, q_right, normal, gas, check=check)
    lam = max_wave_speed(q_left, q_right, normal, gas)
    return f - 0.5 * lam[..., None] * (q_right - q_left)


def viscous_flux(q, grad_u, grad_v, grad_t, mu, gas: GasModel = GasModel()):
    """Newtonian stress and Fourier heat flux as a block tensor (..., 4, 2).

    ``grad_u``/``grad_v``/``grad_t`` carry (d/dx, d/dy) on their last axis;
    the trace term uses the Stokes hypothesis and kappa = theta*mu*R.
    """
    q = np.asarray(q, dtype=float)
    rho = q[..., 0]
    u = q[..., 1] / rho
    v = q[..., 2] / rho
    div = grad_u[..., 0] + grad_v[..., 1]
    tau_xx = mu * (2.0 * grad_u[..., 0] - 2.0 / 3.0 * div)
    tau_yy = mu * (2.0 * grad_v[..., 1] - 2.0 / 3.0 * div)
    tau_xy = mu * (grad_u[..., 1] + grad_v[..., 0])
    kappa = gas.theta * mu * gas.gas_constant
    flux = np.zeros(q.shape[:-1] + (4, 2))
    flux[..., 1, 0] = tau_xx
    flux[..., 1, 1] = tau_xy
    flux[..., 2, 0] = tau_xy
    flux[..., 2, 1] = tau_yy
    flux[..., 3, 0] = u * tau_xx + v * tau_xy + kappa * grad_t[..., 0]
    flux[..., 3, 1] = u * tau_xy + v * tau_yy + kappa * grad_t[..., 1]
    return flux


def guermond_popov_flux(rho, u, v, grad_rho, grad_u, grad_v, grad_rhoe, alpha_a, mu_a):
    """Artificial dissipative flux: mass/energy diffusion plus a viscous part.

    The alpha_a block diffuses density and internal energy (the kinetic
    contribution rides on the 0.5|v|^2 grad(rho) term and the momentum rows
    v_i * grad(rho)); the mu_a block is a Navier-Stokes-like stress built
    from the symmetric velocity gradient. Linear in every gradient and in
    both coefficients.
    """
    rho, u, v = np.broadcast_arrays(rho, u, v)
    alpha_a = np.asarray(alpha_a, dtype=float)
    mu_a = np.asarray(mu_a, dtype=float)
    sym_xx = grad_u[..., 0]
    sym_yy = grad_v[..., 1]
    sym_xy = 0.5 * (grad_u[..., 1] + grad_v[..., 0])
    flux = np.zeros(np.asarray(rho).shape + (4, 2))
    flux[..., 0, :] = alpha_a[..., None] * grad_rho
    flux[..., 1, :] = alpha_a[..., None] * u[..., None] * grad_rho
    flux[..., 2, :] = alpha_a[..., None] * v[..., None] * grad_rho
    flux[..., 1, 0] += mu_a * rho * sym_xx
    flux[..., 1, 1] += mu_a * rho * sym_xy
    flux[..., 2, 0] += mu_a * rho * sym_xy
    flux[..., 2, 1] += mu_a * rho * sym_yy
    ke = 0.5 * (u * u + v * v)
    flux[..., 3, :] = alpha_a[..., None] * (grad_rhoe + ke[..., None] * grad_rho)
    flux[..., 3, 0] += mu_a * rho * (u * sym_xx + v * sym_xy)
    flux[..., 3, 1] += mu_a * rho * (u * sym_xy + v * sym_yy)
    return flux


def subcell_resolution(volume, order: int, dim: int = 2):
    """h = V^(1/d) / (P + 1), the nominal spacing of P+1 nodes per direction."""
    return np.asarray(volume, dtype=float) ** (1.0 / dim) / (order + 1)


def artificial_coefficients(sensor, cfg: ArtificialViscosityConfig, volume, order: int, dim: int = 2):
    """alpha_a = mu_a = mu0 * h * s for a sensor value s in [0, 1]."""
    h = subcell_resolution(volume, order, dim)
    value = cfg.mu0 * h * np.asarray(sensor, dtype=float)
    return value, value


def slip_wall_state(q_interior, normal):
    """Mirror the normal velocity component; density and energy are copied."""
    q_interior = np.asarray(q_interior, dtype=float)
    normal = np.asarray(normal, dtype=float)
    mn = q_interior[..., 1] * normal[..., 0] + q_interior[..., 2] * normal[..., 1]
    q = q_interior.copy()
    q[..., 1] -= 2.0 * mn * normal[..., 0]
    q[..., 2] -= 2.0 * mn * normal[..., 1]
    return q


def outflow_state(q_interior, normal, p_exterior, gas: GasModel = GasModel()):
    """Riemann-invariant outflow against an exterior pressure.

    Supersonic normal Mach numbers copy the interior state. Otherwise the
    exterior density follows from the prescribed pressure, the exterior
    sound speed is evaluated from that (p0, rho0) pair, and the normal
    velocity preserves the outgoing invariant r+ = v_n + 2c/(gamma-1).
    """
    rho, u, v, p = primitive_from_conservative(q_interior, gas, check=False)
    normal = np.asarray(normal, dtype=float)
    nx, ny = normal[..., 0], normal[..., 1]
    c = sound_speed(rho, p, gas)
    vn = u * nx + v * ny
    p0 = np.broadcast_to(np.asarray(p_exterior, dtype=float), rho.shape)

    rho0 = rho * (1.0 + (p0 / p - 1.0) / gas.gamma)
    c0 = sound_speed(rho0, p0, gas)
    r_plus = vn + 2.0 * c / (gas.gamma - 1.0)
    vn0 = r_plus - 2.0 * c0 / (gas.gamma - 1.0)
    u0 = (u - vn * nx) + vn0 * nx
    v0 = (v - vn * ny) + vn0 * ny

    q_sub = conservative_from_primitive(rho0, u0, v0, p0, gas)
    supersonic = (vn / c >= 1.0)[..., None]
    return np.where(supersonic, q_interior, q_sub)


def boundary_state(kind: str, q_interior, normal, exterior_data=None, t: float = 0.0,
                   gas: GasModel = GasModel()):
    """Exterior ghost state for a face, by boundary kind.

    ``dirichlet`` accepts either a ready state array or a callable
    ``f(t) -> state array`` for time-dependent data; ``outflow`` expects the
    exterior pressure.
    """
    if kind == "slipwall":
        return slip_wall_state(q_interior, normal)
    if kind == "dirichlet":
        data = exterior_data(t) if callable(exterior_data) else exterior_data
        return np.broadcast_to(np.asarray(data, dtype=float), np.asarray(q_interior).shape).copy()
    if kind == "outflow":
        return outflow_state(q_interior, normal, exterior_data, gas)
    raise BoundaryConfigError(f"unknown boundary kind {kind!r}")
