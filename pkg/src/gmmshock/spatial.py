"""Semi-discrete operators: split-form volume terms, sub-cell fluxes,
interface Riemann solves, lifted entropy-variable gradients and the
diffusive (viscous + artificial) contributions.

The advective operator is assembled in its telescoped, finite-volume-like
form: every node sits between two sub-cell interfaces, the outermost
interfaces of an element carry the face Riemann flux, and interior
interfaces carry either the exact high-order sub-cell fluxes or their
convex blend with dissipative low-order fluxes. With no blending this is
algebraically identical to the split-form volume operator plus the lifted
surface terms, which keeps one code path for both stabilization modes.
"""

import numpy as np

from . import physics as ph
from .mesh import CartesianMesh
from .quadrature import OperatorSet

X_NORMAL = np.array([1.0, 0.0])
Y_NORMAL = np.array([0.0, 1.0])


class SolverDiagnosticError(RuntimeError):
    """Non-admissible state during assembly; carries element index and time."""

    def __init__(self, message: str, element: int = -1, time: float = float("nan")):
        super().__init__(f"{message} (element {element}, t={time:.6g})")
        self.element = element
        self.time = time


def _check_admissible(rho, p, time):
    bad = (rho <= 0.0) | (p <= 0.0) | ~np.isfinite(rho) | ~np.isfinite(p)
    if bad.any():
        element = int(np.argwhere(bad.any(axis=(1, 2)))[0, 0])
        raise SolverDiagnosticError("non-admissible state", element=element, time=time)


class SpatialDiscretization:
    """Couples a Cartesian mesh, Lobatto operators and boundary closures.

    ``boundary`` maps side names (left/right/bottom/top) to callables
    ``bc(x, y, t, q_interior, outward_normal) -> q_exterior``; sides covered
    by a periodic flag may omit their entry.
    """

    def __init__(self, mesh: CartesianMesh, ops: OperatorSet, gas: ph.GasModel = ph.GasModel(),
                 boundary=None, periodic_x: bool = False, periodic_y: bool = False,
                 mu_physical: float = 0.0):
        self.mesh = mesh
        self.ops = ops
        self.gas = gas
        self.boundary = dict(boundary or {})
        self.periodic_x = periodic_x
        self.periodic_y = periodic_y
        self.mu_physical = mu_physical

        for side in self._physical_sides():
            if side not in self.boundary:
                raise ph.BoundaryConfigError(f"no boundary condition assigned to side {side!r}")

        self.n = ops.rule.n_nodes
        self.weights = ops.rule.weights
        self.x, self.y = mesh.node_coordinates(ops.rule)
        self.weights_2d = np.outer(self.weights, self.weights)
        # node pairs (l < k); the symmetric two-point flux is evaluated once
        # per pair and mirrored, adjacent pairs double as FV interfaces
        self._pair_l, self._pair_k = np.triu_indices(self.n, k=1)
        pair_pos = {(l, k): m for m, (l, k) in enumerate(zip(self._pair_l, self._pair_k))}
        self._adjacent = np.array([pair_pos[(i, i + 1)] for i in range(self.n - 1)])

    def _physical_sides(self):
        sides = []
        if not self.periodic_x:
            sides += ["left", "right"]
        if not self.periodic_y:
            sides += ["bottom", "top"]
        return sides

    # -- small helpers -------------------------------------------------

    def _grid(self, q):
        return q.reshape(self.mesh.ny, self.mesh.nx, *q.shape[1:])

    def integrate(self, field):
        """Quadrature integral over the whole domain of a nodal field."""
        return self.mesh.jacobian * np.einsum("ij,eij...->...", self.weights_2d, field)

    def conserved_totals(self, q):
        return self.integrate(q)

    # -- boundary ghosts ------------------------------------------------

    def _boundary_ghosts(self, q, t):
        """Exterior states for the four physical sides (None if periodic)."""
        n, mesh = self.n, self.mesh
        q5 = self._grid(q)
        x5 = self._grid(self.x)
        y5 = self._grid(self.y)
        ghosts = {}
        if not self.periodic_x:
            q_int = q5[:, 0, 0, :, :]
            ghosts["left"] = self.boundary["left"](
                x5[:, 0, 0, :], y5[:, 0, 0, :], t, q_int, np.array([-1.0, 0.0]))
            q_int = q5[:, -1, -1, :, :]
            ghosts["right"] = self.boundary["right"](
                x5[:, -1, -1, :], y5[:, -1, -1, :], t, q_int, np.array([1.0, 0.0]))
        if not self.periodic_y:
            q_int = q5[0, :, :, 0, :]
            ghosts["bottom"] = self.boundary["bottom"](
                x5[0, :, :, 0], y5[0, :, :, 0], t, q_int, np.array([0.0, -1.0]))
            q_int = q5[-1, :, :, -1, :]
            ghosts["top"] = self.boundary["top"](
                x5[-1, :, :, -1], y5[-1, :, :, -1], t, q_int, np.array([0.0, 1.0]))
        return ghosts

    # -- two-point volume machinery --------------------------------------

    def _primitive_bundle(self, q):
        """Primitives plus the logarithms and point fluxes reused all over
        one right-hand-side evaluation."""
        rho = q[..., 0]
        inv_rho = 1.0 / rho
        u = q[..., 1] * inv_rho
        v = q[..., 2] * inv_rho
        p = (self.gas.gamma - 1.0) * (q[..., 3] - 0.5 * (q[..., 1] * u + q[..., 2] * v))
        beta = 0.5 * rho / p
        point_x = np.empty_like(q)
        point_x[..., 0] = q[..., 1]
        point_x[..., 1] = q[..., 1] * u + p
        point_x[..., 2] = q[..., 2] * u
        point_x[..., 3] = (q[..., 3] + p) * u
        point_y = np.empty_like(q)
        point_y[..., 0] = q[..., 2]
        point_y[..., 1] = q[..., 1] * v
        point_y[..., 2] = q[..., 2] * v + p
        point_y[..., 3] = (q[..., 3] + p) * v
        return {"rho": rho, "u": u, "v": v, "p": p, "beta": beta,
                "ln_rho": np.log(rho), "ln_beta": np.log(beta),
                "c": np.sqrt(self.gas.gamma * p * inv_rho),
                "point_x": point_x, "point_y": point_y}

    def _pair_fluxes(self, b, axis: int):
        """EC fluxes for the strict upper-triangular node pairs along one
        tensor axis; shape (E, n_pairs, n, 4) for x, (E, n, n_pairs, 4) for y."""
        il, ik = self._pair_l, self._pair_k
        if axis == 1:
            def gl(name):
                return b[name][:, il, :]

            def gr(name):
                return b[name][:, ik, :]
            nx, ny = 1.0, 0.0
        else:
            def gl(name):
                return b[name][:, :, il]

            def gr(name):
                return b[name][:, :, ik]
            nx, ny = 0.0, 1.0
        rho_l, rho_r = gl("rho"), gr("rho")
        beta_l, beta_r = gl("beta"), gr("beta")
        u_l, u_r = gl("u"), gr("u")
        v_l, v_r = gl("v"), gr("v")
        return ph._ec_flux_from_means(
            ph._log_mean_fast(rho_l, rho_r, gl("ln_rho"), gr("ln_rho")),
            ph._log_mean_fast(beta_l, beta_r, gl("ln_beta"), gr("ln_beta")),
            0.5 * (rho_l + rho_r), 0.5 * (beta_l + beta_r),
            0.5 * (u_l + u_r), 0.5 * (v_l + v_r),
            0.5 * (u_l * u_l + u_r * u_r), 0.5 * (v_l * v_l + v_r * v_r),
            nx, ny, self.gas.gamma,
        )

    def _pair_tensor_full(self, b, axis: int, pairs=None):
        """Mirror the triangular pair fluxes into the full (symmetric) pair
        tensor, with consistent pointwise fluxes on the diagonal."""
        n, e = self.n, b["rho"].shape[0]
        if pairs is None:
            pairs = self._pair_fluxes(b, axis)
        il, ik = self._pair_l, self._pair_k
        diag = np.arange(n)
        full = np.empty((e, n, n, n, 4))
        if axis == 1:
            full[:, il, ik] = pairs
            full[:, ik, il] = pairs
            full[:, diag, diag] = b["point_x"]
        else:
            full[:, :, il, ik] = pairs
            full[:, :, ik, il] = pairs
            full[:, :, diag, diag] = b["point_y"]
        return full

    def volume_splitform(self, q, check: bool = True):
        """Split-form divergence of the inviscid flux, physical units."""
        if check:
            ph.primitive_from_conservative(q, self.gas, check=True)
        b = self._primitive_bundle(q)
        d2 = 2.0 * self.ops.diff_matrix
        div_x = np.einsum("ia,eiajc->eijc", d2, self._pair_tensor_full(b, axis=1))
        div_y = np.einsum("ja,eijac->eijc", d2, self._pair_tensor_full(b, axis=2))
        return (2.0 / self.mesh.dx) * div_x + (2.0 / self.mesh.dy) * div_y

    def _dg_flux_arrays(self, b):
        """Telescoped sub-cell fluxes from a primitive bundle."""
        n, e = self.n, b["rho"].shape[0]
        sub = self.ops.subcell_weights[:, self._pair_l, self._pair_k]  # (n-1, n_pairs)
        pairs_x = self._pair_fluxes(b, axis=1)
        pairs_y = self._pair_fluxes(b, axis=2)
        fx = np.empty((e, n + 1, n, 4))
        fy = np.empty((e, n, n + 1, 4))
        # only l < k pairs carry weight 2 w_l D_lk in the double sum
        fx[:, 1:-1] = np.einsum("fm,emjc->efjc", sub, pairs_x)
        fy[:, :, 1:-1] = np.einsum("fm,eimc->eifc", sub, pairs_y)
        fx[:, 0] = b["point_x"][:, 0]
        fx[:, -1] = b["point_x"][:, -1]
        fy[:, :, 0] = b["point_y"][:, :, 0]
        fy[:, :, -1] = b["point_y"][:, :, -1]
        return (fx, fy), (pairs_x, pairs_y)

    def subcell_dg_fluxes(self, q, check: bool = True):
        """Telescoped sub-cell fluxes reproducing the split-form operator.

        Arrays cover all n+1 interfaces per line; the outermost entries are
        the pointwise fluxes at the element boundary nodes.
        """
        if check:
            ph.primitive_from_conservative(q, self.gas, check=True)
        (fx, fy), _ = self._dg_flux_arrays(self._primitive_bundle(q))
        return fx, fy

    def _fv_flux_arrays(self, q, b, ec_pairs):
        """Low-order sub-cell fluxes, reusing the adjacent EC pair fluxes."""
        n, e = self.n, q.shape[0]
        adj = self._adjacent
        pairs_x, pairs_y = ec_pairs
        lam_x = np.maximum((np.abs(b["u"]) + b["c"])[:, :-1, :],
                           (np.abs(b["u"]) + b["c"])[:, 1:, :])
        lam_y = np.maximum((np.abs(b["v"]) + b["c"])[:, :, :-1],
                           (np.abs(b["v"]) + b["c"])[:, :, 1:])
        fx = np.empty((e, n + 1, n, 4))
        fy = np.empty((e, n, n + 1, 4))
        fx[:, 1:-1] = pairs_x[:, adj] - 0.5 * lam_x[..., None] * (q[:, 1:] - q[:, :-1])
        fy[:, :, 1:-1] = pairs_y[:, :, adj] - 0.5 * lam_y[..., None] * (q[:, :, 1:] - q[:, :, :-1])
        fx[:, 0] = b["point_x"][:, 0]
        fx[:, -1] = b["point_x"][:, -1]
        fy[:, :, 0] = b["point_y"][:, :, 0]
        fy[:, :, -1] = b["point_y"][:, :, -1]
        return fx, fy

    def subcell_fv_fluxes(self, q, check: bool = True):
        """Low-order sub-cell fluxes: Riemann solves between adjacent nodes."""
        if check:
            ph.primitive_from_conservative(q, self.gas, check=True)
        b = self._primitive_bundle(q)
        return self._fv_flux_arrays(q, b, (self._pair_fluxes(b, axis=1),
                                           self._pair_fluxes(b, axis=2)))

    @staticmethod
    def blend_subcell_fluxes(dg, fv, alpha, out=None):
        """Convex combination (1 - alpha) dg + alpha fv per sub-cell interface."""
        if dg.shape != fv.shape or alpha.shape != dg.shape[:-1]:
            raise ValueError("sub-cell flux and coefficient layouts do not match")
        a = alpha[..., None]
        if out is None:
            return (1.0 - a) * dg + a * fv
        # out may alias dg: dg + a (fv - dg)
        np.subtract(fv, dg, out=fv)
        np.multiply(fv, a, out=fv)
        np.add(dg, fv, out=out)
        return out

    def alpha_from_nodal_sensor(self, sensor_nodal, alpha_max: float):
        """Blend coefficients alpha = min(alpha_max, max(s_i, s_i+1)).

        Covers all n+1 interface slots per line; element-boundary entries
        use the face-adjacent node of the neighboring element (its own node
        at physical boundaries).
        """
        s = np.minimum(sensor_nodal, alpha_max)
        n, mesh = self.n, self.mesh
        e = s.shape[0]
        ax = np.empty((e, n + 1, n))
        ay = np.empty((e, n, n + 1))
        ax[:, 1:-1] = np.maximum(s[:, :-1], s[:, 1:])
        ay[:, :, 1:-1] = np.maximum(s[:, :, :-1], s[:, :, 1:])

        s5 = self._grid(s)
        left_of = np.roll(s5[:, :, -1, :], 1, axis=1)
        right_of = np.roll(s5[:, :, 0, :], -1, axis=1)
        if not self.periodic_x:
            left_of[:, 0] = s5[:, 0, 0, :]
            right_of[:, -1] = s5[:, -1, -1, :]
        ax[:, 0] = np.maximum(s5[:, :, 0, :], left_of).reshape(e, n)
        ax[:, -1] = np.maximum(s5[:, :, -1, :], right_of).reshape(e, n)

        below_of = np.roll(s5[:, :, :, -1], 1, axis=0)
        above_of = np.roll(s5[:, :, :, 0], -1, axis=0)
        if not self.periodic_y:
            below_of[0] = s5[0, :, :, 0]
            above_of[-1] = s5[-1, :, :, -1]
        ay[:, :, 0] = np.maximum(s5[:, :, :, 0], below_of).reshape(e, n)
        ay[:, :, -1] = np.maximum(s5[:, :, :, -1], above_of).reshape(e, n)
        return ax, ay

    # -- interface fluxes -------------------------------------------------

    def _face_fluxes(self, q, ghosts, surface_flux: str):
        """Riemann fluxes on all element faces, one solve per face.

        Returns fx (ny, nx+1, n, 4) and fy (ny+1, nx, n, 4), oriented in +x
        and +y so both owners read the same array entry.
        """
        dissipative = surface_flux == "es"
        gamma = self.gas.gamma
        mesh, n = self.mesh, self.n
        q5 = self._grid(q)
        fx = np.empty((mesh.ny, mesh.nx + 1, n, 4))
        fx[:, 1:-1] = ph._fast_interface_flux(q5[:, :-1, -1], q5[:, 1:, 0], 1.0, 0.0,
                                              gamma, dissipative)
        if self.periodic_x:
            fx[:, 0] = fx[:, -1] = ph._fast_interface_flux(
                q5[:, -1, -1], q5[:, 0, 0], 1.0, 0.0, gamma, dissipative)
        else:
            fx[:, 0] = ph._fast_interface_flux(ghosts["left"], q5[:, 0, 0], 1.0, 0.0,
                                               gamma, dissipative)
            fx[:, -1] = ph._fast_interface_flux(q5[:, -1, -1], ghosts["right"], 1.0, 0.0,
                                                gamma, dissipative)
        fy = np.empty((mesh.ny + 1, mesh.nx, n, 4))
        fy[1:-1] = ph._fast_interface_flux(q5[:-1, :, :, -1], q5[1:, :, :, 0], 0.0, 1.0,
                                           gamma, dissipative)
        if self.periodic_y:
            fy[0] = fy[-1] = ph._fast_interface_flux(
                q5[-1, :, :, -1], q5[0, :, :, 0], 0.0, 1.0, gamma, dissipative)
        else:
            fy[0] = ph._fast_interface_flux(ghosts["bottom"], q5[0, :, :, 0], 0.0, 1.0,
                                            gamma, dissipative)
            fy[-1] = ph._fast_interface_flux(q5[-1, :, :, -1], ghosts["top"], 0.0, 1.0,
                                             gamma, dissipative)
        return fx, fy

    # -- lifted gradients -------------------------------------------------

    def compute_gradients(self, q, t: float = 0.0, ghosts=None):
        """Lifted gradients of the entropy variables, (E, n, n, 4, 2).

        Interface values are the arithmetic means of the two traces, with
        boundary traces taken from the ghost states, so globally linear
        entropy variables are differentiated exactly on periodic meshes.
        """
        mesh, n = self.mesh, self.n
        if ghosts is None:
            ghosts = self._boundary_ghosts(q, t)
        w = ph.entropy_variables(q, self.gas, check=False)
        w5 = self._grid(w)

        wsx = np.empty((mesh.ny, mesh.nx + 1, n, 4))
        wsx[:, 1:-1] = 0.5 * (w5[:, :-1, -1] + w5[:, 1:, 0])
        if self.periodic_x:
            wsx[:, 0] = wsx[:, -1] = 0.5 * (w5[:, -1, -1] + w5[:, 0, 0])
        else:
            wsx[:, 0] = 0.5 * (w5[:, 0, 0] + ph.entropy_variables(ghosts["left"], self.gas, check=False))
            wsx[:, -1] = 0.5 * (w5[:, -1, -1] + ph.entropy_variables(ghosts["right"], self.gas, check=False))
        wsy = np.empty((mesh.ny + 1, mesh.nx, n, 4))
        wsy[1:-1] = 0.5 * (w5[:-1, :, :, -1] + w5[1:, :, :, 0])
        if self.periodic_y:
            wsy[0] = wsy[-1] = 0.5 * (w5[-1, :, :, -1] + w5[0, :, :, 0])
        else:
            wsy[0] = 0.5 * (w5[0, :, :, 0] + ph.entropy_variables(ghosts["bottom"], self.gas, check=False))
            wsy[-1] = 0.5 * (w5[-1, :, :, -1] + ph.entropy_variables(ghosts["top"], self.gas, check=False))

        e = q.shape[0]
        grad = np.empty((e, n, n, 4, 2))
        gx = np.einsum("ia,eajc->eijc", self.ops.diff_matrix, w)
        gx[:, -1] += (wsx[:, 1:].reshape(e, n, 4) - w[:, -1]) / self.weights[-1]
        gx[:, 0] -= (wsx[:, :-1].reshape(e, n, 4) - w[:, 0]) / self.weights[0]
        grad[..., 0] = gx * (2.0 / mesh.dx)
        gy = np.einsum("ja,eiac->eijc", self.ops.diff_matrix, w)
        gy[:, :, -1] += (wsy[1:].reshape(e, n, 4) - w[:, :, -1]) / self.weights[-1]
        gy[:, :, 0] -= (wsy[:-1].reshape(e, n, 4) - w[:, :, 0]) / self.weights[0]
        grad[..., 1] = gy * (2.0 / mesh.dy)
        return grad

    # -- diffusive terms ---------------------------------------------------

    def _diffusive_divergence(self, q, grad_w, av_coeffs):
        """BR1 divergence of viscous plus artificial fluxes (central faces)."""
        mesh, n, e = self.mesh, self.n, q.shape[0]
        w = ph.entropy_variables(q, self.gas, check=False)
        prims = ph.primitive_gradients_from_entropy(w, grad_w, self.gas)
        flux = 0.0
        if self.mu_physical > 0.0:
            flux = flux + ph.viscous_flux(q, prims["grad_u"], prims["grad_v"],
                                          prims["grad_t"], self.mu_physical, self.gas)
        if av_coeffs is not None:
            alpha_a, mu_a = av_coeffs
            flux = flux + ph.guermond_popov_flux(
                prims["rho"], prims["u"], prims["v"], prims["grad_rho"],
                prims["grad_u"], prims["grad_v"], prims["grad_rhoe"],
                alpha_a[:, None, None], mu_a[:, None, None])

        fvx = flux[..., 0]
        fvy = flux[..., 1]
        fvx5 = self._grid(fvx)
        fvy5 = self._grid(fvy)

        # central interface values; boundary faces keep the interior trace
        sx = np.empty((mesh.ny, mesh.nx + 1, n, 4))
        sx[:, 1:-1] = 0.5 * (fvx5[:, :-1, -1] + fvx5[:, 1:, 0])
        if self.periodic_x:
            sx[:, 0] = sx[:, -1] = 0.5 * (fvx5[:, -1, -1] + fvx5[:, 0, 0])
        else:
            sx[:, 0] = fvx5[:, 0, 0]
            sx[:, -1] = fvx5[:, -1, -1]
        sy = np.empty((mesh.ny + 1, mesh.nx, n, 4))
        sy[1:-1] = 0.5 * (fvy5[:-1, :, :, -1] + fvy5[1:, :, :, 0])
        if self.periodic_y:
            sy[0] = sy[-1] = 0.5 * (fvy5[-1, :, :, -1] + fvy5[0, :, :, 0])
        else:
            sy[0] = fvy5[0, :, :, 0]
            sy[-1] = fvy5[-1, :, :, -1]

        dx_part = np.einsum("ia,eajc->eijc", self.ops.diff_matrix, fvx)
        dx_part[:, -1] += (sx[:, 1:].reshape(e, n, 4) - fvx[:, -1]) / self.weights[-1]
        dx_part[:, 0] -= (sx[:, :-1].reshape(e, n, 4) - fvx[:, 0]) / self.weights[0]
        dy_part = np.einsum("ja,eiac->eijc", self.ops.diff_matrix, fvy)
        dy_part[:, :, -1] += (sy[1:].reshape(e, n, 4) - fvy[:, :, -1]) / self.weights[-1]
        dy_part[:, :, 0] -= (sy[:-1].reshape(e, n, 4) - fvy[:, :, 0]) / self.weights[0]
        return (2.0 / mesh.dx) * dx_part + (2.0 / mesh.dy) * dy_part

    # -- full right-hand side ----------------------------------------------

    def rhs(self, q, t: float, blend=None, av_coeffs=None, surface_flux: str = "es",
            check: bool = True):
        """dq/dt of the semi-discretization.

        ``blend`` supplies (alpha_x, alpha_y) sub-cell coefficients from the
        sensor; ``av_coeffs`` supplies per-element (alpha_a, mu_a). The two
        stabilization paths are selected per run and never combined.
        """
        mesh, n, e = self.mesh, self.n, q.shape[0]
        with np.errstate(invalid="ignore"):
            b = self._primitive_bundle(q)
        if check:
            _check_admissible(b["rho"], b["p"], t)
        ghosts = self._boundary_ghosts(q, t)
        face_x, face_y = self._face_fluxes(q, ghosts, surface_flux)

        (dg_x, dg_y), ec_pairs = self._dg_flux_arrays(b)
        if blend is not None:
            fv_x, fv_y = self._fv_flux_arrays(q, b, ec_pairs)
            alpha_x, alpha_y = blend
            fhat_x = self.blend_subcell_fluxes(dg_x, fv_x, alpha_x, out=dg_x)
            fhat_y = self.blend_subcell_fluxes(dg_y, fv_y, alpha_y, out=dg_y)
        else:
            fhat_x, fhat_y = dg_x, dg_y

        # outermost interfaces carry the shared face fluxes
        fhat_x[:, 0] = face_x[:, :-1].reshape(e, n, 4)
        fhat_x[:, -1] = face_x[:, 1:].reshape(e, n, 4)
        fhat_y[:, :, 0] = face_y[:-1].reshape(e, n, 4)
        fhat_y[:, :, -1] = face_y[1:].reshape(e, n, 4)

        adv = (2.0 / mesh.dx) * np.diff(fhat_x, axis=1) / self.weights[None, :, None, None] \
            + (2.0 / mesh.dy) * np.diff(fhat_y, axis=2) / self.weights[None, None, :, None]

        out = -adv
        if av_coeffs is not None or self.mu_physical > 0.0:
            grad_w = self.compute_gradients(q, t, ghosts=ghosts)
            out += self._diffusive_divergence(q, grad_w, av_coeffs)
        return out
