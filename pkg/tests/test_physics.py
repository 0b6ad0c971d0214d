import numpy as np
import pytest

from gmmshock import physics as ph

GAS = ph.GasModel()
GAMMA = GAS.gamma


def random_states(n, rng, rho=(0.1, 3.0), vel=(-2.0, 2.0), p=(0.1, 3.0)):
    return ph.conservative_from_primitive(
        rng.uniform(*rho, n), rng.uniform(*vel, n), rng.uniform(*vel, n),
        rng.uniform(*p, n))


class TestConversions:
    def test_stagnant_unit_state(self):
        q = np.array([1.0, 0.0, 0.0, 1.0 / (GAMMA - 1.0)])
        rho, u, v, p = ph.primitive_from_conservative(q)
        assert (rho, u, v) == (1.0, 0.0, 0.0)
        assert abs(p - 1.0) < 1e-15

    def test_dmr_post_shock_energy(self):
        q = ph.conservative_from_primitive(8.0, 7.145, -4.125, 116.5)
        expected = 116.5 / 0.4 + 0.5 * 8.0 * (7.145**2 + 4.125**2)
        assert abs(q[3] - expected) < 1e-12

    def test_dmr_pre_shock_energy(self):
        q = ph.conservative_from_primitive(1.4, 0.0, 0.0, 1.0)
        assert abs(q[3] - 2.5) < 1e-15

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        q = random_states(1000, rng)
        back = ph.conservative_from_primitive(*ph.primitive_from_conservative(q))
        assert np.abs(back - q).max() < 1e-14

    def test_non_admissible_raises(self):
        with pytest.raises(ph.NonAdmissibleStateError):
            ph.primitive_from_conservative(np.array([-1.0, 0.0, 0.0, 1.0]))
        with pytest.raises(ph.NonAdmissibleStateError):
            # huge kinetic energy drives the pressure negative
            ph.primitive_from_conservative(np.array([1.0, 10.0, 0.0, 1.0]))


class TestEntropyVariables:
    def test_unit_state_closed_form(self):
        q = ph.conservative_from_primitive(1.0, 0.0, 0.0, 1.0)
        w = ph.entropy_variables(q)
        assert np.allclose(w, [GAMMA / (GAMMA - 1.0), 0.0, 0.0, -1.0], atol=1e-14)

    def test_w4_always_negative(self):
        rng = np.random.default_rng(1)
        w = ph.entropy_variables(random_states(500, rng))
        assert np.all(w[..., 3] < 0.0)

    def test_gradient_of_entropy_function(self):
        q0 = ph.conservative_from_primitive(1.2, 0.4, -0.7, 0.9)
        w = ph.entropy_variables(q0)
        step = 1e-7
        for c in range(4):
            plus, minus = q0.copy(), q0.copy()
            plus[c] += step
            minus[c] -= step
            fd = (ph.mathematical_entropy(plus) - ph.mathematical_entropy(minus)) / (2 * step)
            assert abs(fd - w[c]) < 1e-6

    def test_round_trip_through_primitives(self):
        rng = np.random.default_rng(2)
        q = random_states(200, rng)
        rho, u, v, p = ph.primitives_from_entropy(ph.entropy_variables(q))
        qb = ph.conservative_from_primitive(rho, u, v, p)
        assert np.abs(qb - q).max() < 1e-10


class TestEulerFlux:
    def test_stagnant_gas_pressure_only(self):
        q = ph.conservative_from_primitive(1.3, 0.0, 0.0, 2.0)
        f = ph.euler_flux(q, np.array([0.6, 0.8]))
        assert np.allclose(f, [0.0, 2.0 * 0.6, 2.0 * 0.8, 0.0], atol=1e-15)

    def test_unit_flow_x(self):
        q = ph.conservative_from_primitive(1.0, 1.0, 0.0, 1.0)
        f = ph.euler_flux(q, np.array([1.0, 0.0]))
        assert np.allclose(f, [1.0, 2.0, 0.0, q[3] + 1.0])

    def test_rotational_consistency(self):
        rng = np.random.default_rng(3)
        q = random_states(200, rng)
        theta = rng.uniform(0, 2 * np.pi, 200)
        n = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        f = ph.euler_flux(q, n)
        # rotate velocity into the normal frame, flux in x, rotate back
        qr = q.copy()
        qr[:, 1] = q[:, 1] * n[:, 0] + q[:, 2] * n[:, 1]
        qr[:, 2] = -q[:, 1] * n[:, 1] + q[:, 2] * n[:, 0]
        fr = ph.euler_flux(qr, np.array([1.0, 0.0]))
        back = fr.copy()
        back[:, 1] = fr[:, 1] * n[:, 0] - fr[:, 2] * n[:, 1]
        back[:, 2] = fr[:, 1] * n[:, 1] + fr[:, 2] * n[:, 0]
        assert np.abs(back - f).max() < 1e-12


class TestLogMean:
    def test_equal_arguments(self):
        assert ph.log_mean(2.5, 2.5) == 2.5

    def test_known_value(self):
        assert abs(ph.log_mean(1.0, np.e) - (np.e - 1.0)) < 1e-14

    def test_bounds_property(self):
        rng = np.random.default_rng(4)
        a = rng.uniform(1e-3, 10.0, 10**6)
        b = rng.uniform(1e-3, 10.0, 10**6)
        lm = ph.log_mean(a, b)
        assert np.all(lm <= 0.5 * (a + b) + 1e-14)
        assert np.all(lm >= np.minimum(a, b) - 1e-14)

    def test_series_branch_continuity(self):
        a = 1.0
        for jump in (1e-5, 9e-5, 1.1e-4, 1e-3):
            b = a * (1.0 + jump)
            direct = (a - b) / (np.log(a) - np.log(b))
            assert abs(ph.log_mean(a, b) - direct) < 1e-12

    def test_rejects_non_positive(self):
        with pytest.raises(ph.NonAdmissibleStateError):
            ph.log_mean(-1.0, 2.0)


class TestTwoPointFlux:
    def setup_method(self):
        rng = np.random.default_rng(5)
        n = 10**4
        self.ql = random_states(n, rng)
        self.qr = random_states(n, rng)
        theta = rng.uniform(0, 2 * np.pi, n)
        self.normal = np.stack([np.cos(theta), np.sin(theta)], axis=-1)

    def test_consistency(self):
        f = ph.ec_two_point_flux(self.ql, self.ql, self.normal)
        assert np.abs(f - ph.euler_flux(self.ql, self.normal)).max() < 1e-13

    def test_symmetry(self):
        f_lr = ph.ec_two_point_flux(self.ql, self.qr, self.normal)
        f_rl = ph.ec_two_point_flux(self.qr, self.ql, self.normal)
        assert np.abs(f_lr - f_rl).max() == 0.0

    def test_tadmor_entropy_condition(self):
        f = ph.ec_two_point_flux(self.ql, self.qr, self.normal)
        w_jump = ph.entropy_variables(self.qr) - ph.entropy_variables(self.ql)
        psi = lambda q: q[:, 1] * self.normal[:, 0] + q[:, 2] * self.normal[:, 1]
        residual = (w_jump * f).sum(axis=-1) - (psi(self.qr) - psi(self.ql))
        assert np.abs(residual).max() < 1e-10


class TestRiemannSolver:
    def test_zero_jump_is_euler_flux(self):
        q = ph.conservative_from_primitive(1.1, 0.5, -0.2, 0.8)
        f = ph.riemann_solver_es(q, q, np.array([1.0, 0.0]))
        assert np.abs(f - ph.euler_flux(q, np.array([1.0, 0.0]))).max() < 1e-13

    def test_supersonic_uniform_stream(self):
        q = ph.conservative_from_primitive(1.0, 3.0 * np.sqrt(GAMMA), 0.0, 1.0)
        f = ph.riemann_solver_es(q, q, np.array([1.0, 0.0]))
        assert np.abs(f - ph.euler_flux(q, np.array([1.0, 0.0]))).max() < 1e-12

    def test_sod_pair_produces_entropy(self):
        ql = ph.conservative_from_primitive(1.0, 0.0, 0.0, 1.0)
        qr = ph.conservative_from_primitive(0.125, 0.0, 0.0, 0.1)
        n = np.array([1.0, 0.0])
        f = ph.riemann_solver_es(ql, qr, n)
        w_jump = ph.entropy_variables(qr) - ph.entropy_variables(ql)
        production = (w_jump * f).sum() - (qr[1] - ql[1])
        assert production <= 1e-12

    def test_entropy_production_nonpositive_random(self):
        rng = np.random.default_rng(6)
        ql = random_states(5000, rng)
        qr = random_states(5000, rng)
        theta = rng.uniform(0, 2 * np.pi, 5000)
        n = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        f = ph.riemann_solver_es(ql, qr, n)
        w_jump = ph.entropy_variables(qr) - ph.entropy_variables(ql)
        psi_jump = (qr[:, 1] - ql[:, 1]) * n[:, 0] + (qr[:, 2] - ql[:, 2]) * n[:, 1]
        production = (w_jump * f).sum(axis=-1) - psi_jump
        assert production.max() <= 1e-12


class TestViscousFlux:
    def test_uniform_flow_no_flux(self):
        q = ph.conservative_from_primitive(1.0, 0.7, 0.3, 1.0)
        zero = np.zeros(2)
        f = ph.viscous_flux(q, zero, zero, zero, mu=1.0)
        assert np.abs(f).max() == 0.0

    def test_pure_shear(self):
        q = ph.conservative_from_primitive(1.0, 0.5, 0.0, 1.0)
        grad_u = np.array([0.0, 1.0])  # u = y
        grad_v = np.zeros(2)
        f = ph.viscous_flux(q, grad_u, grad_v, np.zeros(2), mu=1.0)
        assert abs(f[1, 1] - 1.0) < 1e-15  # tau_xy
        assert abs(f[2, 0] - 1.0) < 1e-15  # tau_yx
        assert abs(f[1, 0]) < 1e-15 and abs(f[2, 1]) < 1e-15

    def test_heat_flux_coefficient(self):
        q = ph.conservative_from_primitive(1.0, 0.0, 0.0, 1.0)
        grad_t = np.array([2.0, 0.0])
        f = ph.viscous_flux(q, np.zeros(2), np.zeros(2), grad_t, mu=1.0)
        kappa = GAMMA * GAS.gas_constant / ((GAMMA - 1.0) * GAS.prandtl)
        assert abs(f[3, 0] - kappa * 2.0) < 1e-13


class TestArtificialFlux:
    def test_zero_gradients(self):
        f = ph.guermond_popov_flux(1.0, 0.5, -0.2, np.zeros(2), np.zeros(2),
                                   np.zeros(2), np.zeros(2), 1.0, 1.0)
        assert np.abs(f).max() == 0.0

    def test_density_gradient_block(self):
        f = ph.guermond_popov_flux(1.0, 0.0, 0.0, np.array([1.0, 0.0]),
                                   np.zeros(2), np.zeros(2), np.zeros(2),
                                   alpha_a=1.0, mu_a=0.0)
        assert np.allclose(f[0], [1.0, 0.0])
        assert np.abs(f[3]).max() == 0.0

    def test_symmetric_gradient_block(self):
        f = ph.guermond_popov_flux(1.0, 1.0, 0.0, np.zeros(2),
                                   np.array([0.0, 1.0]), np.zeros(2), np.zeros(2),
                                   alpha_a=0.0, mu_a=1.0)
        sym = np.array([[0.0, 0.5], [0.5, 0.0]])
        assert np.allclose(f[1], sym[0]) and np.allclose(f[2], sym[1])
        assert np.allclose(f[3], [0.0, 0.5])

    def test_linearity_in_coefficients(self):
        rng = np.random.default_rng(7)
        args = [rng.standard_normal(2) for _ in range(4)]
        f1 = ph.guermond_popov_flux(1.2, 0.3, -0.4, *args, alpha_a=1.0, mu_a=0.0)
        f2 = ph.guermond_popov_flux(1.2, 0.3, -0.4, *args, alpha_a=0.0, mu_a=1.0)
        f = ph.guermond_popov_flux(1.2, 0.3, -0.4, *args, alpha_a=0.7, mu_a=0.25)
        assert np.abs(0.7 * f1 + 0.25 * f2 - f).max() < 1e-14


class TestArtificialCoefficients:
    def test_zero_sensor(self):
        cfg = ph.ArtificialViscosityConfig(mu0=0.1)
        alpha, mu = ph.artificial_coefficients(0.0, cfg, volume=4.0, order=4)
        assert alpha == 0.0 and mu == 0.0

    def test_resolution_estimate(self):
        assert abs(ph.subcell_resolution(4.0, order=4) - 0.4) < 1e-15

    def test_inviscid_cylinder_constant(self):
        cfg = ph.ArtificialViscosityConfig(mu0=0.1)
        alpha, mu = ph.artificial_coefficients(1.0, cfg, volume=4.0, order=4)
        assert abs(alpha - 0.1 * 0.4) < 1e-15
        assert alpha == mu


class TestBoundaryStates:
    def test_slip_wall_mirrors_normal_velocity(self):
        q = ph.conservative_from_primitive(1.0, 1.0, 1.0, 1.0)
        ghost = ph.boundary_state("slipwall", q, np.array([0.0, 1.0]))
        rho, u, v, p = ph.primitive_from_conservative(ghost)
        assert abs(u - 1.0) < 1e-15 and abs(v + 1.0) < 1e-15
        assert abs(p - 1.0) < 1e-14

    def test_dirichlet_passthrough_and_time_dependence(self):
        q = ph.conservative_from_primitive(1.0, 0.0, 0.0, 1.0)
        target = ph.conservative_from_primitive(2.0, 1.0, 0.0, 3.0)
        ghost = ph.boundary_state("dirichlet", q, np.array([1.0, 0.0]), target)
        assert np.allclose(ghost, target)
        ghost_t = ph.boundary_state("dirichlet", q, np.array([1.0, 0.0]),
                                    lambda t: target * (1.0 + t), t=1.0)
        assert np.allclose(ghost_t, 2.0 * target)

    def test_supersonic_outflow_copies_interior(self):
        q = ph.conservative_from_primitive(1.0, 3.0 * np.sqrt(GAMMA), 0.0, 1.0)
        ghost = ph.boundary_state("outflow", q, np.array([1.0, 0.0]), 0.5)
        assert np.allclose(ghost, q)

    def test_subsonic_outflow_matches_invariant_formulas(self):
        q = ph.conservative_from_primitive(1.0, 0.3, 0.1, 1.0)
        p0 = 0.9
        ghost = ph.boundary_state("outflow", q, np.array([1.0, 0.0]), p0)
        rho0, u0, v0, pg = ph.primitive_from_conservative(ghost)
        assert abs(pg - p0) < 1e-12                      # prescribed pressure
        assert abs(rho0 - 1.0 * (1.0 + (p0 - 1.0) / GAMMA)) < 1e-12
        assert abs(v0 - 0.1) < 1e-12                     # tangential preserved
        c = np.sqrt(GAMMA)
        c0 = np.sqrt(GAMMA * p0 / rho0)
        r_plus = 0.3 + 2.0 * c / (GAMMA - 1.0)
        assert abs(u0 - (r_plus - 2.0 * c0 / (GAMMA - 1.0))) < 1e-12

    def test_unknown_kind_rejected(self):
        q = ph.conservative_from_primitive(1.0, 0.0, 0.0, 1.0)
        with pytest.raises(ph.BoundaryConfigError):
            ph.boundary_state("warp", q, np.array([1.0, 0.0]))


class TestPrimitiveGradientChainRule:
    def test_matches_direct_differentiation(self):
        # manufactured smooth fields: compare chain-rule gradients against
        # analytic derivatives of the primitives
        x = np.linspace(0.2, 0.8, 41)
        rho = 1.0 + 0.3 * np.sin(2 * x)
        u = 0.4 * np.cos(x)
        v = -0.2 * np.sin(x)
        p = 1.0 + 0.2 * np.cos(3 * x)
        drho = 0.6 * np.cos(2 * x)
        du = -0.4 * np.sin(x)
        dv = -0.2 * np.cos(x)
        dp = -0.6 * np.sin(3 * x)

        q = ph.conservative_from_primitive(rho, u, v, p)
        w = ph.entropy_variables(q)
        # analytic gradient of w via finite differences (independent of the
        # chain rule under test), 1D in x
        step = 1e-6
        qp = ph.conservative_from_primitive(rho + step * drho, u + step * du,
                                            v + step * dv, p + step * dp)
        qm = ph.conservative_from_primitive(rho - step * drho, u - step * du,
                                            v - step * dv, p - step * dp)
        dw = (ph.entropy_variables(qp) - ph.entropy_variables(qm)) / (2 * step)
        grad_w = np.zeros(w.shape + (2,))
        grad_w[..., 0] = dw

        out = ph.primitive_gradients_from_entropy(w, grad_w)
        assert np.abs(out["grad_rho"][:, 0] - drho).max() < 1e-6
        assert np.abs(out["grad_u"][:, 0] - du).max() < 1e-6
        assert np.abs(out["grad_v"][:, 0] - dv).max() < 1e-6
        assert np.abs(out["grad_p"][:, 0] - dp).max() < 1e-6
        assert np.abs(out["grad_rhoe"] - out["grad_p"] / (GAMMA - 1.0)).max() < 1e-14
