import numpy as np
import pytest

from gmmshock import physics as ph
from gmmshock import sensors as sn
from gmmshock.mesh import build_cartesian_mesh
from gmmshock.quadrature import build_lobatto_rule, build_operator_set
from gmmshock.spatial import SpatialDiscretization

GAS = ph.GasModel()


def periodic_disc(nx=4, ny=4, order=3, x1=1.0):
    mesh = build_cartesian_mesh(nx, ny, 0.0, x1, 0.0, 1.0)
    ops = build_operator_set(build_lobatto_rule(order))
    return SpatialDiscretization(mesh, ops, GAS, periodic_x=True, periodic_y=True)


def prims_of(disc, q, t=0.0):
    grad_w = disc.compute_gradients(q, t)
    w = ph.entropy_variables(q, check=False)
    return ph.primitive_gradients_from_entropy(w, grad_w)


class TestFeatures:
    def test_uniform_flow_degenerate(self):
        disc = periodic_disc()
        shape = (disc.mesh.n_elements, disc.n, disc.n)
        q = ph.conservative_from_primitive(np.full(shape, 1.0), np.full(shape, 0.5),
                                           np.zeros(shape), np.full(shape, 1.0))
        feats = sn.extract_features(prims_of(disc, q), "gradp2_divv2")
        assert feats.shape == (np.prod(shape), 2)
        assert np.abs(feats).max() == 0.0

    def test_tanh_pressure_profile_peaks_at_one(self):
        mesh = build_cartesian_mesh(16, 1, 0.0, 1.0, 0.0, 1.0)
        ops = build_operator_set(build_lobatto_rule(4))
        passthrough = {s: (lambda x, y, t, qi, n: qi)
                       for s in ("left", "right", "bottom", "top")}
        disc = SpatialDiscretization(mesh, ops, GAS, boundary=passthrough)
        p = 1.0 + 0.5 * np.tanh((disc.x - 0.5) / 0.05)
        shape = p.shape
        q = ph.conservative_from_primitive(np.full(shape, 1.0), np.zeros(shape),
                                           np.zeros(shape), p)
        feats = sn.extract_features(prims_of(disc, q), "gradp2_divv2")
        col = feats[:, 0]
        assert abs(col.max() - 1.0) < 1e-14  # min-max endpoint
        # the unit value sits at the steepest part of the profile
        assert abs(disc.x.ravel()[col.argmax()] - 0.5) < disc.mesh.dx / 2
        steepest = np.abs(disc.x.ravel() - 0.5).argmin()
        assert col[steepest] > 0.8

    def test_subsonic_mach_feature_all_zero(self):
        disc = periodic_disc()
        shape = (disc.mesh.n_elements, disc.n, disc.n)
        u = np.full(shape, 0.5 * np.sqrt(GAS.gamma))  # M = 0.5 uniformly
        rho = np.full(shape, 1.0) + 0.01 * np.sin(2 * np.pi * disc.x)
        q = ph.conservative_from_primitive(rho, u, np.zeros(shape), np.full(shape, 1.0))
        feats = sn.extract_features(prims_of(disc, q), "mach1_divv2")
        assert np.abs(feats[:, 0]).max() == 0.0

    def test_affine_column_transform_invariance(self):
        # affine rescaling of a raw feature column is removed exactly by the
        # min-max normalization, so the sensor output cannot change
        rng = np.random.default_rng(40)
        raw = rng.random((500, 2))
        a = sn._minmax_column(raw[:, 0])
        b = sn._minmax_column(3.7 * raw[:, 0] + 1.2)
        assert np.abs(a - b).max() < 1e-12


class TestScaleSensor:
    def test_far_below_center(self):
        assert sn.scale_sensor(-10.0, s0=-2.5, ds=1.0) == 0.0
        assert sn.scale_sensor(np.array(-2.5 - 2.0), -2.5, 1.0) == 0.0

    def test_center_is_half(self):
        assert abs(sn.scale_sensor(-2.5, -2.5, 1.0) - 0.5) < 1e-15

    def test_upper_joint_continuous(self):
        assert sn.scale_sensor(-1.5, -2.5, 1.0) == 1.0
        just_below = sn.scale_sensor(-1.5 - 1e-9, -2.5, 1.0)
        assert abs(just_below - 1.0) < 1e-8

    def test_monotone_non_decreasing(self):
        raw = np.linspace(-8.0, 2.0, 1001)
        s = sn.scale_sensor(raw, -2.5, 1.0)
        assert np.all(np.diff(s) >= -1e-15)
        assert np.all((s >= 0.0) & (s <= 1.0))

    def test_minus_infinity_maps_to_zero(self):
        assert sn.scale_sensor(-np.inf, -2.5, 1.0) == 0.0


class TestModalSensor:
    def test_constant_field_sentinel(self):
        disc = periodic_disc(nx=2, ny=2, order=4)
        u = np.ones((4, 5, 5))
        raw = sn.modal_sensor(u, disc.ops, disc.weights_2d)
        assert np.all(np.isneginf(raw))
        assert np.all(sn.scale_sensor(raw, -2.5, 1.0) == 0.0)

    def test_pure_top_mode_ratio_one(self):
        disc = periodic_disc(nx=1, ny=1, order=4)
        top = np.polynomial.legendre.legval(disc.ops.rule.nodes, [0, 0, 0, 0, 1])
        u = np.broadcast_to(top[:, None], (1, 5, 5)).copy()
        raw = sn.modal_sensor(u, disc.ops, disc.weights_2d)
        assert abs(raw[0]) < 1e-12           # log10(1) = 0
        assert sn.scale_sensor(raw, -2.5, 1.0)[0] == 1.0

    def test_smooth_low_mode_scaled_to_zero(self):
        disc = periodic_disc(nx=1, ny=1, order=6)
        u = 2.0 + np.add.outer(disc.ops.rule.nodes, disc.ops.rule.nodes)
        raw = sn.modal_sensor(u[None], disc.ops, disc.weights_2d)
        assert sn.scale_sensor(raw, -2.5, 1.0)[0] == 0.0


class TestIntegralSensor:
    def test_uniform_flow_zero(self):
        disc = periodic_disc()
        u = np.zeros((disc.mesh.n_elements, disc.n, disc.n))
        raw = sn.integral_sensor(u, disc.weights_2d, disc.mesh.jacobian,
                                 disc.mesh.element_volume)
        assert np.abs(raw).max() == 0.0

    def test_constant_integrand_closed_form(self):
        disc = periodic_disc(nx=2, ny=2)
        c = 1.7
        u = np.full((4, disc.n, disc.n), c)
        raw = sn.integral_sensor(u, disc.weights_2d, disc.mesh.jacobian,
                                 disc.mesh.element_volume)
        expected = c / np.sqrt(disc.mesh.element_volume)
        assert np.abs(raw - expected).max() < 1e-12


class TestGmmSensor:
    def make_features(self, rng, n=2000):
        # three concentric groups: near origin, mid, far
        labels = rng.integers(0, 3, n)
        radius = np.array([0.05, 0.45, 0.9])[labels]
        feats = radius[:, None] + 0.02 * rng.standard_normal((n, 2))
        return np.clip(feats, 0.0, 1.0), labels

    def test_nearest_origin_cluster_is_zero(self):
        rng = np.random.default_rng(41)
        feats, labels = self.make_features(rng)
        cfg = sn.SensorConfig(kind="gmm", clusters=3, interval=1)
        field, mixture, _ = sn.gmm_sensor(feats, (feats.shape[0], 1, 1), cfg, rng=rng)
        values = field.nodal.ravel()
        assert np.all(values[labels == 0] == 0.0)
        assert np.all(values[labels == 2] == 1.0)
        assert abs(np.median(values[labels == 1]) - 0.5) < 1e-12

    def test_degenerate_features_zero_sensor(self):
        cfg = sn.SensorConfig(kind="gmm", clusters=4)
        field, mixture, _ = sn.gmm_sensor(np.zeros((100, 2)), (100, 1, 1), cfg, rng=0)
        assert np.abs(field.nodal).max() == 0.0
        assert mixture is None

    def test_element_value_is_nodal_max(self):
        rng = np.random.default_rng(42)
        feats, _ = self.make_features(rng, n=1800)
        cfg = sn.SensorConfig(kind="gmm", clusters=3)
        field, _, _ = sn.gmm_sensor(feats, (50, 6, 6), cfg, rng=rng)
        assert np.array_equal(field.element, field.nodal.max(axis=(1, 2)))

    def test_reproducible_given_seed(self):
        rng_data = np.random.default_rng(43)
        feats, _ = self.make_features(rng_data)
        cfg = sn.SensorConfig(kind="gmm", clusters=4)
        f1, _, _ = sn.gmm_sensor(feats, (feats.shape[0], 1, 1), cfg, rng=7)
        f2, _, _ = sn.gmm_sensor(feats, (feats.shape[0], 1, 1), cfg, rng=7)
        assert np.array_equal(f1.nodal, f2.nodal)


class TestOrchestrator:
    def setup_case(self, kind="gmm", interval=10):
        disc = periodic_disc(nx=4, ny=2, order=3)
        shape = (disc.mesh.n_elements, disc.n, disc.n)
        rho = 1.0 + 0.3 * np.exp(-((disc.x - 0.5) ** 2) / 0.01)
        q = ph.conservative_from_primitive(rho, np.zeros(shape), np.zeros(shape),
                                           1.0 + 0.5 * (rho - 1.0))
        cfg = sn.SensorConfig(kind=kind, clusters=3, interval=interval)
        orch = sn.SensorOrchestrator(cfg, disc, GAS, seed=5)
        return disc, q, orch

    def test_cadence_single_fit_per_interval(self):
        _, q, orch = self.setup_case(interval=10)
        for step in range(10):
            orch.evaluate(step, q, 0.0)
        assert len(orch.records) == 1
        assert orch.records[0].step == 0

    def test_refit_on_interval_boundary(self):
        _, q, orch = self.setup_case(interval=5)
        for step in range(11):
            orch.evaluate(step, q, 0.0)
        assert [r.step for r in orch.records] == [0, 5, 10]

    def test_cold_start_uses_kmeans_then_warm(self):
        _, q, orch = self.setup_case(interval=1)
        assert orch.mixture is None
        orch.evaluate(0, q, 0.0)
        first = orch.mixture
        assert first is not None
        orch.evaluate(1, q, 0.0)
        assert orch.mixture is not None

    def test_deleted_cluster_reseeded_on_next_fit(self):
        disc, q, orch = self.setup_case(interval=1)
        orch.evaluate(0, q, 0.0)
        # force a deletion artifact: drop one cluster from the cache
        import gmmshock.clustering as cl
        m = orch.mixture
        orch.mixture = cl.GaussianMixture(m.weights[:-1] / m.weights[:-1].sum(),
                                          m.means[:-1], m.covariances[:-1],
                                          m.regularization)
        before = orch.mixture.n_clusters
        orch.evaluate(1, q, 0.0)
        assert before == orch.config.clusters - 1
        assert orch.mixture.n_clusters <= orch.config.clusters

    def test_none_sensor_zero_field_and_cost(self):
        _, q, orch = self.setup_case(kind="none")
        field = orch.evaluate(0, q, 0.0)
        assert np.abs(field.nodal).max() == 0.0
        assert orch.sensor_seconds == 0.0

    def test_modal_and_integral_element_fields(self):
        for kind in ("modal", "integral"):
            _, q, orch = self.setup_case(kind=kind, interval=1)
            field = orch.evaluate(0, q, 0.0)
            assert np.all(field.nodal >= 0.0) and np.all(field.nodal <= 1.0)
            assert np.array_equal(field.element, field.nodal.max(axis=(1, 2)))
            spread = field.nodal.max(axis=(1, 2)) - field.nodal.min(axis=(1, 2))
            assert np.abs(spread).max() == 0.0  # element-constant by design


class TestConfigValidation:
    def test_bad_kind(self):
        with pytest.raises(ValueError):
            sn.SensorConfig(kind="psychic")

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            sn.SensorConfig(interval=0)

    def test_bad_ramp_width(self):
        with pytest.raises(ValueError):
            sn.SensorConfig(kind="modal", ds=0.0)
