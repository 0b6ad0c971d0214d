"""Shock sensors: feature extraction, the clustering-based sensor, the
modal and integral reference sensors, the sin-ramp scaling and the
orchestration policy (update cadence, warm starts, reseeding).

All sensors produce nodal and element values in [0, 1]; the element value
is the maximum over the element's nodes, so flagging a single solution
point marks the whole element. The clustering sensor orders the fitted
components by centroid distance to the feature-space origin and uses the
rank of each node's most responsible component, normalized by the number
of surviving components.
"""

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import clustering as cl
from . import physics as ph

logger = logging.getLogger("gmmshock")

DEGENERATE_RANGE = 1e-12

FEATURE_CHOICES = ("gradp2_divv2", "divv2", "machp_divv2", "mach1_divv2")
MODAL_VARIABLES = ("p_rho", "p", "rho")
INTEGRAL_VARIABLES = ("gradp_norm", "divv2", "gradrho_nv")


@dataclass(frozen=True)
class SensorConfig:
    kind: str = "gmm"                   # gmm | modal | integral | none
    features: str = "gradp2_divv2"
    clusters: int = 4
    s0: float = -2.5
    ds: float = 1.0
    interval: int = 10
    alpha_max: float = 0.5
    modal_variable: str = "p_rho"
    integral_variable: str = "gradp_norm"

    def __post_init__(self):
        if self.kind not in ("gmm", "modal", "integral", "none"):
            raise ValueError(f"unknown sensor kind {self.kind!r}")
        if self.interval < 1:
            raise ValueError("sensor update interval must be >= 1")
        if self.clusters < 1:
            raise ValueError("cluster count must be >= 1")
        if self.kind in ("modal", "integral") and self.ds <= 0.0:
            raise ValueError("ramp width must be positive")
        if self.features not in FEATURE_CHOICES:
            raise ValueError(f"unknown feature choice {self.features!r}")


@dataclass
class SensorField:
    """Nodal values (E, n, n) and their element-wise maxima (E,)."""

    nodal: np.ndarray
    element: np.ndarray

    @classmethod
    def from_nodal(cls, nodal):
        return cls(nodal=nodal, element=nodal.max(axis=(1, 2)))

    @classmethod
    def zeros(cls, shape):
        return cls(nodal=np.zeros(shape), element=np.zeros(shape[0]))

    def flagged_fraction(self, threshold: float = 0.5) -> float:
        return float((self.nodal > threshold).mean())


def _minmax_column(col):
    lo = col.min()
    rng = col.max() - lo
    if rng < DEGENERATE_RANGE:
        return np.zeros_like(col)
    return (col - lo) / rng


def extract_features(prims: dict, choice: str, gas: ph.GasModel = ph.GasModel()):
    """Feature matrix (N, v) in [0, 1], rows in nodal storage order.

    ``prims`` is the primitive/gradient bundle from
    ``physics.primitive_gradients_from_entropy``; columns with a value
    range below 1e-12 are zeroed out as degenerate.
    """
    div_v = prims["grad_u"][..., 0] + prims["grad_v"][..., 1]
    divv2 = (div_v ** 2).ravel()
    if choice == "divv2":
        cols = [divv2]
    elif choice == "gradp2_divv2":
        gradp2 = (prims["grad_p"] ** 2).sum(axis=-1).ravel()
        cols = [gradp2, divv2]
    elif choice == "machp_divv2":
        gradp = prims["grad_p"]
        norm = np.sqrt((gradp ** 2).sum(axis=-1))
        safe = np.where(norm > DEGENERATE_RANGE, norm, 1.0)
        a = ph.sound_speed(prims["rho"], prims["p"], gas)
        vdotn = (prims["u"] * gradp[..., 0] + prims["v"] * gradp[..., 1]) / safe
        cols = [np.where(norm > DEGENERATE_RANGE, vdotn / a, 0.0).ravel(), divv2]
    elif choice == "mach1_divv2":
        mach = np.sqrt(prims["u"] ** 2 + prims["v"] ** 2) / ph.sound_speed(prims["rho"], prims["p"], gas)
        cols = [np.maximum(0.0, mach - 1.0).ravel(), divv2]
    else:
        raise ValueError(f"unknown feature choice {choice!r}")
    return np.column_stack([_minmax_column(c) for c in cols])


def scale_sensor(raw, s0: float, ds: float):
    """Piecewise sin ramp mapping raw values onto [0, 1].

    Zero below s0 - ds, one above s0 + ds, and
    (1 + sin(pi (s' - s0) / (2 ds))) / 2 in between; continuous at both
    joints and exactly 1/2 at the center.
    """
    raw = np.asarray(raw, dtype=float)
    ramp = 0.5 * (1.0 + np.sin(0.5 * np.pi * np.clip((raw - s0) / ds, -1.0, 1.0)))
    return np.where(raw < s0 - ds, 0.0, np.where(raw > s0 + ds, 1.0, ramp))


def modal_sensor(u_nodal, ops, weights_2d):
    """Raw modal smoothness estimate per element.

    Transforms nodal values to Legendre coefficients, keeps every mode
    whose index reaches the highest order in at least one direction, and
    returns log10 of the energy fraction held by those modes (quadrature
    inner products). Elements with no top-mode content give -inf.
    """
    t = ops.to_legendre
    order = ops.order
    coeffs = np.matmul(np.matmul(t, u_nodal), t.T)
    masked = np.zeros_like(coeffs)
    masked[:, order, :] = coeffs[:, order, :]
    masked[:, :, order] = coeffs[:, :, order]
    # <u_h, u_h>_W = sum_ab C_ab (g C g)_ab with g the 1D quadrature Gram
    # of the Legendre basis; identical to reconstructing u_h nodally
    g = ops.legendre_gram
    num = np.einsum("eab,eab->e", masked, np.matmul(np.matmul(g, masked), g))
    den = np.einsum("ij,eij->e", weights_2d, u_nodal * u_nodal)
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = np.log10(num / den)
    # fields whose top modes vanish keep roundoff-level energy after the
    # transform; anything below eps^2-scale is the exact-zero sentinel
    sentinel = (den <= 0.0) | (num <= den * 1e-24)
    return np.where(sentinel, -np.inf, raw)


def modal_variable(prims: dict, choice: str):
    if choice == "p_rho":
        return prims["p"] * prims["rho"]
    if choice == "p":
        return prims["p"]
    if choice == "rho":
        return prims["rho"]
    raise ValueError(f"unknown modal variable {choice!r}")


def integral_sensor(u_nodal, weights_2d, jacobian: float, volume: float):
    """Raw integral estimate sqrt(<u, u>) / V per element."""
    inner = jacobian * np.einsum("ij,eij->e", weights_2d, u_nodal * u_nodal)
    return np.sqrt(inner) / volume


def integral_variable(prims: dict, choice: str):
    if choice == "gradp_norm":
        return np.sqrt((prims["grad_p"] ** 2).sum(axis=-1))
    if choice == "divv2":
        return (prims["grad_u"][..., 0] + prims["grad_v"][..., 1]) ** 2
    if choice == "gradrho_nv":
        speed = np.sqrt(prims["u"] ** 2 + prims["v"] ** 2)
        safe = np.where(speed > DEGENERATE_RANGE, speed, 1.0)
        proj = (prims["grad_rho"][..., 0] * prims["u"] + prims["grad_rho"][..., 1] * prims["v"]) / safe
        return np.where(speed > DEGENERATE_RANGE, proj, 0.0)
    raise ValueError(f"unknown integral variable {choice!r}")


def _order_by_origin_distance(means):
    dist = np.sqrt((means ** 2).sum(axis=1))
    return np.lexsort((means[:, 0], dist))


def gmm_sensor(features, nodal_shape, config: SensorConfig, previous=None, rng=None,
               n_threads: int = 1):
    """Clustering sensor: fit, order clusters, rank each node's component.

    ``previous`` is the warm-start mixture from the last evaluation; slots
    it lost to deletions are reseeded with random centroids and spherical
    covariances, and a missing mixture triggers the k-means cold start.
    Returns (SensorField, mixture, diagnostics); a clustering failure
    degrades to an all-zero field and the run goes on.
    """
    rng = np.random.default_rng(rng)
    if not np.any(features):
        return SensorField.zeros(nodal_shape), None, cl.FitDiagnostics()
    try:
        mixture = _initial_mixture(features, config, previous, rng)
        mixture, diag = cl.gmm_fit(features, mixture, n_threads=n_threads)
        _, resp = cl.gmm_estep(features, mixture, n_threads=n_threads)
    except cl.ClusteringError as exc:
        logger.warning("clustering sensor failed (%s); returning zero sensor", exc)
        return SensorField.zeros(nodal_shape), None, cl.FitDiagnostics()
    order = _order_by_origin_distance(mixture.means)
    rank = np.empty(mixture.n_clusters)
    rank[order] = np.arange(mixture.n_clusters)
    if mixture.n_clusters > 1:
        values = rank[resp.argmax(axis=1)] / (mixture.n_clusters - 1)
    else:
        values = np.zeros(features.shape[0])
    return SensorField.from_nodal(values.reshape(nodal_shape)), mixture, diag


def _initial_mixture(features, config: SensorConfig, previous, rng):
    if previous is None:
        return cl.mixture_from_kmeans(features, config.clusters, rng=rng)
    mixture = previous
    missing = config.clusters - mixture.n_clusters
    if missing <= 0:
        return mixture.copy()
    v = mixture.n_features
    new_means = rng.random((missing, v))
    spherical = 0.01 * np.eye(v) + mixture.regularization * np.eye(v)
    means = np.vstack([mixture.means, new_means])
    covs = np.vstack([mixture.covariances, np.broadcast_to(spherical, (missing, v, v))])
    weights = np.concatenate([mixture.weights, np.full(missing, 1.0 / config.clusters)])
    weights /= weights.sum()
    return cl.GaussianMixture(weights, means, covs, mixture.regularization)


@dataclass
class EvaluationRecord:
    step: int
    sensor_seconds: float
    gradient_seconds: float


@dataclass
class SensorOrchestrator:
    """Cadence policy around the sensors: refit every ``interval`` steps,
    reuse the cached field in between, and keep the last mixture as the
    warm start for the next fit. Wall time of each evaluation is recorded
    for the cost report (the shared gradient computation is timed apart
    from the sensor-specific work).
    """

    config: SensorConfig
    disc: object
    gas: ph.GasModel = ph.GasModel()
    seed: int = 0
    n_threads: int = 1
    cached: SensorField = None
    mixture: cl.GaussianMixture = None
    records: list = field(default_factory=list)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)

    def evaluate(self, step: int, q, t: float) -> SensorField:
        if self.cached is not None and step % self.config.interval != 0:
            return self.cached
        if self.config.kind == "none":
            self.cached = SensorField.zeros(q.shape[:3])
            self.records.append(EvaluationRecord(step, 0.0, 0.0))
            return self.cached

        t0 = time.perf_counter()
        grad_w = self.disc.compute_gradients(q, t)
        w = ph.entropy_variables(q, self.gas, check=False)
        prims = ph.primitive_gradients_from_entropy(w, grad_w, self.gas)
        t1 = time.perf_counter()

        if self.config.kind == "gmm":
            features = extract_features(prims, self.config.features, self.gas)
            result, mixture, _ = gmm_sensor(
                features, q.shape[:3], self.config, previous=self.mixture,
                rng=self.rng, n_threads=self.n_threads)
            if mixture is not None:
                self.mixture = mixture
        elif self.config.kind == "modal":
            u = modal_variable(prims, self.config.modal_variable)
            raw = modal_sensor(u, self.disc.ops, self.disc.weights_2d)
            result = _element_field(scale_sensor(raw, self.config.s0, self.config.ds), q.shape[:3])
        else:
            u = integral_variable(prims, self.config.integral_variable)
            raw = integral_sensor(u, self.disc.weights_2d, self.disc.mesh.jacobian,
                                  self.disc.mesh.element_volume)
            result = _element_field(scale_sensor(raw, self.config.s0, self.config.ds), q.shape[:3])
        t2 = time.perf_counter()
        self.records.append(EvaluationRecord(step, t2 - t1, t1 - t0))
        self.cached = result
        return result

    @property
    def sensor_seconds(self) -> float:
        return sum(r.sensor_seconds for r in self.records)

    @property
    def gradient_seconds(self) -> float:
        return sum(r.gradient_seconds for r in self.records)


def _element_field(element_values, nodal_shape):
    nodal = np.broadcast_to(element_values[:, None, None], nodal_shape).copy()
    return SensorField(nodal=nodal, element=np.asarray(element_values, dtype=float))
