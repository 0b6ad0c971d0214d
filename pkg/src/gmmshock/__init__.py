"""2D discontinuous Galerkin compressible-flow solver whose shock
stabilization is driven by an unsupervised Gaussian-mixture sensor, with
modal and integral reference sensors, sub-cell finite-volume blending,
entropy-stable artificial viscosity, and a model-selection/timing
toolchain."""

from .config import CaseConfig, ConfigError
from .mesh import CartesianMesh, build_cartesian_mesh
from .physics import GasModel
from .quadrature import build_lobatto_rule, build_operator_set
from .sensors import SensorConfig
from .spatial import SpatialDiscretization

__all__ = [
    "CaseConfig", "ConfigError", "CartesianMesh", "build_cartesian_mesh",
    "GasModel", "build_lobatto_rule", "build_operator_set", "SensorConfig",
    "SpatialDiscretization",
]

__version__ = "0.1.0"
