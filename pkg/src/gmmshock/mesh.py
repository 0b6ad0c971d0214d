"""Cartesian meshes of affine quadrilateral elements.

Elements are stored in row-major order (y-slow, x-fast) and all metric
terms are constants because the mappings are affine: the Jacobian is
(dx/2)(dy/2) and the contravariant vectors are axis-aligned. The 1D test
problems reuse the same machinery with ``ny = 1``.
"""

from dataclasses import dataclass

import numpy as np

from .quadrature import QuadratureRule


class InvalidMeshError(ValueError):
    """Raised when the requested domain or tessellation is degenerate."""


@dataclass(frozen=True)
class CartesianMesh:
    nx: int
    ny: int
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise InvalidMeshError(f"element counts must be >= 1, got {self.nx}x{self.ny}")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise InvalidMeshError("domain has zero or negative area")

    @property
    def n_elements(self) -> int:
        return self.nx * self.ny

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / self.nx

    @property
    def dy(self) -> float:
        return (self.y1 - self.y0) / self.ny

    @property
    def jacobian(self) -> float:
        return 0.25 * self.dx * self.dy

    @property
    def element_volume(self) -> float:
        return self.dx * self.dy

    def contravariant_scales(self):
        """Surface Jacobians (J a^1, J a^2) of the affine map, per axis."""
        return 0.5 * self.dy, 0.5 * self.dx

    def element_index(self, ix: int, iy: int) -> int:
        return iy * self.nx + ix

    def element_origins(self):
        ix = np.arange(self.nx)
        iy = np.arange(self.ny)
        ox = self.x0 + ix * self.dx
        oy = self.y0 + iy * self.dy
        gx, gy = np.meshgrid(ox, oy)  # (ny, nx)
        return gx.ravel(), gy.ravel()

    def node_coordinates(self, rule: QuadratureRule):
        """Physical coordinates of the tensor-product nodes, (E, n, n)."""
        ox, oy = self.element_origins()
        xi = 0.5 * (rule.nodes + 1.0)
        x = ox[:, None, None] + self.dx * xi[None, :, None]
        y = oy[:, None, None] + self.dy * xi[None, None, :]
        return np.broadcast_to(x, (self.n_elements, rule.n_nodes, rule.n_nodes)).copy(), \
            np.broadcast_to(y, (self.n_elements, rule.n_nodes, rule.n_nodes)).copy()

    def neighbors(self, periodic_x: bool = False, periodic_y: bool = False):
        """Neighbor element indices per side, -1 at physical boundaries.

        Returns a dict side -> (E,) array; every interior face therefore
        appears exactly twice, once in each owner's table.
        """
        ix, iy = np.meshgrid(np.arange(self.nx), np.arange(self.ny))
        ix, iy = ix.ravel(), iy.ravel()

        def wrap(i, count, periodic):
            if periodic:
                return i % count
            out = i.copy()
            out[(i < 0) | (i >= count)] = -1
            return out

        def idx(jx, jy):
            good = (jx >= 0) & (jy >= 0)
            out = np.where(good, jy * self.nx + jx, -1)
            return out

        return {
            "left": idx(wrap(ix - 1, self.nx, periodic_x), iy),
            "right": idx(wrap(ix + 1, self.nx, periodic_x), iy),
            "bottom": idx(ix, wrap(iy - 1, self.ny, periodic_y)),
            "top": idx(ix, wrap(iy + 1, self.ny, periodic_y)),
        }


def build_cartesian_mesh(nx: int, ny: int, x0: float, x1: float, y0: float, y1: float) -> CartesianMesh:
    return CartesianMesh(nx=nx, ny=ny, x0=x0, x1=x1, y0=y0, y1=y1)
