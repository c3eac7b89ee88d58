"""Parameter-domain grids and sampled surfaces."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidData


@dataclass(frozen=True)
class DomainGrid:
    """Rectangle [x_a, x_b] x [-y_max, y_max] with (nx, ny) nodes.

    ``ny`` must be odd so the real axis is a grid row, and the base point
    ``x0`` must coincide with an x node.
    """

    x_range: tuple
    y_max: float
    nx: int
    ny: int
    x0: float = 0.0

    def __post_init__(self):
        if self.ny % 2 != 1 or self.ny < 3 or self.nx < 2:
            raise InvalidData("need nx >= 2 and odd ny >= 3")
        if not self.x_range[0] <= self.x0 <= self.x_range[1]:
            raise InvalidData("base point outside the grid")
        xs = self.xs
        if np.min(np.abs(xs - self.x0)) > 1e-12 * max(1.0, abs(self.x0)):
            raise InvalidData(f"base point x0={self.x0} is not a grid node")

    @property
    def xs(self):
        return np.linspace(self.x_range[0], self.x_range[1], self.nx)

    @property
    def ys(self):
        return np.linspace(-self.y_max, self.y_max, self.ny)

    @property
    def hx(self):
        return (self.x_range[1] - self.x_range[0]) / (self.nx - 1)

    @property
    def hy(self):
        return 2 * self.y_max / (self.ny - 1)

    @property
    def i0(self):
        return int(np.argmin(np.abs(self.xs - self.x0)))

    @property
    def j0(self):
        return self.ny // 2

    def z(self):
        """Complex node coordinates, shape (nx, ny)."""
        return self.xs[:, None] + 1j * self.ys[None, :]

    def refined(self, factor=2):
        """Same rectangle with the spacing divided by ``factor``."""
        return DomainGrid(self.x_range, self.y_max, (self.nx - 1) * factor + 1,
                          (self.ny - 1) * factor + 1, self.x0)

    def to_json(self):
        return {"x_range": list(self.x_range), "y_max": self.y_max, "nx": self.nx,
                "ny": self.ny, "x0": self.x0}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(obj["x_range"]), float(obj["y_max"]), int(obj["nx"]), int(obj["ny"]),
                   float(obj.get("x0", 0.0)))


@dataclass
class SurfaceGrid:
    """Immersion sampled on a :class:`DomainGrid`; arrays are indexed [i_x, j_y]."""

    grid: DomainGrid
    points: np.ndarray            # (nx, ny, 3)
    normals: np.ndarray           # (nx, ny, 3)
    frames: np.ndarray | None = None   # optional (nx, ny, 2N+1, 2, 2) coefficients
    metadata: dict = field(default_factory=dict)

    def on_axis(self):
        """Points and normals along the real axis row."""
        j = self.grid.j0
        return self.points[:, j], self.normals[:, j]

    def scaled(self, factor):
        return SurfaceGrid(self.grid, factor * self.points, self.normals.copy(), self.frames,
                           dict(self.metadata, scale=factor))
