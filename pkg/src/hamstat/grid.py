"""Cartesian masked grids on the closed unit disc.

Nodes sit at cell-centred positions ``((i + 1/2) h, (j + 1/2) h)`` so that the
origin is never a node. Nodes strictly inside the disc are unknowns; the
*ring* is the set of nodes outside the disc that touch an interior node
(8-neighbourhood) and carries Dirichlet data projected radially from the
boundary circle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.interpolate import RegularGridInterpolator


class DiscGrid:
    """Square node array covering the unit disc with spacing ``h``.

    Parameters
    ----------
    h : float
        Mesh size.
    singularities : sequence of complex, optional
        Points around which :attr:`near_singularity` is flagged (radius ``2h``).
    """

    def __init__(self, h, singularities=()):
        if not 0 < h <= 0.25:
            raise ValueError(f"mesh size must lie in (0, 1/4], got {h}")
        self.h = float(h)
        n = int(np.ceil(1.0 / h)) + 2
        self.n = n
        self.x = (np.arange(-n, n) + 0.5) * self.h
        self.X, self.Y = np.meshgrid(self.x, self.x, indexing="ij")
        self.Z = self.X + 1j * self.Y
        r = np.abs(self.Z)
        self.inside = r < 1.0
        near = ndimage.binary_dilation(self.inside, structure=np.ones((3, 3), bool))
        self.ring = near & ~self.inside
        self.active = self.inside | self.ring
        self.singularities = np.atleast_1d(np.asarray(singularities, dtype=complex))
        mask = np.zeros(self.Z.shape, bool)
        for p in self.singularities:
            mask |= np.abs(self.Z - p) < 2 * self.h
        self.near_singularity = mask
        self.index = -np.ones(self.Z.shape, dtype=np.int64)
        self.index[self.inside] = np.arange(int(self.inside.sum()))

    @property
    def shape(self):
        return self.Z.shape

    @property
    def n_unknowns(self):
        return int(self.inside.sum())

    def ring_values(self, trace):
        """Radially projected boundary data on ring nodes.

        ``trace`` is a callable of the boundary angle returning complex values.
        """
        theta = np.angle(self.Z[self.ring])
        return np.asarray(trace(theta), dtype=complex)

    def distance_to(self, points):
        """Distance from every node to the nearest of ``points``."""
        d = np.full(self.shape, np.inf)
        for p in np.atleast_1d(points):
            d = np.minimum(d, np.abs(self.Z - p))
        return d

    def interpolator(self, values):
        """Bilinear interpolant of a full node array (complex allowed)."""
        values = np.asarray(values)
        re = RegularGridInterpolator((self.x, self.x), values.real, bounds_error=False)
        if np.iscomplexobj(values):
            im = RegularGridInterpolator((self.x, self.x), values.imag, bounds_error=False)
            return lambda z: re(_pts(z)) + 1j * im(_pts(z))
        return lambda z: re(_pts(z))

    def refine(self):
        return DiscGrid(self.h / 2, self.singularities)


def _pts(z):
    z = np.asarray(z, dtype=complex)
    return np.stack([z.real.ravel(), z.imag.ravel()], axis=-1)


@dataclass
class ScalarField:
    """Complex value per grid node; ``nan`` outside the active node set."""

    grid: DiscGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise ValueError("field shape does not match its grid")

    @classmethod
    def from_function(cls, grid, func, where=None):
        """Sample ``func(z)`` on active nodes (or on ``where``)."""
        where = grid.active if where is None else where
        vals = np.full(grid.shape, np.nan + 0j)
        vals[where] = func(grid.Z[where])
        return cls(grid, vals)

    def interior(self):
        return self.values[self.grid.inside]

    def at(self, z):
        return self.grid.interpolator(np.nan_to_num(self.values))(z).reshape(np.shape(z))

    def edge_differences(self):
        """Differences across the x- and y-edges that touch an interior node.

        Returns ``(dx, dy, mx, my)`` where ``dx[i, j] = u[i+1, j] - u[i, j]`` and
        ``mx`` flags the edges that are used.
        """
        u = self.values
        g = self.grid
        dx = u[1:, :] - u[:-1, :]
        dy = u[:, 1:] - u[:, :-1]
        mx = (g.inside[1:, :] | g.inside[:-1, :]) & g.active[1:, :] & g.active[:-1, :]
        my = (g.inside[:, 1:] | g.inside[:, :-1]) & g.active[:, 1:] & g.active[:, :-1]
        return dx, dy, mx, my

    def dirichlet(self):
        """Discrete ``1/2 * int |grad u|^2`` as a sum over grid edges."""
        dx, dy, mx, my = self.edge_differences()
        return 0.5 * (np.sum(np.abs(dx[mx]) ** 2) + np.sum(np.abs(dy[my]) ** 2))

    def gradient(self):
        """Centred-difference gradient at interior nodes (``nan`` elsewhere)."""
        u = self.values
        h = self.grid.h
        ux = np.full(u.shape, np.nan + 0j)
        uy = np.full(u.shape, np.nan + 0j)
        ux[1:-1, :] = (u[2:, :] - u[:-2, :]) / (2 * h)
        uy[:, 1:-1] = (u[:, 2:] - u[:, :-2]) / (2 * h)
        ux[~self.grid.inside] = np.nan
        uy[~self.grid.inside] = np.nan
        return ux, uy
