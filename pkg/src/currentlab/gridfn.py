"""Tensor-product node grids and grid-sampled functions used by the
finite-dimensional representation operators.

A GridFunction stores one node set per cell (each a quadrature rule on
R^d) and complex values on the tensor product of the node sets.  Diagonal
operators act on the values; dilation letters act by transporting the node
sets themselves (so change of variables is exact on the rule), and kernel
letters replace values by quadrature sums back onto a target node set."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass
class CellGrid:
    """Quadrature rule on R^d: nodes (N, d), weights (N,)."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.shape[0] != self.weights.shape[0]:
            raise DomainError("nodes/weights length mismatch")

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def d(self) -> int:
        return self.nodes.shape[1]

    @property
    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.nodes, axis=1)


def grid_1d(radius: float, count: int) -> CellGrid:
    """Two-panel Gauss-Legendre rule on [-radius, radius] clustered toward the
    origin (where the representation-space weight |xi|^(lam-1) is singular)."""
    if count % 2:
        raise DomainError("count must be even")
    x, w = np.polynomial.legendre.leggauss(count // 2)
    pos = 0.5 * radius * (x + 1.0)
    wpos = 0.5 * radius * w
    nodes = np.concatenate((-pos[::-1], pos))[:, None]
    weights = np.concatenate((wpos[::-1], wpos))
    return CellGrid(nodes, weights)


def grid_1d_sqrt(radius: float, count: int) -> CellGrid:
    """Gauss-Legendre rule in the variable t = sqrt(|xi|) (xi = sign t^2):
    the inversion kernel oscillates linearly in t, and the |xi|^(lam-1)
    norm weight becomes t^(2 lam - 1), regular at the origin for lam >= 1/2.
    The natural rule for the kernel-letter operators."""
    if count % 2:
        raise DomainError("count must be even")
    x, w = np.polynomial.legendre.leggauss(count // 2)
    t = 0.5 * math.sqrt(radius) * (x + 1.0)
    wt = 0.5 * math.sqrt(radius) * w
    pos = t * t
    wpos = 2.0 * t * wt
    nodes = np.concatenate((-pos[::-1], pos))[:, None]
    weights = np.concatenate((wpos[::-1], wpos))
    return CellGrid(nodes, weights)


def grid_2d(radius: float, radial_count: int, angular_count: int) -> CellGrid:
    """Polar rule on the disk of the given radius: Gauss-Legendre radially
    (weight r from the area element), trapezoid in angle (exact for
    trigonometric polynomials)."""
    x, w = np.polynomial.legendre.leggauss(radial_count)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * w * r
    th = 2.0 * np.pi * np.arange(angular_count) / angular_count
    wth = 2.0 * np.pi / angular_count
    rr, tt = np.meshgrid(r, th, indexing="ij")
    nodes = np.stack((rr * np.cos(tt), rr * np.sin(tt)), axis=-1).reshape(-1, 2)
    weights = (wr[:, None] * wth * np.ones_like(tt)).reshape(-1)
    return CellGrid(nodes, weights)


def default_grid(d: int, radius: float | None = None, count: int = 64) -> CellGrid:
    if d == 1:
        return grid_1d_sqrt(25.0 if radius is None else radius, count)
    if d == 2:
        return grid_2d(8.0 if radius is None else radius, count // 4, count // 4)
    raise DomainError("grids implemented for d in {1, 2}")


@dataclass
class GridFunction:
    """values on the tensor product of the per-cell grids; values.shape ==
    (cells[0].size, ..., cells[-1].size)."""

    cells: list
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != tuple(c.size for c in self.cells):
            raise DomainError("values shape does not match the grids")

    @property
    def l(self) -> int:
        return len(self.cells)

    def copy(self) -> "GridFunction":
        return GridFunction([CellGrid(c.nodes.copy(), c.weights.copy())
                             for c in self.cells], self.values.copy())

    def weight_tensor(self) -> np.ndarray:
        w = self.cells[0].weights
        out = w
        for c in self.cells[1:]:
            out = np.multiply.outer(out, c.weights)
        return out

    def scale_values(self, factors: list) -> "GridFunction":
        """Multiply values by the outer product of one factor vector per cell."""
        vals = self.values
        for axis, f in enumerate(factors):
            if f is None:
                continue
            shape = [1] * vals.ndim
            shape[axis] = -1
            vals = vals * np.asarray(f).reshape(shape)
        return GridFunction(self.cells, vals)


def tabulate(cells: list, fn) -> GridFunction:
    """Evaluate fn(xi_1, ..., xi_l) (vectorized over broadcast node arrays is
    not assumed; fn maps a tuple of (d,) vectors to a scalar) on the product
    grid.  For single-cell grids fn may also be vectorized with signature
    fn(nodes) -> values."""
    if len(cells) == 1:
        c = cells[0]
        try:
            vals = np.asarray(fn(c.nodes), dtype=complex)
            if vals.shape == (c.size,):
                return GridFunction(cells, vals)
        except Exception:
            pass
        vals = np.asarray([fn(x) for x in c.nodes], dtype=complex)
        return GridFunction(cells, vals)
    shape = tuple(c.size for c in cells)
    vals = np.empty(shape, dtype=complex)
    for idx in np.ndindex(shape):
        vals[idx] = fn(*(cells[k].nodes[idx[k]] for k in range(len(cells))))
    return GridFunction(cells, vals)
