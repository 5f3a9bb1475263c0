"""Structured grids, quadrature and the Navier-boundary discrete Laplacian.

Supported domains: the unit interval [0,1], axis-aligned rectangles
[0,a]x[0,b] and radially symmetric balls (reduced to a 1D radial grid).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Domain",
    "Grid",
    "GridFunction",
    "build_grid",
    "laplacian",
    "integrate",
]


def unit_ball_volume(N: int) -> float:
    """Volume of the unit ball in R^N, pi^{N/2} / ((N/2) Gamma(N/2))."""
    return math.pi ** (N / 2) / ((N / 2) * math.gamma(N / 2))


@dataclass(frozen=True)
class Domain:
    """Geometry tag plus its parameters.

    kind: "interval" (fixed to [0,1]), "rectangle" ([0,a]x[0,b]) or
    "ball_radial" (ball of radius R in R^N, radial coordinate only).
    """

    kind: str
    a: float = 1.0
    b: float = 1.0
    N: int = 2
    R: float = 1.0

    def __post_init__(self):
        if self.kind not in ("interval", "rectangle", "ball_radial"):
            raise ValueError(f"unsupported domain kind: {self.kind!r}")
        if self.kind == "rectangle" and (self.a <= 0 or self.b <= 0):
            raise ValueError("rectangle sides must be positive")
        if self.kind == "ball_radial" and (self.N < 1 or self.R <= 0):
            raise ValueError("ball_radial needs N >= 1 and R > 0")

    @property
    def dim(self) -> int:
        """Spatial dimension N of the modeled domain."""
        if self.kind == "interval":
            return 1
        if self.kind == "rectangle":
            return 2
        return self.N

    @property
    def volume(self) -> float:
        if self.kind == "interval":
            return 1.0
        if self.kind == "rectangle":
            return self.a * self.b
        return unit_ball_volume(self.N) * self.R ** self.N


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform structured grid with quadrature weights.

    nodes is (M,) for 1D kinds and (M, 2) for the rectangle; values arrays
    are flat with M entries (rectangle row-major, shape (n, n)).
    """

    domain: Domain
    n: int
    nodes: np.ndarray
    weights: np.ndarray
    spacing: tuple
    shape: tuple
    _lap: sp.csr_matrix = field(repr=False, compare=False, default=None)

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        if self.domain.kind == "interval":
            mask[0] = mask[-1] = True
        elif self.domain.kind == "rectangle":
            m = mask.reshape(self.shape)
            m[0, :] = m[-1, :] = True
            m[:, 0] = m[:, -1] = True
        else:  # ball_radial: only r = R is boundary, r = 0 is the center
            mask[-1] = True
        return mask

    @property
    def interior_mask(self) -> np.ndarray:
        return ~self.boundary_mask

    def laplacian_matrix(self) -> sp.csr_matrix:
        return self._lap

    def point_radii(self, x0) -> np.ndarray:
        """Euclidean distance of every node from the point x0."""
        if self.domain.kind == "rectangle":
            return np.hypot(self.nodes[:, 0] - x0[0], self.nodes[:, 1] - x0[1])
        return np.abs(self.nodes - np.asarray(x0).reshape(-1)[0])


def _interval_grid(domain: Domain, n: int) -> Grid:
    x = np.linspace(0.0, 1.0, n)
    h = x[1] - x[0]
    w = np.full(n, h)
    w[0] = w[-1] = h / 2  # composite trapezoid
    lap = _interval_laplacian(n, h)
    return Grid(domain, n, x, w, (h,), (n,), lap)


def _interval_laplacian(n: int, h: float) -> sp.csr_matrix:
    main = np.full(n, -2.0 / h**2)
    off = np.full(n - 1, 1.0 / h**2)
    L = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    L[0, :] = 0.0  # Navier: Delta u = 0 on the boundary
    L[-1, :] = 0.0
    return L.tocsr()


def _rectangle_grid(domain: Domain, n: int) -> Grid:
    x = np.linspace(0.0, domain.a, n)
    y = np.linspace(0.0, domain.b, n)
    hx, hy = x[1] - x[0], y[1] - y[0]
    X, Y = np.meshgrid(x, y, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    wx = np.full(n, hx)
    wx[0] = wx[-1] = hx / 2
    wy = np.full(n, hy)
    wy[0] = wy[-1] = hy / 2
    weights = np.outer(wx, wy).ravel()

    Lx = sp.diags(
        [np.ones(n - 1), np.full(n, -2.0), np.ones(n - 1)], [-1, 0, 1]
    ) / hx**2
    Ly = sp.diags(
        [np.ones(n - 1), np.full(n, -2.0), np.ones(n - 1)], [-1, 0, 1]
    ) / hy**2
    L = sp.kron(Lx, sp.identity(n)) + sp.kron(sp.identity(n), Ly)
    L = L.tolil()
    bmask = np.zeros((n, n), dtype=bool)
    bmask[0, :] = bmask[-1, :] = bmask[:, 0] = bmask[:, -1] = True
    for i in np.flatnonzero(bmask.ravel()):
        L[i, :] = 0.0
    return Grid(domain, n, nodes, weights, (hx, hy), (n, n), L.tocsr())


def _ball_radial_grid(domain: Domain, n: int) -> Grid:
    """Finite-volume radial grid: cell volumes as weights, flux-form Laplacian.

    Weights are exact shell volumes, so they sum to |ball| exactly and the
    weighted Laplacian is self-adjoint on the Navier subspace.  The stencil
    is exact on radially symmetric quadratics c + b*r^2.
    """
    N, R = domain.N, domain.R
    r = np.linspace(0.0, R, n)
    h = r[1] - r[0]
    wN = unit_ball_volume(N)
    faces = np.concatenate([[0.0], r[:-1] + h / 2, [R]])
    vol = wN * (faces[1:] ** N - faces[:-1] ** N)

    # surface areas at interior cell faces, wN * N * r_{i+1/2}^{N-1}
    area = wN * N * faces[1:-1] ** (N - 1)
    L = sp.lil_matrix((n, n))
    for i in range(1, n - 1):
        L[i, i - 1] += area[i - 1] / (h * vol[i])
        L[i, i] -= (area[i - 1] + area[i]) / (h * vol[i])
        L[i, i + 1] += area[i] / (h * vol[i])
    # center cell: zero inner flux (symmetry)
    L[0, 0] = -area[0] / (h * vol[0])
    L[0, 1] = area[0] / (h * vol[0])
    L[-1, :] = 0.0  # Navier at r = R
    return Grid(domain, n, r, vol, (h,), (n,), L.tocsr())


def build_grid(domain: Domain, n: int) -> Grid:
    """Uniform grid with quadrature weights on a supported domain."""
    if n < 5:
        raise ValueError("need at least 5 nodes per axis")
    if domain.kind == "interval":
        return _interval_grid(domain, n)
    if domain.kind == "rectangle":
        return _rectangle_grid(domain, n)
    return _ball_radial_grid(domain, n)


@dataclass
class GridFunction:
    """Nodal values of a scalar field, optionally tagged with Navier bc."""

    grid: Grid
    values: np.ndarray
    bc: str = "none"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise ValueError("values do not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite nodal values")
        if self.bc == "navier":
            b = self.grid.boundary_mask
            scale = max(1.0, float(np.max(np.abs(self.values))))
            if np.any(np.abs(self.values[b]) > 1e-12 * scale):
                raise ValueError("Navier bc requires zero boundary values")
            self.values[b] = 0.0  # snap roundoff-level boundary values

    @classmethod
    def from_callable(cls, grid: Grid, f, bc: str = "none") -> "GridFunction":
        if grid.domain.kind == "rectangle":
            vals = f(grid.nodes[:, 0], grid.nodes[:, 1])
        else:
            vals = f(grid.nodes)
        return cls(grid, np.broadcast_to(vals, (grid.size,)).copy(), bc)

    @classmethod
    def zeros(cls, grid: Grid, bc: str = "navier") -> "GridFunction":
        return cls(grid, np.zeros(grid.size), bc)

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy(), self.bc)


def laplacian(grid: Grid, u: GridFunction) -> GridFunction:
    """Second-order discrete Laplacian; boundary values are forced to zero
    (odd-reflection ghosts encode Delta u = 0 on the boundary exactly)."""
    if u.grid is not grid:
        raise ValueError("grid mismatch")
    vals = grid.laplacian_matrix() @ u.values
    return GridFunction(grid, vals, bc="none")


def integrate(grid: Grid, g) -> float:
    """Quadrature: weighted nodal sum."""
    g = np.asarray(g, dtype=float)
    if g.shape != (grid.size,):
        raise ValueError("field length does not match the grid")
    return float(np.dot(grid.weights, g))
