"""Modular, Luxemburg norm, sup norm and the Holder inequality on grid
functions.

The working norm on the fourth-order space is the Luxemburg norm of the
discrete Laplacian (`laplacian_norm`): ||u|| = inf{ mu > 0 :
int |Delta u / mu|^{p(x)} dx <= 1 }.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exponents import ExponentField, conjugate
from .grids import Grid, GridFunction, integrate, laplacian

__all__ = [
    "NormResult",
    "HolderReport",
    "modular",
    "luxemburg_norm",
    "laplacian_norm",
    "sup_norm",
    "check_holder",
]

#: relative bracket width at which the bisection stops
_BISECT_RTOL = 1e-13
_MAX_ITER = 200


@dataclass(frozen=True)
class NormResult:
    value: float
    iterations: int
    bracket: tuple

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class HolderReport:
    lhs: float
    rhs: float
    holds: bool


def _modular_values(vals: np.ndarray, grid: Grid, p: ExponentField) -> float:
    return float(np.dot(grid.weights, np.abs(vals) ** p.values))


def modular(u: GridFunction, p: ExponentField) -> float:
    """rho_{p(x)}(u) = int |u|^{p(x)} dx by quadrature."""
    if u.grid is not p.grid:
        raise ValueError("grid mismatch between function and exponent")
    return _modular_values(u.values, u.grid, p)


def _luxemburg_of_values(vals: np.ndarray, grid: Grid, p: ExponentField) -> NormResult:
    """Solve modular(vals/mu) = 1 for mu by bracketing + bisection.

    mu -> modular(vals/mu) is strictly decreasing for vals != 0, so the
    bisection is unconditionally safe.
    """
    amax = float(np.max(np.abs(vals)))
    if amax == 0.0:
        return NormResult(0.0, 0, (0.0, 0.0))
    # the norm is absolutely homogeneous; normalizing to unit sup keeps the
    # bracket expansion well-scaled for very small or very large inputs
    scaled = vals / amax

    def mod_at(mu):
        return _modular_values(scaled / mu, grid, p)

    hi = max(1.0, grid.domain.volume)
    lo = 1e-12
    it = 0
    while mod_at(hi) > 1.0:
        hi *= 2.0
        it += 1
        if it > 2000:
            raise RuntimeError("Luxemburg bracket expansion failed (upper)")
    while mod_at(lo) < 1.0:
        lo /= 2.0
        it += 1
        if lo < 1e-300:
            # modular < 1 for arbitrarily small mu cannot happen for vals != 0
            raise RuntimeError("Luxemburg bracket expansion failed (lower)")
    bracket = (lo, hi)
    for _ in range(_MAX_ITER):
        it += 1
        mid = 0.5 * (lo + hi)
        if mod_at(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _BISECT_RTOL * hi:
            break
    else:
        raise RuntimeError("Luxemburg bisection did not converge")
    return NormResult(amax * 0.5 * (lo + hi), it,
                      (amax * bracket[0], amax * bracket[1]))


def luxemburg_norm(u: GridFunction, p: ExponentField) -> NormResult:
    """|u|_{p(x)}: the Luxemburg norm of the nodal values."""
    if u.grid is not p.grid:
        raise ValueError("grid mismatch between function and exponent")
    return _luxemburg_of_values(u.values, u.grid, p)


def laplacian_norm(u: GridFunction, p: ExponentField) -> NormResult:
    """||u||: Luxemburg norm of the discrete Laplacian (requires Navier bc)."""
    if u.bc != "navier":
        raise ValueError("laplacian_norm requires Navier boundary conditions")
    du = laplacian(u.grid, u)
    return _luxemburg_of_values(du.values, u.grid, p)


def laplacian_modular(u: GridFunction, p: ExponentField) -> float:
    """rho_{p(x)}(u) on the fourth-order space: int |Delta u|^{p(x)} dx."""
    du = laplacian(u.grid, u)
    return _modular_values(du.values, u.grid, p)


def sup_norm(u: GridFunction) -> float:
    return float(np.max(np.abs(u.values)))


def check_holder(u: GridFunction, v: GridFunction, p: ExponentField,
                 tol: float = 1e-10) -> HolderReport:
    """Holder inequality |int uv| <= (1/p^- + 1/p'^-) |u|_{p(x)} |v|_{p'(x)}."""
    if u.grid is not v.grid or u.grid is not p.grid:
        raise ValueError("grid mismatch")
    pc = conjugate(p)
    lhs = abs(integrate(u.grid, u.values * v.values))
    rhs = (1.0 / p.p_minus + 1.0 / pc.p_minus) \
        * luxemburg_norm(u, p).value * luxemburg_norm(v, pc).value
    return HolderReport(lhs, rhs, lhs <= rhs + tol)
