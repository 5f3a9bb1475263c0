"""Multi-start critical-point search: quasi-Newton descent, Newton polish,
and shifted power deflation to find distinct weak solutions.

Accepted points must pass a clean (undeflated) residual check; deflation
only steers the iteration away from already-found solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize as opt

from .energy import ProblemInstance, residual_vector, total_energy
from .grids import GridFunction

__all__ = [
    "CriticalPoint",
    "SolutionSet",
    "minimize",
    "deflate_and_search",
    "lambda_sweep",
]

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 10_000
DISTINCTNESS = 1e-3       # pairwise sup-norm distance threshold
DEFLATION_POWER = 2.0
DEFLATION_SHIFT = 1.0


@dataclass
class CriticalPoint:
    u: GridFunction
    energy: float
    residual_norm: float
    starts_used: int = 1
    converged: bool = True


@dataclass
class SolutionSet:
    points: list = field(default_factory=list)

    @property
    def pairwise_dist(self) -> np.ndarray:
        k = len(self.points)
        d = np.zeros((k, k))
        for i in range(k):
            for j in range(i + 1, k):
                d[i, j] = d[j, i] = float(np.max(np.abs(
                    self.points[i].u.values - self.points[j].u.values)))
        return d

    def is_distinct(self, values: np.ndarray, threshold: float) -> bool:
        return all(
            float(np.max(np.abs(p.u.values - values))) > threshold
            for p in self.points
        )

    def sort(self):
        self.points.sort(key=lambda p: (p.energy, tuple(p.u.values)))


def _interior_residual(inst: ProblemInstance):
    interior = inst.grid.interior_mask
    size = inst.grid.size

    def fun(z):
        vals = np.zeros(size)
        vals[interior] = z
        return residual_vector(inst, vals)[interior]

    return fun, interior


def _lift(inst, z):
    vals = np.zeros(inst.grid.size)
    vals[inst.grid.interior_mask] = z
    return GridFunction(inst.grid, vals, bc="navier")


def _residual_norm(inst, u: GridFunction) -> float:
    return float(np.max(np.abs(residual_vector(inst, u.values))))


def minimize(inst: ProblemInstance, u0: GridFunction,
             tol: float = DEFAULT_TOL,
             max_iter: int = DEFAULT_MAX_ITER) -> CriticalPoint:
    """Limited-memory quasi-Newton descent on the total energy, followed by
    a Newton polish on the gradient (the fourth-order operator is stiff
    enough that L-BFGS alone stalls well above solver tolerance)."""
    interior = inst.grid.interior_mask
    size = inst.grid.size

    def fun_and_grad(z):
        vals = np.zeros(size)
        vals[interior] = z
        u = GridFunction(inst.grid, vals, bc="navier")
        return total_energy(inst, u), residual_vector(inst, vals)[interior]

    res = opt.minimize(
        fun_and_grad, u0.values[interior], jac=True, method="L-BFGS-B",
        options={"maxiter": max_iter, "maxcor": 30, "ftol": 1e-18,
                 "gtol": 0.1 * tol},
    )
    z = res.x
    u = _lift(inst, z)
    rn = _residual_norm(inst, u)
    if rn > tol:
        grad, _ = _interior_residual(inst)
        z, ok = _newton_polish(grad, z, tol)
        u = _lift(inst, z)
        rn = _residual_norm(inst, u)
    return CriticalPoint(u, total_energy(inst, u), rn, converged=rn <= tol)


def _newton_polish(fun, z0, tol, max_rounds: int = 3):
    z = z0
    for _ in range(max_rounds):
        sol = opt.root(fun, z, method="hybr",
                       options={"xtol": 1e-14, "maxfev": 400 * (len(z0) + 1)})
        z = sol.x
        if np.max(np.abs(fun(z))) <= tol:
            return z, True
    return z, np.max(np.abs(fun(z))) <= tol


def _fourier_start(inst, rng, amplitude: float, n_modes: int = 5):
    """Fixed-seed smooth random start satisfying the Navier conditions."""
    grid = inst.grid
    if grid.domain.kind == "interval":
        x = grid.nodes
        vals = np.zeros(grid.size)
        for k in range(1, n_modes + 1):
            vals += rng.standard_normal() * np.sin(k * np.pi * x)
    elif grid.domain.kind == "rectangle":
        x = grid.nodes[:, 0] / grid.domain.a
        y = grid.nodes[:, 1] / grid.domain.b
        vals = np.zeros(grid.size)
        for k in range(1, n_modes + 1):
            for m in range(1, n_modes + 1):
                vals += rng.standard_normal() * np.sin(k * np.pi * x) \
                    * np.sin(m * np.pi * y)
    else:
        r = grid.nodes / grid.domain.R
        vals = rng.standard_normal() * (1 - r**2)
        for k in range(2, n_modes + 1):
            vals += rng.standard_normal() * (1 - r**2) ** k
        vals[grid.boundary_mask] = 0.0
    peak = np.max(np.abs(vals))
    if peak > 0:
        vals *= amplitude * abs(rng.standard_normal()) / peak
    return GridFunction(grid, vals, bc="navier")


def _structured_starts(inst, vbar_scale: float):
    """Zero-adjacent perturbation plus +/- the certificate bump."""
    from .certificate import build_test_function, inradius

    grid = inst.grid
    starts = []
    tiny = np.zeros(grid.size)
    tiny[grid.interior_mask] = 1e-3
    starts.append(GridFunction(grid, tiny, bc="navier"))
    try:
        D, x0 = inradius(grid.domain)
        vb = build_test_function(vbar_scale, D, x0, grid)
        starts.append(vb)
        starts.append(GridFunction(grid, -vb.values, bc="navier"))
    except ValueError:
        pass
    return starts


def deflate_and_search(inst: ProblemInstance, k_max: int = 6,
                       n_starts: int = 12, seed: int = 0,
                       tol: float = DEFAULT_TOL,
                       vbar_scale: float = 1.0,
                       dist_threshold: float = DISTINCTNESS) -> SolutionSet:
    """Root-solve the deflated gradient field
    g(u) * prod_j (1 + 1/||u - u_j||_inf^2) from deterministic starts,
    accepting points that pass the clean residual check and are pairwise
    distinct in sup norm."""
    rng = np.random.default_rng(seed)
    grad, interior = _interior_residual(inst)
    found = SolutionSet()

    amp = max(vbar_scale, 10 * dist_threshold)
    starts = _structured_starts(inst, vbar_scale)
    starts += [_fourier_start(inst, rng, amp) for _ in range(n_starts)]

    # the descent minimum first: guarantees the global minimizer is present
    base = minimize(inst, starts[0], tol=tol)
    if base.converged:
        found.points.append(base)

    def deflation_factor(z):
        fac = 1.0
        for p in found.points:
            dist = np.max(np.abs(z - p.u.values[interior]))
            fac *= 1.0 + 1.0 / max(dist, 1e-14) ** DEFLATION_POWER
        return fac

    def deflated(z):
        return deflation_factor(z) * grad(z)

    n_used = 0
    for start in starts:
        if len(found.points) >= k_max:
            break
        n_used += 1
        z0 = start.values[interior]
        sol = opt.root(deflated, z0, method="hybr",
                       options={"xtol": 1e-13,
                                "maxfev": 300 * (len(z0) + 1)})
        z = sol.x
        clean = np.max(np.abs(grad(z)))
        if clean > tol:
            # fall back to an undeflated polish; re-check distinctness below
            z, ok = _newton_polish(grad, z, tol, max_rounds=1)
            clean = np.max(np.abs(grad(z)))
        if clean <= tol and found.is_distinct(_lift(inst, z).values,
                                              dist_threshold):
            u = _lift(inst, z)
            found.points.append(CriticalPoint(
                u, total_energy(inst, u), float(clean), starts_used=n_used))
    found.sort()
    return found


def lambda_sweep(inst: ProblemInstance, interval, m: int,
                 k_max: int = 6, n_starts: int = 12, seed: int = 0,
                 tol: float = DEFAULT_TOL, vbar_scale: float = 1.0,
                 straddle: bool = True):
    """Run deflate_and_search at m log-spaced lambda values across
    [lo*0.5, hi*2] (straddling the certified interval) and tabulate the
    counts and energies; deterministic for a fixed seed."""
    if m < 2:
        raise ValueError("need at least two lambda values")
    lo, hi = interval
    if straddle:
        lo, hi = 0.5 * lo, 2.0 * hi
    lambdas = np.geomspace(lo, hi, m)
    rows = []
    for lam in lambdas:
        sub = ProblemInstance(
            inst.grid, inst.p, inst.potential, inst.nonlinearity, float(lam),
            hypothesis_report=inst.hypothesis_report,
            allow_failed_hypotheses=inst.allow_failed_hypotheses,
        )
        sols = deflate_and_search(sub, k_max=k_max, n_starts=n_starts,
                                  seed=seed, tol=tol, vbar_scale=vbar_scale)
        rows.append({
            "lambda": float(lam),
            "n_solutions": len(sols.points),
            "energies": [p.energy for p in sols.points],
            "residuals": [p.residual_norm for p in sols.points],
        })
    return rows
