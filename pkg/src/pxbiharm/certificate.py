"""Explicit three-solution certificates for the fourth-order problem.

Computes every constant of the admissible lambda-interval (ball volume
coefficient, inradius, annulus measure L, gamma_r, the embedding constant
c0, alpha_r, beta_h), decides feasibility, and provides the dedicated 1D
interval with its constant k.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .energy import ProblemInstance, energy_J, load_Phi
from .exponents import ExponentField
from .grids import Domain, Grid, GridFunction, build_grid, integrate, unit_ball_volume
from .potentials import NonlinearitySpec, PotentialSpec, d_norm_conjugate, _node_coords

__all__ = [
    "Certificate",
    "ball_volume_coeff",
    "inradius",
    "compute_L",
    "gamma_r",
    "build_test_function",
    "test_function_laplacian",
    "energy_J_vbar",
    "alpha_r",
    "beta_h",
    "certify",
    "certify_r1",
    "estimate_c0",
    "dim1_certificate",
    "sandwich_check",
]

#: relative change under grid doubling below which a certificate is stamped
#: "converged"
_CONVERGENCE_RTOL = 5e-3


@dataclass
class Certificate:
    r: float | None
    h: float
    N: int
    D: float
    x0: tuple
    w: float
    L: float
    gamma_r: float | None
    c0: float
    c0_provenance: str
    alpha_r: float | None
    beta_h: float | None
    lambda_interval: tuple | None
    checks: dict
    converged: bool | None = None
    k: float | None = None           # 1D path
    l: float | None = None           # 1D path
    nu: float | None = None          # 1D path
    J_vbar: float | None = None
    Phi_vbar_lower: float | None = None
    reason: str | None = None

    @property
    def feasible(self) -> bool:
        return self.lambda_interval is not None

    def to_json(self) -> str:
        payload = asdict(self)
        payload["x0"] = list(self.x0)
        if self.lambda_interval is not None:
            payload["lambda_interval"] = list(self.lambda_interval)
        return json.dumps(payload, indent=2, sort_keys=True)


def ball_volume_coeff(N: int) -> float:
    """w: volume of the unit ball in R^N."""
    if N < 1:
        raise ValueError("N must be at least 1")
    return unit_ball_volume(N)


def inradius(domain: Domain):
    """(D, x0): exact inradius of a supported domain and an attaining center."""
    if domain.kind == "interval":
        return 0.5, (0.5,)
    if domain.kind == "rectangle":
        return min(domain.a, domain.b) / 2, (domain.a / 2, domain.b / 2)
    if domain.kind == "ball_radial":
        return domain.R, (0.0,)
    raise ValueError(f"unsupported domain kind {domain.kind!r}")


def compute_L(N: int, D: float) -> float:
    """Measure of the annulus B(x0,D) \\ B(x0,D/2): w (D^N - (D/2)^N)."""
    w = ball_volume_coeff(N)
    return w * (D**N - (D / 2) ** N)


def gamma_r(p: ExponentField, r: float) -> float:
    """gamma_r = max{(p^+ r)^{1/p^+}, (p^+ r)^{1/p^-}}."""
    base = p.p_plus * r
    return max(base ** (1.0 / p.p_plus), base ** (1.0 / p.p_minus))


def build_test_function(h: float, D: float, x0, grid: Grid) -> GridFunction:
    """The radially symmetric bump: h on B(x0, D/2), the quadratic ramp
    4h/(3 D^2) (D^2 - |x-x0|^2) on the annulus, 0 outside B(x0, D)."""
    rho = grid.point_radii(x0)
    if grid.domain.kind == "interval":
        inside = (np.min(np.asarray(x0)) - D >= -1e-12) and \
                 (np.max(np.asarray(x0)) + D <= 1.0 + 1e-12)
    elif grid.domain.kind == "rectangle":
        inside = (x0[0] - D >= -1e-12 and x0[0] + D <= grid.domain.a + 1e-12
                  and x0[1] - D >= -1e-12 and x0[1] + D <= grid.domain.b + 1e-12)
    else:
        inside = abs(np.asarray(x0).reshape(-1)[0]) + D <= grid.domain.R + 1e-12
    if not inside:
        raise ValueError("ball B(x0, D) is not contained in the domain")

    vals = np.zeros(grid.size)
    core = rho <= D / 2
    annulus = (rho > D / 2) & (rho < D)
    vals[core] = h
    vals[annulus] = 4 * h / (3 * D**2) * (D**2 - rho[annulus] ** 2)
    vals[grid.boundary_mask] = 0.0
    return GridFunction(grid, vals, bc="navier")


def test_function_laplacian(h: float, D: float, x0, grid: Grid) -> GridFunction:
    """The analytic Laplacian of the bump: -8hN/(3 D^2) on the open annulus
    D/2 < |x-x0| < D, zero elsewhere.

    The bump has slope kinks at the interface spheres, so the discrete
    stencil is not usable there; the certificate evaluates J(vbar) through
    this piecewise-constant field instead.
    """
    rho = grid.point_radii(x0)
    N = grid.domain.dim
    vals = np.zeros(grid.size)
    annulus = (rho > D / 2) & (rho < D)
    vals[annulus] = -8 * h * N / (3 * D**2)
    return GridFunction(grid, vals, bc="none")


def _annulus_cell_fractions(D: float, x0, grid: Grid) -> np.ndarray:
    """Fraction of each quadrature cell covered by D/2 < |x-x0| < D."""
    lo, hi = D / 2, D
    if grid.domain.kind == "interval":
        h_sp = grid.spacing[0]
        c = np.asarray(x0).reshape(-1)[0]
        a = np.clip(grid.nodes - h_sp / 2, 0.0, 1.0)
        b = np.clip(grid.nodes + h_sp / 2, 0.0, 1.0)
        # intersection length with {lo < |x-c| < hi} on each side of c
        def seg(a, b, s_lo, s_hi):
            return np.clip(np.minimum(b, s_hi) - np.maximum(a, s_lo), 0.0, None)
        length = seg(a, b, c + lo, c + hi) + seg(a, b, c - hi, c - lo)
        return length / (b - a)
    if grid.domain.kind == "ball_radial":
        h_sp = grid.spacing[0]
        N, R = grid.domain.N, grid.domain.R
        faces_lo = np.clip(grid.nodes - h_sp / 2, 0.0, R)
        faces_hi = np.clip(grid.nodes + h_sp / 2, 0.0, R)
        inner = np.clip(np.maximum(faces_lo, lo), None, faces_hi)
        outer = np.clip(np.minimum(faces_hi, hi), faces_lo, None)
        vol_cell = faces_hi**N - faces_lo**N
        vol_olap = np.clip(outer**N - inner**N, 0.0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(vol_cell > 0, vol_olap / vol_cell, 0.0)
        return frac
    # rectangle: estimate cell overlap by subsampling
    hx, hy = grid.spacing
    offs = (np.arange(4) + 0.5) / 4 - 0.5
    frac = np.zeros(grid.size)
    for ox in offs:
        for oy in offs:
            rho = np.hypot(grid.nodes[:, 0] + ox * hx - x0[0],
                           grid.nodes[:, 1] + oy * hy - x0[1])
            frac += (rho > lo) & (rho < hi)
    return frac / 16.0


def energy_J_vbar(potential: PotentialSpec, h: float, D: float, x0,
                  grid: Grid) -> float:
    """Quadrature of int A(x, Delta vbar) dx with the analytic piecewise
    Laplacian, weighting interface cells by their annulus overlap."""
    N = grid.domain.dim
    slope = -8 * h * N / (3 * D**2)
    frac = _annulus_cell_fractions(D, x0, grid)
    return integrate(grid, frac * potential.A(slope))


def _sup_F_per_node(nl: NonlinearitySpec, x: np.ndarray, bound: float,
                    n_t: int = 1001) -> np.ndarray:
    """Per-node sup of F(x, .) over |t| <= bound: dense t-grid plus one
    Newton refinement (on F' = f) at the best point."""
    t = np.linspace(-bound, bound, n_t)
    F_vals = nl.F(x[:, None], t[None, :])
    best_idx = np.argmax(F_vals, axis=1)
    best_t = t[best_idx]
    best_F = F_vals[np.arange(len(x)), best_idx]

    # one Newton step on f(x, t) = 0 around the best interior point
    dt = max(1e-6 * bound, 1e-9)
    f0 = nl.f(x, best_t)
    fp = (nl.f(x, best_t + dt) - nl.f(x, best_t - dt)) / (2 * dt)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_ref = best_t - f0 / fp
    t_ref = np.where(np.isfinite(t_ref), t_ref, best_t)
    t_ref = np.clip(t_ref, -bound, bound)
    F_ref = nl.F(x, t_ref)
    return np.maximum(best_F, F_ref)


def alpha_r(inst: ProblemInstance, r: float, c0: float,
            p: ExponentField | None = None) -> float:
    """alpha_r = (1/r) int sup_{|t| <= c0 gamma_r} F(x, t) dx."""
    if r <= 0:
        raise ValueError("r must be positive")
    p = p or inst.p
    bound = c0 * gamma_r(p, r)
    x = _node_coords(inst.grid)
    sup_F = _sup_F_per_node(inst.nonlinearity, x, bound)
    return integrate(inst.grid, sup_F) / r


def _ess_inf_F_at(nl: NonlinearitySpec, x: np.ndarray, t: float) -> float:
    return float(np.min(nl.F(x, t)))


def beta_h(inst: ProblemInstance, h: float, consts: dict) -> float:
    """The lower certificate ratio: numerator w (D/2)^N ess inf F(x,h),
    denominator c3 L^{1/p+} [N^{1/p+} (8h/3D^2) |d|_{p'} +
    L^{(p+-1)/p+} max{(8hN/3D^2)^{p-}, (8hN/3D^2)^{p+}}]."""
    if h <= 0:
        raise ValueError("h must be positive")
    c3, L, w, D, N = (consts[k] for k in ("c3", "L", "w", "D", "N"))
    p = consts.get("p") or inst.p
    d_norm = consts.get("d_norm")
    if d_norm is None:
        d_norm = d_norm_conjugate(inst.potential)
    x = _node_coords(inst.grid)
    num = w * (D / 2) ** N * _ess_inf_F_at(inst.nonlinearity, x, h)
    slope = 8 * h * N / (3 * D**2)
    denom = c3 * L ** (1.0 / p.p_plus) * (
        N ** (1.0 / p.p_plus) * (8 * h / (3 * D**2)) * d_norm
        + L ** ((p.p_plus - 1.0) / p.p_plus)
        * max(slope ** p.p_minus, slope ** p.p_plus)
    )
    return num / denom


def estimate_c0(grid: Grid, p: ExponentField, n_samples: int = 200,
                seed: int = 0, safety: float = 1.5):
    """(c0, provenance): the embedding constant in ||u||_inf <= c0 ||u||.

    The 1D interval admits the analytic value 1/4; other domains get a
    numerical estimate (randomized maximization of sup_norm/laplacian_norm
    over smooth Navier fields plus the bump family, times a safety factor).
    """
    from .spaces import laplacian_norm, sup_norm

    if grid.domain.kind == "interval":
        return 0.25, "analytic"

    rng = np.random.default_rng(seed)
    best = 0.0
    D, x0 = inradius(grid.domain)
    for scale in (1.0, 0.5, 0.25):
        vb = build_test_function(1.0, D * scale, x0, grid)
        best = max(best, sup_norm(vb) / laplacian_norm(vb, p).value)
    for _ in range(n_samples):
        u = _random_navier_field(grid, rng)
        nrm = laplacian_norm(u, p).value
        if nrm > 0:
            best = max(best, sup_norm(u) / nrm)
    return best * safety, "numerical-estimate"


def _random_navier_field(grid: Grid, rng, n_modes: int = 5) -> GridFunction:
    """Random sine series, vanishing together with its Laplacian on the
    boundary."""
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
        vals = np.zeros(grid.size)
        for k in range(1, n_modes + 1):
            vals += rng.standard_normal() * (1.0 - r**2) ** k * (1.0 + r**2)
        vals[grid.boundary_mask] = 0.0
    return GridFunction(grid, vals, bc="navier")


def _certificate_core(inst: ProblemInstance, r: float, h: float,
                      grid: Grid | None = None) -> dict:
    """All scalar ingredients of the certificate on one grid."""
    grid = grid or inst.grid
    N = grid.domain.dim
    D, x0 = inradius(grid.domain)
    w = ball_volume_coeff(N)
    L = compute_L(N, D)
    c0, prov = estimate_c0(grid, inst.p)
    g_r = gamma_r(inst.p, r)
    slope = 8 * h * N / (3 * D**2)
    r_bound = (L / inst.p.p_plus) * min(slope ** inst.p.p_minus,
                                        slope ** inst.p.p_plus)
    a = alpha_r(inst, r, c0)
    b = beta_h(inst, h, {
        "c3": inst.potential.c3, "L": L, "w": w, "D": D, "N": N,
        "p": inst.p,
    })
    # nonnegativity of ess inf F on [0, h], sampled
    x = _node_coords(grid)
    t_chk = np.linspace(0.0, h, 51)
    F_chk = inst.nonlinearity.F(x[:, None], t_chk[None, :])
    F_nonneg = bool(np.min(F_chk) >= -1e-12)
    return dict(N=N, D=D, x0=x0, w=w, L=L, c0=c0, c0_provenance=prov,
                gamma_r=g_r, r_bound=r_bound, alpha=a, beta=b,
                F_nonneg=F_nonneg)


def certify(inst: ProblemInstance, r: float, h: float,
            check_convergence: bool = True) -> Certificate:
    """Full certificate: all constants, the r-bound and beta > alpha checks,
    and the admissible lambda-interval when both hold."""
    if not inst.p.certificate_eligible(inst.grid.domain.dim):
        raise ValueError("certificate requires p_minus > N/2")
    core = _certificate_core(inst, r, h)
    checks = {
        "r_bound": bool(r < core["r_bound"]),
        "beta_gt_alpha": bool(core["beta"] > core["alpha"] > 0.0),
        "F_nonneg_on_0_h": core["F_nonneg"],
    }
    feasible = all(checks.values())
    interval = (1.0 / core["beta"], 1.0 / core["alpha"]) if feasible else None
    reason = None
    if not feasible:
        reason = "; ".join(k for k, v in checks.items() if not v)

    # proof-side sandwich data
    J_vbar = energy_J_vbar(inst.potential, h, core["D"], core["x0"], inst.grid)
    x = _node_coords(inst.grid)
    phi_lower = core["w"] * (core["D"] / 2) ** core["N"] \
        * _ess_inf_F_at(inst.nonlinearity, x, h)

    converged = None
    if check_convergence:
        fine = build_grid(inst.grid.domain, 2 * inst.grid.n - 1)
        fine_inst = _reinstantiate(inst, fine)
        fine_core = _certificate_core(fine_inst, r, h, fine)
        converged = _close(core["alpha"], fine_core["alpha"]) and \
            _close(core["beta"], fine_core["beta"])

    return Certificate(
        r=r, h=h, N=core["N"], D=core["D"], x0=tuple(core["x0"]),
        w=core["w"], L=core["L"], gamma_r=core["gamma_r"],
        c0=core["c0"], c0_provenance=core["c0_provenance"],
        alpha_r=core["alpha"], beta_h=core["beta"],
        lambda_interval=interval, checks=checks, converged=converged,
        J_vbar=J_vbar, Phi_vbar_lower=phi_lower, reason=reason,
    )


def _close(a, b):
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale < _CONVERGENCE_RTOL


def _reinstantiate(inst: ProblemInstance, grid: Grid) -> ProblemInstance:
    """Rebuild the problem on a refined grid (exponent and potential are
    re-sampled; only constant/affine exponents and theta support this)."""
    from . import exponents as ex
    from . import potentials as pot

    if inst.p.source == "constant":
        p = ex.constant_exponent(grid, inst.p.p_minus)
    elif inst.p.source == "affine":
        x0 = _node_coords(inst.grid)
        slope_fit = np.polyfit(x0, inst.p.values, 1)
        p = ex.affine_exponent(grid, slope_fit[1], slope_fit[0])
    else:
        xc = _node_coords(inst.grid)
        xf = _node_coords(grid)
        p = ex.tabulated_exponent(grid, np.interp(xf, xc, inst.p.values))

    theta0 = float(inst.potential.theta[0])
    if not np.allclose(inst.potential.theta, theta0):
        xc = _node_coords(inst.grid)
        xf = _node_coords(grid)
        theta = np.interp(xf, xc, inst.potential.theta)
    else:
        theta = np.full(grid.size, theta0)
    if inst.potential.family == "power":
        spec = pot.make_power_family(theta, p)
    else:
        spec = pot.make_perturbed_family(theta, p, inst.potential.variant)

    nl = inst.nonlinearity
    fine_nl = pot.NonlinearitySpec(
        name=nl.name, f_eval=nl.f_eval, F_eval=nl.F_eval,
        xi=np.interp(_node_coords(grid), _node_coords(inst.grid), nl.xi),
        zeta=nl.zeta,
        q=ex.tabulated_exponent(grid, np.interp(
            _node_coords(grid), _node_coords(inst.grid), nl.q.values))
        if nl.q is not None else None,
    )
    return ProblemInstance(grid, p, spec, fine_nl, inst.lam,
                           hypothesis_report=None)


def certify_r1(inst: ProblemInstance, h: float,
               check_convergence: bool = True) -> Certificate:
    """The r = 1 specialization: gamma_1 = (p^+)^{1/p^-} and the r-bound
    reads p^+ < L min{(8hN/3D^2)^{p^-}, (8hN/3D^2)^{p^+}}."""
    return certify(inst, 1.0, h, check_convergence=check_convergence)


@dataclass
class SandwichReport:
    lower: float
    J_vbar: float
    upper: float
    holds: bool


def sandwich_check(inst: ProblemInstance, h: float,
                   rel_tol: float = 0.02) -> SandwichReport:
    """Both analytic bounds on J(vbar) against its quadrature value."""
    grid = inst.grid
    N = grid.domain.dim
    D, x0 = inradius(grid.domain)
    L = compute_L(N, D)
    slope = 8 * h * N / (3 * D**2)
    lower = (L / inst.p.p_plus) * min(slope ** inst.p.p_minus,
                                      slope ** inst.p.p_plus)
    d_norm = d_norm_conjugate(inst.potential)
    upper = inst.potential.c3 * L ** (1.0 / inst.p.p_plus) * (
        N ** (1.0 / inst.p.p_plus) * (8 * h / (3 * D**2)) * d_norm
        + L ** ((inst.p.p_plus - 1.0) / inst.p.p_plus)
        * max(slope ** inst.p.p_minus, slope ** inst.p.p_plus)
    )
    J_vbar = energy_J_vbar(inst.potential, h, D, x0, grid)
    slack = rel_tol * max(abs(lower), abs(upper))
    holds = (lower - slack <= J_vbar <= upper + slack)
    return SandwichReport(lower, J_vbar, upper, holds)


def dim1_certificate(g, alpha_field: np.ndarray, p: ExponentField,
                     l: float, h: float, c3: float,
                     G=None, grid: Grid | None = None) -> Certificate:
    """The dedicated 1D certificate for (|u''|^{p(x)-2} u'')'' =
    lambda alpha(x) g(u) on (0,1).

    Feasible iff G(l)/l^{p+} < k G(h)/h^{p+} with
    k = (1/(p+ c3)) (3/8)^{p+} alpha_0/||alpha||_1; the side condition
    l <= 1 <= (8h/3)^{p-/p+} (1/4)^{1/p+} and the vanishing-growth
    condition g(t) |t|^{-nu} -> 0 are checked and recorded.
    """
    grid = grid or (p.grid if p is not None else None)
    if grid is None or grid.domain.kind != "interval":
        raise ValueError("the dedicated 1D certificate needs an interval grid")
    alpha_vals = np.broadcast_to(np.asarray(alpha_field, float),
                                 (grid.size,)).copy()
    if np.any(alpha_vals <= 0):
        raise ValueError("alpha must be positive")
    g0 = float(np.asarray(g(0.0)))
    checks = {}
    reason = None
    if g0 == 0.0:
        checks["g0_nonzero"] = False
        reason = "g(0) = 0"
    else:
        checks["g0_nonzero"] = True

    # vanishing growth: exists nu in [0, p^- - 1) with g(t) |t|^{-nu} -> 0,
    # probed by sampling at |t| in {1e2, 1e3, 1e4}
    nu = None
    probes = np.array([1e2, 1e3, 1e4])
    for cand in np.linspace(0.0, p.p_minus - 1.0, 21)[:-1]:
        ratios = np.abs(np.asarray(g(probes), float)) / probes**cand
        if np.all(np.diff(ratios) < 0) and ratios[-1] < 1e-2:
            nu = float(cand)
            break
    checks["nu_growth"] = nu is not None

    pp = p.p_plus
    side = (l <= 1.0 + 1e-12) and \
        (1.0 <= (8 * h / 3) ** (p.p_minus / pp) * 0.25 ** (1.0 / pp) + 1e-12)
    checks["side_condition"] = bool(side)

    if G is None:
        from scipy.integrate import quad
        def G(xi, _g=g):
            val, _ = quad(_g, 0.0, xi, epsrel=1e-10, limit=200)
            return val
    alpha_0 = float(alpha_vals.min())
    alpha_l1 = integrate(grid, np.abs(alpha_vals))
    k = (1.0 / (pp * c3)) * (3.0 / 8.0) ** pp * alpha_0 / alpha_l1

    G_h = float(np.asarray(G(h)))
    G_l = float(np.asarray(G(l)))
    feas_ratio = (G_l / l**pp) < (k * G_h / h**pp)
    checks["G_ratio"] = bool(feas_ratio)

    feasible = feas_ratio and checks["g0_nonzero"]
    if feasible:
        lo = (8.0 / 3.0) ** pp * h**pp * c3 / (alpha_0 * G_h)
        hi = l**pp / (pp * alpha_l1 * G_l)
        interval = (lo, hi)
    else:
        interval = None
        if reason is None:
            reason = "G(l)/l^{p+} >= k G(h)/h^{p+}"

    D, x0 = inradius(grid.domain)
    return Certificate(
        r=l**pp / pp, h=h, N=1, D=D, x0=tuple(x0),
        w=ball_volume_coeff(1), L=compute_L(1, D),
        gamma_r=l, c0=0.25, c0_provenance="analytic",
        alpha_r=None, beta_h=None,
        lambda_interval=interval, checks=checks,
        k=k, l=l, nu=nu, reason=reason,
    )
