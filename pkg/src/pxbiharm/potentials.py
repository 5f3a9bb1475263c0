"""Leray-Lions potential families a(x,t), antiderivatives A(x,t), growth
constants, and the structural-hypothesis checker.

Built-in families:
  * power:            a = theta(x) |t|^{p(x)-2} t      (closed-form A)
  * perturbed_power:  a = theta(x) (1+t^2)^e t with e = (p-2)/2 ("standard")
                      or e = p/(p-2) ("paper_literal", singular at p = 2);
                      A by adaptive quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .exponents import ExponentField, conjugate
from .grids import GridFunction
from .spaces import luxemburg_norm

__all__ = [
    "PotentialSpec",
    "NonlinearitySpec",
    "HypothesisReport",
    "TSampler",
    "make_power_family",
    "make_perturbed_family",
    "antiderivative_A",
    "verify_hypotheses",
    "growth_constants",
    "builtin_nonlinearity",
]

_FIT_MARGIN = 0.05  # safety margin on sampled growth-constant fits


@dataclass
class PotentialSpec:
    """A potential family with its antiderivative and growth data.

    a_eval / A_eval take (theta_node, p_node, t) and are vectorized; the
    nodewise wrappers `a` and `A` broadcast over the grid.
    """

    family: str
    theta: np.ndarray
    p: ExponentField
    variant: str | None
    c1: float
    c2: float
    c3: float
    d: np.ndarray
    a_eval: callable = field(repr=False, default=None)
    A_eval: callable = field(repr=False, default=None)
    A_closed_form: bool = True

    @property
    def theta_0(self) -> float:
        return float(self.theta.min())

    def a(self, t) -> np.ndarray:
        """a(x, t) at every node; t broadcasts against the node arrays."""
        return self.a_eval(self.theta, self.p.values, np.asarray(t, float))

    def A(self, t) -> np.ndarray:
        return self.A_eval(self.theta, self.p.values, np.asarray(t, float))


@dataclass
class NonlinearitySpec:
    """Caratheodory right-hand side f(x,t) with antiderivative F and the
    growth data of the |f| <= xi(x) + zeta |t|^{q(x)-1} bound."""

    name: str
    f_eval: callable = field(repr=False)
    F_eval: callable = field(repr=False)
    xi: np.ndarray = None
    zeta: float = 1.0
    q: ExponentField = None

    def f(self, x, t) -> np.ndarray:
        x, t = np.asarray(x, float), np.asarray(t, float)
        out = self.f_eval(x, t)
        return np.array(np.broadcast_to(out, np.broadcast(x, t).shape), float)

    def F(self, x, t) -> np.ndarray:
        x, t = np.asarray(x, float), np.asarray(t, float)
        out = self.F_eval(x, t)
        return np.array(np.broadcast_to(out, np.broadcast(x, t).shape), float)


@dataclass(frozen=True)
class Witness:
    x: float
    t: float
    s: float | None
    lhs: float
    rhs: float


@dataclass
class HypothesisReport:
    status: dict          # name -> "pass" | "fail" | "unverifiable"
    witnesses: dict       # name -> Witness for failures

    @property
    def all_pass(self) -> bool:
        return all(v == "pass" for v in self.status.values())


@dataclass(frozen=True)
class TSampler:
    """Sampling grid for hypothesis checks: symmetric t range [-T, T] with
    log-spaced refinement near 0."""

    T: float = 10.0
    n_linear: int = 81
    n_log: int = 25

    def t_grid(self) -> np.ndarray:
        lin = np.linspace(-self.T, self.T, self.n_linear)
        logs = np.geomspace(1e-8, self.T, self.n_log)
        return np.unique(np.concatenate([lin, logs, -logs, [0.0]]))


def _power_a(theta, p, t):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = theta * np.abs(t) ** (p - 2.0) * t
    return np.where(np.asarray(t) == 0.0, 0.0, out)


def _power_A(theta, p, t):
    return theta * np.abs(t) ** p / p


def make_power_family(theta, p: ExponentField) -> PotentialSpec:
    """a = theta |t|^{p-2} t with closed-form antiderivative and constants."""
    theta = np.broadcast_to(np.asarray(theta, float), (p.grid.size,)).copy()
    if np.any(theta <= 0):
        raise ValueError("theta must be strictly positive")
    theta_max = float(theta.max())
    theta_0 = float(theta.min())
    return PotentialSpec(
        family="power",
        theta=theta,
        p=p,
        variant=None,
        c1=max(1.0, theta_max),
        c2=min(1.0, theta_0),
        c3=theta_max / p.p_minus,
        d=np.zeros(p.grid.size),
        a_eval=_power_a,
        A_eval=_power_A,
        A_closed_form=True,
    )


def _perturbed_exponent(p, variant):
    if variant == "paper_literal":
        return p / (p - 2.0)
    return (p - 2.0) / 2.0


def make_perturbed_family(theta, p: ExponentField,
                          variant: str = "standard") -> PotentialSpec:
    """a = theta (1+t^2)^e t; A by adaptive quadrature, constants by fit."""
    if variant not in ("standard", "paper_literal"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "paper_literal" and np.any(np.abs(p.values - 2.0) < 1e-12):
        raise ValueError("paper_literal variant has a singular exponent at p = 2")
    theta = np.broadcast_to(np.asarray(theta, float), (p.grid.size,)).copy()
    if np.any(theta <= 0):
        raise ValueError("theta must be strictly positive")

    def a_eval(th, pv, t):
        e = _perturbed_exponent(pv, variant)
        return th * (1.0 + t**2) ** e * t

    def A_eval(th, pv, t):
        th_b, pv_b, t_b = np.broadcast_arrays(th, pv, t)
        out = np.empty(th_b.shape)
        flat = out.reshape(-1)
        for i, (thi, pi, ti) in enumerate(
            zip(th_b.reshape(-1), pv_b.reshape(-1), t_b.reshape(-1))
        ):
            e = _perturbed_exponent(pi, variant)
            if ti == 0.0:
                flat[i] = 0.0
            else:
                val, _ = quad(lambda s: thi * (1 + s * s) ** e * s, 0.0, ti,
                              epsrel=1e-10, epsabs=1e-14, limit=200)
                flat[i] = val
        return out if out.shape else float(out)

    spec = PotentialSpec(
        family="perturbed_power",
        theta=theta,
        p=p,
        variant=variant,
        c1=np.nan,
        c2=np.nan,
        c3=np.nan,
        d=np.ones(p.grid.size),
        a_eval=a_eval,
        A_eval=A_eval,
        A_closed_form=False,
    )
    spec.c1, spec.c2, spec.c3, spec.d = growth_constants(spec, TSampler())
    return spec


def antiderivative_A(spec: PotentialSpec, node_index: int, t: float) -> float:
    """A(x, t) at one node: closed form when available, else quadrature."""
    th = spec.theta[node_index]
    pv = spec.p.values[node_index]
    return float(np.asarray(spec.A_eval(th, pv, t)))


def growth_constants(spec: PotentialSpec, sampler: TSampler):
    """(c1, c2, c3, d): closed-form for the power family, sampled fits with
    a 5% safety margin otherwise (c1, c3 inflated, c2 deflated)."""
    if spec.family == "power":
        theta_max = float(spec.theta.max())
        return (
            max(1.0, theta_max),
            min(1.0, float(spec.theta.min())),
            theta_max / spec.p.p_minus,
            np.zeros(spec.p.grid.size),
        )

    t = sampler.t_grid()
    t_nz = t[t != 0.0]
    d = np.ones(spec.p.grid.size)
    th = spec.theta[:, None]
    pv = spec.p.values[:, None]
    tt = t_nz[None, :]
    a_vals = spec.a_eval(th, pv, tt)
    A_vals = spec.A_eval(th, pv, tt)
    c1 = float(np.max(np.abs(a_vals) / (1.0 + np.abs(tt) ** (pv - 1.0))))
    c3 = float(np.max(np.abs(A_vals) / (np.abs(tt) + np.abs(tt) ** pv)))
    c2 = float(np.min(
        np.minimum(a_vals * tt, pv * A_vals) / np.abs(tt) ** pv
    ))
    return (
        c1 * (1.0 + _FIT_MARGIN),
        c2 * (1.0 - _FIT_MARGIN),
        c3 * (1.0 + _FIT_MARGIN),
        d,
    )


def _node_coords(grid):
    if grid.domain.kind == "rectangle":
        return grid.nodes[:, 0]
    return grid.nodes


def verify_hypotheses(spec: PotentialSpec, nl: NonlinearitySpec | None,
                      sampler: TSampler | None = None,
                      tol: float = 1e-9) -> HypothesisReport:
    """Sample the structural inequalities on an x*t (and t*s) product grid.

    The monotonicity condition is checked in its strict monotone form
    (a(x,t) - a(x,s))(t - s) > 0 for t != s.  Failures are data, not
    errors; each failure carries a witness point.
    """
    sampler = sampler or TSampler()
    t = sampler.t_grid()
    x = _node_coords(spec.p.grid)
    th = spec.theta[:, None]
    pv = spec.p.values[:, None]
    tt = t[None, :]

    status, witnesses = {}, {}

    def record(name, ok_mask, lhs, rhs, t_axis, s_vals=None):
        if np.all(ok_mask):
            status[name] = "pass"
            return
        status[name] = "fail"
        idx = np.unravel_index(np.argmin(ok_mask), ok_mask.shape)
        witnesses[name] = Witness(
            x=float(x[idx[0]]),
            t=float(t_axis[idx[1]]),
            s=None if s_vals is None else float(s_vals[idx[-1]]),
            lhs=float(np.asarray(lhs)[idx]),
            rhs=float(np.asarray(rhs)[idx]),
        )

    # H1: a(x, 0) = 0
    a0 = spec.a_eval(spec.theta, spec.p.values, 0.0)
    if np.all(np.abs(a0) <= tol):
        status["H1"] = "pass"
    else:
        status["H1"] = "fail"
        i = int(np.argmax(np.abs(a0)))
        witnesses["H1"] = Witness(float(x[i]), 0.0, None, float(a0[i]), 0.0)

    a_vals = spec.a_eval(th, pv, tt)
    A_vals = spec.A_eval(th, pv, tt)

    # H2: |a| <= c1 (d + |t|^{p-1})
    rhs2 = spec.c1 * (spec.d[:, None] + np.abs(tt) ** (pv - 1.0))
    record("H2", np.abs(a_vals) <= rhs2 + tol, np.abs(a_vals), rhs2, t)

    # H3: strict monotonicity of t -> a(x, t)
    t_sub = t[:: max(1, len(t) // 40)]
    a_sub = spec.a_eval(th, pv, t_sub[None, :])
    diff_a = a_sub[:, :, None] - a_sub[:, None, :]
    diff_t = t_sub[None, :, None] - t_sub[None, None, :]
    prod = diff_a * diff_t
    ok3 = (prod > 0.0) | (np.abs(diff_t) < 1e-12)
    if np.all(ok3):
        status["H3"] = "pass"
    else:
        status["H3"] = "fail"
        idx = np.unravel_index(np.argmin(ok3), ok3.shape)
        witnesses["H3"] = Witness(
            x=float(x[idx[0]]), t=float(t_sub[idx[1]]), s=float(t_sub[idx[2]]),
            lhs=float(prod[idx]), rhs=0.0,
        )

    # H4: c2 |t|^p <= min{a t, p A}
    lhs4 = spec.c2 * np.abs(tt) ** pv
    rhs4 = np.minimum(a_vals * tt, pv * A_vals)
    mask_nz = np.abs(tt) > 0
    record("H4", (lhs4 <= rhs4 + tol) | ~mask_nz, lhs4, rhs4, t)
    if not np.isfinite(spec.c2) or spec.c2 < 1.0:
        status["H4"] = "fail"
        witnesses.setdefault(
            "H4", Witness(float(x[0]), 0.0, None, spec.c2, 1.0)
        )

    # H5: |f| <= xi + zeta |t|^{q-1}
    if nl is None:
        status["H5"] = "unverifiable"
    else:
        f_vals = nl.f(x[:, None], tt)
        rhs5 = nl.xi[:, None] + nl.zeta * np.abs(tt) ** (nl.q.values[:, None] - 1.0)
        record("H5", np.abs(f_vals) <= rhs5 + tol, np.abs(f_vals), rhs5, t)
        if not (1.0 < nl.q.p_minus <= nl.q.p_plus < spec.p.p_minus):
            status["H5"] = "fail"
            witnesses.setdefault(
                "H5", Witness(float(x[0]), 0.0, None, nl.q.p_plus, spec.p.p_minus)
            )

    return HypothesisReport(status, witnesses)


def d_norm_conjugate(spec: PotentialSpec) -> float:
    """|d|_{p(x)/(p(x)-1)}: Luxemburg norm of the H2 weight with the
    conjugate exponent."""
    d_fun = GridFunction(spec.p.grid, spec.d.copy(), bc="none")
    return luxemburg_norm(d_fun, conjugate(spec.p)).value


# ---------------------------------------------------------------------------
# built-in nonlinearities

def _const_field(grid, v):
    return np.broadcast_to(np.asarray(v, float), (grid.size,)).copy()


def builtin_nonlinearity(name: str, grid, q: ExponentField,
                         xi=None, zeta: float = 1.0,
                         alpha=None, g=None, G=None) -> NonlinearitySpec:
    """Built-in right-hand sides; all have f(x,0) != 0.

    Names: "const:<c>", "rational_bump" (1/(1+t^2) + 1), "exp_abs"
    (e^{-|t|} + 1), "separable" (alpha(x) g(t) with user g, G).
    """
    if name.startswith("const:"):
        c = float(name.split(":", 1)[1])
        spec = NonlinearitySpec(
            name=name,
            f_eval=lambda x, t: np.full(np.broadcast(x, t).shape, c),
            F_eval=lambda x, t: c * t,
            xi=_const_field(grid, abs(c) if xi is None else xi),
            zeta=zeta,
            q=q,
        )
    elif name == "rational_bump":
        spec = NonlinearitySpec(
            name=name,
            f_eval=lambda x, t: 1.0 / (1.0 + t**2) + 1.0,
            F_eval=lambda x, t: np.arctan(t) + t,
            xi=_const_field(grid, 2.0 if xi is None else xi),
            zeta=zeta,
            q=q,
        )
    elif name == "exp_abs":
        spec = NonlinearitySpec(
            name=name,
            f_eval=lambda x, t: np.exp(-np.abs(t)) + 1.0,
            F_eval=lambda x, t: np.sign(t) * (1.0 - np.exp(-np.abs(t))) + t,
            xi=_const_field(grid, 2.0 if xi is None else xi),
            zeta=zeta,
            q=q,
        )
    elif name == "separable":
        if g is None or G is None or alpha is None:
            raise ValueError("separable nonlinearity needs alpha, g and G")
        alpha_vals = _const_field(grid, alpha)
        spec = NonlinearitySpec(
            name=name,
            f_eval=lambda x, t, _a=alpha_vals: _alpha_at(grid, x, _a) * g(t),
            F_eval=lambda x, t, _a=alpha_vals: _alpha_at(grid, x, _a) * G(t),
            xi=_const_field(grid, float(np.max(np.abs(alpha_vals))) *
                            _sup_abs(g) if xi is None else xi),
            zeta=zeta,
            q=q,
        )
    else:
        raise ValueError(f"unknown builtin nonlinearity {name!r}")
    return spec


def _alpha_at(grid, x, alpha_vals):
    """Map coordinate samples back to nodal alpha values (nearest node)."""
    coords = _node_coords(grid)
    x = np.asarray(x, float)
    idx = np.clip(
        np.searchsorted(coords, np.clip(x, coords[0], coords[-1])),
        0, len(coords) - 1,
    )
    return alpha_vals[idx]


def _sup_abs(g, T: float = 1e4, n: int = 4001) -> float:
    t = np.linspace(-T, T, n)
    return float(np.max(np.abs(g(t))))
