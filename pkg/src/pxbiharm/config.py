"""Run configuration: a single versioned JSON document parsed into
dataclasses, with strict unknown-key rejection."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import exponents as ex
from . import potentials as pot
from .grids import Domain, Grid, build_grid

__all__ = ["ConfigError", "RunConfig", "load_config", "build_problem"]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


def _require_keys(block: dict, allowed: set, required: set, where: str):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = required - set(block)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


@dataclass
class SolverConfig:
    tol: float = 1e-8
    max_iter: int = 10_000
    n_starts: int = 12
    k_max: int = 6
    seed: int = 0
    sweep_m: int = 7


@dataclass
class OutputConfig:
    solutions_csv: str = "solutions.csv"
    sweep_csv: str = "sweep.csv"


@dataclass
class RunConfig:
    domain: dict
    grid_n: int
    exponent: dict
    potential: dict
    nonlinearity: dict
    certificate: dict = field(default_factory=dict)
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    lam: float | None = None


def load_config(path_or_dict) -> RunConfig:
    if isinstance(path_or_dict, dict):
        doc = path_or_dict
    else:
        with open(path_or_dict, "r", encoding="utf-8") as fh:
            doc = json.load(fh)

    _require_keys(
        doc,
        {"schema", "domain", "grid_n", "exponent", "potential",
         "nonlinearity", "certificate", "solver", "output", "lambda"},
        {"schema", "domain", "grid_n", "exponent", "potential",
         "nonlinearity"},
        "config",
    )
    if doc["schema"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {doc['schema']!r}")

    dom = doc["domain"]
    _require_keys(dom, {"kind", "a", "b", "N", "R"}, {"kind"}, "domain")
    expo = doc["exponent"]
    _require_keys(expo, {"kind", "value", "a", "b", "values"}, {"kind"},
                  "exponent")
    potb = doc["potential"]
    _require_keys(potb, {"family", "theta", "variant"}, {"family"},
                  "potential")
    nlb = doc["nonlinearity"]
    _require_keys(nlb, {"kind", "xi", "zeta", "q", "alpha", "g_t", "g_values"},
                  {"kind"}, "nonlinearity")
    certb = doc.get("certificate", {})
    _require_keys(certb, {"r", "h", "h_scan", "dim1", "l"}, set(),
                  "certificate")
    solvb = dict(doc.get("solver", {}))
    _require_keys(solvb, {"tol", "max_iter", "n_starts", "k_max", "seed",
                          "sweep_m"}, set(), "solver")
    outb = dict(doc.get("output", {}))
    _require_keys(outb, {"solutions_csv", "sweep_csv"}, set(), "output")

    grid_n = int(doc["grid_n"])
    if grid_n < 5:
        raise ConfigError("grid_n must be at least 5")
    lam = doc.get("lambda")
    if lam is not None and float(lam) <= 0:
        raise ConfigError("lambda must be positive")

    return RunConfig(
        domain=dom,
        grid_n=grid_n,
        exponent=expo,
        potential=potb,
        nonlinearity=nlb,
        certificate=certb,
        solver=SolverConfig(**solvb),
        output=OutputConfig(**outb),
        lam=None if lam is None else float(lam),
    )


def build_domain(cfg: RunConfig) -> Domain:
    d = cfg.domain
    try:
        return Domain(
            kind=d["kind"],
            a=float(d.get("a", 1.0)),
            b=float(d.get("b", 1.0)),
            N=int(d.get("N", 2)),
            R=float(d.get("R", 1.0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_exponent(cfg: RunConfig, grid: Grid) -> ex.ExponentField:
    e = cfg.exponent
    try:
        if e["kind"] == "constant":
            return ex.constant_exponent(grid, float(e["value"]))
        if e["kind"] == "affine":
            return ex.affine_exponent(grid, float(e["a"]), float(e["b"]))
        if e["kind"] == "table":
            xs = np.linspace(0.0, 1.0, len(e["values"]))
            coords = grid.nodes if grid.nodes.ndim == 1 else grid.nodes[:, 0]
            span = coords.max() - coords.min()
            rel = (coords - coords.min()) / (span if span else 1.0)
            return ex.tabulated_exponent(grid, np.interp(rel, xs, e["values"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid exponent block: {exc}") from exc
    raise ConfigError(f"unknown exponent kind {e['kind']!r}")


def build_potential(cfg: RunConfig, p: ex.ExponentField) -> pot.PotentialSpec:
    b = cfg.potential
    theta = b.get("theta", 1.0)
    try:
        if b["family"] == "power":
            return pot.make_power_family(theta, p)
        if b["family"] == "perturbed_power":
            return pot.make_perturbed_family(
                theta, p, b.get("variant", "standard"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown potential family {b['family']!r}")


def build_nonlinearity(cfg: RunConfig, grid: Grid,
                       p: ex.ExponentField) -> pot.NonlinearitySpec:
    b = cfg.nonlinearity
    qv = b.get("q", 1.5)
    q = ex.constant_exponent(grid, float(qv))
    if not q.p_plus < p.p_minus:
        raise ConfigError("nonlinearity exponent q must satisfy q^+ < p^-")
    kind = b["kind"]
    try:
        if kind.startswith("builtin:"):
            name = kind.split(":", 1)[1]
            return pot.builtin_nonlinearity(
                name, grid, q, xi=b.get("xi"), zeta=float(b.get("zeta", 1.0)))
        if kind == "table":
            tg = np.asarray(b["g_t"], float)
            gv = np.asarray(b["g_values"], float)
            if tg.size != gv.size or tg.size < 2:
                raise ConfigError("tabulated g needs matching g_t/g_values")
            g = lambda t: np.interp(np.abs(t), tg, gv)  # noqa: E731
            Gtab = np.concatenate([[0.0], np.cumsum(
                np.diff(tg) * 0.5 * (gv[1:] + gv[:-1]))])
            G = lambda t: np.sign(t) * np.interp(np.abs(t), tg, Gtab)  # noqa: E731
            return pot.builtin_nonlinearity(
                "separable", grid, q, xi=b.get("xi"),
                zeta=float(b.get("zeta", 1.0)),
                alpha=b.get("alpha", 1.0), g=g, G=G)
    except ConfigError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid nonlinearity block: {exc}") from exc
    raise ConfigError(f"unknown nonlinearity kind {kind!r}")


def build_problem(cfg: RunConfig, lam: float | None = None,
                  verify: bool = True):
    """Grid, exponent, potential, nonlinearity and a ProblemInstance."""
    from .energy import ProblemInstance

    domain = build_domain(cfg)
    grid = build_grid(domain, cfg.grid_n)
    p = build_exponent(cfg, grid)
    spec = build_potential(cfg, p)
    nl = build_nonlinearity(cfg, grid, p)
    lam = lam if lam is not None else (cfg.lam if cfg.lam is not None else 1.0)
    report = pot.verify_hypotheses(spec, nl) if verify else None
    inst = ProblemInstance(grid, p, spec, nl, lam,
                           hypothesis_report=report,
                           allow_failed_hypotheses=not verify)
    return inst
