"""Command-line front end.

Subcommands: check-spaces, hypotheses, certify, solve, sweep.
Machine-readable JSON goes to stdout (or --out); human text to stderr.
Exit codes: 0 success/feasible, 1 infeasible-but-valid, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys

import numpy as np

from . import certificate as cert
from . import config as cfgmod
from . import potentials as pot
from . import solver as sol
from . import spaces
from .config import ConfigError
from .energy import ProblemInstance
from .grids import GridFunction

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_BAD_INPUT = 2


def _emit(payload: dict, out_path: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _info(msg: str):
    print(msg, file=sys.stderr)


def _load(args) -> cfgmod.RunConfig:
    cfg = cfgmod.load_config(args.config)
    if getattr(args, "grid_n", None):
        cfg.grid_n = args.grid_n
    if getattr(args, "seed", None) is not None:
        cfg.solver.seed = args.seed
    return cfg


# ---------------------------------------------------------------------------

def cmd_check_spaces(args) -> int:
    cfg = _load(args)
    inst = cfgmod.build_problem(cfg, lam=1.0, verify=False)
    grid, p = inst.grid, inst.p
    rng = np.random.default_rng(cfg.solver.seed)
    checks = {}

    def rand_u(bc="navier"):
        vals = np.zeros(grid.size)
        vals[grid.interior_mask] = rng.standard_normal(
            int(grid.interior_mask.sum()))
        return GridFunction(grid, vals, bc=bc)

    # Lemma 2.2(1): norm-vs-modular trichotomy under exact rescaling
    ok = True
    for _ in range(20):
        u = rand_u()
        nrm = spaces.laplacian_norm(u, p).value
        if nrm == 0:
            continue
        for target, rel in ((0.5, "lt"), (1.0, "eq"), (2.0, "gt")):
            su = GridFunction(grid, u.values * (target / nrm), bc="navier")
            m = spaces.laplacian_modular(su, p)
            if rel == "lt":
                ok &= m < 1.0
            elif rel == "gt":
                ok &= m > 1.0
            else:
                ok &= abs(m - 1.0) < 1e-8
    checks["lemma_modular_trichotomy"] = bool(ok)

    # modular sandwich between ||u||^{p-} and ||u||^{p+}; fields are
    # rescaled to moderate norms so the bisection error stays below the slack
    ok = True
    for _ in range(20):
        u = rand_u()
        nrm = spaces.laplacian_norm(u, p).value
        if nrm == 0:
            continue
        target = 0.5 + 2.0 * rng.random()
        u = GridFunction(grid, u.values * (target / nrm), bc="navier")
        nrm = spaces.laplacian_norm(u, p).value
        m = spaces.laplacian_modular(u, p)
        lo = min(nrm**p.p_minus, nrm**p.p_plus)
        hi = max(nrm**p.p_minus, nrm**p.p_plus)
        ok &= lo - 1e-8 <= m <= hi + 1e-8
    checks["lemma_modular_sandwich"] = bool(ok)

    # homogeneity and triangle inequality of the Luxemburg norm
    ok = True
    for _ in range(20):
        u, v = rand_u("none"), rand_u("none")
        c = float(rng.standard_normal())
        nu = spaces.luxemburg_norm(u, p).value
        ok &= abs(spaces.luxemburg_norm(
            GridFunction(grid, c * u.values), p).value - abs(c) * nu) < 1e-8
        nv = spaces.luxemburg_norm(v, p).value
        nsum = spaces.luxemburg_norm(
            GridFunction(grid, u.values + v.values), p).value
        ok &= nsum <= nu + nv + 1e-8
    checks["norm_axioms"] = bool(ok)

    # Holder inequality on random pairs
    ok = True
    for _ in range(50):
        rep = spaces.check_holder(rand_u("none"), rand_u("none"), p)
        ok &= rep.holds
    checks["holder"] = bool(ok)

    payload = {"checks": checks, "all_pass": all(checks.values())}
    _emit(payload, args.out)
    return EXIT_OK if payload["all_pass"] else EXIT_INFEASIBLE


def cmd_hypotheses(args) -> int:
    cfg = _load(args)
    inst = cfgmod.build_problem(cfg, lam=1.0, verify=False)
    report = pot.verify_hypotheses(inst.potential, inst.nonlinearity)
    payload = {
        "status": report.status,
        "witnesses": {
            k: dataclasses.asdict(v) for k, v in report.witnesses.items()
        },
        "all_pass": report.all_pass,
    }
    _emit(payload, args.out)
    return EXIT_OK if report.all_pass else EXIT_INFEASIBLE


def _certify_from_config(cfg: cfgmod.RunConfig, inst: ProblemInstance):
    block = cfg.certificate
    if block.get("dim1"):
        nl = inst.nonlinearity
        if nl.name != "separable":
            raise ConfigError(
                "dim1 certificate needs a separable nonlinearity alpha(x) g(t)")
        alpha = cfg.nonlinearity.get("alpha", 1.0)
        tg = np.asarray(cfg.nonlinearity["g_t"], float)
        gv = np.asarray(cfg.nonlinearity["g_values"], float)
        g = lambda t: np.interp(np.abs(t), tg, gv)  # noqa: E731
        Gtab = np.concatenate([[0.0], np.cumsum(
            np.diff(tg) * 0.5 * (gv[1:] + gv[:-1]))])
        G = lambda t: np.sign(t) * np.interp(np.abs(t), tg, Gtab)  # noqa: E731
        return cert.dim1_certificate(
            g, alpha, inst.p, l=float(block.get("l", 1.0)),
            h=float(block["h"]), c3=inst.potential.c3, G=G, grid=inst.grid)
    h = float(block["h"]) if "h" in block else None
    if block.get("h_scan") or h is None:
        best = None
        for h_try in np.geomspace(1e-2, 1e2, 25):
            c = cert.certify(inst, float(block.get("r", 1.0)), float(h_try),
                             check_convergence=False)
            ratio = (c.beta_h / c.alpha_r) if c.alpha_r else np.inf
            if best is None or ratio > best[0] + 1e-15:
                best = (ratio, float(h_try))
        h = best[1]
        _info(f"h-scan selected h = {h:g}")
    return cert.certify(inst, float(block.get("r", 1.0)), h)


def cmd_certify(args) -> int:
    cfg = _load(args)
    inst = cfgmod.build_problem(cfg, lam=1.0, verify=True)
    certificate = _certify_from_config(cfg, inst)
    if certificate.c0_provenance == "numerical-estimate":
        _info("caveat: c0 is a numerical estimate; the interval is only as "
              "rigorous as c0")
    _emit(json.loads(certificate.to_json()), args.out)
    return EXIT_OK if certificate.feasible else EXIT_INFEASIBLE


def _write_solutions_csv(path: str, inst: ProblemInstance, sols):
    grid = inst.grid
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        if grid.domain.kind == "rectangle":
            header = ["x1", "x2"]
            coords = [list(map(repr, row)) for row in grid.nodes]
        else:
            header = ["x"]
            coords = [[repr(v)] for v in grid.nodes]
        header += [f"u{i}" for i in range(len(sols.points))]
        wr.writerow(header)
        for j in range(grid.size):
            wr.writerow(coords[j] +
                        [repr(p.u.values[j]) for p in sols.points])


def cmd_solve(args) -> int:
    cfg = _load(args)
    lam = args.lam if args.lam is not None else cfg.lam
    if lam is None or lam <= 0:
        raise ConfigError("lambda must be positive (pass --lambda or config)")
    inst = cfgmod.build_problem(cfg, lam=lam, verify=True)
    s = cfg.solver
    vb = float(cfg.certificate.get("h", 1.0))
    sols = sol.deflate_and_search(
        inst, k_max=s.k_max, n_starts=s.n_starts, seed=s.seed, tol=s.tol,
        vbar_scale=vb)
    _write_solutions_csv(cfg.output.solutions_csv, inst, sols)
    payload = {
        "lambda": lam,
        "n_solutions": len(sols.points),
        "energies": [p.energy for p in sols.points],
        "residual_norms": [p.residual_norm for p in sols.points],
        "solutions_csv": cfg.output.solutions_csv,
    }
    _emit(payload, args.out)
    return EXIT_OK if sols.points else EXIT_INFEASIBLE


def cmd_sweep(args) -> int:
    cfg = _load(args)
    inst = cfgmod.build_problem(cfg, lam=1.0, verify=True)
    certificate = _certify_from_config(cfg, inst)
    if not certificate.feasible:
        _info("certificate interval is empty; nothing to sweep")
        _emit(json.loads(certificate.to_json()), args.out)
        return EXIT_INFEASIBLE
    s = cfg.solver
    rows = sol.lambda_sweep(
        inst, certificate.lambda_interval, s.sweep_m, k_max=s.k_max,
        n_starts=s.n_starts, seed=s.seed, tol=s.tol,
        vbar_scale=float(cfg.certificate.get("h", 1.0)))
    with open(cfg.output.sweep_csv, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["lambda", "n_solutions", "energies"])
        for row in rows:
            wr.writerow([repr(row["lambda"]), row["n_solutions"],
                         ";".join(repr(e) for e in row["energies"])])
    payload = {
        "lambda_interval": list(certificate.lambda_interval),
        "rows": rows,
        "sweep_csv": cfg.output.sweep_csv,
    }
    _emit(payload, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pxbiharm",
        description="Variable-exponent norms, three-solution certificates "
                    "and deflated solvers for fourth-order problems",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in [
        ("check-spaces", cmd_check_spaces),
        ("hypotheses", cmd_hypotheses),
        ("certify", cmd_certify),
        ("solve", cmd_solve),
        ("sweep", cmd_sweep),
    ]:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--grid-n", dest="grid_n", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        if name == "solve":
            p.add_argument("--lambda", dest="lam", type=float, default=None)
        p.set_defaults(func=fn)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        _info(f"error: {exc}")
        return EXIT_BAD_INPUT
    except ValueError as exc:
        _info(f"error: {exc}")
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
