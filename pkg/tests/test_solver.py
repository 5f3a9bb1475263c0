"""Descent, Newton polish, deflation and the lambda sweep."""

import numpy as np
import pytest

from pxbiharm.energy import ProblemInstance
from pxbiharm.grids import Domain, GridFunction, build_grid
from pxbiharm.solver import SolutionSet, deflate_and_search, lambda_sweep, minimize

from conftest import make_instance, spike_instance


def beam_exact(x):
    """(u'')'' = 1 with Navier conditions on (0,1)."""
    return x**4 / 24 - x**3 / 12 + x / 24


def test_minimize_solves_beam():
    grid = build_grid(Domain("interval"), 101)
    inst = make_instance(grid)
    u0 = GridFunction.zeros(grid)
    pt = minimize(inst, u0)
    assert pt.converged
    assert pt.residual_norm <= 1e-8
    err = np.max(np.abs(pt.u.values - beam_exact(grid.nodes)))
    assert err < 1e-4


def test_minimize_scaling_in_lambda():
    # the p = 2 problem is linear: u_lambda = lambda * u_1
    grid = build_grid(Domain("interval"), 81)
    u1 = minimize(make_instance(grid, lam=1.0), GridFunction.zeros(grid))
    u3 = minimize(make_instance(grid, lam=3.0), GridFunction.zeros(grid))
    assert np.max(np.abs(u3.u.values - 3.0 * u1.u.values)) < 1e-7


def test_ball_radial_solve_matches_ode_solution():
    # Delta^2 u = 1 on the unit disk, radial: u = (1 - r^2)(3 - r^2)/64
    grid = build_grid(Domain("ball_radial", N=2, R=1.0), 101)
    inst = make_instance(grid)
    pt = minimize(inst, GridFunction.zeros(grid))
    r = grid.nodes
    exact = (1 - r**2) * (3 - r**2) / 64
    assert pt.converged
    assert np.max(np.abs(pt.u.values - exact)) < 1e-4


def test_solution_set_distinctness():
    grid = build_grid(Domain("interval"), 17)
    inst = make_instance(grid)
    s = SolutionSet()
    u = GridFunction.zeros(grid)
    s.points.append(minimize(inst, u))
    assert not s.is_distinct(s.points[0].u.values, 1e-3)
    far = s.points[0].u.values + 1.0
    assert s.is_distinct(far, 1e-3)


def test_deflation_finds_three_on_spike_fixture():
    """Inside the certified interval of the ridge nonlinearity the energy
    landscape carries at least three critical points."""
    grid = build_grid(Domain("interval"), 101)
    inst = spike_instance(grid, lam=30.0)
    sols = deflate_and_search(inst, k_max=5, n_starts=6, seed=0,
                              vbar_scale=1.2)
    assert len(sols.points) >= 3
    d = sols.pairwise_dist
    k = len(sols.points)
    assert all(d[i, j] > 1e-3 for i in range(k) for j in range(i + 1, k))
    assert all(p.residual_norm <= 1e-8 for p in sols.points)
    # energies sorted ascending
    energies = [p.energy for p in sols.points]
    assert energies == sorted(energies)


def test_deflation_deterministic_given_seed():
    grid = build_grid(Domain("interval"), 61)
    inst = make_instance(grid, nl_name="rational_bump", lam=0.27)
    a = deflate_and_search(inst, k_max=3, n_starts=3, seed=4)
    b = deflate_and_search(inst, k_max=3, n_starts=3, seed=4)
    assert len(a.points) == len(b.points)
    for pa, pb in zip(a.points, b.points):
        assert np.array_equal(pa.u.values, pb.u.values)


def test_deflation_unique_regime_returns_one():
    # small lambda with a near-linear load: contraction regime, one solution
    grid = build_grid(Domain("interval"), 61)
    inst = make_instance(grid, nl_name="rational_bump", lam=0.1)
    sols = deflate_and_search(inst, k_max=4, n_starts=4, seed=0,
                              vbar_scale=0.1)
    assert len(sols.points) == 1


def test_lambda_sweep_rows():
    grid = build_grid(Domain("interval"), 61)
    inst = make_instance(grid, nl_name="rational_bump", lam=1.0)
    rows = lambda_sweep(inst, (0.2, 0.3), m=3, k_max=2, n_starts=2, seed=0,
                        vbar_scale=0.1)
    assert len(rows) == 3
    lams = [r["lambda"] for r in rows]
    # straddles the certified interval: [0.1, 0.6] log-spaced
    assert lams[0] == pytest.approx(0.1)
    assert lams[-1] == pytest.approx(0.6)
    for r in rows:
        assert r["n_solutions"] == len(r["energies"])
        assert all(res <= 1e-8 for res in r["residuals"])


def test_lambda_sweep_needs_two_points():
    grid = build_grid(Domain("interval"), 61)
    inst = make_instance(grid)
    with pytest.raises(ValueError):
        lambda_sweep(inst, (0.1, 1.0), m=1)
