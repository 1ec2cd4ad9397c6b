import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from proxcg.bench import (CostMatrix, RunSummary, aggregate, cost_matrices, dolan_more,
                          rate_envelope, run_suite)
from proxcg.problems import LassoSpec
from proxcg.solver import SolverConfig


def cm(costs, solvers=None):
    costs = np.asarray(costs, dtype=float)
    solvers = solvers or tuple(f"s{j}" for j in range(costs.shape[1]))
    return CostMatrix(solvers, tuple(f"p{i}" for i in range(costs.shape[0])), costs)


def test_two_by_two():
    t = dolan_more(cm([[1, 2], [2, 1]]))
    np.testing.assert_array_equal(t.taus, [1.0, 2.0, np.inf])
    for s in t.solvers:
        assert t.at(s, 1.0) == 0.5 and t.at(s, 2.0) == 1.0
        assert t.at(s, 1.5) == 0.5 and t.at(s, 0.5) == 0.0
    assert t.P.shape == (2, 3)


def test_single_solver():
    t = dolan_more(cm([[3.0], [7.0], [1.0]]))
    assert np.all(t.P == 1.0)


def test_dnf_plateau():
    t = dolan_more(cm([[1, np.nan], [2, 1]]))
    assert t.at("s1", np.inf) == 0.5 and t.at("s1", 1e9) == 0.5
    assert t.at("s0", 2.0) == 1.0


def test_errors():
    with pytest.raises(ValueError):
        dolan_more(cm(np.zeros((0, 2))))
    with pytest.raises(ValueError):
        dolan_more(cm([[np.nan, np.nan], [1, 2]]))
    with pytest.raises(ValueError):
        cm([[0.0, 1.0]])


cost = st.one_of(st.floats(0.5, 1000), st.just(np.nan))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.data())
def test_profile_invariants(n_p, n_s, data):
    c = np.array([[data.draw(cost) for _ in range(n_s)] for _ in range(n_p)])
    for i in range(n_p):
        if np.all(np.isnan(c[i])):
            c[i, 0] = 1.0
    t = dolan_more(cm(c))
    assert t.taus[0] == 1.0 and t.taus[-1] == np.inf
    assert np.all(np.diff(t.taus) > 0)
    assert np.all((t.P >= 0) & (t.P <= 1))
    assert np.all(np.diff(t.P, axis=1) >= 0)
    # P at tau=1 counts problems where the solver is (one of) the best
    best = np.nanmin(c, axis=1)
    for j in range(n_s):
        assert t.P[j, 0] == np.mean(c[:, j] == best)
    # scaling a problem row leaves the profile unchanged
    scaled = c.copy()
    scaled[0] *= 3.7
    t2 = dolan_more(cm(scaled))
    np.testing.assert_allclose(t2.P[:, -1], t.P[:, -1])
    for j in range(n_s):
        for tau in t.taus:
            assert t2.at(f"s{j}", tau * (1 + 1e-12)) == t.at(f"s{j}", tau * (1 + 1e-12))


def test_rate_envelope():
    x_ref = np.array([1.0, 2.0])
    assert rate_envelope([x_ref] * 5, x_ref) == 0.0
    its = [x_ref + [1 / np.sqrt(k + 1), 0.0] for k in range(50)]
    assert rate_envelope(its, x_ref) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        rate_envelope([], x_ref)


def test_run_suite_bookkeeping():
    runs, costs = run_suite([LassoSpec(40, 15, 3)], ["alg31", "pgm"], repetitions=10)
    assert len(runs) == 20
    assert {r.seed for r in runs} == set(range(10))
    agg = aggregate(runs)
    assert set(agg) == {(runs[0].problem, "alg31"), (runs[0].problem, "pgm")}
    for solver in ("alg31", "pgm"):
        rs = [r for r in runs if r.solver == solver]
        a = agg[(runs[0].problem, solver)]
        assert a["mean_iterations"] == pytest.approx(np.mean([r.iterations for r in rs]))
        assert a["mean_switches"] == pytest.approx(np.mean([r.switches for r in rs]))
        assert a["converged"] == 10
    assert costs["iterations"].costs.shape == (10, 2)


def test_single_repetition_aggregate_equals_run():
    runs, _ = run_suite([LassoSpec(30, 10, 2, seed=0)], ["alg31"], repetitions=1)
    (r,) = runs
    a = aggregate(runs)[(r.problem, "alg31")]
    assert a["mean_iterations"] == r.iterations and a["mean_time"] == r.wall_time
    assert a["switch_ratio"] == pytest.approx(100 * r.switch_ratio)


def test_workers_do_not_change_results():
    specs = [LassoSpec(30, 10, 2)]
    a, _ = run_suite(specs, ["alg31", "apg"], repetitions=3)
    b, _ = run_suite(specs, ["alg31", "apg"], repetitions=3, workers=2)
    strip = lambda rs: [(r.problem, r.seed, r.solver, r.iterations, r.final_f) for r in rs]
    assert strip(a) == strip(b)


def test_dnf_cells():
    runs, costs = run_suite([LassoSpec(30, 10, 2)], ["alg31", "pgm"], repetitions=2,
                            config=SolverConfig(max_iter=5), baseline_increase=False)
    assert all(not r.converged for r in runs)
    assert np.all(np.isnan(costs["iterations"].costs))


def test_cost_matrix_rows_per_instance():
    rs = [RunSummary("p", "lasso", s, v, "converged", it, 0.1, 0.0, 0.0, 0)
          for s, v, it in ((0, "a", 4), (0, "b", 8), (1, "a", 0), (1, "b", 2))]
    c = cost_matrices(rs)["iterations"]
    np.testing.assert_array_equal(c.costs, [[4, 8], [1, 2]])
