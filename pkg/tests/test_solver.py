import io
import math

import numpy as np
import pytest

from conftest import random_phases
from fasisac.config import DomainError
from fasisac.metrics import achievable_rate, aligned_witness, beampattern_gain
from fasisac.solver import (INFEASIBLE, MAX_ITERS, OPTIMAL, SolverOptions, solve_covariance,
                            waterfilling_oracle)
from solver_oracles import sample_feasible_rates


def instance(rng, m0, N):
    G = random_phases(rng, (m0, N))
    a = random_phases(rng, m0)
    a[0] = 1
    return G, a


def check_constraints(res, a, P_C, Gamma):
    W = res.W
    assert np.abs(W - W.conj().T).max() <= 1e-9 * max(1, np.abs(W).max())
    tr = np.trace(W).real
    assert tr <= P_C * (1 + 1e-8)
    assert beampattern_gain(W, a) >= Gamma * (1 - 1e-8)
    assert np.linalg.eigvalsh(W)[0] >= -1e-8 * tr


@pytest.mark.parametrize("N", [1, 2, 4])
def test_scalar_closed_form(rng, N):
    G, _ = instance(rng, 1, N)
    res = solve_covariance(G, np.ones(1), 5.0, 2.0, 1e-3)
    assert res.status == OPTIMAL
    assert res.W[0, 0].real == pytest.approx(5.0, rel=1e-12)
    assert res.objective == pytest.approx(math.log2(1 + N * 5.0 / 1e-3), rel=1e-8)


def test_waterfilling_oracle_examples():
    G = np.array([[1.0]])
    wf = waterfilling_oracle(G, 1.0, 1.0)
    assert np.trace(wf.W).real == pytest.approx(1.0)
    assert achievable_rate(wf.W, G, 1.0) == pytest.approx(1.0, rel=1e-14)

    wf = waterfilling_oracle(np.eye(2), 3.0, 0.5)
    assert wf.powers == pytest.approx([1.5, 1.5], rel=1e-12)

    # eigenvalues {1, 1e-6}: water level 1.1 stays far below the weak floor 1e6
    wf = waterfilling_oracle(np.diag([1.0, 1e-3]), 0.1, 1.0)
    assert wf.water_level == pytest.approx(1.1, rel=1e-12)
    assert sorted(wf.powers) == pytest.approx([0.0, 0.1], abs=1e-15)


def test_waterfilling_zero_channel():
    wf = waterfilling_oracle(np.zeros((3, 2)), 1.0, 1.0)
    assert wf.zero_channel
    assert not wf.W.any()


def test_matches_waterfilling_without_sensing(rng):
    for _ in range(25):
        m0, N = int(rng.integers(1, 9)), int(rng.integers(1, 5))
        G, a = instance(rng, m0, N)
        P, s2 = rng.uniform(0.1, 10), 10 ** rng.uniform(-6, 1)
        res = solve_covariance(G, a, P, 0.0, s2)
        wf = achievable_rate(waterfilling_oracle(G, P, s2).W, G, s2)
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(wf, rel=1e-6)
        assert res.objective <= wf * (1 + 1e-8) + 1e-12


def test_binding_sensing_beats_random_samples(rng):
    for _ in range(3):
        G, a = instance(rng, 2, int(rng.integers(1, 4)))
        P, s2 = 2.0, 0.05
        g_wf = beampattern_gain(waterfilling_oracle(G, P, s2).W, a)
        Gamma = g_wf + 0.6 * (2 * P - g_wf)
        res = solve_covariance(G, a, P, Gamma, s2)
        assert res.status == OPTIMAL and res.gain_active
        check_constraints(res, a, P, Gamma)
        best = sample_feasible_rates(G, a, P, Gamma, s2, 20000, rng)
        assert res.objective >= best * (1 - 1e-3)


def test_slack_sensing_matches_waterfilling(rng):
    for _ in range(10):
        m0, N = int(rng.integers(2, 7)), int(rng.integers(1, 4))
        G, a = instance(rng, m0, N)
        P, s2 = 3.0, 0.1
        g_wf = beampattern_gain(waterfilling_oracle(G, P, s2).W, a)
        res = solve_covariance(G, a, P, 0.5 * g_wf, s2)
        assert not res.gain_active
        wf = achievable_rate(waterfilling_oracle(G, P, s2).W, G, s2)
        assert res.objective == pytest.approx(wf, rel=1e-5)


def test_marginal_and_infeasible_threshold(rng):
    G, a = instance(rng, 4, 2)
    P = 1.5
    res = solve_covariance(G, a, P, 4 * P, 0.1)
    assert res.status == OPTIMAL and res.newton_steps == 0
    np.testing.assert_allclose(res.W, aligned_witness(a, P), atol=1e-14)
    assert solve_covariance(G, a, P, 4 * P * (1 + 1e-6), 0.1).status == INFEASIBLE
    assert solve_covariance(G, a, 0.0, 0.0, 0.1).status == INFEASIBLE


def test_monotone_in_power(rng):
    G, a = instance(rng, 5, 3)
    rates = [solve_covariance(G, a, P, 2.0, 0.01).objective for P in np.linspace(0.5, 5, 10)]
    assert all(b >= r - 1e-8 for r, b in zip(rates, rates[1:]))


def test_scale_equivariance(rng):
    G, a = instance(rng, 4, 3)
    base = solve_covariance(G, a, 2.0, 3.0, 0.05)
    c = 1e3
    scaled = solve_covariance(G, a, 2.0 * c, 3.0 * c, 0.05 * c)
    assert scaled.objective == pytest.approx(base.objective, rel=1e-8)
    np.testing.assert_allclose(scaled.W, c * base.W, atol=1e-6 * c * np.abs(base.W).max())


def test_deterministic(rng):
    G, a = instance(rng, 6, 4)
    r1 = solve_covariance(G, a, 3.0, 5.0, 0.01)
    r2 = solve_covariance(G, a, 3.0, 5.0, 0.01)
    assert np.array_equal(r1.W, r2.W) and r1.objective == r2.objective


def test_iteration_cap_returns_feasible_iterate(rng):
    G, a = instance(rng, 4, 2)
    res = solve_covariance(G, a, 2.0, 3.0, 0.01, SolverOptions(max_iters=3))
    assert res.status == MAX_ITERS
    check_constraints(res, a, 2.0, 3.0)


def test_verbose_dump(rng):
    G, a = instance(rng, 3, 2)
    buf = io.StringIO()
    solve_covariance(G, a, 1.0, 1.0, 0.1, SolverOptions(verbose=buf))
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("t=") and lines[-1].startswith("status=OPTIMAL")


def test_options_validation():
    with pytest.raises(DomainError):
        SolverOptions(barrier_decrease=1.5)
    with pytest.raises(DomainError):
        SolverOptions(kkt_tol=0)


def test_shape_mismatch(rng):
    G, a = instance(rng, 3, 2)
    with pytest.raises(DomainError):
        solve_covariance(G, a[:2], 1.0, 0.0, 1.0)
