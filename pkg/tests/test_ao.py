import itertools

import numpy as np
import pytest

from fasisac.ao import KEPT, InfeasibleError, ao_optimize, final_status, fixed_port_baseline
from fasisac.config import SystemConfig
from fasisac.geometry import response_matrix, sensing_steering
from fasisac.metrics import achievable_rate, beampattern_gain, rate_upper_bound
from fasisac.solver import OPTIMAL, solve_covariance


def test_all_ports_active_two_rows():
    cfg = SystemConfig(M=6, m0=6, N=2)
    W, sel, trace = ao_optimize(cfg)
    assert sel == (1, 2, 3, 4, 5, 6)
    assert len(trace) == 2 and trace.converged
    assert trace.rows[0].rate == trace.rows[1].rate
    assert [r.index for r in trace.rows] == [0, 1]


def test_infeasible_raises():
    with pytest.raises(InfeasibleError) as exc:
        ao_optimize(SystemConfig(Gamma_dBm=30))
    assert "m0*P_C" in str(exc.value)


def test_row_zero_is_fixed_port_baseline(cfg):
    _, _, trace = ao_optimize(cfg)
    assert trace.rows[0].rate == fixed_port_baseline(cfg).objective


def _check_trace(cfg, W, sel, trace):
    rates = trace.rates
    assert np.all(np.diff(rates) >= 0)
    assert np.all(rates <= rate_upper_bound(cfg))
    assert np.trace(W).real <= cfg.P_C_mW * (1 + 1e-8)
    assert beampattern_gain(W, sensing_steering(sel, cfg)) >= cfg.Gamma_mW * (1 - 1e-8)
    assert np.linalg.eigvalsh(W)[0] >= -1e-8 * np.trace(W).real
    assert trace.rows[-1].rate == pytest.approx(achievable_rate(W, response_matrix(sel, cfg), cfg.sigma2_mW))


def test_contiguous_start_climbs(cfg):
    W, sel, trace = ao_optimize(cfg, initial=tuple(range(1, 11)))
    _check_trace(cfg, W, sel, trace)
    assert trace.converged and final_status(trace) == "OK"
    gain = trace.rates[-1] - trace.rates[0]
    assert gain > 1.0
    half = (len(trace) - 1) // 2
    assert trace.rates[half] - trace.rates[0] >= 0.8 * gain
    assert abs(trace.rates[-1] - trace.rates[-2]) <= cfg.epsilon


def test_w_step_never_decreases(cfg):
    # re-solving W on every recorded selection cannot beat the next row by more than tolerance
    W, sel, trace = ao_optimize(cfg, initial=tuple(range(31, 41)))
    for row, nxt in zip(trace.rows, trace.rows[1:]):
        res = solve_covariance(response_matrix(row.selection, cfg), sensing_steering(row.selection, cfg),
                               cfg.P_C_mW, cfg.Gamma_mW, cfg.sigma2_mW)
        assert res.objective >= row.rate - 1e-6
        assert nxt.rate >= row.rate
        assert nxt.status in (OPTIMAL, KEPT)


def test_tiny_instance_against_exhaustive_outer_oracle():
    cfg = SystemConfig(M=6, m0=2, N=2, L_C=8.0, H=3.0, sigma2_dBm=-40.0)
    best = -np.inf
    for combo in itertools.combinations(range(1, 7), 2):
        res = solve_covariance(response_matrix(combo, cfg), sensing_steering(combo, cfg),
                               cfg.P_C_mW, cfg.Gamma_mW, cfg.sigma2_mW)
        best = max(best, res.objective)
    W, sel, trace = ao_optimize(cfg)
    _check_trace(cfg, W, sel, trace)
    # AO is a local method: never above the global optimum beyond tolerance
    assert trace.rates[-1] <= best + 1e-6


def test_csv_round_trip(cfg):
    _, _, trace = ao_optimize(cfg, initial=tuple(range(1, 11)))
    text = trace.to_csv()
    lines = text.splitlines()
    assert lines[0] == "i,rate,beampattern_gain_mW,tx_power_mW,selection,status,moves"
    assert len(lines) == len(trace) + 1
    assert lines[1].split(",")[4] == "1-2-3-4-5-6-7-8-9-10"
    assert "millis" in trace.to_csv(timing=True).splitlines()[0]


def test_max_outer_cap(cfg):
    _, _, trace = ao_optimize(cfg, initial=tuple(range(1, 11)), max_outer=2)
    assert len(trace) == 3 and not trace.converged
    assert final_status(trace) == "MAX_OUTER"
