"""Alternating optimisation of the covariance and the port selection."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .config import SystemConfig
from .geometry import response_matrix, sensing_steering
from .metrics import Feasibility, achievable_rate, beampattern_gain, check_feasibility
from .search import coordinate_sweep, initial_selection
from .solver import INFEASIBLE, OPTIMAL, SolverOptions, SolverResult, solve_covariance

KEPT = "KEPT"  # solver result was not better than the incumbent W; incumbent kept


class InfeasibleError(ValueError):
    def __init__(self, feasibility: Feasibility):
        super().__init__(feasibility.message())
        self.feasibility = feasibility


class SolverFailure(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


@dataclass
class TraceRow:
    index: int
    rate: float
    beampattern_gain_mW: float
    tx_power_mW: float
    selection: tuple[int, ...]
    status: str
    moves: int
    millis: float


@dataclass
class SolveTrace:
    """Row 0 is the initial selection with its optimised W; row i ends cycle i."""

    rows: list[TraceRow] = field(default_factory=list)
    converged: bool = False

    @property
    def rates(self) -> np.ndarray:
        return np.array([r.rate for r in self.rows])

    def __len__(self):
        return len(self.rows)

    def to_csv(self, fh=None, timing: bool = False) -> str:
        out = fh or io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        head = ["i", "rate", "beampattern_gain_mW", "tx_power_mW", "selection", "status", "moves"]
        w.writerow(head + ["millis"] if timing else head)
        for r in self.rows:
            row = [r.index, f"{r.rate:.12g}", f"{r.beampattern_gain_mW:.12g}", f"{r.tx_power_mW:.12g}",
                   "-".join(map(str, r.selection)), r.status, r.moves]
            w.writerow(row + [f"{r.millis:.3f}"] if timing else row)
        return out.getvalue() if fh is None else ""


class AOResult(NamedTuple):
    W: np.ndarray
    selection: tuple[int, ...]
    trace: SolveTrace


def _solve(cfg, sel, opts):
    return solve_covariance(response_matrix(sel, cfg), sensing_steering(sel, cfg),
                            cfg.P_C_mW, cfg.Gamma_mW, cfg.sigma2_mW, opts)


def fixed_port_baseline(cfg: SystemConfig, opts: SolverOptions | None = None,
                        selection=None) -> SolverResult:
    """Single covariance solve on the evenly spaced selection, no port moves."""
    sel = tuple(selection) if selection is not None else initial_selection(cfg.M, cfg.m0)
    return _solve(cfg, sel, opts)


def ao_optimize(cfg: SystemConfig, opts: SolverOptions | None = None, max_outer: int = 50,
                initial=None, sweep_passes: int | None = 1, backend: str | None = None,
                clock=time.perf_counter) -> AOResult:
    """Alternate covariance solves and coordinate sweeps until the rate settles.

    Each cycle solves W for the current selection, then sweeps the ports with
    that W fixed and records the rate. A solve that does not improve on the
    incumbent (W, r) pair keeps the incumbent, so the recorded rates never
    decrease. Stops when consecutive rates differ by at most ``cfg.epsilon``.
    """
    feas = check_feasibility(cfg)
    if not feas:
        raise InfeasibleError(feas)
    opts = opts or SolverOptions()
    sel = tuple(initial) if initial is not None else initial_selection(cfg.M, cfg.m0)
    trace = SolveTrace()
    start = clock()

    def record(W, sel, status, moves):
        G = response_matrix(sel, cfg)
        a = sensing_steering(sel, cfg)
        trace.rows.append(TraceRow(
            index=len(trace.rows),
            rate=achievable_rate(W, G, cfg.sigma2_mW),
            beampattern_gain_mW=beampattern_gain(W, a),
            tx_power_mW=float(np.trace(W).real),
            selection=tuple(sel),
            status=status,
            moves=moves,
            millis=1e3 * (clock() - start),
        ))
        return trace.rows[-1].rate

    res = _solve(cfg, sel, opts)
    if res.status == INFEASIBLE:
        raise SolverFailure("covariance solve infeasible on the initial selection", trace)
    W = res.W
    prev = record(W, sel, res.status, 0)
    cached = res

    for cycle in range(1, max_outer + 1):
        if cached is None:
            res = _solve(cfg, sel, opts)
            if res.status == INFEASIBLE:
                raise SolverFailure(f"covariance solve infeasible in cycle {cycle}", trace)
            status = res.status
            if res.objective >= achievable_rate(W, response_matrix(sel, cfg), cfg.sigma2_mW):
                W = res.W
            else:
                status = KEPT
        else:
            status, cached = cached.status, None
        rep = coordinate_sweep(sel, W, cfg, max_passes=sweep_passes, backend=backend)
        sel = rep.selection
        rate = record(W, sel, status, rep.moves_accepted)
        if abs(rate - prev) <= cfg.epsilon:
            trace.converged = True
            break
        prev = rate
    return AOResult(W, sel, trace)


def final_status(trace: SolveTrace) -> str:
    """OK, or the reason the run is not a clean convergence."""
    if any(r.status not in (OPTIMAL, KEPT) for r in trace.rows):
        return next(r.status for r in trace.rows if r.status not in (OPTIMAL, KEPT))
    return "OK" if trace.converged else "MAX_OUTER"
