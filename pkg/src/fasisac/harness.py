"""Experiment runners: single solve, power sweep, active-port sweep."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .ao import AOResult, InfeasibleError, SolverFailure, ao_optimize, final_status, fixed_port_baseline
from .config import DomainError, SystemConfig
from .metrics import check_feasibility, rate_upper_bound
from .search import initial_selection
from .solver import OPTIMAL, SolverOptions

NONE, P_MAX_DBM, M0 = "NONE", "P_MAX_DBM", "M0"
FIXED_PORTS = "FIXED_PORTS"

DEFAULT_POWER_GRID = (8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0)
DEFAULT_PORT_GRID = (1, 2, 4, 6, 8, 10, 20, 40)


@dataclass
class ExperimentSpec:
    config: SystemConfig = field(default_factory=SystemConfig)
    sweep: str = NONE
    values: tuple = ()
    baseline: str = FIXED_PORTS
    out: Path | None = None
    seed: int = 0
    workers: int = 1
    max_outer: int = 50
    sweep_passes: int | None = 1
    timing: bool = False
    solver: SolverOptions = field(default_factory=SolverOptions)

    def point_configs(self) -> list[SystemConfig]:
        if self.sweep == NONE:
            return [self.config]
        if self.sweep == P_MAX_DBM:
            return [self.config.with_(P_max_dBm=float(v)) for v in self.values]
        if self.sweep == M0:
            for v in self.values:
                if int(v) != v or not 1 <= v <= self.config.M:
                    raise DomainError(f"m0 sweep value {v} outside 1..{self.config.M}")
            return [self.config.with_(m0=int(v)) for v in self.values]
        raise DomainError(f"unknown sweep variable {self.sweep!r}")


@dataclass
class PointResult:
    status: str
    rate_optimized: float = float("nan")
    rate_baseline: float = float("nan")
    gain_mW: float = float("nan")
    selection: tuple = ()
    cycles: int = 0
    upper_bound: float = float("nan")


def _fmt(x: float) -> str:
    return "" if x != x else f"{x:.12g}"


def run_point(cfg: SystemConfig, max_outer: int = 50, sweep_passes: int | None = 1,
              baseline: str = FIXED_PORTS, solver: SolverOptions | None = None) -> PointResult:
    feas = check_feasibility(cfg)
    if not feas:
        return PointResult(status="INFEASIBLE")
    solver = solver or SolverOptions()
    res = ao_optimize(cfg, solver, max_outer=max_outer, sweep_passes=sweep_passes)
    status = final_status(res.trace)
    base = float("nan")
    if baseline == FIXED_PORTS:
        b = fixed_port_baseline(cfg, solver)
        base = b.objective
        if b.status != OPTIMAL:
            status = b.status
    last = res.trace.rows[-1]
    return PointResult(
        status=status,
        rate_optimized=last.rate,
        rate_baseline=base,
        gain_mW=last.beampattern_gain_mW,
        selection=res.selection,
        cycles=len(res.trace) - 1,
        upper_bound=rate_upper_bound(cfg),
    )


def _run_points(spec: ExperimentSpec) -> list[PointResult]:
    cfgs = spec.point_configs()
    args = [(c, spec.max_outer, spec.sweep_passes, spec.baseline, spec.solver) for c in cfgs]
    if spec.workers > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            # map() yields in submission order regardless of completion order
            return list(pool.map(run_point, *zip(*args)))
    return [run_point(*a) for a in args]


def _sweep_csv(spec: ExperimentSpec, key: str, results: list[PointResult]) -> str:
    cfg = spec.config
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([key, "rate_optimized", "rate_fixed_baseline", "status", "beampattern_gain_mW",
                "selection", "cycles", "rate_upper_bound", "sigma2_dBm", "snr_dB"])
    for v, c, r in zip(spec.values, spec.point_configs(), results):
        w.writerow([_fmt(float(v)) if key == "P_max_dBm" else int(v),
                    _fmt(r.rate_optimized), _fmt(r.rate_baseline), r.status, _fmt(r.gain_mW),
                    "-".join(map(str, r.selection)), r.cycles, _fmt(r.upper_bound),
                    _fmt(cfg.sigma2_dBm), _fmt(c.P_max_dBm - c.sigma2_dBm)])
    return out.getvalue()


def _write(path, text):
    if path is not None:
        Path(path).write_text(text)


def run_power_sweep(spec: ExperimentSpec) -> tuple[str, list[PointResult]]:
    """Optimised and fixed-port rates over P_max; infeasible points get an INFEASIBLE row."""
    spec.sweep = P_MAX_DBM
    if not spec.values:
        spec.values = DEFAULT_POWER_GRID
    results = _run_points(spec)
    text = _sweep_csv(spec, "P_max_dBm", results)
    _write(spec.out, text)
    return text, results


def run_port_sweep(spec: ExperimentSpec) -> tuple[str, list[PointResult]]:
    """Optimised and fixed-port rates over the number of active ports."""
    spec.sweep = M0
    if not spec.values:
        spec.values = tuple(v for v in DEFAULT_PORT_GRID if v <= spec.config.M)
    results = _run_points(spec)
    text = _sweep_csv(spec, "m0", results)
    _write(spec.out, text)
    return text, results


@dataclass
class SingleRun:
    result: AOResult
    csv: str
    summary: str
    status: str


def run_single(spec: ExperimentSpec, verbose_stream=None) -> SingleRun:
    """One AO run; writes the trace CSV. Raises InfeasibleError / SolverFailure."""
    cfg = spec.config
    opts = spec.solver
    if verbose_stream is not None:
        opts = SolverOptions(opts.kkt_tol, opts.max_iters, opts.barrier_decrease, opts.min_step,
                             verbose=verbose_stream)
    res = ao_optimize(cfg, opts, max_outer=spec.max_outer, sweep_passes=spec.sweep_passes)
    text = res.trace.to_csv(timing=spec.timing)
    _write(spec.out, text)
    last = res.trace.rows[-1]
    status = final_status(res.trace)
    summary = (f"status={status} rate={last.rate:.12g} gain_mW={last.beampattern_gain_mW:.12g} "
               f"tx_power_mW={last.tx_power_mW:.12g} selection={'-'.join(map(str, res.selection))} "
               f"cycles={len(res.trace) - 1} baseline_selection="
               f"{'-'.join(map(str, initial_selection(cfg.M, cfg.m0)))} seed={spec.seed}")
    return SingleRun(res, text, summary, status)


__all__ = [
    "ExperimentSpec", "PointResult", "SingleRun", "run_point", "run_single",
    "run_power_sweep", "run_port_sweep", "InfeasibleError", "SolverFailure",
    "DEFAULT_POWER_GRID", "DEFAULT_PORT_GRID",
]
