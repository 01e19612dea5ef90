"""Port-selection search with the covariance held fixed."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import DomainError, SystemConfig
from .geometry import (full_response, response_matrix, sensing_steering,
                       steering_phase_step, validate_selection)
from .metrics import achievable_rate, beampattern_gain, check_covariance

# rate gains below this (relative) are round-off ties and keep the incumbent; the
# kernel and metrics paths differ by ~1e-9 relative at high SNR
TIE_RTOL = 1e-8
# sensing check slack for round-off between evaluation paths
GAIN_RTOL = 1e-9
MAX_COMBINATIONS = 10**6


def initial_selection(M: int, m0: int) -> tuple[int, ...]:
    """Evenly spaced ports, r_m = round((m - 1/2) M / m0)."""
    if not 1 <= m0 <= M:
        raise DomainError(f"need 1 <= m0 <= M, got m0={m0}, M={M}")
    r = [min(M, max(1, math.floor((m - 0.5) * M / m0 + 0.5))) for m in range(1, m0 + 1)]
    # spacing M/m0 >= 1 keeps these distinct; repair defensively anyway
    for i in range(1, m0):
        r[i] = max(r[i], r[i - 1] + 1)
    for i in range(m0 - 1, -1, -1):
        r[i] = min(r[i], M - (m0 - 1 - i))
        if i < m0 - 1:
            r[i] = min(r[i], r[i + 1] - 1)
    return tuple(r)


@dataclass
class SearchReport:
    selection: tuple[int, ...]
    rate: float
    initial_rate: float
    moves_accepted: int = 0
    candidates_evaluated: int = 0
    constraint_rejections: int = 0
    passes: int = 0
    feasible: bool = True  # final selection meets the sensing threshold
    flagged: bool = False  # some coordinate had an infeasible incumbent and no feasible candidate


def _gain_ok(gain, threshold):
    return gain >= threshold * (1 - GAIN_RTOL)


def coordinate_sweep(sel, W, cfg: SystemConfig, max_passes: int | None = None,
                     backend: str | None = None) -> SearchReport:
    """Coordinate-wise port search for fixed W.

    Each pass visits m = 1..m0 in order and tries every port strictly between
    the neighbours of r_m. The best-rate candidate meeting the sensing
    threshold replaces r_m only if it beats the incumbent (an infeasible
    incumbent is replaced by any feasible candidate). Passes repeat until one
    makes no move, or ``max_passes`` is reached.
    """
    r = validate_selection(sel, cfg).copy()
    W = check_covariance(W, cfg.m0)
    G_full = full_response(cfg)
    psi = steering_phase_step(cfg)
    sigma2 = cfg.sigma2_mW
    thr = cfg.Gamma_mW
    M, m0 = cfg.M, cfg.m0

    def rate_of(sel):
        return achievable_rate(W, response_matrix(sel, cfg), sigma2)

    current = rate_of(r)
    report = SearchReport(selection=tuple(int(x) for x in r), rate=current, initial_rate=current)
    while max_passes is None or report.passes < max_passes:
        report.passes += 1
        moved = False
        for pos in range(m0):
            lo = r[pos - 1] + 1 if pos > 0 else 1
            hi = r[pos + 1] - 1 if pos < m0 - 1 else M
            if lo == hi:
                continue
            ports = np.arange(lo, hi + 1, dtype=np.int64)
            rates, gains = kernels.candidate_metrics(G_full, W, r, pos, ports, psi, sigma2,
                                                     backend=backend)
            if np.isnan(rates).any():
                raise ArithmeticError("non-PSD rate argument during port search")
            inc = int(np.searchsorted(ports, r[pos]))
            others = np.ones(ports.size, dtype=bool)
            others[inc] = False
            ok = _gain_ok(gains, thr)
            report.candidates_evaluated += int(others.sum())
            report.constraint_rejections += int((others & ~ok).sum())

            pool = np.flatnonzero(others & ok)
            if pool.size == 0:
                if not ok[inc]:
                    report.flagged = True
                continue
            best = pool[np.argmax(rates[pool])]  # first maximiser: lowest port on ties
            inc_rate = rates[inc]
            if ok[inc] and not rates[best] > inc_rate + TIE_RTOL * max(abs(inc_rate), 1.0):
                continue
            trial = r.copy()
            trial[pos] = ports[best]
            trial_rate = rate_of(trial)
            # confirm on the reporting path so recorded rates never decrease
            if ok[inc] and not trial_rate > current:
                continue
            r, current = trial, trial_rate
            report.moves_accepted += 1
            moved = True
        if not moved:
            break

    report.selection = tuple(int(x) for x in r)
    report.rate = current
    report.feasible = _gain_ok(beampattern_gain(W, sensing_steering(r, cfg)), thr)
    return report


def exhaustive_search(W, cfg: SystemConfig, max_combinations: int = MAX_COMBINATIONS) -> SearchReport:
    """Best feasible selection by full enumeration (ground truth for small M)."""
    count = math.comb(cfg.M, cfg.m0)
    if count > max_combinations:
        raise DomainError(f"C({cfg.M},{cfg.m0}) = {count} selections exceeds the guard {max_combinations}")
    W = check_covariance(W, cfg.m0)
    sigma2 = cfg.sigma2_mW
    best_sel, best_rate = None, -math.inf
    rejected = 0
    for combo in itertools.combinations(range(1, cfg.M + 1), cfg.m0):
        if not _gain_ok(beampattern_gain(W, sensing_steering(combo, cfg)), cfg.Gamma_mW):
            rejected += 1
            continue
        rate = achievable_rate(W, response_matrix(combo, cfg), sigma2)
        if rate > best_rate:
            best_sel, best_rate = combo, rate
    if best_sel is None:
        return SearchReport(selection=(), rate=math.nan, initial_rate=math.nan,
                            candidates_evaluated=count, constraint_rejections=rejected,
                            feasible=False, flagged=True)
    return SearchReport(selection=tuple(best_sel), rate=best_rate, initial_rate=math.nan,
                        candidates_evaluated=count, constraint_rejections=rejected)
