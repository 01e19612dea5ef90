"""Brute-force neighbourhood check for the port search, built on metrics only."""

import numpy as np

from fasisac.geometry import response_matrix, sensing_steering
from fasisac.metrics import achievable_rate, beampattern_gain

TOL = 1e-8  # same round-off tie band as the sweep


def metrics(sel, W, cfg):
    return (achievable_rate(W, response_matrix(sel, cfg), cfg.sigma2_mW),
            beampattern_gain(W, sensing_steering(sel, cfg)))


def improving_moves(sel, W, cfg):
    """Single-coordinate changes (keeping order) that are feasible and raise the rate."""
    rate, _ = metrics(sel, W, cfg)
    found = []
    for pos in range(len(sel)):
        for p in range(1, cfg.M + 1):
            cand = list(sel)
            cand[pos] = p
            if p == sel[pos] or np.any(np.diff(cand) <= 0):
                continue
            r, g = metrics(cand, W, cfg)
            if g >= cfg.Gamma_mW * (1 - 1e-9) and r > rate + TOL * max(1.0, abs(rate)):
                found.append((pos, p, r - rate))
    return found
