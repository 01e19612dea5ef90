"""Achievable rate, sensing beampattern gain and feasibility diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DomainError, NumericError, SystemConfig
from .geometry import full_response

HERMITIAN_TOL = 1e-9
PSD_RTOL = 1e-8
LN2 = math.log(2.0)


def hermitize(W) -> np.ndarray:
    W = np.asarray(W, dtype=complex)
    return 0.5 * (W + W.conj().T)


def check_covariance(W, m0: int | None = None, psd_rtol: float = PSD_RTOL) -> np.ndarray:
    """Validate a transmit covariance and return its Hermitian part."""
    W = np.asarray(W, dtype=complex)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DomainError(f"covariance must be square, got shape {W.shape}")
    if m0 is not None and W.shape[0] != m0:
        raise DomainError(f"covariance is {W.shape[0]}x{W.shape[0]}, expected {m0}x{m0}")
    scale = max(1.0, float(np.abs(W).max(initial=0.0)))
    if np.abs(W - W.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
        raise NumericError("covariance is not Hermitian")
    W = hermitize(W)
    tr = float(np.trace(W).real)
    lam_min = float(np.linalg.eigvalsh(W)[0]) if W.size else 0.0
    if tr < 0 or lam_min < -psd_rtol * max(tr, 0.0) - 1e-300:
        raise NumericError(f"covariance not PSD (min eigenvalue {lam_min:.3e}, trace {tr:.3e})")
    return W


def logdet_hpd(A: np.ndarray) -> float:
    """Natural log-determinant of a Hermitian positive definite matrix via Cholesky."""
    A = hermitize(A)
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        lam = np.linalg.eigvalsh(A)
        if lam[0] <= 0:
            raise NumericError(f"matrix not positive definite (min eigenvalue {lam[0]:.3e})")
        return float(np.sum(np.log(lam)))
    return 2.0 * float(np.sum(np.log(L.diagonal().real)))


def achievable_rate(W, G, sigma2_mW: float) -> float:
    """log2 det(I_N + G^H W G / sigma2) in bits per channel use."""
    G = np.asarray(G, dtype=complex)
    if G.ndim != 2:
        raise DomainError("response matrix must be 2-D")
    W = np.asarray(W, dtype=complex)
    if W.shape != (G.shape[0], G.shape[0]):
        raise DomainError(f"covariance shape {W.shape} does not match response rows {G.shape[0]}")
    if not sigma2_mW > 0:
        raise DomainError("noise power must be positive")
    W = hermitize(W)
    A = np.eye(G.shape[1]) + G.conj().T @ W @ G / sigma2_mW
    rate = logdet_hpd(A) / LN2
    # log det of I + PSD is >= 0; negatives here are round-off
    return max(rate, 0.0)


def beampattern_gain(W, a) -> float:
    """Quadratic form a^H W a (mW)."""
    a = np.asarray(a, dtype=complex)
    W = np.asarray(W, dtype=complex)
    if a.ndim != 1 or W.shape != (a.size, a.size):
        raise DomainError(f"steering length {a.size} does not match covariance {W.shape}")
    val = complex(a.conj() @ W @ a)
    if abs(val.imag) > HERMITIAN_TOL * max(abs(val), 1e-300) and abs(val.imag) > 1e-300:
        raise NumericError(f"beampattern gain has imaginary residue {val.imag:.3e}")
    return val.real


@dataclass(frozen=True)
class LinkMetrics:
    rate: float
    beampattern_gain_mW: float
    tx_power_mW: float


def link_metrics(W, G, a, sigma2_mW: float) -> LinkMetrics:
    W = hermitize(W)
    return LinkMetrics(
        rate=achievable_rate(W, G, sigma2_mW),
        beampattern_gain_mW=beampattern_gain(W, a),
        tx_power_mW=float(np.trace(W).real),
    )


FEASIBLE = "FEASIBLE"
SENSING_UNREACHABLE = "SENSING_UNREACHABLE"
HOVER_EXCEEDS_BUDGET = "HOVER_EXCEEDS_BUDGET"


@dataclass(frozen=True)
class Feasibility:
    code: str
    P_C_mW: float
    Gamma_mW: float
    bound_mW: float  # largest achievable beampattern gain, m0 * P_C

    @property
    def feasible(self) -> bool:
        return self.code == FEASIBLE

    def __bool__(self):
        return self.feasible

    def message(self) -> str:
        if self.code == HOVER_EXCEEDS_BUDGET:
            return f"hover power leaves no communication budget: P_C = {self.P_C_mW:.6g} mW <= 0"
        if self.code == SENSING_UNREACHABLE:
            return (f"sensing threshold unreachable: Gamma = {self.Gamma_mW:.6g} mW > "
                    f"m0*P_C = {self.bound_mW:.6g} mW")
        return f"feasible: Gamma = {self.Gamma_mW:.6g} mW <= m0*P_C = {self.bound_mW:.6g} mW"


def check_feasibility(cfg: SystemConfig) -> Feasibility:
    """Problem feasibility, independent of the selection.

    a^H W a <= ||a||^2 tr(W) = m0 tr(W) for PSD W and unit-modulus a, with
    equality for W = (P_C/m0) a a^H (see :func:`aligned_witness`).
    """
    P_C = cfg.P_C_mW
    gamma = cfg.Gamma_mW
    if not P_C > 0:
        return Feasibility(HOVER_EXCEEDS_BUDGET, P_C, gamma, 0.0)
    bound = cfg.m0 * P_C
    code = FEASIBLE if bound >= gamma else SENSING_UNREACHABLE
    return Feasibility(code, P_C, gamma, bound)


def aligned_witness(a, P_C_mW: float) -> np.ndarray:
    """Rank-1 covariance of trace P_C aligned with ``a``; its gain is ||a||^2 P_C."""
    a = np.asarray(a, dtype=complex)
    return P_C_mW * np.outer(a, a.conj()) / float(np.vdot(a, a).real)


def rate_upper_bound(cfg: SystemConfig) -> float:
    """Rate bound over all selections: W <= P_C I and any G^H G <= G_full^H G_full."""
    Gf = full_response(cfg)
    A = np.eye(cfg.N) + cfg.P_C_mW / cfg.sigma2_mW * (Gf.conj().T @ Gf)
    return logdet_hpd(A) / LN2
