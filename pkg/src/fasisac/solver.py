"""Covariance subproblem with the port selection fixed.

    maximize    log2 det(I + G^H W G / sigma2)
    subject to  tr(W) <= P_C,  a^H W a >= Gamma,  W PSD

solved with a log-barrier interior-point method on the PSD cone. Any optimum
can be projected onto span{G, a} without changing the rate or the gain and
without increasing the trace, so the barrier iterations run on a k x k block
with k = rank[G a] <= N + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import TextIO

import numpy as np

from .config import DomainError
from .metrics import LN2, achievable_rate, aligned_witness, beampattern_gain, hermitize

OPTIMAL = "OPTIMAL"
INFEASIBLE = "INFEASIBLE"
MAX_ITERS = "MAX_ITERS"

MARGINAL_RTOL = 1e-9
ACTIVE_RTOL = 1e-6
_NEWTON_TOL = 1e-9
_ARMIJO = 0.1
_QUADRATIC_ZONE = 1 / 16


@dataclass
class SolverOptions:
    kkt_tol: float = 1e-7
    max_iters: int = 500
    barrier_decrease: float = 0.2
    min_step: float = 1e-12
    verbose: TextIO | None = None

    def __post_init__(self):
        if not (self.kkt_tol > 0 and self.max_iters > 0 and self.min_step > 0):
            raise DomainError("solver options must be positive")
        if not 0 < self.barrier_decrease < 1:
            raise DomainError("barrier_decrease must lie in (0, 1)")


@dataclass
class SolverResult:
    W: np.ndarray | None
    objective: float
    status: str
    kkt_residual: float
    trace_active: bool = False
    gain_active: bool = False
    newton_steps: int = 0
    gain_mW: float = float("nan")
    info: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@lru_cache(maxsize=None)
def _hermitian_basis(k: int) -> np.ndarray:
    """Columns are column-major vecs of an orthonormal basis of k x k Hermitian matrices."""
    T = np.zeros((k * k, k * k), dtype=complex)
    col = 0
    s = 1 / math.sqrt(2)
    for i in range(k):
        E = np.zeros((k, k), dtype=complex)
        E[i, i] = 1
        T[:, col] = E.ravel(order="F")
        col += 1
    for i in range(k):
        for j in range(i + 1, k):
            E = np.zeros((k, k), dtype=complex)
            E[i, j] = E[j, i] = s
            T[:, col] = E.ravel(order="F")
            col += 1
            E = np.zeros((k, k), dtype=complex)
            E[i, j], E[j, i] = 1j * s, -1j * s
            T[:, col] = E.ravel(order="F")
            col += 1
    T.setflags(write=False)
    return T


class _Barrier:
    """Barrier objective on normalised Y (trace budget 1, threshold gamma)."""

    def __init__(self, Gp, b, gamma, sensing):
        self.Gp = Gp
        self.b = b
        self.gamma = gamma
        self.sensing = sensing
        self.k = Gp.shape[0]
        self.nu = self.k + 1 + int(sensing)

    def rate_nats(self, Y):
        S = np.eye(self.Gp.shape[1]) + self.Gp.conj().T @ Y @ self.Gp
        return 2.0 * float(np.sum(np.log(np.linalg.cholesky(hermitize(S)).diagonal().real)))

    def slacks(self, Y):
        s_tr = 1.0 - float(np.trace(Y).real)
        s_gain = float(np.real(self.b.conj() @ Y @ self.b)) - self.gamma if self.sensing else 1.0
        return s_tr, s_gain

    def value(self, Y, t):
        """Barrier value, or None when Y is outside the strict interior."""
        s_tr, s_gain = self.slacks(Y)
        if s_tr <= 0 or s_gain <= 0:
            return None
        try:
            L = np.linalg.cholesky(Y)
        except np.linalg.LinAlgError:
            return None
        d = L.diagonal().real
        if np.any(d <= 0):
            return None
        logdet_Y = 2.0 * float(np.sum(np.log(d)))
        return -t * self.rate_nats(Y) - logdet_Y - math.log(s_tr) - math.log(s_gain)

    def newton_step(self, Y, t):
        """Newton direction in Y and the squared decrement.

        Derivatives are taken in the frame Y = L Z L^H (Z = I at the current
        point), where the log-det barrier Hessian is the identity; this keeps
        the system well conditioned as Y approaches the cone boundary.
        """
        k = self.k
        L = np.linalg.cholesky(Y)
        Gt = L.conj().T @ self.Gp
        S = np.eye(Gt.shape[1]) + Gt.conj().T @ Gt
        Q = Gt @ np.linalg.solve(S, Gt.conj().T)
        Q = hermitize(Q)
        C = L.conj().T @ L
        s_tr, s_gain = self.slacks(Y)

        grad = -t * Q - np.eye(k) + C / s_tr
        T = _hermitian_basis(k)
        Th = T.conj().T
        c = (Th @ C.ravel(order="F")).real
        H = t * (Th @ np.kron(Q.T, Q) @ T).real + np.eye(k * k) + np.outer(c, c) / s_tr**2
        if self.sensing:
            bt = L.conj().T @ self.b
            B = np.outer(bt, bt.conj())
            grad = grad - B / s_gain
            beta = (Th @ B.ravel(order="F")).real
            H += np.outer(beta, beta) / s_gain**2
        g = (Th @ grad.ravel(order="F")).real
        H = 0.5 * (H + H.T)
        try:
            cf = np.linalg.cholesky(H)
            dx = -np.linalg.solve(cf.T, np.linalg.solve(cf, g))
        except np.linalg.LinAlgError:
            dx = -np.linalg.lstsq(H, g, rcond=None)[0]
        dZ = (T @ dx).reshape((k, k), order="F")
        dY = hermitize(L @ dZ @ L.conj().T)
        return dY, float(-g @ dx)


def _reduced_basis(G, a):
    B = np.column_stack([G, a])
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    keep = s > s[0] * max(B.shape) * np.finfo(float).eps
    return U[:, keep]


def _initial_point(b, gamma, sensing, k):
    na2 = float(np.vdot(b, b).real)
    r = gamma / na2 if sensing else 0.0
    q = 0.5 * (1 + r)
    rho = 0.5 * (1 + q)
    if k == 1:
        return np.array([[rho]], dtype=complex)
    eta = (1 - q / rho) / (1 - 1 / k) if sensing else 1.0
    return rho * ((1 - eta) * np.outer(b, b.conj()) / na2 + eta * np.eye(k) / k)


def _finish(W, G, a, P_C, Gamma, sigma2, status, gap, steps, info=None):
    W = hermitize(W)
    tr = float(np.trace(W).real)
    if tr > 0:
        # rate and gain are both monotone under W -> cW, c >= 1
        W = hermitize(W * (P_C / tr))
    gain = beampattern_gain(W, a)
    return SolverResult(
        W=W,
        objective=achievable_rate(W, G, sigma2),
        status=status,
        kkt_residual=gap,
        trace_active=abs(P_C - float(np.trace(W).real)) <= ACTIVE_RTOL * P_C,
        gain_active=Gamma > 0 and gain - Gamma <= ACTIVE_RTOL * max(Gamma, 1e-300),
        newton_steps=steps,
        gain_mW=gain,
        info=info or {},
    )


def solve_covariance(G, a, P_C, Gamma, sigma2, opts: SolverOptions | None = None) -> SolverResult:
    """Maximise the rate over W for a fixed port selection.

    Infeasible inputs give status INFEASIBLE (W is None). Hitting the Newton
    iteration cap gives MAX_ITERS with the last strictly feasible iterate.
    """
    opts = opts or SolverOptions()
    G = np.asarray(G, dtype=complex)
    a = np.asarray(a, dtype=complex)
    if G.ndim != 2 or a.ndim != 1 or a.size != G.shape[0]:
        raise DomainError(f"response {G.shape} and steering {a.shape} disagree")
    if not sigma2 > 0:
        raise DomainError("noise power must be positive")
    log = opts.verbose

    na2 = float(np.vdot(a, a).real)
    bound = na2 * P_C
    if not P_C > 0 or Gamma > bound * (1 + MARGINAL_RTOL):
        return SolverResult(W=None, objective=float("nan"), status=INFEASIBLE,
                            kkt_residual=float("nan"), info={"gain_bound_mW": bound})
    if Gamma >= bound * (1 - MARGINAL_RTOL):
        # only the aligned rank-1 matrix is feasible
        res = _finish(aligned_witness(a, P_C), G, a, P_C, Gamma, sigma2, OPTIMAL, 0.0, 0)
        res.gain_active = True
        return res

    U = _reduced_basis(G, a)
    k = U.shape[1]
    sensing = Gamma > 0
    Gp = U.conj().T @ G * math.sqrt(P_C / sigma2)
    b = U.conj().T @ a
    gamma = Gamma / P_C
    bar = _Barrier(Gp, b, gamma, sensing)

    Y = _initial_point(b, gamma, sensing, k)
    t = 1.0
    steps = 0
    status = MAX_ITERS
    gap = bar.nu / t
    while steps < opts.max_iters:
        phi = bar.value(Y, t)
        stalled = False
        while steps < opts.max_iters:
            dY, lam2 = bar.newton_step(Y, t)
            if lam2 / 2 <= _NEWTON_TOL:
                break
            # self-concordant barrier: for decrement below 1/4 the full step is
            # feasible and decreasing, and the barrier value is too noisy there
            # for an Armijo test anyway
            quadratic = lam2 < _QUADRATIC_ZONE
            s = 1.0
            while True:
                cand = bar.value(Y + s * dY, t)
                if cand is not None and (quadratic or cand <= phi - _ARMIJO * s * lam2):
                    break
                s *= 0.5
                if s < opts.min_step:
                    break
            steps += 1
            if s < opts.min_step:
                stalled = True
                break
            Y = hermitize(Y + s * dY)
            phi = cand
        gap = bar.nu / t
        f = bar.rate_nats(Y)
        if log is not None:
            s_tr, s_gain = bar.slacks(Y)
            log.write(f"t={t:.3e} newton={steps} rate_nats={f:.12g} gap={gap:.3e} "
                      f"trace_slack={s_tr:.3e} gain_slack={s_gain:.3e}\n")
        if gap <= opts.kkt_tol * max(1.0, f):
            status = OPTIMAL
            break
        if stalled:
            break
        t /= opts.barrier_decrease

    W = P_C * (U @ Y @ U.conj().T)
    res = _finish(W, G, a, P_C, Gamma, sigma2, status, gap / LN2, steps,
                  info={"reduced_dim": k, "t": t})
    if log is not None:
        log.write(f"status={res.status} rate={res.objective:.12g} gain={res.gain_mW:.12g}\n")
    return res


@dataclass
class WaterfillingResult:
    W: np.ndarray
    powers: np.ndarray
    water_level: float
    zero_channel: bool = False


def waterfilling_oracle(G, P_C, sigma2, tol: float = 1e-15) -> WaterfillingResult:
    """Capacity-achieving covariance with only the trace constraint.

    Eigen-decomposes G G^H and water-fills the eigenmodes by bisection on the
    water level.
    """
    if not P_C > 0:
        raise DomainError("power budget must be positive")
    G = np.asarray(G, dtype=complex)
    m0 = G.shape[0]
    lam, V = np.linalg.eigh(hermitize(G @ G.conj().T))
    lam_max = lam[-1] if lam.size else 0.0
    if lam_max <= 0:
        return WaterfillingResult(np.zeros((m0, m0), dtype=complex), np.zeros(m0), 0.0, True)
    active = lam > lam_max * m0 * np.finfo(float).eps
    floor = np.full(m0, np.inf)
    floor[active] = sigma2 / lam[active]

    def alloc(mu):
        return np.where(active, np.maximum(0.0, mu - floor), 0.0)

    lo = floor[active].min()
    hi = lo + P_C
    while alloc(hi).sum() < P_C:
        hi += P_C
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if alloc(mid).sum() < P_C:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    mu = 0.5 * (lo + hi)
    p = alloc(mu)
    p *= P_C / p.sum()
    W = hermitize((V * p) @ V.conj().T)
    return WaterfillingResult(W, p, mu)
