"""Port/antenna geometry, LoS path differences, response matrix and sensing steering.

Selections are 1-based, strictly increasing port indices. Positions ``m`` and
antenna indices ``n`` in the scalar helpers are 1-based as well.
"""

from __future__ import annotations

import math

import numpy as np

from .config import DomainError, SystemConfig


def validate_selection(sel, cfg: SystemConfig) -> np.ndarray:
    """Return ``sel`` as an int64 array after checking range, length and order."""
    r = np.asarray(sel)
    if r.ndim != 1 or r.size != cfg.m0:
        raise DomainError(f"selection must have length m0={cfg.m0}, got shape {r.shape}")
    if not np.issubdtype(r.dtype, np.integer):
        if not np.all(np.equal(np.mod(r, 1), 0)):
            raise DomainError("selection entries must be integers")
    r = r.astype(np.int64)
    if r.min() < 1 or r.max() > cfg.M:
        raise DomainError(f"port indices must lie in 1..{cfg.M}, got {r.tolist()}")
    if np.any(np.diff(r) <= 0):
        raise DomainError(f"port indices must be strictly increasing, got {r.tolist()}")
    return r


def port_offset(r_m: int, cfg: SystemConfig) -> float:
    """Vertical offset of port ``r_m`` from the array centre."""
    if not 1 <= r_m <= cfg.M:
        raise DomainError(f"port index {r_m} outside 1..{cfg.M}")
    return (2 * (r_m - 1) - cfg.M + 1) / 2 * cfg.d_U


def rx_antenna_offset(n: int, cfg: SystemConfig) -> float:
    if not 1 <= n <= cfg.N:
        raise DomainError(f"antenna index {n} outside 1..{cfg.N}")
    return (2 * (n - 1) - cfg.N + 1) / 2 * cfg.d_C


def port_offsets(ports, cfg: SystemConfig) -> np.ndarray:
    ports = np.asarray(ports, dtype=np.int64)
    return (2 * (ports - 1) - cfg.M + 1) / 2 * cfg.d_U


def rx_offsets(cfg: SystemConfig) -> np.ndarray:
    n = np.arange(1, cfg.N + 1)
    return (2 * (n - 1) - cfg.N + 1) / 2 * cfg.d_C


def _path_diff(dy, cfg: SystemConfig):
    # sqrt(L^2 + (H+dy)^2) - sqrt(L^2 + H^2), rewritten to avoid cancellation
    L2 = cfg.L_C**2
    far = np.sqrt(L2 + (cfg.H + dy) ** 2)
    ref = math.sqrt(L2 + cfg.H**2)
    return dy * (2 * cfg.H + dy) / (far + ref)


def path_difference(m: int, n: int, sel, cfg: SystemConfig) -> float:
    """Path-length difference between port ``sel[m]`` -> antenna ``n`` and the centre link."""
    r = validate_selection(sel, cfg)
    if not 1 <= m <= cfg.m0:
        raise DomainError(f"position {m} outside 1..{cfg.m0}")
    dy = port_offset(int(r[m - 1]), cfg) - rx_antenna_offset(n, cfg)
    return float(_path_diff(dy, cfg))


def path_differences(ports, cfg: SystemConfig) -> np.ndarray:
    """(len(ports), N) matrix of path differences for arbitrary port indices."""
    dy = port_offsets(ports, cfg)[:, None] - rx_offsets(cfg)[None, :]
    return _path_diff(dy, cfg)


def port_responses(ports, cfg: SystemConfig) -> np.ndarray:
    return np.exp(1j * cfg.wavenumber * path_differences(ports, cfg))


def full_response(cfg: SystemConfig) -> np.ndarray:
    """(M, N) response rows for every port; rows of any selection are slices of this."""
    return port_responses(np.arange(1, cfg.M + 1), cfg)


def response_matrix(sel, cfg: SystemConfig) -> np.ndarray:
    """m0 x N response matrix; column n is the transmit response toward antenna n."""
    return port_responses(validate_selection(sel, cfg), cfg)


def steering_phase_step(cfg: SystemConfig) -> float:
    """Phase advance per port index toward the sensing direction."""
    return cfg.wavenumber * cfg.d_U * math.sin(cfg.theta)


def steering_from_ports(r: np.ndarray, psi: float) -> np.ndarray:
    a = np.exp(1j * psi * (r - r[0]))
    a[0] = 1.0
    return a


def sensing_steering(sel, cfg: SystemConfig) -> np.ndarray:
    """Sensing steering vector, phase-referenced to the first selected port."""
    return steering_from_ports(validate_selection(sel, cfg), steering_phase_step(cfg))
