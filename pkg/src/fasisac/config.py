"""System configuration and the flat ``key = value`` config file format."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


class DomainError(ValueError):
    """Input outside the domain of an operation (bad index, shape, selection)."""


class NumericError(ArithmeticError):
    """A quantity that must be PSD/real came out otherwise beyond tolerance."""


def dbm_to_mw(x_dbm: float) -> float:
    return 10.0 ** (x_dbm / 10.0)


def mw_to_dbm(x_mw: float) -> float:
    return 10.0 * math.log10(x_mw)


@dataclass(frozen=True)
class SystemConfig:
    """Physical and algorithmic scalars.

    Powers are given in dBm and converted once to linear milliwatts through
    the ``*_mW`` properties; every computation downstream is linear. Rates
    are in bits per channel use (log base 2).
    """

    M: int = 40
    m0: int = 10
    N: int = 4
    d_U: float = 0.05
    d_C: float = 0.05
    wavelength: float = 0.1
    H: float = 20.0
    L_C: float = 100.0
    theta: float = math.pi / 6
    Gamma_dBm: float = 8.0
    P_max_dBm: float = 10.0
    P_U_dBm: float = 7.0
    sigma2_dBm: float = -70.0
    epsilon: float = 1e-3

    def __post_init__(self):
        for name in ("M", "m0", "N"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.m0 > self.M:
            raise DomainError(f"m0={self.m0} exceeds M={self.M}")
        for name in ("d_U", "d_C", "wavelength", "H", "L_C", "epsilon"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")
        for name in ("theta", "Gamma_dBm", "P_max_dBm", "P_U_dBm", "sigma2_dBm"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def P_C_mW(self) -> float:
        """Communication power left after hovering, P_max - P_U (may be <= 0)."""
        return dbm_to_mw(self.P_max_dBm) - dbm_to_mw(self.P_U_dBm)

    @property
    def Gamma_mW(self) -> float:
        return dbm_to_mw(self.Gamma_dBm)

    @property
    def sigma2_mW(self) -> float:
        return dbm_to_mw(self.sigma2_dBm)

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    def with_(self, **changes) -> "SystemConfig":
        return replace(self, **changes)


# config-file key -> SystemConfig field
CONFIG_KEYS = {
    "M": "M",
    "m0": "m0",
    "N": "N",
    "P_max_dBm": "P_max_dBm",
    "P_U_dBm": "P_U_dBm",
    "Gamma_dBm": "Gamma_dBm",
    "theta_rad": "theta",
    "lambda_m": "wavelength",
    "d_U_m": "d_U",
    "d_C_m": "d_C",
    "H_m": "H",
    "L_C_m": "L_C",
    "sigma2_dBm": "sigma2_dBm",
    "epsilon": "epsilon",
}
_INT_FIELDS = {"M", "m0", "N"}


def parse_config(text: str, base: SystemConfig | None = None) -> SystemConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in CONFIG_KEYS:
            raise DomainError(f"line {lineno}: unknown key {key!r}")
        field = CONFIG_KEYS[key]
        if field in values:
            raise DomainError(f"line {lineno}: duplicate key {key!r}")
        try:
            num = float(val)
        except ValueError:
            raise DomainError(f"line {lineno}: {key} is not a number: {val!r}") from None
        if field in _INT_FIELDS:
            if num != int(num):
                raise DomainError(f"line {lineno}: {key} must be an integer")
            num = int(num)
        values[field] = num
    return replace(base or SystemConfig(), **values)


def load_config(path: str | Path) -> SystemConfig:
    return parse_config(Path(path).read_text())


def format_config(cfg: SystemConfig) -> str:
    inv = {v: k for k, v in CONFIG_KEYS.items()}
    d = asdict(cfg)
    return "".join(f"{inv[f.name]} = {d[f.name]!r}\n" for f in fields(cfg))
