"""Model parameters and state for the host/vector/predator system.

Parameter names follow the usual symbols in ASCII (``lambda_h`` for the
human recruitment rate, ``K_q`` for the immature carrying capacity, ...).
All rates are per day.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Iterator

import numpy as np

__all__ = [
    "COMPARTMENTS",
    "FRACTIONS",
    "ModelParams",
    "ParameterError",
    "StateVector",
    "BASELINE",
    "default_params",
]

COMPARTMENTS = ("S_h", "E_h", "I_h", "R_h", "m_q", "S_v", "E_v", "I_v", "G")

FRACTIONS = ("p", "q", "k", "f", "c_vh", "c_hv")
STRICTLY_POSITIVE = ("lambda_h", "K_q", "K_x")


class ParameterError(ValueError):
    """Raised when a parameter set violates a model bound."""


@dataclass(frozen=True)
class ModelParams:
    lambda_h: float = 19.0
    d_h: float = 0.000039
    d_i: float = 0.001
    B_h: float = 0.019
    d_v: float = 0.042
    d_iv: float = 0.00001
    p: float = 0.07
    q: float = 0.07
    a_v: float = 3.0425
    c_vh: float = 1.0
    c_hv: float = 1.0
    # incubation *rates*: 1/7 and 1/4 per day
    nu_h: float = 0.1429
    nu_v: float = 0.25
    theta: float = 0.02
    epsilon: float = 16.25
    k: float = 0.9
    K_q: float = 5000.0
    alpha: float = 0.083
    d_q: float = 0.048
    phi: float = 0.35
    f: float = 0.5
    rho: float = 0.37
    psi: float = 0.05
    K_x: float = 1000.0

    def __post_init__(self) -> None:
        for fld in fields(self):
            value = getattr(self, fld.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParameterError(f"{fld.name} must be a real number, got {value!r}")
            value = float(value)
            object.__setattr__(self, fld.name, value)
            if not math.isfinite(value):
                raise ParameterError(f"{fld.name} must be finite, got {value}")
            if value < 0.0:
                raise ParameterError(f"{fld.name} must be nonnegative, got {value}")
        for name in FRACTIONS:
            value = getattr(self, name)
            if value > 1.0:
                raise ParameterError(f"fraction {name} must lie in [0, 1], got {value}")
        for name in STRICTLY_POSITIVE:
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name} must be strictly positive")
        if self.A <= 0.0:
            raise ParameterError(
                f"theta - q*B_h + d_h + d_i must be positive, got {self.A:.6g}"
            )
        if self.B <= 0.0:
            raise ParameterError(f"d_h + nu_h - p*B_h must be positive, got {self.B:.6g}")

    @property
    def A(self) -> float:
        """Net exit rate from the infectious human class."""
        return self.theta - self.q * self.B_h + self.d_h + self.d_i

    @property
    def B(self) -> float:
        """Net exit rate from the incubating human class."""
        return self.d_h + self.nu_h - self.p * self.B_h

    def replace(self, **changes: float) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


BASELINE = ModelParams()


def default_params(**overrides: float) -> ModelParams:
    """Baseline parameters with optional overrides (``c_vh = c_hv = 1``)."""
    return BASELINE.replace(**overrides) if overrides else BASELINE


@dataclass(frozen=True)
class StateVector:
    S_h: float = 0.0
    E_h: float = 0.0
    I_h: float = 0.0
    R_h: float = 0.0
    m_q: float = 0.0
    S_v: float = 0.0
    E_v: float = 0.0
    I_v: float = 0.0
    G: float = 0.0

    def __post_init__(self) -> None:
        for name in COMPARTMENTS:
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"state component {name} is not finite: {value}")
            if value < 0.0:
                raise ValueError(f"state component {name} is negative: {value}")
            object.__setattr__(self, name, value)

    @property
    def N_h(self) -> float:
        return self.S_h + self.E_h + self.I_h + self.R_h

    @property
    def N_v(self) -> float:
        return self.S_v + self.E_v + self.I_v

    def __iter__(self) -> Iterator[float]:
        return (getattr(self, name) for name in COMPARTMENTS)

    def to_array(self) -> np.ndarray:
        return np.array(tuple(self), dtype=float)

    @classmethod
    def from_array(cls, values) -> "StateVector":
        values = np.asarray(values, dtype=float)
        if values.shape != (len(COMPARTMENTS),):
            raise ValueError(f"expected {len(COMPARTMENTS)} components, got shape {values.shape}")
        return cls(*values.tolist())

    def replace(self, **changes: float) -> "StateVector":
        return replace(self, **changes)
