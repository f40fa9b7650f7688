"""Normalized forward sensitivity indices of R0^2, O_0 and O.

The index of a quantity ``x`` with respect to a parameter ``p`` is
``(dx/dp) * (p / x)``. Analytic indices come from differentiating the closed
forms; :func:`sensitivity` with ``method="finite-difference"`` uses central
differences on the closed forms and serves as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import r0, threshold_o, threshold_o0
from .params import ModelParams, ParameterError

__all__ = ["SensitivityTable", "TARGETS", "sensitivity", "target_value"]

TARGETS = ("R0_squared", "O_0", "O")
_ALIASES = {"r0sq": "R0_squared", "r0_squared": "R0_squared", "o0": "O_0", "o": "O"}


def _resolve(target: str) -> str:
    if target in TARGETS:
        return target
    try:
        return _ALIASES[target.lower()]
    except KeyError:
        raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}") from None


def target_value(target: str, params: ModelParams) -> float:
    target = _resolve(target)
    if target == "R0_squared":
        return r0(params) ** 2
    if target == "O_0":
        return threshold_o0(params)
    return threshold_o(params)


@dataclass
class SensitivityTable:
    target: str
    entries: dict[str, float]
    method: str
    structural_zeros: frozenset[str] = field(default_factory=frozenset)

    def ranked(self) -> list[tuple[str, float]]:
        """Entries by decreasing magnitude, ties kept in parameter order."""
        return sorted(self.entries.items(), key=lambda kv: -abs(kv[1]))

    def __getitem__(self, name: str) -> float:
        return self.entries[name]


def _r0_squared_indices(P: ModelParams) -> dict[str, float]:
    A, B = P.A, P.B
    vec_death = P.d_iv + P.d_v
    vec_incub = P.d_v + P.nu_v
    return {
        "a_v": 2.0,
        "c_vh": 1.0,
        "c_hv": 1.0,
        "nu_h": 1.0 - P.nu_h / B,
        "nu_v": 1.0 - P.nu_v / vec_incub,
        "theta": -P.theta / A,
        "d_i": -P.d_i / A,
        "q": P.q * P.B_h / A,
        "p": P.p * P.B_h / B,
        "B_h": P.q * P.B_h / A + P.p * P.B_h / B,
        "d_h": -P.d_h / A - P.d_h / B,
        "d_v": -P.d_v / vec_death - P.d_v / vec_incub,
        "d_iv": -P.d_iv / vec_death,
    }


def _threshold_indices(P: ModelParams, with_predator: bool) -> dict[str, float]:
    outflow = P.alpha + P.d_q + (P.phi * P.K_x if with_predator else 0.0)
    out = {
        "epsilon": 1.0,
        "k": 1.0,
        "f": 1.0,
        "d_v": -1.0,
        "alpha": 1.0 - P.alpha / outflow,
        "d_q": -P.d_q / outflow,
    }
    if with_predator:
        out["phi"] = -P.phi * P.K_x / outflow
        out["K_x"] = -P.phi * P.K_x / outflow
    return out


def _analytic(target: str, P: ModelParams) -> dict[str, float]:
    if target == "R0_squared":
        return _r0_squared_indices(P)
    return _threshold_indices(P, with_predator=target == "O")


def _finite_difference(target: str, P: ModelParams, name: str, rel_step: float) -> float:
    value = getattr(P, name)
    if value == 0.0:
        return 0.0
    h = rel_step * value
    base = target_value(target, P)

    def at(offset: float) -> float:
        return target_value(target, P.replace(**{name: value + offset}))

    try:
        slope = (at(h) - at(-h)) / (2.0 * h)
    except ParameterError:
        # parameter sits on a bound (e.g. a fraction equal to 1): one-sided, second order
        slope = (-3.0 * base + 4.0 * at(-h) - at(-2.0 * h)) / (-2.0 * h)
    return slope * value / base


def sensitivity(
    target: str,
    params: ModelParams,
    method: str = "analytic",
    rel_step: float = 1e-6,
) -> SensitivityTable:
    """Sensitivity index of ``target`` for every model parameter.

    ``target`` is ``"R0_squared"``, ``"O_0"`` or ``"O"`` (``"r0sq"``, ``"o0"``,
    ``"o"`` are accepted). Parameters that do not enter the target's formula
    get an exact 0.
    """
    target = _resolve(target)
    if not target_value(target, params) > 0.0:
        raise ValueError(f"{target} is zero at these parameters; sensitivity indices are undefined")
    names = ModelParams.names()
    if method == "analytic":
        present = _analytic(target, params)
        entries = {name: present.get(name, 0.0) for name in names}
    elif method == "finite-difference":
        present = _analytic(target, params)
        entries = {name: _finite_difference(target, params, name, rel_step) for name in names}
    else:
        raise ValueError(f"unknown method {method!r}")
    zeros = frozenset(name for name in names if name not in present)
    return SensitivityTable(target, entries, method, zeros)
