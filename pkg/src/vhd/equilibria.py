"""Equilibria E1-E8: closed forms, existence verdicts and the endemic fixed-point solve.

Ordering of the kinds:

* E1, E2: no mosquitoes, predator absent / at ``K_x``.
* E3, E4: mosquitoes at their disease-free level, predator absent / at ``K_x``.
* E5, E6: infection in humans only; never feasible (the force of infection
  they require is negative).
* E7, E8: endemic, predator absent / at ``K_x``.

The endemic points are found from the two consistency conditions on the
forces of infection. Given ``lam_h`` the human compartments follow in closed
form (:func:`human_endemic_components`), given ``lam_v`` the vector
compartments do (:func:`vector_endemic_components`), and the pair is solved
by a damped Newton iteration in log variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .model import r0, rhs, threshold_o, threshold_o0
from .params import ModelParams, StateVector

__all__ = [
    "KINDS",
    "ConvergenceError",
    "EquilibriumPoint",
    "NonExistenceError",
    "all_equilibria",
    "boundary_equilibrium",
    "e5_force_of_infection",
    "human_endemic_components",
    "solve_endemic",
    "vector_endemic_components",
]

KINDS = ("E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8")
RESIDUAL_RTOL = 1e-8


class NonExistenceError(ValueError):
    """The requested equilibrium has no biologically meaningful state."""


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, last_iterate):
        super().__init__(message)
        self.last_iterate = last_iterate


@dataclass
class EquilibriumPoint:
    kind: str
    state: StateVector | None
    exists: bool
    existence_reasons: list[tuple[str, float, float]] = field(default_factory=list)
    residual: float | None = None
    lam_h: float = 0.0
    lam_v: float = 0.0
    iterations: int = 0

    @property
    def predator(self) -> bool:
        return self.kind in ("E2", "E4", "E6", "E8")


def _residual(state: StateVector, params: ModelParams) -> float:
    return float(np.max(np.abs(rhs(state, params))))


def _finish(kind, state, params, reasons, lam_h=0.0, lam_v=0.0, iterations=0, feasible=True):
    residual = _residual(state, params)
    scale = 1.0 + max(state)
    exists = feasible and residual < RESIDUAL_RTOL * scale
    if feasible and not exists:
        reasons = reasons + [("residual", residual, RESIDUAL_RTOL * scale)]
    return EquilibriumPoint(kind, state, exists, reasons, residual, lam_h, lam_v, iterations)


def boundary_equilibrium(kind: str, params: ModelParams) -> EquilibriumPoint:
    """Closed-form disease-free equilibria E1-E4."""
    s_h = params.lambda_h / params.d_h
    if kind == "E1":
        return _finish(kind, StateVector(S_h=s_h), params, [])
    if kind == "E2":
        return _finish(kind, StateVector(S_h=s_h, G=params.K_x), params, [])
    if kind not in ("E3", "E4"):
        raise ValueError(f"not a boundary equilibrium: {kind!r}")

    predator = kind == "E4"
    threshold = threshold_o(params) if predator else threshold_o0(params)
    name = "O" if predator else "O_0"
    reasons = [(name, threshold, 1.0)]
    if threshold <= 1.0:
        return EquilibriumPoint(kind, None, False, reasons)
    level = 1.0 - 1.0 / threshold
    state = StateVector(
        S_h=s_h,
        m_q=params.K_q * level,
        S_v=params.f * params.alpha * params.K_q / params.d_v * level,
        G=params.K_x if predator else 0.0,
    )
    return _finish(kind, state, params, reasons)


def _human_denominator(lam_h: float, params: ModelParams) -> float:
    p, q, B_h, d_h = params.p, params.q, params.B_h, params.d_h
    theta, d_i, nu_h = params.theta, params.d_i, params.nu_h
    return (
        p * q * B_h**2 * d_h
        + (theta + d_h + d_i) * (d_h + lam_h) * (d_h + nu_h)
        - B_h * d_h * (p * theta + (p + q) * d_h + p * d_i + q * (lam_h + nu_h))
    )


def existence_ratio(lam_h: float, params: ModelParams) -> float:
    """Left-hand side of the E7/E8 existence inequality (``> 1`` required).

    Equivalent to a positive shared denominator of the human components.
    """
    p, q, B_h, d_h = params.p, params.q, params.B_h, params.d_h
    theta, d_i, nu_h = params.theta, params.d_i, params.nu_h
    top = p * q * B_h**2 * d_h + (theta + d_h + d_i) * (d_h + lam_h) * (d_h + nu_h)
    bottom = B_h * d_h * (p * theta + (p + q) * d_h + p * d_i + q * (lam_h + nu_h))
    return math.inf if bottom == 0.0 else top / bottom


def human_endemic_components(lam_h: float, params: ModelParams) -> tuple[float, float, float, float]:
    """Human compartments (S_h, E_h, I_h, R_h) at equilibrium for a given force of infection."""
    if lam_h < 0.0:
        raise NonExistenceError(f"force of infection must be nonnegative, got {lam_h}")
    den = _human_denominator(lam_h, params)
    if not den > 0.0:
        raise NonExistenceError(f"human equilibrium denominator is not positive ({den:.6g})")
    L = params.lambda_h
    s_h = params.A * params.B * L / den
    e_h = params.A * lam_h * L / den
    i_h = lam_h * params.nu_h * L / den
    r_h = params.theta * i_h / params.d_h
    return s_h, e_h, i_h, r_h


def _vector_outflow(params: ModelParams, predator: bool) -> float:
    return params.alpha + params.d_q + (params.phi * params.K_x if predator else 0.0)


def vector_endemic_components(
    lam_v: float, params: ModelParams, predator: bool = False
) -> tuple[float, float, float, float]:
    """Vector compartments (m_q, S_v, E_v, I_v) at equilibrium for a given ``lam_v``.

    Obtained from the four vector equations with ``G`` fixed at 0 or ``K_x``.
    Reduces to E3/E4 at ``lam_v = 0``. Raises :class:`NonExistenceError` when
    the immature level is not positive.
    """
    if lam_v < 0.0:
        raise NonExistenceError(f"force of infection must be nonnegative, got {lam_v}")
    d_v, nu_v, d_iv = params.d_v, params.nu_v, params.d_iv
    # adults per unit of immature inflow f*alpha*m_q
    adults = (
        1.0 + lam_v / (d_v + nu_v) + lam_v * nu_v / ((d_v + nu_v) * (d_v + d_iv))
    ) / (lam_v + d_v)
    offspring = params.epsilon * params.k * params.f * params.alpha * adults / _vector_outflow(params, predator)
    if not offspring > 1.0:
        raise NonExistenceError(
            f"effective mosquito threshold {offspring:.6g} <= 1 at lam_v={lam_v:.6g}"
        )
    m_q = params.K_q * (1.0 - 1.0 / offspring)
    s_v = params.f * params.alpha * m_q / (lam_v + d_v)
    e_v = lam_v * s_v / (d_v + nu_v)
    i_v = nu_v * e_v / (d_v + d_iv)
    return m_q, s_v, e_v, i_v


def e5_force_of_infection(params: ModelParams) -> float:
    """Force of infection on humans that E5/E6 would require; negative for valid parameters."""
    A, B, d_h = params.A, params.B, params.d_h
    return -d_h * A * B / (d_h * A + (params.theta + d_h) * params.nu_h)


def _state_from(lam_h: float, lam_v: float, params: ModelParams, predator: bool) -> StateVector:
    s_h, e_h, i_h, r_h = human_endemic_components(lam_h, params)
    m_q, s_v, e_v, i_v = vector_endemic_components(lam_v, params, predator)
    return StateVector(s_h, e_h, i_h, r_h, m_q, s_v, e_v, i_v, params.K_x if predator else 0.0)


def _consistency(x: np.ndarray, params: ModelParams, predator: bool) -> np.ndarray:
    """Log-space mismatch of both force-of-infection definitions at (log lam_h, log lam_v)."""
    lam_h, lam_v = math.exp(x[0]), math.exp(x[1])
    s_h, e_h, i_h, r_h = human_endemic_components(lam_h, params)
    m_q, s_v, e_v, i_v = vector_endemic_components(lam_v, params, predator)
    n_h = s_h + e_h + i_h + r_h
    n_v = s_v + e_v + i_v
    return np.array(
        [
            math.log(lam_h * n_h) - math.log(params.c_vh * params.a_v * i_v),
            math.log(lam_v * n_v) - math.log(params.c_hv * params.a_v * i_h),
        ]
    )


def _newton(params, predator, seed, max_iter):
    x = np.log(np.asarray(seed, dtype=float))
    r = _consistency(x, params, predator)
    fd = 1e-7
    for it in range(1, max_iter + 1):
        J = np.empty((2, 2))
        for j in range(2):
            dx = np.zeros(2)
            dx[j] = fd
            J[:, j] = (_consistency(x + dx, params, predator) - _consistency(x - dx, params, predator)) / (2 * fd)
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            return None, x, it
        norm = np.max(np.abs(r))
        t = 1.0
        while t > 1e-10:
            trial = x + t * step
            try:
                r_trial = _consistency(trial, params, predator)
            except (NonExistenceError, ValueError, OverflowError):
                t *= 0.5
                continue
            if np.max(np.abs(r_trial)) < (1.0 - 1e-4 * t) * norm or np.max(np.abs(r_trial)) < 1e-14:
                break
            t *= 0.5
        else:
            return None, x, it
        x, r = trial, r_trial
        if np.max(np.abs(r)) < 1e-13 or np.max(np.abs(t * step)) < 1e-15:
            return x, x, it
        if x.min() < math.log(1e-250):
            return None, x, it
    return None, x, max_iter


def _lam_h_given(lam_v: float, params: ModelParams, predator: bool) -> float:
    i_v = vector_endemic_components(lam_v, params, predator)[3]
    target = params.c_vh * params.a_v * i_v

    def g(lam_h):
        return lam_h * sum(human_endemic_components(lam_h, params)) - target

    hi = 1.0
    while g(hi) < 0.0:
        hi *= 2.0
    return brentq(g, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)


def _bisection(params, predator):
    """One-dimensional reduction in lam_v, bracketed on a log grid."""

    def g(log_lam_v):
        lam_v = math.exp(log_lam_v)
        lam_h = _lam_h_given(lam_v, params, predator)
        return _consistency(np.array([math.log(lam_h), log_lam_v]), params, predator)[1]

    grid = np.linspace(math.log(1e-12), math.log(1e6), 181)
    prev = None
    for u in grid:
        try:
            val = g(u)
        except (NonExistenceError, ValueError, ZeroDivisionError):
            break
        if prev is not None and np.sign(val) != np.sign(prev[1]):
            root = brentq(g, prev[0], u, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            lam_v = math.exp(root)
            return np.log([_lam_h_given(lam_v, params, predator), lam_v])
        prev = (u, val)
    return None


def solve_endemic(
    kind: str,
    params: ModelParams,
    seed: tuple[float, float] = (1e-3, 1e-3),
    max_iter: int = 200,
) -> EquilibriumPoint:
    """Endemic equilibrium E7 (no predator) or E8 (predator at ``K_x``).

    Returns an :class:`EquilibriumPoint` with ``exists=False`` and the
    violated condition when there is no positive solution.
    """
    if kind not in ("E7", "E8"):
        raise ValueError(f"not an endemic equilibrium: {kind!r}")
    predator = kind == "E8"
    threshold = threshold_o(params) if predator else threshold_o0(params)
    reasons = [("O" if predator else "O_0", threshold, 1.0)]
    if threshold <= 1.0:
        return EquilibriumPoint(kind, None, False, reasons)
    for name in ("c_vh", "c_hv", "a_v", "nu_h", "nu_v"):
        if getattr(params, name) == 0.0:
            return EquilibriumPoint(kind, None, False, reasons + [(name, 0.0, 0.0)])

    R0 = r0(params)
    reasons.append(("R0", R0, 1.0))

    x, last, iterations = _newton(params, predator, seed, max_iter)
    if x is None:
        x = _bisection(params, predator)
        if x is None:
            if R0 <= 1.0:
                return EquilibriumPoint(kind, None, False, reasons, iterations=iterations)
            raise ConvergenceError(
                f"{kind}: no convergence after {iterations} Newton iterations and bisection fallback",
                np.exp(last),
            )
    lam_h, lam_v = (float(v) for v in np.exp(x))
    reasons.append(("existence_ratio", existence_ratio(lam_h, params), 1.0))
    try:
        state = _state_from(lam_h, lam_v, params, predator)
    except NonExistenceError as exc:
        return EquilibriumPoint(kind, None, False, reasons + [(str(exc), lam_v, 0.0)], lam_h=lam_h, lam_v=lam_v)
    return _finish(kind, state, params, reasons, lam_h, lam_v, iterations)


def all_equilibria(params: ModelParams) -> list[EquilibriumPoint]:
    """All eight equilibria in order E1..E8."""
    points = [boundary_equilibrium(k, params) for k in ("E1", "E2", "E3", "E4")]
    lam = e5_force_of_infection(params)
    for kind in ("E5", "E6"):
        points.append(EquilibriumPoint(kind, None, False, [("lambda_h", lam, 0.0)], lam_h=lam))
    for kind in ("E7", "E8"):
        try:
            points.append(solve_endemic(kind, params))
        except ConvergenceError:
            points.append(
                EquilibriumPoint(kind, None, False, [("no convergence", float("nan"), 0.0)])
            )
    return points
