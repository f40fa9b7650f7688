"""Right-hand side of the nine-compartment model and its closed-form summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .params import COMPARTMENTS, ModelParams, StateVector

__all__ = [
    "DerivedRates",
    "ReproductionNumber",
    "forces_of_infection",
    "invariant_bounds",
    "make_rhs",
    "r0",
    "r0_components",
    "rhs",
    "rhs_kernel",
    "threshold_o",
    "threshold_o0",
]


@dataclass(frozen=True)
class DerivedRates:
    lam_h: float
    lam_v: float
    n_h: float
    n_v: float


@dataclass(frozen=True)
class ReproductionNumber:
    """R0 together with its host and vector factors, R0 = sqrt(R0h * R0v)."""

    value: float
    host: float
    vector: float

    def __float__(self) -> float:
        return self.value


def _as_array(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.to_array()
    y = np.asarray(state, dtype=float)
    if y.shape != (len(COMPARTMENTS),):
        raise ValueError(f"state must have {len(COMPARTMENTS)} components, got shape {y.shape}")
    return y


def forces_of_infection(state, params: ModelParams) -> DerivedRates:
    y = _as_array(state)
    S_h, E_h, I_h, R_h, _, S_v, E_v, I_v, _ = y.tolist()
    n_h = S_h + E_h + I_h + R_h
    n_v = S_v + E_v + I_v
    if not n_h > 0.0:
        raise ValueError(f"total human population must be positive, got {n_h}")
    lam_h = params.c_vh * params.a_v * I_v / n_h
    lam_v = params.c_hv * params.a_v * I_h / n_v if n_v > 0.0 else 0.0
    return DerivedRates(lam_h=lam_h, lam_v=lam_v, n_h=n_h, n_v=n_v)


def rhs_kernel(params: ModelParams) -> Callable[[Sequence[float]], tuple]:
    """Return ``g(y)`` giving the nine derivatives as a tuple of floats.

    No validation is done here; this is the integrator hot path and works on
    plain Python floats, which beats numpy for nine components.
    Infection terms are 0 when the corresponding total population is not
    positive (no hosts or no adult vectors means no bites).
    """
    L = params.lambda_h
    d_h, d_i, d_v, d_iv = params.d_h, params.d_i, params.d_v, params.d_iv
    pB = params.p * params.B_h
    qB = params.q * params.B_h
    beta_h = params.c_vh * params.a_v
    beta_v = params.c_hv * params.a_v
    nu_h, nu_v, theta = params.nu_h, params.nu_v, params.theta
    out_E = d_h + nu_h
    out_I = theta + d_h + d_i
    ek = params.epsilon * params.k
    K_q = params.K_q
    ad = params.alpha + params.d_q
    phi = params.phi
    fa = params.f * params.alpha
    rho, psi, K_x = params.rho, params.psi, params.K_x
    out_Ev = d_v + nu_v
    out_Iv = d_v + d_iv

    def g(y):
        S_h, E_h, I_h, R_h, m_q, S_v, E_v, I_v, G = y
        n_h = S_h + E_h + I_h + R_h
        n_v = S_v + E_v + I_v
        inf_h = beta_h * I_v * S_h / n_h if (I_v != 0.0 and n_h > 0.0) else 0.0
        inf_v = beta_v * I_h * S_v / n_v if n_v > 0.0 else 0.0
        return (
            L - pB * E_h - qB * I_h - inf_h - d_h * S_h,
            pB * E_h + inf_h - out_E * E_h,
            qB * I_h + nu_h * E_h - out_I * I_h,
            theta * I_h - d_h * R_h,
            ek * n_v * (1.0 - m_q / K_q) - (ad + phi * G) * m_q,
            fa * m_q - inf_v - d_v * S_v,
            inf_v - out_Ev * E_v,
            nu_v * E_v - out_Iv * I_v,
            (rho + psi * m_q) * G * (1.0 - G / K_x),
        )

    return g


def make_rhs(params: ModelParams) -> Callable[[float, np.ndarray], np.ndarray]:
    """Return ``f(t, y)`` for the model with ``params`` bound, in the form ODE solvers expect."""
    g = rhs_kernel(params)

    def f(t: float, y: np.ndarray) -> np.ndarray:
        return np.array(g(y.tolist()))

    return f


def rhs(state, params: ModelParams) -> np.ndarray:
    """Time derivative of the nine compartments (counts per day).

    ``state`` is a :class:`StateVector` or any length-9 sequence ordered
    as :data:`COMPARTMENTS`.
    """
    y = _as_array(state)
    if not np.all(np.isfinite(y)):
        raise ValueError("state contains non-finite values")
    n_h = y[0] + y[1] + y[2] + y[3]
    if n_h == 0.0 and params.c_vh * params.a_v * y[7] > 0.0:
        raise ValueError("N_h = 0 with infectious vectors present: corrupted state")
    return make_rhs(params)(0.0, y)


def r0_components(params: ModelParams) -> ReproductionNumber:
    host = params.a_v * params.c_vh * params.nu_h / (params.A * params.B)
    vector = (
        params.a_v * params.c_hv * params.nu_v
        / ((params.d_iv + params.d_v) * (params.d_v + params.nu_v))
    )
    return ReproductionNumber(value=math.sqrt(host * vector), host=host, vector=vector)


def r0(params: ModelParams) -> float:
    """Basic reproduction number from the closed form."""
    num = params.a_v**2 * params.c_vh * params.c_hv * params.nu_h * params.nu_v
    den = (
        params.A * params.B
        * (params.d_iv + params.d_v)
        * (params.d_v + params.nu_v)
    )
    return math.sqrt(num / den)


def threshold_o0(params: ModelParams) -> float:
    """Mosquito survival threshold without predation."""
    return (
        params.epsilon * params.k * params.f * params.alpha
        / (params.d_v * (params.alpha + params.d_q))
    )


def threshold_o(params: ModelParams) -> float:
    """Mosquito survival threshold with the predator at carrying capacity."""
    return (
        params.epsilon * params.k * params.f * params.alpha
        / (params.d_v * (params.alpha + params.d_q + params.phi * params.K_x))
    )


def invariant_bounds(params: ModelParams) -> dict[str, float]:
    """Upper bounds of the positively invariant box."""
    return {
        "N_h": params.lambda_h / params.d_h,
        "m_q": params.K_q,
        "N_v": params.f * params.alpha * params.K_q / params.d_v,
        "G": params.K_x,
    }
