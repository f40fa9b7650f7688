"""Jacobian, next-generation matrix and local stability of the equilibria."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .equilibria import EquilibriumPoint
from .model import r0, threshold_o, threshold_o0
from .params import ModelParams, StateVector

__all__ = [
    "MARGINAL_TOL",
    "NGMResult",
    "RouthHurwitz",
    "StabilityReport",
    "classify",
    "e2_factor_roots",
    "jacobian",
    "ngm_r0",
    "routh_hurwitz_e2",
    "routh_hurwitz_stable",
]

MARGINAL_TOL = 1e-9


def jacobian(state, params: ModelParams) -> np.ndarray:
    """Analytic 9x9 Jacobian of the right-hand side.

    At ``N_v = 0`` the vector infection term is not differentiable; the
    limit along the disease-free manifold is used, i.e. all adult vectors
    are taken as susceptible (``S_v / N_v -> 1``) and the derivatives of that
    ratio are taken as zero.
    """
    y = state.to_array() if isinstance(state, StateVector) else np.asarray(state, dtype=float)
    S_h, E_h, I_h, R_h, m_q, S_v, E_v, I_v, G = y.tolist()
    n_h = S_h + E_h + I_h + R_h
    n_v = S_v + E_v + I_v
    if not n_h > 0.0:
        raise ValueError("Jacobian requires N_h > 0")
    P = params
    beta_h = P.c_vh * P.a_v
    beta_v = P.c_hv * P.a_v
    pB = P.p * P.B_h
    qB = P.q * P.B_h

    # infection on humans: beta_h * I_v * S_h / N_h
    dh_S = beta_h * I_v * (n_h - S_h) / n_h**2
    dh_other = -beta_h * I_v * S_h / n_h**2
    dh_Iv = beta_h * S_h / n_h
    # infection on vectors: beta_v * I_h * S_v / N_v
    if n_v > 0.0:
        dv_Ih = beta_v * S_v / n_v
        dv_Sv = beta_v * I_h * (n_v - S_v) / n_v**2
        dv_other = -beta_v * I_h * S_v / n_v**2
    else:
        dv_Ih, dv_Sv, dv_other = beta_v, 0.0, 0.0

    J = np.zeros((9, 9))
    # S_h
    J[0, 0] = -dh_S - P.d_h
    J[0, 1] = -pB - dh_other
    J[0, 2] = -qB - dh_other
    J[0, 3] = -dh_other
    J[0, 7] = -dh_Iv
    # E_h
    J[1, 0] = dh_S
    J[1, 1] = pB + dh_other - P.d_h - P.nu_h
    J[1, 2] = dh_other
    J[1, 3] = dh_other
    J[1, 7] = dh_Iv
    # I_h
    J[2, 1] = P.nu_h
    J[2, 2] = qB - P.theta - P.d_h - P.d_i
    # R_h
    J[3, 2] = P.theta
    J[3, 3] = -P.d_h
    # m_q
    ek = P.epsilon * P.k
    J[4, 4] = -ek * n_v / P.K_q - (P.alpha + P.d_q + P.phi * G)
    J[4, 5:8] = ek * (1.0 - m_q / P.K_q)
    J[4, 8] = -P.phi * m_q
    # S_v
    J[5, 2] = -dv_Ih
    J[5, 4] = P.f * P.alpha
    J[5, 5] = -dv_Sv - P.d_v
    J[5, 6] = -dv_other
    J[5, 7] = -dv_other
    # E_v
    J[6, 2] = dv_Ih
    J[6, 5] = dv_Sv
    J[6, 6] = dv_other - P.d_v - P.nu_v
    J[6, 7] = dv_other
    # I_v
    J[7, 6] = P.nu_v
    J[7, 7] = -P.d_v - P.d_iv
    # G
    J[8, 4] = P.psi * G * (1.0 - G / P.K_x)
    J[8, 8] = (P.rho + P.psi * m_q) * (1.0 - 2.0 * G / P.K_x)

    if not np.all(np.isfinite(J)):
        raise ValueError("Jacobian has non-finite entries")
    return J


@dataclass(frozen=True)
class NGMResult:
    """Next-generation quantities over the infected classes (E_h, I_h, E_v, I_v)."""

    R0: float
    T: np.ndarray
    Sigma: np.ndarray
    minus_sigma_inv: np.ndarray

    @property
    def K(self) -> np.ndarray:
        return self.T @ self.minus_sigma_inv


def ngm_r0(params: ModelParams) -> NGMResult:
    P = params
    T = np.zeros((4, 4))
    T[0, 3] = P.a_v * P.c_vh
    T[2, 1] = P.a_v * P.c_hv
    Sigma = np.array(
        [
            [P.p * P.B_h - P.d_h - P.nu_h, 0.0, 0.0, 0.0],
            [P.nu_h, P.q * P.B_h - P.theta - P.d_h - P.d_i, 0.0, 0.0],
            [0.0, 0.0, -P.d_v - P.nu_v, 0.0],
            [0.0, 0.0, P.nu_v, -(P.d_v + P.d_iv)],
        ]
    )
    try:
        minus_inv = -np.linalg.inv(Sigma)
    except np.linalg.LinAlgError as exc:
        raise ValueError("transition matrix is singular") from exc
    K = T @ minus_inv
    R0 = float(np.max(np.abs(np.linalg.eigvals(K))))
    return NGMResult(R0, T, Sigma, minus_inv)


@dataclass(frozen=True)
class RouthHurwitz:
    a0: float
    a1: float
    a2: float
    a3: float
    a4: float
    b1: float
    b2: float
    c1: float
    quadratic_abc: tuple[float, float, float]
    gates: dict = field(default_factory=dict)

    @property
    def quartic(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3, self.a4])

    @property
    def gates_hold(self) -> bool:
        return all(self.gates.values())


def routh_hurwitz_e2(params: ModelParams) -> RouthHurwitz:
    """Routh-Hurwitz data for the two nontrivial factors of the E2 characteristic polynomial."""
    P = params
    A, B = P.A, P.B
    d_v, d_iv, nu_v = P.d_v, P.d_iv, P.nu_v
    a1 = A + B + 2 * d_v + d_iv + nu_v
    a2 = (
        A * B + 2 * A * d_v + 2 * B * d_v + d_v**2 + A * d_iv + B * d_iv + d_v * d_iv
        + (A + B + d_v + d_iv) * nu_v
    )
    a3 = (
        2 * A * B * d_v
        + (A + B) * (d_v**2 + d_v * d_iv + d_v * nu_v + d_iv * nu_v)
        + A * B * (d_iv + nu_v)
    )
    a4 = A * B * (d_v + d_iv) * (d_v + nu_v) - P.a_v**2 * P.c_vh * P.c_hv * P.nu_h * nu_v
    b1 = (A * B * (A + B) + (A + B + d_v + d_iv) * (A + B + d_v + nu_v) * (2 * d_v + d_iv + nu_v)) / a1
    b2 = a4
    c1 = (b1 * a3 - a1 * a4) / b1
    outflow = P.alpha + P.d_q + P.phi * P.K_x
    quad = (1.0, outflow + d_v, -P.f * P.k * P.alpha * P.epsilon + outflow * d_v)
    gates = {
        "R0^2 < 1": r0(P) ** 2 < 1.0,
        "O < 1": threshold_o(P) < 1.0,
        "c1 > 0": c1 > 0.0,
    }
    return RouthHurwitz(1.0, a1, a2, a3, a4, b1, b2, c1, quad, gates)


def routh_hurwitz_stable(a: np.ndarray) -> bool:
    """Routh-Hurwitz test for a monic quartic ``x^4 + a1 x^3 + a2 x^2 + a3 x + a4``."""
    _, a1, a2, a3, a4 = (float(v) for v in a)
    if not (a1 > 0 and a2 > 0 and a3 > 0 and a4 > 0):
        return False
    b1 = (a1 * a2 - a3) / a1
    if not b1 > 0:
        return False
    return (b1 * a3 - a1 * a4) / b1 > 0


def e2_factor_roots(params: ModelParams) -> np.ndarray:
    """Roots of the factored E2 characteristic polynomial (nine values)."""
    rh = routh_hurwitz_e2(params)
    roots = [-params.rho, -params.d_h, -params.d_h]
    roots.extend(np.roots(rh.quadratic_abc))
    roots.extend(np.roots(rh.quartic))
    return np.array(roots, dtype=complex)


@dataclass
class StabilityReport:
    kind: str
    eigenvalues: np.ndarray
    max_real_part: float
    classification: str
    thresholds: dict
    rh: RouthHurwitz | None = None
    predicted: str | None = None
    agrees: bool | None = None
    notes: list[str] = field(default_factory=list)


def _classify_spectrum(eigenvalues: np.ndarray) -> tuple[float, str]:
    max_re = float(np.max(eigenvalues.real))
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    if abs(max_re) < MARGINAL_TOL * scale:
        return max_re, "marginal"
    return max_re, "stable" if max_re < 0 else "unstable"


def classify(eq: EquilibriumPoint, params: ModelParams) -> StabilityReport:
    """Eigenvalue classification of an existing equilibrium with the analytic prediction."""
    if not eq.exists or eq.state is None:
        raise ValueError(f"{eq.kind} does not exist; nothing to classify")
    J = jacobian(eq.state, params)
    try:
        eig = np.linalg.eigvals(J)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigenvalue solve failed for {eq.kind}:\n{J!r}") from exc
    order = np.lexsort((eig.imag, eig.real))
    eig = eig[order]
    max_re, label = _classify_spectrum(eig)
    thresholds = {"R0": r0(params), "O_0": threshold_o0(params), "O": threshold_o(params)}
    report = StabilityReport(eq.kind, eig, max_re, label, thresholds)

    if eq.kind in ("E1", "E3"):
        report.predicted = "unstable"
    elif eq.kind in ("E2", "E4"):
        rh = routh_hurwitz_e2(params)
        report.rh = rh
        if eq.kind == "E2":
            report.predicted = "stable" if rh.gates_hold else "unstable"
        else:
            P = params
            fkae = P.f * P.k * P.alpha * P.epsilon
            gate = 2 * fkae / (fkae + (P.alpha + P.d_q + P.phi * P.K_x) * P.d_v)
            holds = thresholds["R0"] ** 2 < 1 and rh.c1 > 0 and thresholds["O"] > gate
            report.predicted = "stable" if holds else None
            report.notes.append(f"E4 gate: O={thresholds['O']:.6g} vs {gate:.6g}")
    if eq.kind == "E3":
        growth = params.rho + (1 - 1 / thresholds["O_0"]) * params.psi * params.K_q
        report.notes.append(
            f"predator growth eigenvalue {growth:.6g} (rho + (1 - 1/O_0)*psi*K_q)"
        )
    if report.predicted is not None and label != "marginal":
        report.agrees = report.predicted == label
    return report

