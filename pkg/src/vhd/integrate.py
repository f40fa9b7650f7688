"""Adaptive Dormand-Prince 5(4) integration with dense, uniformly sampled output.

Error control mixes a relative and an absolute part per component,
``|err_i| <= tol * (scale_i + max(|y_i|, |y_new_i|))``, where ``scale_i`` is
the natural size of the compartment (the invariant-box bound). The same
scale sets the clamp rule: negative values no larger in magnitude than
``10 * tol * scale_i`` are set to zero, larger ones abort the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import invariant_bounds, make_rhs, rhs_kernel
from .params import COMPARTMENTS, ModelParams, StateVector

__all__ = ["IntegrationError", "Trajectory", "integrate", "state_scale"]

# Dormand & Prince (1980) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# fifth-order minus embedded fourth-order weights, seven stages (FSAL)
_E = np.array(
    [
        71 / 57600,
        0.0,
        -71 / 16695,
        71 / 1920,
        -17253 / 339200,
        22 / 525,
        -1 / 40,
    ]
)
# continuous extension (Shampine): y(t + s*h) = y + h * K.T @ (_P @ [s, s^2, s^3, s^4])
_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
# PI controller exponents for a fourth-order error estimate
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5
_MAX_STEPS = 5_000_000


@dataclass
class Trajectory:
    times: np.ndarray
    y: np.ndarray
    params: ModelParams
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def states(self) -> list[StateVector]:
        return [StateVector.from_array(row) for row in self.y]

    def state(self, i: int) -> StateVector:
        return StateVector.from_array(self.y[i])

    def column(self, name: str) -> np.ndarray:
        return self.y[:, COMPARTMENTS.index(name)]

    @property
    def N_h(self) -> np.ndarray:
        return self.y[:, 0:4].sum(axis=1)

    @property
    def N_v(self) -> np.ndarray:
        return self.y[:, 5:8].sum(axis=1)


class IntegrationError(RuntimeError):
    """Integration could not continue; ``partial`` holds the samples produced so far."""

    def __init__(self, message: str, partial: Trajectory):
        super().__init__(message)
        self.partial = partial


def state_scale(params: ModelParams) -> np.ndarray:
    """Characteristic magnitude of each compartment, used for absolute tolerances."""
    b = invariant_bounds(params)
    return np.array([b["N_h"]] * 4 + [b["m_q"]] + [b["N_v"]] * 3 + [b["G"]])


def _initial_step(f, t0, y0, f0, h_max, scale, tol) -> float:
    # Hairer, Norsett & Wanner, algorithm of section II.4
    sc = tol * (scale + np.abs(y0))
    d0 = math.sqrt(np.mean((y0 / sc) ** 2))
    d1 = math.sqrt(np.mean((f0 / sc) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, h_max)
    f1 = f(t0 + h0, y0 + h0 * f0)
    d2 = math.sqrt(np.mean(((f1 - f0) / sc) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, h_max)


def _clamp(y: list[float], limit: list[float]) -> int:
    """Zero small negative components in place; return the count, or -1 on a large negative."""
    n = 0
    for i, v in enumerate(y):
        if v < 0.0:
            if -v > limit[i]:
                return -1
            y[i] = 0.0
            n += 1
    return n


def integrate(
    initial,
    params: ModelParams,
    t0: float = 0.0,
    t1: float = 500.0,
    sample_dt: float = 0.5,
    tol: float = 1e-8,
    fixed_step: float | None = None,
) -> Trajectory:
    """Integrate the model from ``t0`` to ``t1``, sampled every ``sample_dt`` days.

    The sample grid is ``t0, t0 + sample_dt, ...`` and always ends with ``t1``.
    Raises :class:`IntegrationError` on step-size underflow or when a
    component overshoots below zero by more than the clamp limit.

    With ``fixed_step`` the error control is switched off and the run takes
    equal steps no longer than ``fixed_step`` (used for convergence studies).
    """
    if not t1 > t0:
        raise ValueError(f"t1 must exceed t0 (got t0={t0}, t1={t1})")
    if not sample_dt > 0.0:
        raise ValueError("sample_dt must be positive")
    if not 1e-12 < tol < 1e-2:
        raise ValueError(f"tol must lie in (1e-12, 1e-2), got {tol}")
    if not isinstance(initial, StateVector):
        initial = StateVector.from_array(initial)
    y = initial.to_array()

    n_grid = int(math.floor((t1 - t0) / sample_dt + 1e-9))
    grid = t0 + sample_dt * np.arange(n_grid + 1)
    if t1 - grid[-1] > 1e-9 * sample_dt:
        grid = np.append(grid, t1)
    else:
        grid[-1] = t1

    g = rhs_kernel(params)
    scale_arr = state_scale(params)
    scale = scale_arr.tolist()
    clamp_limit = (10.0 * tol * scale_arr).tolist()
    out = np.empty((len(grid), y.size))
    out[0] = y
    n_out = 1
    n_grid = len(grid)
    steps = rejected = nfev = clamped = 0
    method = "DOP5(4)"

    def meta() -> dict:
        return {"tol": tol, "method": method, "steps": steps, "rejected": rejected, "nfev": nfev, "clamped": clamped}

    def partial() -> Trajectory:
        return Trajectory(grid[:n_out].copy(), out[:n_out].copy(), params, meta())

    (a21,), (a31, a32), (a41, a42, a43), (a51, a52, a53, a54), (a61, a62, a63, a64, a65) = (
        a.tolist() for a in _A[1:]
    )
    b1, _, b3, b4, b5, b6 = _B.tolist()
    e1, _, e3, e4, e5, e6, e7 = _E.tolist()
    inv_n = 1.0 / y.size

    t = float(t0)
    yl = y.tolist()
    k1 = g(yl)
    nfev += 1
    if fixed_step is not None:
        if not fixed_step > 0.0:
            raise ValueError("fixed_step must be positive")
        h = (t1 - t0) / math.ceil((t1 - t0) / fixed_step)
        method = "DOP5 fixed step"
    else:
        h = _initial_step(make_rhs(params), t, y, np.array(k1), t1 - t0, scale_arr, tol)
        nfev += 1
    err_prev = 1e-4
    rejected_last = False

    # the model is autonomous, so stage times are not needed
    while t < t1:
        if steps + rejected >= _MAX_STEPS:
            raise IntegrationError(f"step budget exhausted at t={t:.6g}", partial())
        if h < 16.0 * math.ulp(max(abs(t), 1.0)):
            raise IntegrationError(f"step size underflow at t={t:.6g} (h={h:.3g})", partial())
        if t + h > t1:
            h = t1 - t

        c1 = h * a21
        k2 = g([u + c1 * x1 for u, x1 in zip(yl, k1)])
        c1, c2 = h * a31, h * a32
        k3 = g([u + c1 * x1 + c2 * x2 for u, x1, x2 in zip(yl, k1, k2)])
        c1, c2, c3 = h * a41, h * a42, h * a43
        k4 = g([u + c1 * x1 + c2 * x2 + c3 * x3 for u, x1, x2, x3 in zip(yl, k1, k2, k3)])
        c1, c2, c3, c4 = h * a51, h * a52, h * a53, h * a54
        k5 = g([
            u + c1 * x1 + c2 * x2 + c3 * x3 + c4 * x4
            for u, x1, x2, x3, x4 in zip(yl, k1, k2, k3, k4)
        ])
        c1, c2, c3, c4, c5 = h * a61, h * a62, h * a63, h * a64, h * a65
        k6 = g([
            u + c1 * x1 + c2 * x2 + c3 * x3 + c4 * x4 + c5 * x5
            for u, x1, x2, x3, x4, x5 in zip(yl, k1, k2, k3, k4, k5)
        ])
        c1, c3, c4, c5, c6 = h * b1, h * b3, h * b4, h * b5, h * b6
        y_new = [
            u + c1 * x1 + c3 * x3 + c4 * x4 + c5 * x5 + c6 * x6
            for u, x1, x3, x4, x5, x6 in zip(yl, k1, k3, k4, k5, k6)
        ]
        k7 = g(y_new)
        nfev += 6

        # yl is nonnegative after clamping; only y_new can dip below zero
        acc = 0.0
        for u, v, sc, x1, x3, x4, x5, x6, x7 in zip(yl, y_new, scale, k1, k3, k4, k5, k6, k7):
            r = (e1 * x1 + e3 * x3 + e4 * x4 + e5 * x5 + e6 * x6 + e7 * x7) / (sc + max(u, abs(v)))
            acc += r * r
        err = math.sqrt(acc * inv_n) * h / tol

        if fixed_step is not None or err <= 1.0:
            t_new = t + h if t + h < t1 else t1
            if n_out < n_grid and grid[n_out] <= t_new:
                K = np.array((k1, k2, k3, k4, k5, k6, k7))
                y_arr = np.array(yl)
            # dense samples inside (t, t_new]
            while n_out < n_grid and grid[n_out] <= t_new:
                s = (grid[n_out] - t) / h
                sample = (y_arr + h * (K.T @ (_P @ np.array([s, s * s, s**3, s**4])))).tolist()
                if _clamp(sample, clamp_limit) < 0:
                    raise IntegrationError(
                        f"negative overshoot beyond clamp limit at t={grid[n_out]:.6g}", partial()
                    )
                out[n_out] = sample
                n_out += 1
            n_clamped = _clamp(y_new, clamp_limit) if min(y_new) < 0.0 else 0
            if n_clamped < 0:
                raise IntegrationError(f"negative overshoot beyond clamp limit at t={t_new:.6g}", partial())
            steps += 1
            t, yl = t_new, y_new
            if n_clamped:
                clamped += n_clamped
                k1 = g(yl)
                nfev += 1
            else:
                k1 = k7
            if fixed_step is not None:
                continue
            err = max(err, 1e-10)
            fac = _SAFETY * err ** (-_ALPHA) * err_prev**_BETA
            fac = min(_FAC_MAX, max(_FAC_MIN, fac))
            if rejected_last:
                fac = min(1.0, fac)
            h *= fac
            err_prev = err
            rejected_last = False
        else:
            rejected += 1
            h *= max(_FAC_MIN, _SAFETY * err ** (-_ALPHA))
            rejected_last = True

    return Trajectory(grid, out, params, meta())
