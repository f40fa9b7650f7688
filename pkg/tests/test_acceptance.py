"""Acceptance criteria, one test each, every test prints a PASS/FAIL line."""

import time

import numpy as np
import pytest
from helpers import draws

from vhd.equilibria import all_equilibria, boundary_equilibrium
from vhd.integrate import integrate
from vhd.model import invariant_bounds, r0, rhs
from vhd.params import ModelParams, default_params
from vhd.scenario import PRESETS, preset, report_formulas
from vhd.sensitivity import sensitivity
from vhd.stability import (
    classify,
    e2_factor_roots,
    jacobian,
    ngm_r0,
    routh_hurwitz_e2,
    routh_hurwitz_stable,
)

TOL = 1e-8
R0SQ_REFERENCE = {
    "a_v": 2.0,
    "d_v": -1.1436,
    "theta": -1.01476,
    "c_vh": 1.0,
    "c_hv": 1.0,
    "B_h": 0.0768739,
    "q": 0.0674819,
    "d_i": -0.0507382,
    "p": 0.00939206,
    "nu_h": -0.00911665,
    "d_h": -0.0022542,
    "d_iv": -0.000238039,
    "K_q": 0.0,
    "alpha": 0.0,
    "epsilon": 0.0,
    "k": 0.0,
    "d_q": 0.0,
    "phi": 0.0,
    "f": 0.0,
    "rho": 0.0,
    "psi": 0.0,
    "K_x": 0.0,
    "lambda_h": 0.0,
}
THRESHOLD_REFERENCE = {
    "O_0": {"epsilon": 1.0, "k": 1.0, "f": 1.0, "d_v": -1.0, "alpha": 0.366412, "d_q": -0.366412},
    "O": {
        "epsilon": 1.0,
        "k": 1.0,
        "f": 1.0,
        "d_v": -1.0,
        "alpha": 0.999763,
        "d_q": -0.000137092,
        "phi": -0.999626,
        "K_x": -0.999626,
    },
}


@pytest.fixture(scope="module")
def runs():
    """Each preset integrated once over 500 days at tol 1e-8, with its wall time."""
    out = {}
    for name in PRESETS:
        cfg = preset(name)
        start = time.perf_counter()
        traj = integrate(cfg.initial, cfg.params, 0.0, cfg.horizon_days, cfg.sample_dt, TOL)
        out[name] = (traj, time.perf_counter() - start)
    return out


def test_criterion_01_r0_baseline(verdict):
    value = r0(default_params(a_v=3.0425, c_vh=1.0, c_hv=1.0))
    verdict("1 R0 at baseline", abs(value - 98.2814) <= 1e-3, f"R0 = {value:.6f}, expected 98.2814 +- 0.001")


def test_criterion_02_r0_low_contact(verdict):
    value = r0(default_params(a_v=0.25, c_vh=0.2, c_hv=0.25))
    verdict("2 R0 low contact", abs(value - 1.81) <= 5e-3, f"R0 = {value:.6f}, expected 1.81 +- 0.005")


def test_criterion_03_factored_coefficient(verdict):
    rep = report_formulas(ModelParams(), ("a_v", "c_vh", "c_hv"))
    ok = abs(rep.coefficient - 32.3028) <= 1e-3
    verdict("3 factored R0", ok, f"{rep.text} (coefficient {rep.coefficient:.6f}, expected 32.3028 +- 0.001)")


def test_criterion_04_r0_squared_indices(verdict):
    P = ModelParams()
    table = sensitivity("R0_squared", P)
    fd = sensitivity("R0_squared", P, method="finite-difference")
    worst = max(abs(table[n] - v) for n, v in R0SQ_REFERENCE.items())
    analytic_nu_v = P.d_v / (P.d_v + P.nu_v)
    nu_ok = abs(table["nu_v"] - analytic_nu_v) < 1e-12 and abs(fd["nu_v"] - table["nu_v"]) < 1e-6
    ok = worst <= 1e-4 and nu_ok and len(table.entries) == 24
    verdict(
        "4 R0^2 sensitivity indices",
        ok,
        f"max |diff| over 23 reference entries = {worst:.2e}; nu_v = {table['nu_v']:.6f} "
        f"(analytic, fd diff {abs(fd['nu_v'] - table['nu_v']):.1e}; reference 0.123836 differs)",
    )


def test_criterion_05_threshold_indices(verdict):
    P = ModelParams()
    worst = 0.0
    for target, expected in THRESHOLD_REFERENCE.items():
        table = sensitivity(target, P)
        worst = max(worst, max(abs(table[n] - v) for n, v in expected.items()))
        worst = max(worst, max(abs(v) for n, v in table.entries.items() if n not in expected))
    verdict("5 threshold sensitivity indices", worst <= 1e-5, f"max |diff| = {worst:.2e} (tolerance 1e-5)")


def test_criterion_06_ngm(verdict):
    start = time.perf_counter()
    worst = max(abs(ngm_r0(P).R0 - r0(P)) / r0(P) for P in [ModelParams()] + draws(100, seed=101))
    elapsed = time.perf_counter() - start
    verdict(
        "6 NGM spectral radius",
        worst <= 1e-10 and elapsed < 1.0,
        f"max rel diff {worst:.1e} over 101 sets, {elapsed:.2f} s",
    )


def test_criterion_07_equilibrium_residuals(verdict):
    start = time.perf_counter()
    sets = [ModelParams(), default_params(a_v=0.25, c_vh=0.2, c_hv=0.25), default_params(phi=1e-5)]
    sets += draws(10, seed=107)
    worst, count = 0.0, 0
    for P in sets:
        for eq in all_equilibria(P):
            if eq.exists:
                count += 1
                res = np.max(np.abs(rhs(eq.state, P))) / (1.0 + max(eq.state))
                worst = max(worst, res)
    elapsed = time.perf_counter() - start
    verdict(
        "7 equilibrium residuals",
        worst < 1e-8 and elapsed < 1.0,
        f"{count} equilibria, max relative residual {worst:.1e}, {elapsed:.2f} s",
    )


def test_criterion_08_stability_conditions(verdict):
    start = time.perf_counter()
    bad = []
    n_stable = 0
    worst_root = 0.0
    for i, P in enumerate(draws(100, seed=108)):
        for kind in ("E1", "E3"):
            eq = boundary_equilibrium(kind, P)
            if eq.exists and classify(eq, P).classification != "unstable":
                bad.append(f"{kind} draw {i}")
        e2 = boundary_equilibrium("E2", P)
        rep = classify(e2, P)
        gates = r0(P) ** 2 < 1 and rep.rh.gates["O < 1"] and rep.rh.c1 > 0
        n_stable += rep.classification == "stable"
        if (rep.classification == "stable") != gates:
            bad.append(f"E2 draw {i}")
        eig = np.sort_complex(np.linalg.eigvals(jacobian(e2.state, P)))
        roots = np.sort_complex(e2_factor_roots(P))
        worst_root = max(worst_root, float(np.max(np.abs(eig - roots)) / max(1.0, np.max(np.abs(roots)))))
    elapsed = time.perf_counter() - start
    ok = not bad and worst_root < 1e-6 and elapsed < 10.0
    verdict(
        "8 stability conditions",
        ok,
        f"100 draws, E2 stable in {n_stable}, mismatches {bad[:3]}, "
        f"E2 root/eigenvalue diff {worst_root:.1e}, {elapsed:.2f} s",
    )


def test_criterion_09_routh_hurwitz(verdict):
    start = time.perf_counter()
    mismatches = 0
    n_lhp = 0
    for P in draws(100, seed=109):
        quartic = routh_hurwitz_e2(P).quartic
        lhp = bool(np.all(np.roots(quartic).real < 0))
        n_lhp += lhp
        mismatches += lhp != routh_hurwitz_stable(quartic)
    elapsed = time.perf_counter() - start
    verdict(
        "9 Routh-Hurwitz vs roots",
        mismatches == 0 and elapsed < 5.0,
        f"{mismatches} mismatches in 100 draws ({n_lhp} Hurwitz), {elapsed:.2f} s",
    )


def test_criterion_10a_fig1b_clears_by_day_200(runs, verdict):
    traj, elapsed = runs["fig1b"]
    late = traj.times >= 200.0
    i_h = traj.column("I_h")
    peak = float(np.max(i_h[late]))
    below = np.nonzero(late & (i_h < 1.0))[0]
    first = f"{traj.times[below[0]]:.1f}" if below.size else "never"
    ok = peak < 1.0 and elapsed < 5.0
    verdict(
        "10a fig1b I_h < 1 for t >= 200",
        ok,
        f"max I_h on [200, 500] = {peak:.4g}, I_h(200) = {i_h[traj.times == 200.0][0]:.4g}, "
        f"first below 1 at t = {first}, {elapsed:.2f} s",
    )


def test_criterion_10b_fig1a_persists(runs, verdict):
    traj, elapsed = runs["fig1a"]
    end = traj.column("I_h")[-1]
    verdict("10b fig1a I_h(500) > 1", end > 1.0 and elapsed < 5.0, f"I_h(500) = {end:.4g}, {elapsed:.2f} s")


def test_criterion_10c_fig1b_predator_saturates(runs, verdict):
    traj, elapsed = runs["fig1b"]
    K_x = traj.params.K_x
    hit = np.nonzero(traj.column("G") >= 0.99 * K_x)[0]
    t_hit = traj.times[hit[0]] if hit.size else np.inf
    verdict(
        "10c fig1b G >= 0.99 K_x before day 100",
        t_hit < 100.0 and elapsed < 5.0,
        f"first at t = {t_hit:g}, {elapsed:.2f} s",
    )


def test_criterion_11_invariant_box(runs, verdict):
    worst = {}
    for name, (traj, _) in runs.items():
        b = invariant_bounds(traj.params)
        checks = {
            "N_h": traj.N_h / b["N_h"],
            "m_q": traj.column("m_q") / b["m_q"],
            "N_v": traj.N_v / b["N_v"],
            "G": traj.column("G") / b["G"],
        }
        worst[name] = max(float(np.max(v)) for v in checks.values())
    nonneg = all(np.all(traj.y >= 0.0) for traj, _ in runs.values())
    times = {name: t for name, (_, t) in runs.items()}
    ok = max(worst.values()) <= 1.0 + 1e-6 and nonneg and max(times.values()) < 5.0
    detail = ", ".join(f"{n}: max ratio {worst[n]:.6f} in {times[n]:.2f} s" for n in runs)
    verdict("11 invariant region", ok, detail)


def test_criterion_12_convergence_order(runs, verdict):
    cfg = preset("fig1b")
    start = time.perf_counter()
    ref = integrate(cfg.initial, cfg.params, 0.0, 500.0, 0.5, 1e-10).y[-1]
    tols = [1e-6, 1e-7, 1e-8, 1e-9]
    errs = []
    for tol in tols:
        y = (
            runs["fig1b"][0].y[-1]
            if tol == TOL
            else integrate(cfg.initial, cfg.params, 0.0, 500.0, 0.5, tol).y[-1]
        )
        errs.append(float(np.max(np.abs(y - ref) / (1.0 + np.abs(ref)))))
    elapsed = time.perf_counter() - start
    order = float(np.polyfit(np.log10(tols), np.log10(errs), 1)[0])
    decreasing = all(a > b for a, b in zip(errs, errs[1:]))
    ok = order >= 4.0 and decreasing and elapsed < 30.0
    verdict(
        "12 convergence order vs tol",
        ok,
        f"errors {', '.join(f'{e:.2e}' for e in errs)} at tol 1e-6..1e-9; measured order {order:.2f}, {elapsed:.1f} s",
    )


def test_criterion_12_supplement_fixed_step_order(verdict):
    # order with respect to the step size, on the same scenario
    cfg = preset("fig1b")
    horizon = 2.0
    ref = integrate(cfg.initial, cfg.params, 0.0, horizon, 1.0, fixed_step=0.0005).y[-1]
    steps = [0.008, 0.004, 0.002]
    errs = [
        float(np.max(np.abs(integrate(cfg.initial, cfg.params, 0.0, horizon, 1.0, fixed_step=h).y[-1] - ref)))
        for h in steps
    ]
    order = float(np.polyfit(np.log10(steps), np.log10(errs), 1)[0])
    verdict(
        "12s fixed-step order on fig1b",
        order >= 4.0,
        f"errors {', '.join(f'{e:.2e}' for e in errs)}; order {order:.2f}",
    )
