"""End-to-end acceptance suite: one test per criterion, one printed
PASS/FAIL line each (use ``pytest -s`` to watch them stream).

Every tolerance is fixed here.  Criteria 3 and 5 are asserted exactly as
stated even though the measured behaviour of the specified discretization
misses them in part (the I=120 order rows sit near 1.5, and the
transformed prices dip O(dt) below zero at the degenerate boundary);
their failure output records the measured numbers.
"""

import math

import numpy as np
import pytest

from liqshock import (
    NATURAL,
    ModelParams,
    SchemeConfig,
    TimeGrid,
    audit_comparison,
    audit_positivity,
    audit_translation,
    at_the_money,
    convergence_study,
    derive_constants,
    evaluate_f,
    extrapolated_study,
    implicit_oracle,
    ode_oracle,
    payoff_call,
    payoff_zero,
    solve_forward,
    time_grid_from_space,
    uniform_grid,
)

TABLE_PARAMS = ModelParams(sigma=0.3, mu=0.06, gamma=1.0, nu01=1.0,
                           nu10=12.0, strike=2.0, horizon=1.0,
                           s_min=0.0, s_max=5.0)

# golden reference values for the standard parameter set
R0_960_LINEAR, R1_960_LINEAR = 0.247983, 0.236439
R0_960_LINEARIZED, R1_960_LINEARIZED = 0.247984, 0.236433
EXTRAPOLATED_LIMIT = 0.2480053

SCHEMES = ("imex_linear", "imex_linearized")

# diagnostics of every run performed by criteria 1-7, checked in criterion 8
ALL_DIAGNOSTICS = []


def record(result):
    ALL_DIAGNOSTICS.append(result.diagnostics)
    return result


def report(criterion, ok, detail):
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} -- {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def runs_960():
    out = {}
    grid = uniform_grid(0, 5, 960)
    tg = time_grid_from_space(grid, TABLE_PARAMS.horizon)
    for scheme in SCHEMES:
        out[scheme] = record(solve_forward(TABLE_PARAMS, grid, tg,
                                           SchemeConfig(scheme=scheme)))
    return out


@pytest.fixture(scope="module")
def extrapolation_rows():
    out = {}
    for scheme in SCHEMES:
        out[scheme] = extrapolated_study(TABLE_PARAMS, scheme, "uniform",
                                         [40, 80, 160, 320, 640],
                                         on_result=record)
    return out


def test_criterion_1_table_values(runs_960):
    tol = 5e-3
    targets = {
        "imex_linear": (R0_960_LINEAR, R1_960_LINEAR),
        "imex_linearized": (R0_960_LINEARIZED, R1_960_LINEARIZED),
    }
    details = []
    ok = True
    for scheme in SCHEMES:
        r0 = at_the_money(runs_960[scheme], "r0")
        r1 = at_the_money(runs_960[scheme], "r1")
        t0, t1 = targets[scheme]
        ok = ok and abs(r0 - t0) <= tol and abs(r1 - t1) <= tol
        details.append(f"{scheme}: R0={r0:.6f} (ref {t0}), R1={r1:.6f} "
                       f"(ref {t1})")
    report(1, ok, "; ".join(details) + f"; tol {tol}")


def test_criterion_2_cross_scheme(runs_960, extrapolation_rows):
    r0_lin = at_the_money(runs_960["imex_linear"], "r0")
    r0_linz = at_the_money(runs_960["imex_linearized"], "r0")
    gap_values = abs(r0_lin - r0_linz)
    y_lin = extrapolation_rows["imex_linear"][-1].extrapolated
    y_linz = extrapolation_rows["imex_linearized"][-1].extrapolated
    gap_limits = abs(y_lin - y_linz)
    ok = gap_values <= 5e-4 and gap_limits <= 1e-4
    report(2, ok, f"|R0 gap|={gap_values:.2e} (tol 5e-4), "
                  f"|Y(640) gap|={gap_limits:.2e} (tol 1e-4)")


def test_criterion_3_temporal_order():
    levels = [30, 60, 120, 240, 480, 960]
    window = (0.9, 1.4)
    ok = True
    details = []
    for scheme in SCHEMES:
        for grid_kind in ("uniform", "tavella"):
            rows = convergence_study(TABLE_PARAMS, scheme, grid_kind, levels,
                                     on_result=record)
            orders = [(r.intervals, r.order) for r in rows
                      if r.order is not None and r.intervals >= 120]
            bad = [(i, o) for i, o in orders
                   if not (window[0] <= o <= window[1])]
            ok = ok and not bad
            summary = ", ".join(f"{i}:{o:.2f}" for i, o in orders)
            details.append(f"{scheme}/{grid_kind} [{summary}]")
    report(3, ok, "orders for I>=120 must lie in [0.9, 1.4] -- "
                  + "; ".join(details))


def test_criterion_4_richardson(extrapolation_rows):
    rows_lin = extrapolation_rows["imex_linear"]
    rows_linz = extrapolation_rows["imex_linearized"]
    order_640 = rows_lin[-1].order
    ok = 1.7 <= order_640 <= 2.5
    y_640 = rows_lin[-1].extrapolated
    ok = ok and abs(y_640 - EXTRAPOLATED_LIMIT) <= 1e-3
    linz_orders = [r.order for r in rows_linz if r.order is not None]
    gaps_to_two = [abs(o - 2.0) for o in linz_orders]
    monotone = all(b <= a + 0.05 for a, b in zip(gaps_to_two, gaps_to_two[1:]))
    ok = ok and monotone and 1.7 <= linz_orders[-1] <= 2.5
    report(4, ok,
           f"linear order(640)={order_640:.2f} in [1.7,2.5], "
           f"Y(640)={y_640:.7f} (ref {EXTRAPOLATED_LIMIT}, tol 1e-3), "
           f"linearized orders {['%.2f' % o for o in linz_orders]} "
           f"trending to 2: {monotone}")


def test_criterion_5_positivity():
    from liqshock import tavella_randall_grid
    ok = True
    details = []
    for scheme in SCHEMES:
        for grid_kind, grid in (
                ("uniform", uniform_grid(0, 5, 240)),
                ("tavella", tavella_randall_grid(0, 5, 2, 15, 240))):
            tg = time_grid_from_space(grid, TABLE_PARAMS.horizon)
            run = record(solve_forward(TABLE_PARAMS, grid, tg,
                                       SchemeConfig(scheme=scheme),
                                       capture_trajectory=True))
            check = audit_positivity(run)  # tolerance -1e-10
            ok = ok and check.passed
            details.append(f"{scheme}/{grid_kind}: min={check.worst:.2e} "
                           f"at {check.location}")
    report(5, ok, "every p,q >= -1e-10 -- " + "; ".join(details))


def test_criterion_6_discrete_comparison():
    grid = uniform_grid(0, 5, 120)
    tg = time_grid_from_space(grid, TABLE_PARAMS.horizon)
    ok = True
    details = []
    for scheme in SCHEMES:
        cfg = SchemeConfig(scheme=scheme)
        base = record(solve_forward(TABLE_PARAMS, grid, tg, cfg,
                                    capture_trajectory=True))
        shifted = record(solve_forward(
            TABLE_PARAMS, grid, tg, cfg,
            payoff=lambda s, k: payoff_call(s, k) + 0.1,
            capture_trajectory=True))
        zero = record(solve_forward(TABLE_PARAMS, grid, tg, cfg,
                                    payoff=payoff_zero,
                                    capture_trajectory=True))
        shift_exact = audit_translation(base, shifted, 0.1)
        ordering = audit_comparison(base, zero)
        ok = (ok and shift_exact.passed and shift_exact.worst <= 1e-12
              and ordering.passed)
        details.append(f"{scheme}: |shift-0.1| max={shift_exact.worst:.1e}, "
                       f"call-vs-zero min gap={ordering.worst:.1e}")
    report(6, ok, "; ".join(details))


def test_criterion_7_oracle_equivalence():
    constant = lambda s, k: np.ones_like(np.asarray(s, dtype=float))
    grid = uniform_grid(0, 5, 32)
    dc = derive_constants(TABLE_PARAMS)
    u_ref, v_ref = ode_oracle(TABLE_PARAMS, 1.0, dt_ref=1e-5)
    ok = True
    details = []
    cfg_const = {s: SchemeConfig(scheme=s, left_bc=NATURAL, right_bc=NATURAL)
                 for s in SCHEMES}
    for scheme in SCHEMES:
        errs = {}
        for steps in (64, 128):
            tg = TimeGrid(dt=TABLE_PARAMS.horizon / steps, steps=steps)
            res = record(solve_forward(TABLE_PARAMS, grid, tg,
                                       cfg_const[scheme], payoff=constant))
            errs[steps] = max(np.abs(res.final_state.u - u_ref).max(),
                              np.abs(res.final_state.v - v_ref).max())
            # slope estimate from the endpoint state (a lower bound on the
            # sup over the trajectory, so the tolerance is conservative)
            uT, vT = res.final_state.u[0], res.final_state.v[0]
            slope = max(abs(dc.b - dc.a * math.exp(uT - vT)),
                        abs(dc.c * (1.0 - math.exp(vT - uT))))
            tol = 2.0 * tg.dt * slope
            ok = ok and errs[steps] <= tol
        halving = errs[64] / errs[128]
        ok = ok and 1.6 <= halving <= 2.4
        details.append(f"{scheme}: err(J=64)={errs[64]:.1e}, "
                       f"err(J=128)={errs[128]:.1e}, ratio {halving:.2f}")

    # linearized stepper versus the fully implicit reference, pinned left
    # boundary so the gap isolates the linearization error
    cfg = SchemeConfig(scheme="imex_linearized", left_bc=lambda tau: 0.0)
    gaps = []
    for steps in (32, 64, 128):
        tg = TimeGrid(dt=TABLE_PARAMS.horizon / steps, steps=steps)
        lin = record(solve_forward(TABLE_PARAMS, grid, tg, cfg))
        oracle = implicit_oracle(TABLE_PARAMS, grid, tg, cfg)
        gaps.append(max(np.abs(lin.final_state.u - oracle.u).max(),
                        np.abs(lin.final_state.v - oracle.v).max()))
    slope = math.log(gaps[0] / gaps[-1]) / math.log(4.0)
    ok = ok and slope >= 1.8
    details.append(f"implicit-oracle gaps {['%.1e' % g for g in gaps]}, "
                   f"observed order {slope:.2f} (need >= 1.8)")
    report(7, ok, "; ".join(details))


def test_criterion_8_m_matrix_audit():
    assert ALL_DIAGNOSTICS, "criteria 1-7 must run first"
    n_solves = sum(d.solves for d in ALL_DIAGNOSTICS)
    all_m = all(d.m_matrix_ok for d in ALL_DIAGNOSTICS)
    worst_margin = min(d.bound_margin for d in ALL_DIAGNOSTICS)
    ok = all_m and worst_margin >= -1e-9
    report(8, ok, f"{len(ALL_DIAGNOSTICS)} runs / {n_solves} tridiagonal "
                  f"solves; M-matrix everywhere: {all_m}; worst sup-norm "
                  f"bound margin {worst_margin:.2e}")


def test_criterion_9_closed_form_layer():
    rng = np.random.default_rng(2024)
    worst_f = 0.0
    worst_vieta = 0.0
    for _ in range(1000):
        p = ModelParams(
            sigma=float(rng.uniform(0.05, 1.0)),
            mu=float(rng.uniform(-0.5, 0.5)),
            gamma=float(rng.uniform(0.1, 10.0)),
            nu01=float(rng.uniform(0.01, 20.0)),
            nu10=float(rng.uniform(0.01, 20.0)),
            strike=float(rng.uniform(0.5, 10.0)),
            horizon=float(rng.uniform(0.1, 3.0)),
            s_min=0.0,
            s_max=float(rng.uniform(11.0, 50.0)),
        )
        dc = derive_constants(p)
        f0, f1 = evaluate_f(dc, p.horizon)
        worst_f = max(worst_f, abs(f0 - 1.0), abs(f1 - 1.0))
        worst_vieta = max(
            worst_vieta,
            abs(dc.lambda1 * dc.lambda2 - dc.d0 * p.nu10)
            / max(abs(dc.d0 * p.nu10), 1e-300),
            abs(dc.lambda1 + dc.lambda2 - (dc.d0 + p.nu01 + p.nu10))
            / (dc.d0 + p.nu01 + p.nu10),
        )
    ok = worst_f <= 1e-12 and worst_vieta <= 1e-12
    report(9, ok, f"1000 random parameter sets: worst |F(T)-1|={worst_f:.2e},"
                  f" worst Vieta residual={worst_vieta:.2e} (tol 1e-12)")
