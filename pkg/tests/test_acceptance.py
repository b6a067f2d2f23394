"""Acceptance criteria A1-A12.

Each test checks one criterion at its stated tolerance and runtime limit
and records a one-line PASS/FAIL verdict. The verdicts are printed as they
happen and again in the pytest terminal summary (see ``conftest.py``).
Run ``python tests/test_acceptance.py`` to get the verdict lines without
pytest.
"""
import time

import numpy as np
import pytest

from defbakit.defba import solve_defba
from defbakit.horizon import (EXPONENTIAL, LINEAR, classify_growth, integral_balanced, integral_linear,
                              prediction_horizon, verify_theorem1, verify_theorem2)
from defbakit.io import toy_model
from defbakit.lp import EQ, GE, LE, solve_lp
from defbakit.rates import max_balanced_rate, max_linear_rate
from defbakit.sdefba import DEPLETION, SdefbaConfig, run_sdefba

from oracles import (bisect_root, random_bounded_lp, toy_balanced_rate, toy_linear_rate,
                     vertex_enumeration)

RESULTS = []


def verdict(cid, limit, check):
    """Run ``check() -> (ok, detail)`` under a wall-clock limit and record the verdict."""
    start = time.perf_counter()
    ok, detail = check()
    elapsed = time.perf_counter() - start
    in_time = elapsed <= limit
    line = (f"{cid:<4} {'PASS' if ok and in_time else 'FAIL'}  {detail}"
            f"  [{elapsed:.2f} s / limit {limit:g} s]")
    RESULTS.append(line)
    print(line)
    assert ok, line
    assert in_time, line


def check_a1():
    model, state = toy_model()
    mu = max_balanced_rate(model, state).mu_bal
    oracle = toy_balanced_rate(0.1, 0.1)
    assert oracle == pytest.approx(6 / 17, abs=1e-15)
    return abs(mu - 6 / 17) <= 1e-6, f"mu_bal = {mu:.12f}, expected 6/17 = {6 / 17:.12f}"


def check_a2():
    model, _ = toy_model()
    res = max_linear_rate(model, 2.5)
    oracle = toy_linear_rate(2.5)
    ok = (abs(res.lambda_s - 45 / 14) <= 1e-6 and abs(res.lambda_r - 9 / 7) <= 1e-6
          and abs(oracle - 45 / 14) <= 1e-12)
    return ok, f"lambda_s = {res.lambda_s:.10f} (45/14), lambda_r = {res.lambda_r:.10f} (9/7)"


def check_a3():
    lam, mu = 9 / 7, 6 / 17
    tp = prediction_horizon(lam, mu)
    ib_bal = integral_balanced(tp, mu, 1.0)
    resid = abs(integral_linear(tp, lam, 1.0) - ib_bal)
    ref = bisect_root(lambda t: integral_linear(t, lam, 1.0) - integral_balanced(t, mu, 1.0),
                      1.0, 100.0, 1e-6)
    ok = resid <= 1e-8 * ib_bal and abs(tp - ref) <= 1e-4
    return ok, f"t_p = {tp:.8f} h, oracle {ref:.6f} h, residual {resid:.2e}"


def check_a4():
    rng = np.random.default_rng(4)
    worst2, fails1 = 0.0, 0
    for _ in range(20):
        mu = rng.uniform(0.1, 1.0)
        lam = mu * (1.0 + rng.uniform(0.2, 3.0))
        bound = 2.0 * (1.0 / mu - 1.0 / lam)
        root = prediction_horizon(lam, mu, eps_root=1e-12)
        # positive bound needs t_p > bound; the single-linear-phase claim needs t_p < root
        tp = rng.uniform(bound, root)
        grid_n = 10_000
        step = tp / (grid_n - 1)
        worst2 = max(worst2, abs(verify_theorem2(lam, mu, tp, grid_n) - (tp - bound)) / step)
        fails1 += verify_theorem1(lam, mu, tp, grid_n) != tp
    ok = worst2 <= 1.0 and fails1 == 0
    return ok, f"20 triples: max |argmax - expected| = {worst2:.2f} grid steps, single-linear misses {fails1}"


def check_a5():
    model, state = toy_model()
    traj = solve_defba(model, state, 3.0, 0.1)
    labels = classify_growth(traj, 0.5)
    (a, b), last = labels[-1]
    vE = traj.flux("v_E")
    in_last = (traj.times[:-1] >= a - 1e-9)
    ok = last == LINEAR and vE[in_last].max() <= 1e-6 and labels[0][1] == EXPONENTIAL
    return ok, "labels " + "".join(lab[0] for _, lab in labels) + f", v_E max in last window {vE[in_last].max():.1e}"


def check_a6():
    model, state = toy_model()
    traj = solve_defba(model, state, 1.0, 0.1)
    slope = 15 * 6 / 70
    rates = [(traj.B_o[j] - traj.B_o[i]) / (traj.times[j] - traj.times[i])
             for i, j in ((0, 5), (5, 10))]
    dev = max(abs(r - slope) / slope for r in rates)
    vE = np.abs(traj.flux("v_E")).max()
    return dev <= 0.02 and vE <= 1e-9, f"window slopes {[round(float(r), 6) for r in rates]}, v_E max {vE:.1e}"


def check_a7():
    model, state = toy_model()
    run = run_sdefba(model, state, SdefbaConfig(t_end=3.0, d=0.1))
    traj = run.trajectory
    n_lin = sum(lab == LINEAR for _, lab in classify_growth(traj, 0.5))
    gaps = [np.max(np.abs(np.concatenate([a.Y[-1], a.C[-1], a.P[-1]]) -
                          np.concatenate([b.Y[0], b.C[0], b.P[0]])))
            for a, b in zip(run.slices, run.slices[1:])]
    rate = np.diff(traj.B_o) / np.diff(traj.times) / traj.B_o[:-1]
    nondecreasing = bool(np.all(np.diff(rate) >= -1e-12) and np.all(rate > 0))
    ok = n_lin == 0 and max(gaps, default=0.0) <= 1e-12 and nondecreasing
    return ok, (f"{len(run.iterations)} iteration(s), linear windows {n_lin}, "
                f"junction gap {max(gaps, default=0.0):.1e}, growth rate nondecreasing {nondecreasing}")


def check_a8():
    model, state = toy_model()
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        run = run_sdefba(model, state, SdefbaConfig.fixed(6.0, 0.1, 2.5, 1.5))
    labels = [lab for _, lab in classify_growth(run.trajectory, 0.5)]
    ok = LINEAR in labels[1:-1] and EXPONENTIAL in labels
    return ok, "labels " + "".join(lab[0] for lab in labels)


def check_a9():
    model, state = toy_model()
    s = run_sdefba(model, state, SdefbaConfig(t_end=3.0, d=0.1)).trajectory.objective_value
    f = solve_defba(model, state, 3.0, 0.1).objective_value
    gap = (f - s) / f
    ok = s <= f * (1 + 1e-6) and gap > 1e-3
    return ok, f"sdeFBA {s:.6f} vs deFBA {f:.6f} g h, relative gap {100 * gap:.2f} %"


def check_a10():
    model, state = toy_model()
    objs = [solve_defba(model, state, 2.0, d).objective_value for d in (0.2, 0.1, 0.05)]
    ratio = (objs[1] - objs[0]) / (objs[2] - objs[1])
    return 1.5 <= ratio <= 3.0, f"objectives {[round(float(o), 6) for o in objs]}, difference ratio {ratio:.3f}"


def raw_violation(lp, x):
    act = lp.A @ x
    worst = float(np.max(-x, initial=0.0))
    for i, r in enumerate(lp.relations):
        if r in (LE, EQ):
            worst = max(worst, act[i] - lp.b[i])
        if r in (GE, EQ):
            worst = max(worst, lp.b[i] - act[i])
    return worst


def check_a11():
    rng = np.random.default_rng(11)
    worst_feas, worst_obj = 0.0, 0.0
    for _ in range(200):
        lp = random_bounded_lp(rng, max_vars=8, max_rows=10)
        sol = solve_lp(lp)
        ref, _ = vertex_enumeration(lp)
        if not sol.optimal or ref is None:
            return False, "a feasible bounded instance was not solved"
        worst_feas = max(worst_feas, raw_violation(lp, sol.primal))
        worst_obj = max(worst_obj, abs(sol.objective_value - ref))
    ok = worst_feas <= 1e-9 and worst_obj <= 1e-7
    return ok, f"200 LPs: max violation {worst_feas:.1e}, max objective error {worst_obj:.1e}"


def check_a12():
    model, state = toy_model(nutrient=1.0)
    run = run_sdefba(model, state, SdefbaConfig(t_end=30.0, d=0.1))
    N_end = run.trajectory.amount("N")[-1]
    ok = run.stop_reason == DEPLETION and N_end >= -1e-9
    return ok, f"stop_reason {run.stop_reason} at t = {run.trajectory.times[-1]:g} h, final N = {N_end:.2e}"


CRITERIA = [
    ("A1", 1, check_a1), ("A2", 1, check_a2), ("A3", 1, check_a3), ("A4", 10, check_a4),
    ("A5", 30, check_a5), ("A6", 5, check_a6), ("A7", 60, check_a7), ("A8", 60, check_a8),
    ("A9", 90, check_a9), ("A10", 60, check_a10), ("A11", 30, check_a11), ("A12", 30, check_a12),
]


@pytest.mark.parametrize("cid,limit,check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(cid, limit, check):
    verdict(cid, limit, check)


if __name__ == "__main__":
    failed = 0
    for cid, limit, check in CRITERIA:
        try:
            verdict(cid, limit, check)
        except AssertionError:
            failed += 1
    raise SystemExit(1 if failed else 0)
