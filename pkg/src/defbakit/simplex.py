"""Bundled dense revised simplex.

Bounded-variable primal simplex on ``[A, -I] (x, r) = 0`` where ``r`` are
the row activities ("logical" variables) carrying the row bounds. Phase 1
minimises the sum of infeasibilities of the basic variables; phase 2 the
objective. Nonbasic variables sit at a bound, or at zero when zero lies
strictly inside their bounds, so huge finite bounds never enter the
basic solution values.

The basis inverse is kept explicitly and updated by product-form pivots;
it is rebuilt every ``refactor_every`` pivots and before any terminal
status is declared. Pricing is Dantzig's rule with a Harris ratio test;
after ``bland_after`` consecutive degenerate pivots the solver switches
to Bland's rule until progress resumes.
"""
from __future__ import annotations

import numpy as np

from .errors import NumericalFailure
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, LpSolution


def _pow2(v):
    return np.exp2(np.round(np.log2(v)))


def equilibrate(A, passes=4):
    """Power-of-two row and column scale factors for ``A``.

    Returns ``(R, S)`` with ``R[:, None] * A * S`` having entries close to 1
    in magnitude. Power-of-two factors make the scaling exact in floating point.
    """
    m, n = A.shape
    R, S = np.ones(m), np.ones(n)
    absA = np.abs(A)
    nz = absA > 0
    if not nz.any():
        return R, S
    for _ in range(passes):
        B = absA * R[:, None] * S[None, :]
        big = np.where(nz, B, 0.0).max(axis=1)
        small = np.where(nz, B, np.inf).min(axis=1)
        ok = big > 0
        R[ok] /= _pow2(np.sqrt(big[ok] * small[ok]))
        B = absA * R[:, None] * S[None, :]
        big = np.where(nz, B, 0.0).max(axis=0)
        small = np.where(nz, B, np.inf).min(axis=0)
        ok = big > 0
        S[ok] /= _pow2(np.sqrt(big[ok] * small[ok]))
    B = absA * R[:, None] * S[None, :]
    big = B.max(axis=1)
    ok = big > 0
    R[ok] /= _pow2(big[ok])
    return R, S


class SimplexSolver:
    """Deterministic dense bounded-variable revised simplex.

    Parameters
    ----------
    feas_tol : float
        Primal feasibility tolerance (relative to ``max(1, |bound|)``).
    opt_tol : float
        Reduced-cost tolerance.
    scale : bool
        Apply power-of-two equilibration before solving.
    max_iter : int, optional
        Iteration cap; defaults to ``50 * (rows + cols) + 1000``.
    """

    def __init__(self, feas_tol=1e-9, opt_tol=1e-9, pivot_tol=1e-10, scale=True,
                 max_iter=None, refactor_every=64, bland_after=50):
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.pivot_tol = pivot_tol
        self.scale = scale
        self.max_iter = max_iter
        self.refactor_every = refactor_every
        self.bland_after = bland_after

    def solve(self, lp: LinearProgram) -> LpSolution:
        A = lp.A
        m, n = A.shape
        c = -lp.c if lp.sense == "max" else lp.c.copy()
        rlo, rhi = lp.row_bounds()
        if m and n:
            R, S = equilibrate(A) if self.scale else (np.ones(m), np.ones(n))
        else:
            R, S = np.ones(m), np.ones(n)
        As = R[:, None] * A * S[None, :]
        cs = c * S
        cmax = np.max(np.abs(cs)) if n else 0.0
        cscale = _pow2(cmax) if cmax > 0 else 1.0
        cs = cs / cscale
        with np.errstate(invalid="ignore", divide="ignore"):
            lo = np.concatenate([lp.lb / S, rlo * R])
            up = np.concatenate([lp.ub / S, rhi * R])

        status, xs, iters = self._run(As, cs, lo, up)
        if status != OPTIMAL:
            return LpSolution(status, iterations=iters)
        x = xs[:n] * S
        viol = lp.max_violation(x)
        if viol > 10 * self.feas_tol:
            raise NumericalFailure(f"solution violates constraints by {viol:.3g} (scaled)")
        return LpSolution(OPTIMAL, lp.objective(x), x, iters, {"max_violation": viol})

    # ------------------------------------------------------------------ core

    def _run(self, A, cost_struct, lo, up):
        m, n = A.shape
        N = n + m
        M = np.hstack([A, -np.eye(m)])
        cost = np.concatenate([cost_struct, np.zeros(m)])
        ftol = self.feas_tol * np.maximum(1.0, np.where(np.isfinite(lo), np.abs(lo), 0.0))
        ftol_up = self.feas_tol * np.maximum(1.0, np.where(np.isfinite(up), np.abs(up), 0.0))
        movable = up > lo

        x = np.zeros(N)
        start = np.where(lo > 0, lo, np.where(up < 0, up, 0.0))
        x[:n] = start[:n]
        basis = np.arange(n, N)
        is_basic = np.zeros(N, dtype=bool)
        is_basic[basis] = True
        Binv = -np.eye(m)

        max_iter = self.max_iter or 50 * N + 1000
        since_refactor = 0
        degenerate_run = 0
        it = 0

        def refactor():
            try:
                return np.linalg.inv(M[:, basis])
            except np.linalg.LinAlgError as exc:
                raise NumericalFailure("singular basis during refactorisation") from exc

        while True:
            if it > max_iter:
                raise NumericalFailure(f"iteration cap {max_iter} reached")
            xn = np.where(is_basic, 0.0, x)
            x[basis] = Binv @ -(M @ xn) if m else x[basis]
            xb = x[basis]
            below = xb < lo[basis] - ftol[basis]
            above = xb > up[basis] + ftol_up[basis]
            phase1 = bool(below.any() or above.any())
            if phase1:
                cb = np.where(below, -1.0, np.where(above, 1.0, 0.0))
                y = cb @ Binv
                d = -(y @ M)
            else:
                y = cost[basis] @ Binv
                d = cost - y @ M
            d[is_basic] = 0.0
            inc = ~is_basic & movable & (x < up) & (d < -self.opt_tol)
            dec = ~is_basic & movable & (x > lo) & (d > self.opt_tol)
            cand = inc | dec
            if not cand.any():
                if since_refactor:
                    Binv = refactor()
                    since_refactor = 0
                    continue
                if phase1:
                    return INFEASIBLE, None, it
                return OPTIMAL, x, it

            bland = degenerate_run > self.bland_after
            idx = np.flatnonzero(cand)
            q = int(idx[0]) if bland else int(idx[np.argmax(np.abs(d[idx]))])
            direction = 1.0 if inc[q] else -1.0
            alpha = Binv @ M[:, q]
            delta = -direction * alpha

            # per-basic target bound along the ray, or none
            lb_b, ub_b = lo[basis], up[basis]
            feas = ~(below | above)
            target = np.full(m, np.nan)
            dn = delta < -self.pivot_tol
            upw = delta > self.pivot_tol
            target[dn & feas] = lb_b[dn & feas]
            target[dn & above] = ub_b[dn & above]
            target[upw & feas] = ub_b[upw & feas]
            target[upw & below] = lb_b[upw & below]
            lim = np.isfinite(target)
            ratios = np.full(m, np.inf)
            ratios[lim] = np.maximum((target[lim] - xb[lim]) / delta[lim], 0.0)

            own = (up[q] - x[q]) if direction > 0 else (x[q] - lo[q])
            if bland:
                theta = ratios.min() if m else np.inf
                r = -1
                if np.isfinite(theta):
                    ties = np.flatnonzero(ratios <= theta + 1e-12 * (1.0 + theta))
                    r = int(ties[np.argmin(basis[ties])])
            else:
                slack = np.where(delta < 0, ftol[basis], ftol_up[basis])
                relaxed = np.full(m, np.inf)
                relaxed[lim] = (target[lim] - xb[lim] + np.sign(delta[lim]) * slack[lim]) / delta[lim]
                theta_max = relaxed.min() if m else np.inf
                r = -1
                theta = np.inf
                if np.isfinite(theta_max):
                    ok = np.flatnonzero(ratios <= theta_max)
                    r = int(ok[np.argmax(np.abs(delta[ok]))])
                    theta = ratios[r]

            if own <= theta:
                if not np.isfinite(own):
                    if phase1:
                        raise NumericalFailure("unbounded ray in phase 1")
                    if since_refactor:
                        Binv = refactor()
                        since_refactor = 0
                        continue
                    return UNBOUNDED, None, it
                x[q] = up[q] if direction > 0 else lo[q]
                degenerate_run = 0 if own > 1e-12 else degenerate_run + 1
                it += 1
                continue

            p = basis[r]
            x[q] += direction * theta
            x[p] = target[r]
            piv = alpha[r]
            row = Binv[r] / piv
            Binv -= np.outer(alpha, row)
            Binv[r] = row
            basis[r] = q
            is_basic[q] = True
            is_basic[p] = False
            since_refactor += 1
            if since_refactor >= self.refactor_every:
                Binv = refactor()
                since_refactor = 0
            degenerate_run = 0 if theta > 1e-12 else degenerate_run + 1
            it += 1
