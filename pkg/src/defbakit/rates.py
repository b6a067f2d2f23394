"""Static growth-rate LPs used to choose the prediction horizon.

``max_linear_rate`` bounds the best possible linear growth from a given
amount of biomass with free choice of composition; ``max_balanced_rate``
finds the fastest exponential growth that keeps a given composition.
External species are ignored by both (nutrients assumed unlimited).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, InfeasibleComposition, Unbounded
from .lp import EQ, GE, INFEASIBLE, LE, UNBOUNDED, LinearProgram, solve_lp
from .network import MetabolicModel, SystemState


@dataclass(frozen=True, eq=False)
class LinearBound:
    lambda_s: float
    lambda_r: float
    v_lin: np.ndarray
    C_lin: np.ndarray
    P_lin: np.ndarray


@dataclass(frozen=True, eq=False)
class BalancedRate:
    mu_bal: float
    v_bal: np.ndarray


def _check(sol, what):
    if sol.status == INFEASIBLE:
        raise Infeasible(f"{what}: LP infeasible")
    if sol.status == UNBOUNDED:
        raise Unbounded(f"{what}: LP unbounded (growth without enzyme cost?)")


def linear_rate_lp(model: MetabolicModel, B_init: float) -> LinearProgram:
    """LP in ``(u, C_lin, P_lin)`` whose optimum is the specific linear rate."""
    H = model.matrices
    ms, nc, npp = H.m_split, model.n_c, model.n_p
    ncp = nc + npp
    SCP = np.vstack([H.S_C, H.S_P]) @ H.T
    c = np.concatenate([model.b @ SCP, np.zeros(ncp)])

    blocks = []
    # quasi steady state
    blocks.append((np.hstack([H.S_X @ H.T, np.zeros((model.n_x, ncp))]), EQ, np.zeros(model.n_x)))
    # enzyme capacity against the free composition
    blocks.append((np.hstack([H.H_c, np.zeros((len(H.H_c), nc)), -H.H_e]), LE, np.zeros(len(H.H_c))))
    blocks.append((np.hstack([np.zeros((len(H.H_b), ms)), H.H_b]), LE, np.zeros(len(H.H_b))))
    blocks.append((np.concatenate([np.zeros(ms), model.w])[None, :], EQ, np.array([B_init])))
    maint = H.T[list(H.maintenance_reactions)]
    blocks.append((np.hstack([maint, -H.H_m]), GE, np.zeros(len(H.H_m))))

    A = np.vstack([blk[0] for blk in blocks])
    rel = sum(([blk[1]] * len(blk[2]) for blk in blocks), [])
    b = np.concatenate([blk[2] for blk in blocks])
    return LinearProgram(c=c, A=A, relations=rel, b=b, sense="max")


def max_linear_rate(model: MetabolicModel, B_init: float, solver=None) -> LinearBound:
    """Upper bound on linear growth for ``B_init`` grams of biomass.

    Returns the specific rate ``lambda_s`` (g/h) and the regularised rate
    ``lambda_r = lambda_s / B_init`` (1/h).
    """
    if not B_init > 0:
        raise ValueError("B_init must be positive")
    sol = solve_lp(linear_rate_lp(model, B_init), solver)
    _check(sol, "linear growth bound")
    H = model.matrices
    ms = H.m_split
    x = sol.primal
    lam = max(float(sol.objective_value), 0.0)
    return LinearBound(lambda_s=lam, lambda_r=lam / B_init, v_lin=H.T @ x[:ms],
                       C_lin=x[ms:ms + model.n_c], P_lin=x[ms + model.n_c:])


def balanced_rate_lp(model: MetabolicModel, state0: SystemState) -> LinearProgram:
    """LP in ``(mu, u)`` maximising the growth rate at a fixed composition."""
    H = model.matrices
    state0.check(model)
    ms = H.m_split
    CP = state0.CP
    SCP = np.vstack([H.S_C, H.S_P]) @ H.T
    c = np.concatenate([[1.0], np.zeros(ms)])
    A = np.vstack([
        np.hstack([CP[:, None], -SCP]),
        np.hstack([np.zeros((model.n_x, 1)), H.S_X @ H.T]),
        np.hstack([np.zeros((len(H.H_c), 1)), H.H_c]),
        np.hstack([np.zeros((len(H.H_m), 1)), H.T[list(H.maintenance_reactions)]]),
    ])
    b = np.concatenate([np.zeros(CP.size), np.zeros(model.n_x), H.H_e @ state0.P, H.H_m @ CP])
    rel = [EQ] * (CP.size + model.n_x) + [LE] * len(H.H_c) + [GE] * len(H.H_m)
    return LinearProgram(c=c, A=A, relations=rel, b=b, sense="max")


def max_balanced_rate(model: MetabolicModel, state0: SystemState, solver=None,
                      tol: float = 1e-9) -> BalancedRate:
    """Largest exponential rate ``mu_bal`` sustainable at the composition of ``state0``."""
    state0.check(model)
    CP = state0.CP
    if np.any(CP < 0) or not np.any(CP > 0):
        raise ValueError("storage/macromolecule amounts must be nonnegative and not all zero")
    H = model.matrices
    if len(H.H_b):
        viol = H.H_b @ CP
        if np.any(viol > tol * max(1.0, float(model.w @ CP))):
            raise InfeasibleComposition("initial composition violates the biomass composition constraint")
    sol = solve_lp(balanced_rate_lp(model, state0), solver)
    _check(sol, "balanced growth")
    return BalancedRate(mu_bal=max(float(sol.primal[0]), 0.0), v_bal=H.T @ sol.primal[1:])
