"""Short-term deFBA: receding prediction horizon over a long time span.

Each iteration optimises the dynamic problem on ``[t_k, t_k + t_p]`` from
the current state, keeps the first ``t_c`` hours of the solution and
restarts from the state reached there. In ``auto`` mode ``t_p`` and
``t_c`` are derived at every iteration from the static growth rates of
the current biomass composition.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Mapping, Optional

import numpy as np

from .collocation import DiscretizationGrid, Trajectory, concatenate, solve_window
from .errors import InfeasibleIteration, NonpositiveBound
from .horizon import iteration_bound, iteration_time, prediction_horizon
from .network import EXTERNAL, MetabolicModel, SystemState, objective_biomass
from .rates import max_balanced_rate, max_linear_rate

REACHED_T_END, DEPLETION, INFEASIBLE = "reached_t_end", "depletion", "infeasible"


@dataclass(frozen=True)
class SdefbaConfig:
    """Settings of a receding-horizon run.

    ``horizon_mode="fixed"`` uses the given ``t_p`` and ``t_c``;
    ``"auto"`` recomputes them from the current state (every iteration when
    ``recalc_each_iteration`` is set, otherwise once). ``depletion_thresholds``
    maps external species to the amount at which the run stops; ``None``
    means threshold 0 for every external species. ``fallback_tp`` is used
    when linear growth never beats balanced growth (default ``3 / mu_bal``).
    """

    t_end: float
    d: float
    horizon_mode: str = "auto"
    t_p: Optional[float] = None
    t_c: Optional[float] = None
    safety_factor: float = 0.9
    recalc_each_iteration: bool = True
    depletion_thresholds: Optional[Mapping[str, float]] = None
    fallback_tp: Optional[float] = None
    depletion_tol: float = 1e-9

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not self.d > 0:
            raise ValueError("d must be positive")
        if self.horizon_mode not in ("auto", "fixed"):
            raise ValueError("horizon_mode must be 'auto' or 'fixed'")
        if self.horizon_mode == "fixed":
            if self.t_p is None or self.t_c is None or not 0 < self.t_c < self.t_p:
                raise ValueError("fixed mode requires 0 < t_c < t_p")
        if not 0 < self.safety_factor < 1:
            raise ValueError("safety_factor must lie in (0, 1)")
        if self.depletion_thresholds and any(v < 0 for v in self.depletion_thresholds.values()):
            raise ValueError("depletion thresholds must be nonnegative")

    @classmethod
    def fixed(cls, t_end, d, t_p, t_c, **kw):
        return cls(t_end=t_end, d=d, horizon_mode="fixed", t_p=t_p, t_c=t_c, **kw)


@dataclass(frozen=True)
class IterationRecord:
    t_k: float
    t_p: float
    t_c: float
    lambda_r: Optional[float]
    mu_bal: Optional[float]
    slice_objective: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class SdefbaRun:
    trajectory: Trajectory
    iterations: tuple
    stop_reason: str
    slices: tuple = ()
    message: str = ""

    def log_records(self) -> list:
        recs = [r.as_dict() for r in self.iterations]
        if recs:
            recs[-1]["stop_reason"] = self.stop_reason
        return recs


def _auto_horizon(model, state, cfg, solver):
    B_init = objective_biomass(model, state)
    lam = max_linear_rate(model, B_init, solver).lambda_r
    mu = max_balanced_rate(model, state, solver).mu_bal
    t_p = prediction_horizon(lam, mu, B_init)
    if t_p is None:
        if cfg.fallback_tp is not None:
            t_p = cfg.fallback_tp
        elif mu > 0:
            t_p = 3.0 / mu
        else:
            raise ValueError("no growth possible: neither linear nor balanced rate is positive")
        return t_p, cfg.safety_factor * t_p, lam, mu
    try:
        t_c = iteration_time(t_p, lam, mu, cfg.safety_factor)
    except NonpositiveBound as exc:
        raise NonpositiveBound(
            f"at t = {state.time:g} h: {exc}; use fixed mode or a larger fallback horizon") from None
    return t_p, t_c, lam, mu


def _depleted(model, state, cfg, y0) -> bool:
    ids = model.ids(EXTERNAL)
    thresholds = cfg.depletion_thresholds
    if thresholds is None:
        thresholds = {sid: 0.0 for sid in ids}
    for i, sid in enumerate(ids):
        if sid in thresholds:
            if state.Y[i] <= thresholds[sid] + cfg.depletion_tol * max(1.0, abs(y0[i])):
                return True
    return False


def run_sdefba(model: MetabolicModel, state0: SystemState, config: SdefbaConfig,
               solver=None) -> SdefbaRun:
    """Run the receding-horizon loop from ``state0`` over ``config.t_end`` hours."""
    state0.check(model)
    cfg = config
    t_stop = state0.time + cfg.t_end
    tol = 1e-9 * max(1.0, abs(t_stop))

    if cfg.horizon_mode == "fixed":
        _warn_fixed(model, state0, cfg, solver)

    state = state0
    steps_done = 0  # grid steps kept so far; slice ends are t0 + steps * d
    pieces, records = [], []
    horizon = None
    stop_reason, message = REACHED_T_END, ""
    while t_stop - state.time > tol:
        lam = mu = None
        if cfg.horizon_mode == "auto":
            if horizon is None or cfg.recalc_each_iteration:
                horizon = _auto_horizon(model, state, cfg, solver)
            t_p, t_c, lam, mu = horizon
        else:
            t_p, t_c = cfg.t_p, cfg.t_c
        # kept slice is a whole number of steps, at least one
        steps = max(1, int(math.floor(t_c / cfg.d + 1e-9)))
        steps_done += steps
        keep_end = state0.time + steps_done * cfg.d
        if keep_end >= t_stop - tol:
            keep_end = t_stop
        horizon_end = max(state.time + t_p, keep_end)
        grid = DiscretizationGrid(state.time, horizon_end, cfg.d, breakpoints=(keep_end,))
        traj, sol = solve_window(model, state, grid, solver)
        if traj is None:
            stop_reason = INFEASIBLE
            message = str(InfeasibleIteration(state.time))
            break
        k_keep = int(np.argmin(np.abs(grid.times - keep_end)))
        piece = traj.slice(0, k_keep)
        pieces.append(piece)
        records.append(IterationRecord(state.time, float(t_p), float(piece.times[-1] - piece.times[0]),
                                       lam, mu, piece.objective_value))
        state = piece.final_state
        if _depleted(model, state, cfg, state0.Y):
            stop_reason = DEPLETION
            break

    if pieces:
        stitched = concatenate(pieces)
    else:
        stitched = Trajectory.from_states(model, [state0.time], state0.Y[None], state0.C[None],
                                          state0.P[None], np.zeros((0, model.m)))
    return SdefbaRun(stitched, tuple(records), stop_reason, tuple(pieces), message)


def _warn_fixed(model, state0, cfg, solver):
    try:
        B_init = objective_biomass(model, state0)
        lam = max_linear_rate(model, B_init, solver).lambda_r
        mu = max_balanced_rate(model, state0, solver).mu_bal
    except Exception:  # diagnostics only
        return
    if lam > mu > 0:
        bound = iteration_bound(cfg.t_p, lam, mu)
        if cfg.t_c >= bound:
            warnings.warn(f"t_c = {cfg.t_c:g} h is not below the exponential-slice bound {bound:.4g} h "
                          f"for t_p = {cfg.t_p:g} h; expect alternating linear and exponential phases",
                          UserWarning, stacklevel=3)
