"""Transcription of the dynamic problem on a time grid into one LP.

Fluxes are constant on each grid interval, so the state update
``z[k+1] = z[k] + d_k * S_z @ v_k`` is exact, and the objective is the
trapezoidal quadrature of the objective biomass over the grid. Enzyme
capacity is enforced against the state at the left end of each interval.
Metabolites carry no state; only ``S_X @ v_k = 0`` rows remain for them.

State columns hold the *change* of each amount relative to the initial
state, so that very large amounts (e.g. an unlimited-nutrient sentinel)
only appear as bounds and never in the basic solution.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from types import MappingProxyType
from typing import Sequence

import numpy as np

from .errors import StatusNotOptimal
from .lp import EQ, GE, LE, LinearProgram, LpSolution, solve_lp
from .network import MetabolicModel, SystemState


class DiscretizationGrid:
    """Strictly increasing time grid from ``t0`` to ``tf``.

    ``DiscretizationGrid(t0, tf, d)`` gives ``N = ceil((tf - t0) / d)`` steps
    of size ``d`` with the last one shortened to end exactly at ``tf``.
    Extra ``breakpoints`` inside ``(t0, tf)`` are inserted as grid points
    (an existing point within rounding distance is moved onto them).
    """

    def __init__(self, t0: float, tf: float, d: float, breakpoints: Sequence[float] = ()):
        if not d > 0:
            raise ValueError("step size d must be positive")
        if not tf > t0:
            raise ValueError("tf must exceed t0")
        self.t0, self.tf, self.d = float(t0), float(tf), float(d)
        n = max(int(math.ceil((tf - t0) / d - 1e-9)), 1)
        times = t0 + d * np.arange(n + 1, dtype=float)
        times[-1] = tf
        tol = 1e-9 * max(1.0, abs(tf))
        for bp in breakpoints:
            if not t0 + tol < bp < tf - tol:
                continue
            near = np.flatnonzero(np.abs(times - bp) <= tol)
            if near.size:
                times[near[0]] = bp  # snap so the breakpoint is hit exactly
            else:
                times = np.sort(np.append(times, bp))
        times.setflags(write=False)
        self.times = times

    @property
    def N(self) -> int:
        return self.times.size - 1

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.times)

    def __repr__(self):
        return f"DiscretizationGrid(t0={self.t0:g}, tf={self.tf:g}, d={self.d:g}, N={self.N})"


class VarMap:
    """Bidirectional map between LP columns and (state, grid point) / (split flux, interval)."""

    def __init__(self, state_ids, split_labels, N):
        self.state_ids = tuple(state_ids)
        self.split_labels = tuple(split_labels)
        self.N = N
        self.ns = len(self.state_ids)
        self.ms = len(self.split_labels)
        self.n_state_cols = self.ns * (N + 1)
        self.n_cols = self.n_state_cols + self.ms * N
        self._state_pos = MappingProxyType({s: i for i, s in enumerate(self.state_ids)})
        self._flux_pos = MappingProxyType({lab: i for i, lab in enumerate(self.split_labels)})

    def state_col(self, species_id: str, k: int) -> int:
        if not 0 <= k <= self.N:
            raise IndexError(k)
        return k * self.ns + self._state_pos[species_id]

    def flux_col(self, reaction_id: str, k: int, direction: int = 1) -> int:
        if not 0 <= k < self.N:
            raise IndexError(k)
        return self.n_state_cols + k * self.ms + self._flux_pos[(reaction_id, direction)]

    def state_block(self, k: int) -> slice:
        return slice(k * self.ns, (k + 1) * self.ns)

    def flux_block(self, k: int) -> slice:
        start = self.n_state_cols + k * self.ms
        return slice(start, start + self.ms)

    def describe(self, col: int) -> tuple:
        """Inverse lookup: ``("state", id, k)`` or ``("flux", (id, dir), k)``."""
        if not 0 <= col < self.n_cols:
            raise IndexError(col)
        if col < self.n_state_cols:
            k, i = divmod(col, self.ns)
            return ("state", self.state_ids[i], k)
        k, i = divmod(col - self.n_state_cols, self.ms)
        return ("flux", self.split_labels[i], k)

    def names(self) -> list:
        out = []
        for col in range(self.n_cols):
            kind, key, k = self.describe(col)
            if kind == "state":
                out.append(f"d{key}[{k}]")
            else:
                rid, sgn = key
                out.append(f"{rid}{'+' if sgn > 0 else '-'}[{k}]")
        return out


@dataclass(frozen=True, eq=False)
class DynamicLP:
    lp: LinearProgram
    var_map: VarMap
    grid: DiscretizationGrid
    model: MetabolicModel
    state0: SystemState


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Grid solution: states at grid points, net fluxes on intervals, biomass curves.

    ``Y``, ``C``, ``P`` have one row per grid time; ``v`` has one row per
    interval in model reaction order.
    """

    times: np.ndarray
    Y: np.ndarray
    C: np.ndarray
    P: np.ndarray
    v: np.ndarray
    B: np.ndarray
    B_o: np.ndarray
    objective_value: float
    species_ids: tuple
    reaction_ids: tuple

    @classmethod
    def from_states(cls, model: MetabolicModel, times, Y, C, P, v, objective_value=None):
        times = np.asarray(times, dtype=float)
        n = times.size
        block = lambda a, width: np.asarray(a, dtype=float).reshape(n, width)
        CP = np.hstack([block(C, model.n_c), block(P, model.n_p)])
        B = CP @ model.w
        B_o = CP @ model.b
        if objective_value is None:
            objective_value = trapezoid(B_o, times)
        v = np.asarray(v, dtype=float).reshape(max(n - 1, 0), model.m)
        return cls(times, block(Y, model.n_y), CP[:, :model.n_c], CP[:, model.n_c:], v,
                   B, B_o, float(objective_value), model.state_ids, model.reaction_ids)

    def state(self, k: int) -> SystemState:
        return SystemState(self.times[k], self.Y[k], self.C[k], self.P[k])

    @property
    def final_state(self) -> SystemState:
        return self.state(len(self.times) - 1)

    def integral_objective(self) -> float:
        return trapezoid(self.B_o, self.times)

    def slice(self, k0: int, k1: int) -> "Trajectory":
        """Grid points ``k0..k1`` inclusive; objective is the slice quadrature."""
        sub = lambda a: a[k0:k1 + 1]
        t = sub(self.times)
        return Trajectory(t, sub(self.Y), sub(self.C), sub(self.P), self.v[k0:k1],
                          sub(self.B), sub(self.B_o), trapezoid(sub(self.B_o), t),
                          self.species_ids, self.reaction_ids)

    def flux(self, reaction_id: str) -> np.ndarray:
        return self.v[:, self.reaction_ids.index(reaction_id)]

    def amount(self, species_id: str) -> np.ndarray:
        return np.hstack([self.Y, self.C, self.P])[:, self.species_ids.index(species_id)]


def trapezoid(y, t) -> float:
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    if y.size < 2:
        return 0.0
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(t)))


def concatenate(pieces: Sequence[Trajectory]) -> Trajectory:
    """Join trajectories that abut at grid points (shared junction kept once)."""
    first = pieces[0]
    cat = lambda name: np.concatenate([getattr(first, name)] + [getattr(p, name)[1:] for p in pieces[1:]])
    times, B_o = cat("times"), cat("B_o")
    v = np.concatenate([p.v for p in pieces]) if pieces else first.v
    return Trajectory(times, cat("Y"), cat("C"), cat("P"), v, cat("B"), B_o,
                      trapezoid(B_o, times), first.species_ids, first.reaction_ids)


def discretize(model: MetabolicModel, state0: SystemState, grid: DiscretizationGrid) -> DynamicLP:
    """Build the LP for maximising the integrated objective biomass on ``grid``."""
    state0.check(model)
    H = model.matrices
    N, d = grid.N, grid.steps
    vm = VarMap(model.state_ids, H.split_labels, N)
    ny, nc = model.n_y, model.n_c
    ns = vm.ns
    z0 = np.concatenate([state0.Y, state0.C, state0.P])
    CP0 = state0.CP
    cp = slice(ny, ns)
    p_only = slice(ny + nc, ns)

    # objective: trapezoid weights on b @ (CP0 + dCP_k)
    w = np.zeros(N + 1)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    c = np.zeros(vm.n_cols)
    for k in range(N + 1):
        start = vm.state_block(k).start
        c[start + ny:start + ns] = w[k] * model.b
    offset = float(np.sum(w) * (model.b @ CP0))

    Sz = np.vstack([H.S_Y, H.S_C, H.S_P]) @ H.T
    SX = H.S_X @ H.T
    maintT = H.T[list(H.maintenance_reactions)]
    rows, rel, rhs, names = [], [], [], []

    def add(block_cols, relation, b, label):
        # block_cols: list of (col slice, matrix) pairs for a row block
        nrow = len(b)
        if nrow == 0:
            return
        A = np.zeros((nrow, vm.n_cols))
        for sl, mat in block_cols:
            A[:, sl] += mat
        rows.append(A)
        rel.extend([relation] * nrow)
        rhs.append(np.asarray(b, dtype=float))
        names.extend(f"{label}{i}" for i in range(nrow))

    def cols(k, part):
        blk = vm.state_block(k)
        return slice(blk.start + part.start, blk.start + part.stop)

    for k in range(N):
        fb = vm.flux_block(k)
        add([(vm.state_block(k + 1), np.eye(ns)), (vm.state_block(k), -np.eye(ns)), (fb, -d[k] * Sz)],
            EQ, np.zeros(ns), f"dyn[{k}]_")
        add([(fb, SX)], EQ, np.zeros(model.n_x), f"qss[{k}]_")
        add([(fb, H.H_c), (cols(k, p_only), -H.H_e)], LE, H.H_e @ state0.P, f"cap[{k}]_")
        add([(fb, maintT), (cols(k, cp), -H.H_m)], GE, H.H_m @ CP0, f"maint[{k}]_")
    for k in range(N + 1):
        add([(cols(k, cp), H.H_b)], LE, -(H.H_b @ CP0), f"comp[{k}]_")

    A = np.vstack(rows) if rows else np.zeros((0, vm.n_cols))
    b = np.concatenate(rhs) if rhs else np.zeros(0)

    lb = np.zeros(vm.n_cols)
    ub = np.full(vm.n_cols, np.inf)
    for k in range(N + 1):
        blk = vm.state_block(k)
        if k == 0:
            lb[blk] = 0.0
            ub[blk] = 0.0
        else:
            lb[blk] = -z0
    lp = LinearProgram(c=c, A=A, relations=rel, b=b, lb=lb, ub=ub, sense="max", offset=offset,
                       var_names=vm.names(), row_names=names)
    return DynamicLP(lp, vm, grid, model, state0)


def extract_trajectory(dlp: DynamicLP, sol: LpSolution, clip_tol: float = 1e-9) -> Trajectory:
    """Map an optimal LP solution back to states, net fluxes and biomass curves.

    Amounts that come out negative by less than ``clip_tol`` (relative to the
    initial amount) are clipped to zero.
    """
    if not sol.optimal:
        raise StatusNotOptimal(f"cannot extract a trajectory from a {sol.status} solution")
    vm, model = dlp.var_map, dlp.model
    x = sol.primal
    z0 = np.concatenate([dlp.state0.Y, dlp.state0.C, dlp.state0.P])
    Z = x[:vm.n_state_cols].reshape(vm.N + 1, vm.ns) + z0
    floor = -clip_tol * np.maximum(1.0, np.abs(z0))
    Z = np.where((Z < 0) & (Z >= floor), 0.0, Z)
    U = x[vm.n_state_cols:].reshape(vm.N, vm.ms)
    V = U @ model.matrices.T.T
    ny, nc = model.n_y, model.n_c
    return Trajectory.from_states(model, dlp.grid.times, Z[:, :ny], Z[:, ny:ny + nc], Z[:, ny + nc:], V,
                                  objective_value=sol.objective_value)


def solve_window(model: MetabolicModel, state0: SystemState, grid: DiscretizationGrid,
                 solver=None) -> tuple:
    """Discretise, solve and extract; returns ``(trajectory, solution)``.

    The trajectory is ``None`` when the LP is not optimal.
    """
    dlp = discretize(model, state0, grid)
    sol = solve_lp(dlp.lp, solver)
    if not sol.optimal:
        return None, sol
    traj = extract_trajectory(dlp, sol)
    if traj.B_o[0] > 0 and traj.B_o[-1] / traj.B_o[0] > 1e6:
        warnings.warn("biomass spans more than six orders of magnitude on one window; "
                      "the LP may be ill-conditioned, consider short-term (receding horizon) slicing",
                      RuntimeWarning, stacklevel=2)
    return traj, sol
