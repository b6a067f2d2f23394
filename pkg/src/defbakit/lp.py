"""Linear program container, solver interface and the bundled backend.

A :class:`LinearProgram` is stored densely::

    optimise  c @ x + offset
    s.t.      A[i] @ x  (<=, ==, >=)  b[i]
              lb <= x <= ub

``solve_lp`` dispatches to a :class:`SolverBackend`; the default is the
bundled :class:`~defbakit.simplex.SimplexSolver`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

import numpy as np

from .errors import DimensionMismatch

LE, EQ, GE = "<=", "==", ">="
_RELATIONS = (LE, EQ, GE)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """Immutable dense LP.

    Parameters
    ----------
    c : (n,) array_like
        Objective coefficients.
    A : (m, n) array_like
        Constraint matrix. ``m`` may be zero.
    relations : sequence of str
        One of ``"<="``, ``"=="``, ``">="`` per row.
    b : (m,) array_like
        Right-hand sides.
    lb, ub : (n,) array_like, optional
        Variable bounds; default ``0`` and ``+inf``.
    sense : {"max", "min"}
    offset : float
        Constant added to the objective value.
    var_names, row_names : sequence of str, optional
        Labels used only for diagnostics.
    """

    c: np.ndarray
    A: np.ndarray
    relations: tuple
    b: np.ndarray
    lb: np.ndarray = None
    ub: np.ndarray = None
    sense: str = "max"
    offset: float = 0.0
    var_names: Optional[tuple] = None
    row_names: Optional[tuple] = None

    def __post_init__(self):
        c = _frozen(self.c)
        n = c.shape[0]
        A = np.array(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        A.setflags(write=False)
        b = _frozen(self.b).reshape(-1)
        rel = tuple(self.relations)
        lb = _frozen(np.zeros(n) if self.lb is None else self.lb)
        ub = _frozen(np.full(n, np.inf) if self.ub is None else self.ub)
        if A.ndim != 2 or A.shape[1] != n:
            raise DimensionMismatch(f"A has shape {A.shape}, expected (m, {n})")
        m = A.shape[0]
        if b.shape != (m,) or len(rel) != m:
            raise DimensionMismatch("b and relations must have one entry per row")
        if lb.shape != (n,) or ub.shape != (n,):
            raise DimensionMismatch("bounds must have one entry per variable")
        bad = [r for r in rel if r not in _RELATIONS]
        if bad:
            raise ValueError(f"unknown relation {bad[0]!r}")
        if np.any(lb > ub):
            j = int(np.flatnonzero(lb > ub)[0])
            raise ValueError(f"variable {self._var_label(j)} has lb > ub")
        if self.sense not in ("max", "min"):
            raise ValueError("sense must be 'max' or 'min'")
        for name, val in (("c", c), ("A", A), ("b", b)):
            if not np.all(np.isfinite(val)):
                raise ValueError(f"{name} contains non-finite entries")
        if self.var_names is not None and len(self.var_names) != n:
            raise DimensionMismatch("var_names length differs from variable count")
        if self.row_names is not None and len(self.row_names) != m:
            raise DimensionMismatch("row_names length differs from row count")
        set_ = object.__setattr__
        set_(self, "c", c)
        set_(self, "A", A)
        set_(self, "b", b)
        set_(self, "relations", rel)
        set_(self, "lb", lb)
        set_(self, "ub", ub)
        set_(self, "offset", float(self.offset))
        if self.var_names is not None:
            set_(self, "var_names", tuple(self.var_names))
        if self.row_names is not None:
            set_(self, "row_names", tuple(self.row_names))

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def _var_label(self, j):
        return self.var_names[j] if self.var_names else f"x{j}"

    def _row_label(self, i):
        return self.row_names[i] if self.row_names else f"r{i}"

    def row_bounds(self):
        """Return ``(lo, hi)`` activity bounds per row."""
        lo = np.full(self.n_rows, -np.inf)
        hi = np.full(self.n_rows, np.inf)
        rel = np.array(self.relations, dtype=object)
        le, eq, ge = rel == LE, rel == EQ, rel == GE
        hi[le | eq] = self.b[le | eq]
        lo[ge | eq] = self.b[ge | eq]
        return lo, hi

    def objective(self, x) -> float:
        return float(self.c @ x) + self.offset

    def add_constraints(self, A, relations, b, names=None) -> "LinearProgram":
        """Return a copy of this LP with extra rows appended."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if isinstance(relations, str):
            relations = (relations,) * A.shape[0]
        row_names = None
        if self.row_names is not None or names is not None:
            old = self.row_names or tuple(f"r{i}" for i in range(self.n_rows))
            new = tuple(names) if names is not None else tuple(
                f"r{i}" for i in range(self.n_rows, self.n_rows + A.shape[0]))
            row_names = old + new
        return LinearProgram(
            c=self.c, A=np.vstack([self.A, A]), relations=self.relations + tuple(relations),
            b=np.concatenate([self.b, b]), lb=self.lb, ub=self.ub, sense=self.sense,
            offset=self.offset, var_names=self.var_names, row_names=row_names)

    def with_bounds(self, lb=None, ub=None) -> "LinearProgram":
        return LinearProgram(
            c=self.c, A=self.A, relations=self.relations, b=self.b,
            lb=self.lb if lb is None else lb, ub=self.ub if ub is None else ub,
            sense=self.sense, offset=self.offset, var_names=self.var_names,
            row_names=self.row_names)

    def max_violation(self, x) -> float:
        """Largest scaled violation of any row or bound at ``x``.

        Row violations are divided by ``max(1, |b_i|, sum_j |A_ij x_j|)``,
        bound violations by ``max(1, |bound|)``.
        """
        x = np.asarray(x, dtype=float)
        worst = 0.0
        if self.n_rows:
            act = self.A @ x
            scale = np.maximum.reduce([np.ones(self.n_rows), np.abs(self.b), np.abs(self.A) @ np.abs(x)])
            lo, hi = self.row_bounds()
            viol = np.maximum(lo - act, act - hi)
            worst = max(worst, float(np.max(np.maximum(viol, 0.0) / scale)))
        with np.errstate(invalid="ignore"):
            vl = np.where(np.isfinite(self.lb), (self.lb - x) / np.maximum(1.0, np.abs(self.lb)), 0.0)
            vu = np.where(np.isfinite(self.ub), (x - self.ub) / np.maximum(1.0, np.abs(self.ub)), 0.0)
        if x.size:
            worst = max(worst, float(np.max(vl)), float(np.max(vu)))
        return worst

    def dump(self) -> str:
        """Human-readable text listing: objective line, one row per line, bounds."""
        def term_list(coefs):
            parts = [f"{v:+.17g} {self._var_label(j)}" for j, v in enumerate(coefs) if v != 0.0]
            return " ".join(parts) if parts else "0"

        lines = [f"{self.sense} {term_list(self.c)} {self.offset:+.17g}"]
        for i in range(self.n_rows):
            lines.append(f"{self._row_label(i)}: {term_list(self.A[i])} {self.relations[i]} {self.b[i]:.17g}")
        for j in range(self.n_vars):
            lines.append(f"bound {self._var_label(j)} {self.lb[j]:.17g} {self.ub[j]:.17g}")
        return "\n".join(lines) + "\n"


def write_lp(lp: LinearProgram, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(lp.dump())


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: str
    objective_value: Optional[float] = None
    primal: Optional[np.ndarray] = None
    iterations: int = 0
    info: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class SolverBackend(Protocol):
    def solve(self, lp: LinearProgram) -> LpSolution: ...


class HighsSolver:
    """Backend delegating to SciPy's HiGHS interface."""

    def __init__(self, method: str = "highs"):
        self.method = method

    def solve(self, lp: LinearProgram) -> LpSolution:
        from scipy.optimize import linprog

        sign = -1.0 if lp.sense == "max" else 1.0
        rel = np.array(lp.relations, dtype=object)
        A_ub = np.vstack([lp.A[rel == LE], -lp.A[rel == GE]])
        b_ub = np.concatenate([lp.b[rel == LE], -lp.b[rel == GE]])
        A_eq, b_eq = lp.A[rel == EQ], lp.b[rel == EQ]
        bounds = [(None if np.isinf(l) else l, None if np.isinf(u) else u) for l, u in zip(lp.lb, lp.ub)]
        res = linprog(sign * lp.c, A_ub=A_ub if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
                      A_eq=A_eq if len(b_eq) else None, b_eq=b_eq if len(b_eq) else None,
                      bounds=bounds, method=self.method)
        if res.status == 0:
            x = np.asarray(res.x, dtype=float)
            return LpSolution(OPTIMAL, lp.objective(x), x, int(res.nit))
        if res.status == 2:
            # HiGHS presolve may report "infeasible" for dual-infeasible problems
            probe = linprog(np.zeros_like(lp.c), A_ub=A_ub if len(b_ub) else None,
                            b_ub=b_ub if len(b_ub) else None, A_eq=A_eq if len(b_eq) else None,
                            b_eq=b_eq if len(b_eq) else None, bounds=bounds, method=self.method)
            status = UNBOUNDED if probe.status == 0 else INFEASIBLE
            return LpSolution(status, iterations=int(res.nit))
        if res.status == 3:
            return LpSolution(UNBOUNDED, iterations=int(res.nit))
        from .errors import NumericalFailure
        raise NumericalFailure(f"HiGHS failed: {res.message}")


_default_backend: Optional[SolverBackend] = None


def default_solver() -> SolverBackend:
    global _default_backend
    if _default_backend is None:
        from .simplex import SimplexSolver
        _default_backend = SimplexSolver()
    return _default_backend


def solve_lp(lp: LinearProgram, solver: Optional[SolverBackend] = None) -> LpSolution:
    """Solve ``lp`` with ``solver`` (the bundled simplex when omitted)."""
    return (solver or default_solver()).solve(lp)


def from_rows(c, rows: Sequence, lb=None, ub=None, sense="max", **kw) -> LinearProgram:
    """Build an LP from ``rows = [(coefs, relation, rhs), ...]``."""
    c = np.asarray(c, dtype=float)
    if rows:
        A = np.array([r[0] for r in rows], dtype=float)
        rel = [r[1] for r in rows]
        b = [r[2] for r in rows]
    else:
        A, rel, b = np.zeros((0, c.size)), [], []
    return LinearProgram(c=c, A=A, relations=rel, b=b, lb=lb, ub=ub, sense=sense, **kw)
