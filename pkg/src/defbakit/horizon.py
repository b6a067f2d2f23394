"""Prediction horizon, iteration time and growth-phase diagnostics.

The prediction horizon ``t_p`` is the time at which the integral of a
balanced (exponential) biomass curve catches up with the integral of the
best linear curve. The iteration time ``t_c`` is the part of that window
over which an optimal solution is guaranteed to still grow exponentially.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BracketFailure, NonpositiveBound, TooFewPoints

NO_LINEAR_INCENTIVE = None
"""Returned by :func:`prediction_horizon` when linear growth never wins."""


def integral_balanced(t, mu_bal, B_init):
    """Integral over ``[0, t]`` of ``B_init * exp(mu_bal * s)``."""
    t = np.asarray(t, dtype=float)
    x = mu_bal * t
    # expm1(x)/mu, written as B*t*expm1(x)/x to survive mu -> 0
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(x == 0.0, 1.0, np.expm1(x) / np.where(x == 0.0, 1.0, x))
    out = B_init * t * ratio
    return float(out) if out.ndim == 0 else out


def integral_linear(t, lambda_r, B_init):
    """Integral over ``[0, t]`` of ``B_init * (1 + lambda_r * s)``."""
    t = np.asarray(t, dtype=float)
    out = 0.5 * lambda_r * B_init * t ** 2 + B_init * t
    return float(out) if out.ndim == 0 else out


def _gap(t, lambda_r, mu_bal):
    # IB_lin - IB_bal with B_init = 1
    return integral_linear(t, lambda_r, 1.0) - integral_balanced(t, mu_bal, 1.0)


def prediction_horizon(lambda_r: float, mu_bal: float, B_init: float = 1.0,
                       eps_root: float = 1e-10, t_max: float = 1e6) -> Optional[float]:
    """Positive root of ``IB_lin(t) = IB_bal(t)``.

    Returns :data:`NO_LINEAR_INCENTIVE` (``None``) when ``lambda_r <= mu_bal``.
    ``B_init`` cancels and is accepted only for interface symmetry.

    The root is bracketed by doubling an upper bound, starting from the
    point where the quadratic term of the exponential overtakes the linear
    one, and then refined by bisection to ``eps_root`` hours.
    """
    if lambda_r < 0 or mu_bal < 0:
        raise ValueError("rates must be nonnegative")
    if not B_init > 0:
        raise ValueError("B_init must be positive")
    if lambda_r <= mu_bal:
        return NO_LINEAR_INCENTIVE
    if mu_bal == 0.0:
        raise BracketFailure("no balanced growth: the linear integral dominates for all t")
    lo = 0.0
    hi = max(3.0 * (lambda_r - mu_bal) / mu_bal ** 2, eps_root)
    while _gap(hi, lambda_r, mu_bal) > 0:
        lo = hi
        hi *= 2.0
        if hi > t_max:
            raise BracketFailure(f"no sign change below t = {t_max:g} h")
    while hi - lo > eps_root:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _gap(mid, lambda_r, mu_bal) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def iteration_time(t_p: float, lambda_r: float, mu_bal: float, safety_factor: float = 0.9) -> float:
    """Iteration time ``safety_factor * (t_p - 2 (1/mu_bal - 1/lambda_r))``."""
    if not 0 < safety_factor < 1:
        raise ValueError("safety_factor must lie in the open interval (0, 1)")
    if not lambda_r > mu_bal > 0:
        raise ValueError("iteration time needs lambda_r > mu_bal > 0")
    if not t_p > 0:
        raise ValueError("t_p must be positive")
    bound = iteration_bound(t_p, lambda_r, mu_bal)
    if bound <= 0:
        raise NonpositiveBound(
            f"t_p = {t_p:g} h leaves no exponential-only slice (bound {bound:g} h); "
            "enlarge t_p or accept mixed phases explicitly")
    return safety_factor * bound


def iteration_bound(t_p: float, lambda_r: float, mu_bal: float) -> float:
    """Upper bound ``t_p - 2 (1/mu_bal - 1/lambda_r)`` on the iteration time."""
    return t_p - 2.0 * (1.0 / mu_bal - 1.0 / lambda_r)


@dataclass(frozen=True)
class HorizonDiagnostics:
    lambda_s: float
    lambda_r: float
    mu_bal: float
    B_init: float
    t_p: Optional[float]
    t_c: Optional[float]
    safety_factor: float = 0.9

    @property
    def has_linear_incentive(self) -> bool:
        return self.t_p is not None and self.lambda_r > self.mu_bal

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("lambda_s", "lambda_r", "mu_bal", "B_init", "t_p", "t_c", "safety_factor")}


def compute_horizon(model, state, safety_factor: float = 0.9, B_init: Optional[float] = None,
                    solver=None) -> HorizonDiagnostics:
    """Solve both rate LPs at ``state`` and derive ``t_p`` and ``t_c``.

    ``t_p`` and ``t_c`` are ``None`` when there is no linear incentive;
    ``t_c`` is also ``None`` when the iteration-time bound is not positive.
    """
    from .network import objective_biomass
    from .rates import max_balanced_rate, max_linear_rate

    if B_init is None:
        B_init = objective_biomass(model, state)
    lin = max_linear_rate(model, B_init, solver)
    bal = max_balanced_rate(model, state, solver)
    t_p = prediction_horizon(lin.lambda_r, bal.mu_bal, B_init)
    t_c = None
    if t_p is not None and bal.mu_bal > 0 and iteration_bound(t_p, lin.lambda_r, bal.mu_bal) > 0:
        t_c = iteration_time(t_p, lin.lambda_r, bal.mu_bal, safety_factor)
    return HorizonDiagnostics(lin.lambda_s, lin.lambda_r, bal.mu_bal, B_init, t_p, t_c, safety_factor)


# -- mixed growth curves -----------------------------------------------------------

@dataclass(frozen=True)
class GrowthCurve:
    """Piecewise biomass curve switching between linear and exponential growth.

    ``kind="mixed_lin_then_exp"`` grows linearly up to ``t_s`` and then
    exponentially; ``kind="exp_then_lin"`` grows exponentially up to ``t_s``
    and then linearly with the slope available to the biomass reached at
    ``t_s``.
    """

    kind: str
    t_s: float
    B_init: float
    lambda_r: float
    mu_bal: float

    def __post_init__(self):
        if self.kind not in ("mixed_lin_then_exp", "exp_then_lin"):
            raise ValueError(f"unknown curve kind {self.kind!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        B, lam, mu, ts = self.B_init, self.lambda_r, self.mu_bal, self.t_s
        if self.kind == "mixed_lin_then_exp":
            out = np.where(t <= ts, B * (lam * t + 1.0), B * (lam * ts + np.exp(mu * (t - ts))))
        else:
            out = np.where(t <= ts, B * np.exp(mu * t), B * np.exp(mu * ts) * (lam * (t - ts) + 1.0))
        return float(out) if out.ndim == 0 else out

    def integral(self, t_p: float) -> float:
        """Closed-form integral of the curve over ``[0, t_p]`` (``t_s <= t_p``)."""
        B, lam, mu, ts = self.B_init, self.lambda_r, self.mu_bal, self.t_s
        rest = t_p - ts
        if self.kind == "mixed_lin_then_exp":
            return B * (ts + 0.5 * lam * ts ** 2) + B * lam * ts * rest + integral_balanced(rest, mu, B)
        head = integral_balanced(ts, mu, B)
        return head + B * np.exp(mu * ts) * (0.5 * lam * rest ** 2 + rest)


def _exp_excess(x):
    """``exp(x) - 1 - x`` without cancellation for small ``|x|``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.1
    xs = np.where(small, x, 0.0)
    series = np.zeros_like(xs)
    term = xs * xs / 2.0
    for k in range(3, 16):
        series += term
        term = term * xs / k
    return np.where(small, series, np.expm1(x) - x)


def _grid_argmax(kind, lambda_r, mu_bal, t_p, grid_n, B_init):
    if not lambda_r > mu_bal:
        raise ValueError("Assumption lambda_r > mu_bal is required")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    ts = np.linspace(0.0, t_p, grid_n)
    if kind == "mixed_lin_then_exp":
        # integral minus its value at t_s = t_p, in closed form: for r = t_p - t_s
        # it is B (exp(mu r) - 1 - mu r) / mu - B lambda r^2 / 2, which keeps
        # the comparison exact to rounding even when lambda_r is close to mu_bal
        r = t_p - ts
        excess = _exp_excess(mu_bal * r) / mu_bal if mu_bal > 0 else np.zeros_like(r)
        vals = B_init * (excess - 0.5 * lambda_r * r ** 2)
    else:
        vals = np.array([GrowthCurve(kind, s, B_init, lambda_r, mu_bal).integral(t_p) for s in ts])
    return float(ts[int(np.argmax(vals))])


def verify_theorem1(lambda_r, mu_bal, t_p, grid_n=10_000, B_init=1.0) -> float:
    """Grid maximiser of the integral of the linear-then-exponential curve.

    Expected to equal ``t_p`` (a single linear phase) whenever ``t_p`` does
    not exceed the prediction horizon.
    """
    return _grid_argmax("mixed_lin_then_exp", lambda_r, mu_bal, t_p, grid_n, B_init)


def verify_theorem2(lambda_r, mu_bal, t_p, grid_n=10_000, B_init=1.0) -> float:
    """Grid maximiser of the integral of the exponential-then-linear curve.

    Expected to equal ``max(0, t_p - 2 (1/mu_bal - 1/lambda_r))``.
    """
    return _grid_argmax("exp_then_lin", lambda_r, mu_bal, t_p, grid_n, B_init)


# -- growth-phase classification ---------------------------------------------------

LINEAR, EXPONENTIAL, STAGNANT = "linear", "exponential", "stagnant"


def _windows(times, window):
    t0, tf = times[0], times[-1]
    n_win = max(int(np.floor((tf - t0) / window + 1e-9)), 1)
    edges = t0 + window * np.arange(n_win + 1)
    edges[-1] = tf
    eps = 1e-9 * max(1.0, abs(tf))
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        idx = np.flatnonzero((times >= a - eps) & (times <= b + eps))
        out.append(((float(a), float(b)), idx))
    return out


def classify_curve(times: Sequence[float], values: Sequence[float], window: float,
                   stagnation_tol: float = 1e-6) -> list:
    """Label consecutive windows of a sampled curve as linear, exponential or stagnant.

    Each window is fitted by least squares both with an affine function and
    with an exponential (affine fit of the logarithm); the label goes to the
    fit with the smaller RMS residual relative to the window mean. A window
    whose relative variation is below ``stagnation_tol`` is stagnant. A
    trailing remainder shorter than ``window`` is merged into the last window.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if window <= 0:
        raise ValueError("window must be positive")
    labels = []
    for (a, b), idx in _windows(times, window):
        if idx.size < 3:
            raise TooFewPoints(f"window [{a:g}, {b:g}] holds {idx.size} points, need >= 3")
        t, y = times[idx], values[idx]
        scale = max(float(np.mean(np.abs(y))), np.finfo(float).tiny)
        if (y.max() - y.min()) / scale < stagnation_tol:
            labels.append(((a, b), STAGNANT))
            continue
        V = np.vstack([np.ones_like(t), t - t[0]]).T
        lin_fit = V @ np.linalg.lstsq(V, y, rcond=None)[0]
        res_lin = np.sqrt(np.mean((y - lin_fit) ** 2)) / scale
        if np.all(y > 0):
            coef = np.linalg.lstsq(V, np.log(y), rcond=None)[0]
            res_exp = np.sqrt(np.mean((y - np.exp(V @ coef)) ** 2)) / scale
        else:
            res_exp = np.inf
        labels.append(((a, b), EXPONENTIAL if res_exp < res_lin else LINEAR))
    return labels


def classify_growth(trajectory, window: float, stagnation_tol: float = 1e-6) -> list:
    """Classify the objective biomass of ``trajectory`` window by window."""
    return classify_curve(trajectory.times, trajectory.B_o, window, stagnation_tol)
