"""Full-horizon dynamic enzyme-cost FBA."""
from __future__ import annotations

from .collocation import DiscretizationGrid, Trajectory, solve_window
from .errors import Infeasible, Unbounded
from .lp import UNBOUNDED
from .network import MetabolicModel, SystemState


def solve_defba(model: MetabolicModel, state0: SystemState, t_end: float, d: float,
                solver=None) -> Trajectory:
    """Maximise the integrated objective biomass over ``[t0, t0 + t_end]``.

    ``state0.time`` is the start time; ``d`` is the discretisation step.
    No terminal constraint or cost is added, so the optimum typically ends
    in a linear arc that tops off the objective.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if not 0 < d <= t_end:
        raise ValueError("d must lie in (0, t_end]")
    t0 = state0.time
    grid = DiscretizationGrid(t0, t0 + t_end, d)
    traj, sol = solve_window(model, state0, grid, solver)
    if traj is None:
        if sol.status == UNBOUNDED:
            raise Unbounded("deFBA problem is unbounded")
        raise Infeasible("deFBA problem is infeasible from the given initial state")
    return traj
