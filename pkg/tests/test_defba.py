"""Full-horizon problem on the toy model."""
import numpy as np
import pytest

from defbakit.defba import solve_defba
from defbakit.errors import Infeasible
from defbakit.horizon import EXPONENTIAL, LINEAR, classify_growth
from defbakit.network import (BIOMASS, EXCHANGE, EXTERNAL, MACROMOLECULE, METABOLITE, MetabolicModel,
                              Reaction, Species, SystemState)

# With E held at 0.1 mol all capacity goes to storage:
# v_M = 0.1 / (1/1.5 + 1/2) = 6/70 mol/h, i.e. 15 * 6/70 g/h of objective biomass.
LINEAR_SLOPE = 15 * 6 / 70

# Switching threshold of the continuous problem: diverting capacity to enzyme
# for a moment pays off only if at least 16/9 h remain (uptake cost included).
T_LIN = 16 / 9


def test_short_horizon_is_a_single_linear_phase(toy):
    model, state = toy
    traj = solve_defba(model, state, 1.0, 0.1)
    np.testing.assert_allclose(traj.flux("v_E"), 0.0, atol=1e-12)
    slopes = np.diff(traj.B_o) / np.diff(traj.times)
    np.testing.assert_allclose(slopes, LINEAR_SLOPE, rtol=1e-9)
    assert {lab for _, lab in classify_growth(traj, 0.5)} == {LINEAR}


def test_exponential_then_linear(toy):
    model, state = toy
    traj = solve_defba(model, state, 3.0, 0.1)
    labels = [lab for _, lab in classify_growth(traj, 0.5)]
    assert labels[0] == EXPONENTIAL and labels[-1] == LINEAR
    vE = traj.flux("v_E")
    first_zero = int(np.argmax(vE <= 1e-9))
    assert first_zero > 0 and np.all(vE[first_zero:] <= 1e-9)
    assert np.all(vE[:first_zero] > 0)
    # the enzyme phase ends about 2 (1/0.6 - 1/lambda) before the end, near 1.2 h
    assert 0.8 <= traj.times[first_zero] <= 1.6
    assert traj.B_o[-1] > 2.5


def test_linear_threshold(toy):
    model, state = toy
    below = solve_defba(model, state, 0.85 * T_LIN, 0.05)
    above = solve_defba(model, state, 1.25 * T_LIN, 0.05)
    assert below.flux("v_E").max() <= 1e-12
    assert above.flux("v_E")[0] > 0


def test_objective_monotone_in_horizon(toy):
    model, state = toy
    objs = [solve_defba(model, state, T, 0.1).objective_value for T in (1.0, 2.0, 3.0)]
    assert objs[0] <= objs[1] <= objs[2]


def test_zero_biomass(toy):
    model, _ = toy
    state = SystemState.from_amounts(model, {"N": 1e9})
    traj = solve_defba(model, state, 2.0, 0.1)
    assert traj.objective_value == 0.0
    np.testing.assert_array_equal(traj.v, 0.0)


def test_start_time_is_respected(toy):
    model, state = toy
    shifted = SystemState(5.0, state.Y, state.C, state.P)
    a = solve_defba(model, state, 1.0, 0.1)
    b = solve_defba(model, shifted, 1.0, 0.1)
    np.testing.assert_allclose(b.times, a.times + 5.0)
    assert b.objective_value == pytest.approx(a.objective_value, rel=1e-12)


def test_unsatisfiable_maintenance_is_infeasible():
    species = [Species("N", EXTERNAL), Species("A", METABOLITE), Species("E", MACROMOLECULE, 10.0)]
    reactions = [Reaction("up", EXCHANGE, {"N": -1, "A": 1}, kcat_fwd=1.0, enzyme="E",
                          maintenance_phi=0.5),
                 Reaction("grow", BIOMASS, {"A": -1, "E": 1}, kcat_fwd=1.0, enzyme="E")]
    model = MetabolicModel(species, reactions)
    # maintenance asks for 0.5 * 1 g = 0.5 mol/h of uptake, capacity allows 0.1
    state = SystemState.from_amounts(model, {"N": 100.0, "E": 0.1})
    with pytest.raises(Infeasible):
        solve_defba(model, state, 1.0, 0.1)


def test_argument_checks(toy):
    model, state = toy
    with pytest.raises(ValueError):
        solve_defba(model, state, 0.0, 0.1)
    with pytest.raises(ValueError):
        solve_defba(model, state, 1.0, 2.0)
