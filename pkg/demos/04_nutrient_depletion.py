"""
Running until the nutrient is gone
==================================

With a finite nutrient pool the loop stops as soon as an external species
reaches its threshold, instead of running into an infeasible window.
"""

from defbakit import SdefbaConfig, run_sdefba, toy_model

model, state = toy_model(nutrient=1.0)
run = run_sdefba(model, state, SdefbaConfig(t_end=30.0, d=0.1))

traj = run.trajectory
print("stop reason:", run.stop_reason, "at t =", traj.times[-1], "h")
for k in range(0, len(traj.times), 5):
    print(f"t = {traj.times[k]:4.1f} h   N = {traj.amount('N')[k]:.4f}   "
          f"E = {traj.amount('E')[k]:.4f}   M = {traj.amount('M')[k]:.4f}")

# %%
# Thresholds are checked at the end of each kept slice. With a larger pool
# the run spans several iterations and a positive threshold stops it early.
model, state = toy_model(nutrient=20.0)
for thresholds in (None, {"N": 10.0}):
    r = run_sdefba(model, state, SdefbaConfig(t_end=30.0, d=0.1, depletion_thresholds=thresholds))
    print(f"thresholds {thresholds}: {r.stop_reason} at t = {r.trajectory.times[-1]:.1f} h, "
          f"N = {r.trajectory.amount('N')[-1]:.3f}")
