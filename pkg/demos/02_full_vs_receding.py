"""
Full-horizon optimum versus the receding-horizon loop
=====================================================

Over a fixed span the full-horizon problem knows when the experiment ends
and switches to pure storage production shortly before. The receding loop
never sees the end and keeps growing exponentially, which costs a little
objective but gives a trajectory that is meaningful at every time.
"""

from defbakit import SdefbaConfig, classify_growth, run_sdefba, solve_defba, toy_model

model, state = toy_model()
t_end, d = 3.0, 0.1

full = solve_defba(model, state, t_end, d)
run = run_sdefba(model, state, SdefbaConfig(t_end=t_end, d=d))

print("full horizon objective     ", full.objective_value)
print("receding horizon objective ", run.trajectory.objective_value)
print("relative loss              ", 1 - run.trajectory.objective_value / full.objective_value)

# %%
# Half-hour windows labelled by growth type (e = exponential, l = linear).
for name, traj in (("full", full), ("receding", run.trajectory)):
    labels = "".join(lab[0] for _, lab in classify_growth(traj, 0.5))
    print(f"{name:9s} {labels}")

# %%
# Longer runs: the horizon shrinks as the enzyme share grows.
long_run = run_sdefba(model, state, SdefbaConfig(t_end=10.0, d=0.1))
for rec in long_run.iterations:
    print(f"t_k = {rec.t_k:5.2f} h   mu_bal = {rec.mu_bal:.4f}   t_p = {rec.t_p:6.3f} h   kept {rec.t_c:.2f} h")
