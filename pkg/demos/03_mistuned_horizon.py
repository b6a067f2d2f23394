"""
What a too-short prediction horizon does
========================================

When the kept part of each window reaches into the stretch where the
optimiser prefers storage, every iteration ends with a linear phase and
the trajectory alternates between the two growth modes.
"""

import warnings

from defbakit import SdefbaConfig, classify_growth, run_sdefba, toy_model

model, state = toy_model()

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    run = run_sdefba(model, state, SdefbaConfig.fixed(6.0, 0.1, t_p=2.5, t_c=1.5))
for w in caught:
    print("warning:", w.message)

print("windows:", "".join(lab[0] for _, lab in classify_growth(run.trajectory, 0.5)))

# %%
# The automatically chosen horizon avoids the alternation.
auto = run_sdefba(model, state, SdefbaConfig(t_end=6.0, d=0.1))
print("auto   :", "".join(lab[0] for _, lab in classify_growth(auto.trajectory, 0.5)))
print("objective fixed {:.4f}  auto {:.4f}".format(run.trajectory.objective_value,
                                                  auto.trajectory.objective_value))
