"""
Choosing the prediction horizon for the toy model
=================================================

Static growth rates of the toy model decide how far ahead the
receding-horizon loop has to look. Linear growth (all resources into
storage) beats balanced exponential growth over short spans; the horizon
is where the two integrated biomass curves cross.
"""

import numpy as np

from defbakit import (compute_horizon, integral_balanced, integral_linear, iteration_bound,
                      prediction_horizon, toy_model)

model, state = toy_model()
diag = compute_horizon(model, state, safety_factor=0.9)

print("linear rate (storage only)   lambda_s =", diag.lambda_s)
print("linear rate per biomass      lambda_r =", diag.lambda_r)
print("balanced exponential rate    mu_bal   =", diag.mu_bal)
print("prediction horizon           t_p      =", diag.t_p)
print("iteration time               t_c      =", diag.t_c)

# %%
# The integrated biomass of both strategies. Linear is ahead until t_p.
t = np.linspace(0.0, 1.5 * diag.t_p, 7)
lin = integral_linear(t, diag.lambda_r, diag.B_init)
bal = integral_balanced(t, diag.mu_bal, diag.B_init)
for ti, a, b in zip(t, lin, bal):
    print(f"t = {ti:6.2f} h   linear {a:9.4f}   balanced {b:9.4f}   {'linear ahead' if a > b else ('tied' if np.isclose(a, b) else 'balanced ahead')}")

# %%
# A faster balanced rate shortens the horizon considerably.
for mu in (diag.mu_bal, 0.45, 0.6):
    tp = prediction_horizon(diag.lambda_r, mu)
    print(f"mu = {mu:.4f} 1/h  ->  t_p = {tp:.3f} h, slice bound {iteration_bound(tp, diag.lambda_r, mu):.3f} h")
