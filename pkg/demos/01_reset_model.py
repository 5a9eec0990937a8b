# %% [markdown]
# Two qubits, each reset towards the thermal state of its own bath, coupled by
# an energy-conserving swap term. How much entanglement survives in the
# steady state?

# %%
import numpy as np

from thermoent import (
    INF, ResetParams, analytic_reset_steady, build_liouvillian, concurrence,
    concurrence_closed_form, heat_current, purity, solve_steady,
)
from thermoent.optimize import OptimizationProblem, maximize_concurrence

np.set_printoptions(precision=4, suppress=True)

# %% cold qubit at zero temperature, hot one at infinite temperature
p = ResetParams(g=1.6e-3, p_c=1e-2, p_h=1.1e-3, T_c=0.0, T_h=INF)
res = solve_steady(build_liouvillian(p))
rho = res.state
print(rho.mat.real)
print(rho.mat.imag)   # only the |01>,|10> coherence is imaginary and nonzero
print("residual", res.residual, "gap", res.uniqueness_gap)

# %% the numerical null vector and the closed form agree
print("max |numeric - closed form| =", np.max(np.abs(rho.mat - analytic_reset_steady(p).mat)))
print("C (Wootters)    =", concurrence(rho).value)
print("C (closed form) =", concurrence_closed_form(p).value)
print("purity          =", purity(rho))

# %% heat leaves the hot bath and ends up in the cold one
q_c, q_h = heat_current(rho, p, "cold"), heat_current(rho, p, "hot")
print(f"Q_c = {q_c:.3e}  Q_h = {q_h:.3e}  sum = {q_c + q_h:.1e}")

# %% optimizing the couplings under a 1e-2 cap
best = maximize_concurrence(OptimizationProblem.couplings("reset", 0.0, 1e6))
print(best.best_value, best.best_point, best.evaluations)

# %% concurrence keeps growing with T_h once the couplings are re-optimized
for T_h in np.logspace(-1, 6, 8):
    r = maximize_concurrence(OptimizationProblem.couplings("reset", 0.0, T_h))
    print(f"T_h = {T_h:9.3g}   C = {r.best_value:.4f}")

# %% a warm cold bath kills it
for T_c in (0.05, 0.1, 0.15, 0.2, 0.25):
    r = maximize_concurrence(OptimizationProblem.couplings("reset", T_c, 1e6))
    print(f"T_c = {T_c:.2f}   C = {r.best_value:.4f}")
