# %% [markdown]
# Same two qubits, now with Lindblad baths: bosonic rates for flux qubits and
# fermionic rates (plus a Coulomb shift U on |11>) for a double quantum dot.

# %%
import numpy as np

from thermoent import DotParams, FluxParams, build_liouvillian, concurrence, solve_steady, steady_report
from thermoent.analytics import is_x_state
from thermoent.models import flux_liouvillian
from thermoent.optimize import OptimizationProblem, maximize_concurrence, maximize_over_hot_temperature

# %% a flux-qubit steady state is an X-state
p = FluxParams(g=1.5e-3, gamma_c=1e-2, gamma_h=2e-3, T_c=0.05, T_h=200.0)
rho = solve_steady(build_liouvillian(p)).state
print(np.round(np.abs(rho.mat), 6))
print("X-state:", is_x_state(rho.mat), " C =", concurrence(rho).value)

# %% local jumps vs conditional jumps: close but not identical
two = solve_steady(flux_liouvillian(p, "two")).state
print("max entry difference:", np.max(np.abs(rho.mat - two.mat)))
print("C four-operator / two-operator:", concurrence(rho).value, concurrence(two).value)

# %% best flux-qubit entanglement, scanning T_h up to 1e3
best = maximize_over_hot_temperature("flux", 0.0, T_h_cap=1e3)
print("flux:", best.best_value, "at T_h =", best.params.T_h)

# %% the dot: larger U blocks double occupation and helps
for U in (0.0, 20.0, 1e3, 25e3):
    r = maximize_over_hot_temperature("dot", 0.0, U=U)
    print(f"U = {U:8g}   max C = {r.best_value:.4f}   at T_h = {r.params.T_h:.4g}")

# %% with U > 0 the optimum sits at a finite hot temperature
U = 1e3
for T_h in np.logspace(0, 6, 7):
    r = maximize_concurrence(OptimizationProblem.couplings("dot", 0.0, T_h, U=U))
    print(f"T_h = {T_h:9.3g}   C = {r.best_value:.4f}")

# %% heat currents for the dot (their sum is reported, not assumed zero)
rec = steady_report(DotParams(2e-3, 1e-2, 2e-3, 0.0, 50.0, U=20.0))
print(rec.Q_c, rec.Q_h, rec.Q_c + rec.Q_h)
