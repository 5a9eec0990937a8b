# %% [markdown]
# Entanglement needs a cold enough cold bath. For each T_c we look for the
# smallest T_h that still gives some entanglement, and then for the largest
# T_c where any T_h works. The last cell takes about a minute.

# %%
import numpy as np

from thermoent.optimize import critical_cold_temperature, threshold_hot_temperature

# %% threshold hot temperature for the reset model
for T_c in np.linspace(0.0, 0.25, 6):
    t = threshold_hot_temperature("reset", float(T_c))
    print(f"T_c = {T_c:.2f}   T_h threshold = {'unreachable' if t is None else f'{t:.4f}'}")

# %% critical cold temperatures
print("reset        ", critical_cold_temperature("reset"))
print("flux         ", critical_cold_temperature("flux", T_h_cap=1e3))
print("dot, U = 0   ", critical_cold_temperature("dot", U=0.0))
print("dot, U = 20  ", critical_cold_temperature("dot", U=20.0))
print("dot, U = 300 ", critical_cold_temperature("dot", U=300.0, start=16.0))
