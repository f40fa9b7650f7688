# %% [markdown]
# # Reproduction number
# R0 from the closed form, from the next-generation matrix, and with the
# contact parameters factored out.

# %%
import numpy as np

from vhd import default_params, ngm_r0, r0, r0_components, report_formulas

P = default_params()
comp = r0_components(P)
print(f"R0 = {comp.value:.4f}  (host factor {comp.host:.4f}, vector factor {comp.vector:.4f})")

# %% [markdown]
# The spectral radius of the next-generation matrix gives the same number.

# %%
ngm = ngm_r0(P)
np.set_printoptions(precision=4, suppress=True)
print("K =\n", ngm.K)
print(f"spectral radius {ngm.R0:.10f} vs closed form {r0(P):.10f}")

# %% [markdown]
# R0 is linear in the biting rate and goes with the square root of each
# transmission probability, so those can be pulled out.

# %%
for free in [(), ("c_vh",), ("a_v", "c_vh", "c_hv")]:
    print(report_formulas(P, free).text)

# %%
low = default_params(a_v=0.25, c_vh=0.2, c_hv=0.25)
print(f"low-contact regime: R0 = {r0(low):.4f}")

# biting rate that brings R0 to 1 with the other contacts unchanged
a_crit = 1.0 / report_formulas(low, ("a_v",)).coefficient
print(f"R0 = 1 at a_v = {a_crit:.4f} bites/day")
