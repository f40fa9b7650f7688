# %% [markdown]
# # Sensitivity indices
# Normalized forward sensitivity of R0^2 and of the two mosquito
# thresholds, analytic and by finite differences.

# %%
from vhd import default_params, sensitivity

P = default_params()
for target in ("R0_squared", "O_0", "O"):
    table = sensitivity(target, P)
    fd = sensitivity(target, P, method="finite-difference")
    print(f"\n{target}")
    for name, value in table.ranked():
        if value != 0.0:
            print(f"  {name:8s} {value:+.6f}   fd {fd[name]:+.6f}")
    print(f"  exact zeros: {', '.join(sorted(table.structural_zeros))}")

# %% [markdown]
# With the predator present the threshold depends on the maturation rate
# almost one for one: immatures that mature faster escape predation.

# %%
for phi in (0.0, 0.001, 0.35):
    t = sensitivity("O", P.replace(phi=phi))
    print(f"phi={phi:<6} alpha {t['alpha']:.4f}  d_q {t['d_q']:.4f}  phi {t['phi']:.4f}")
