# %% [markdown]
# # Equilibria and their stability
# All eight equilibria with existence verdicts, then the eigenvalue
# classification compared with the threshold conditions.

# %%
from vhd import all_equilibria, classify, default_params, routh_hurwitz_e2

P = default_params(a_v=0.25, c_vh=0.2, c_hv=0.25)
points = all_equilibria(P)
for eq in points:
    reasons = ", ".join(f"{name}={value:.4g}" for name, value, _ in eq.existence_reasons)
    print(f"{eq.kind}: {'exists' if eq.exists else 'absent':7s} {reasons}")

# %% [markdown]
# The endemic point without predators. Humans settle slowly (their
# turnover is decades) while the infected classes settle within months.

# %%
e7 = points[6]
print(e7.state)
print(f"residual {e7.residual:.2e}, forces of infection {e7.lam_h:.4g}, {e7.lam_v:.4g}")

# %%
for eq in points:
    if eq.exists:
        rep = classify(eq, P)
        print(f"{eq.kind}: {rep.classification:9s} max Re = {rep.max_real_part:10.4g}  predicted {rep.predicted}")

# %% [markdown]
# E2 (no mosquitoes, predator at capacity) is stable only when R0 < 1 and
# the predator keeps the mosquito threshold below 1. Lowering the biting
# rate turns it stable.

# %%
for a_v in (0.25, 0.05, 0.01):
    Q = P.replace(a_v=a_v)
    rh = routh_hurwitz_e2(Q)
    rep = classify(all_equilibria(Q)[1], Q)
    print(f"a_v={a_v:<5} gates {rh.gates} -> {rep.classification}")

# %% [markdown]
# A predator with a very low attack rate cannot suppress the mosquitoes, so
# E4 (mosquitoes and predator coexisting, no disease) appears.

# %%
Q = default_params(phi=1e-5, a_v=0.02, c_vh=0.2, c_hv=0.2)
e4 = all_equilibria(Q)[3]
rep = classify(e4, Q)
print(e4.state)
print(rep.classification, rep.notes)
