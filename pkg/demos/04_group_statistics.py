# # Expert versus novice: Mann-Whitney U
#
# With seven subjects per group, the exact null distribution of U is cheap to
# enumerate, so p-values need no normal approximation.

# %%
import numpy as np

from hmcsig.stats import group_compare, mann_whitney_u, u_counts

# %% [markdown]
# The null distribution for 7 vs 7 has 3432 equally likely rank arrangements.

# %%
counts = u_counts(7, 7)
print("arrangements:", sum(counts), " U range: 0 ..", len(counts) - 1)
r = mann_whitney_u(np.arange(8, 15), np.arange(1, 8))
print(f"complete separation: U = {r.u_statistic:g}, p = {r.p_value:.6f} ({r.method.value})")

# %% [markdown]
# U is bounded by n1 * n2 = 49 here. A reported "U = 72" at this sample size
# therefore cannot be a U statistic; a rank sum is the likely quantity.
# The paper's C3 alpha row (U = 33, p = 0.0111) is kept for reference only.

# %%
rng = np.random.default_rng(3)
expert = {("C3", "alpha", "psd"): rng.normal(8, 1.5, 7).tolist(),
          ("Cz", "beta", "cmc"): rng.normal(2, 0.5, 7).tolist()}
novice = {("C3", "alpha", "psd"): rng.normal(5, 1.5, 7).tolist(),
          ("Cz", "beta", "cmc"): rng.normal(1.8, 0.5, 7).tolist()}
for row in group_compare(expert, novice):
    print(f"{row.channel:>3} {row.band:<5} {row.metric}: medians {row.median_expert:.2f} vs "
          f"{row.median_novice:.2f}, U = {row.result.u_statistic:g}, p = {row.result.p_value:.4f}")
