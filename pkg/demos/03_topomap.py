# # Scalp maps from eight electrodes
#
# Electrode values are interpolated over the sphere with spherical splines
# (order 4, 20 Legendre terms) and drawn on an azimuthal-equidistant disk.

# %%
import sys
from pathlib import Path

import numpy as np

from hmcsig import montage
from hmcsig.topomap import evaluate_field, fit_electrodes, minmax_normalize, render_map

out = Path(sys.argv[1] if len(sys.argv) > 1 else "topomap_demo")
out.mkdir(exist_ok=True)

# %% [markdown]
# Alpha power for two illustrative groups. Maps share one min-max scale so
# colours compare across groups.

# %%
expert = dict(zip(montage.DEFAULT_EEG_CHANNELS, [6.1, 7.4, 6.8, 6.9, 8.2, 8.8, 7.9, 9.5]))
novice = dict(zip(montage.DEFAULT_EEG_CHANNELS, [4.0, 4.6, 4.4, 4.2, 5.1, 5.0, 4.8, 5.6]))
scaled = minmax_normalize({"expert": expert, "novice": novice})

for group, values in scaled.items():
    field = evaluate_field(fit_electrodes(values), 128)
    render_map(field, out / f"alpha_{group}.ppm", (0.0, 1.0))
    inside = field.values[field.mask]
    print(f"{group}: field range [{inside.min():.2f}, {inside.max():.2f}] -> {out / f'alpha_{group}.ppm'}")

# %% [markdown]
# With no smoothing the surface passes through every electrode value.

# %%
exact = fit_electrodes(expert, lam=0.0)
print("max error at electrodes:", np.max(np.abs(exact.evaluate(exact.positions) - list(expert.values()))))
