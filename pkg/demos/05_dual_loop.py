# # Dual-loop assistance on a synthetic stream
#
# Thirty seconds of intuitive-profile features are followed by thirty seconds
# of intellectual-profile features, one vector every 20 ms. A rule classifier
# labels each window and the controller switches assistance mode only after
# five consecutive contradicting labels.

# %%
import numpy as np

from hmcsig.state_engine import (
    FeatureSchema, FeatureStream, SimulationConfig, StateKind, fit_baseline, kfold_accuracy,
    rule_accuracy, run_simulation, train_tree,
)
from hmcsig.synth import gen_baseline_features, gen_labeled_features, gen_state_stream

schema = FeatureSchema.default()
baseline = fit_baseline(gen_baseline_features(200, seed=9))

# %%
t, x = gen_state_stream([(StateKind.INTUITIVE, 30.0), (StateKind.INTELLECTUAL, 30.0)], 0.02, 4.0, seed=9)
log = run_simulation(FeatureStream(t, x, schema), SimulationConfig(hysteresis_k=5, baseline=baseline))
for idx, when, a, b in log.switches():
    print(f"switch {a.value} -> {b.value} at window {idx} (t = {when:.2f} s)")
print("windows over the real-time budget:", log.overruns)

# %% [markdown]
# Labels flipping every window never build a streak, so the mode holds.

# %%
t2, x2 = gen_state_stream([(StateKind.INTUITIVE, 0.02), (StateKind.INTELLECTUAL, 0.02)] * 250, 0.02, 4.0, 10)
alt = run_simulation(FeatureStream(t2, x2, schema), SimulationConfig(hysteresis_k=5, baseline=baseline))
print("switches on the alternating stream:", len(alt.switches()))

# %% [markdown]
# Classifier quality against separation between the two state profiles.

# %%
for sep in (0.0, 1.0, 2.0, 4.0):
    xs, ys = gen_labeled_features(200, sep, seed=1)
    acc, decided = rule_accuracy(xs, ys, baseline)
    print(f"separation {sep}: rule {acc:.3f} on {decided:.0%} decided, "
          f"depth-3 tree 5-fold {kfold_accuracy(xs, ys, 3, 5, seed=1):.3f}")

# %%
model = train_tree(*gen_labeled_features(200, 4.0, seed=1), max_depth=3, feature_names=schema.names)
print(model.to_json()[:300], "...")
