"""Depth-limited binary decision tree grown greedily on Gini impurity.

Splits send ``x[feature] <= threshold`` left. Candidate thresholds are
midpoints between consecutive distinct feature values. Among equally good
splits the lowest feature index wins, then the lowest threshold, which makes
training a pure function of the data order.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .features import FeatureVector
from .labels import StateKind, StateLabel


@dataclass
class Node:
    feature: int = -1
    threshold: float = 0.0
    left: "Node | None" = None
    right: "Node | None" = None
    label: str | None = None
    purity: float = 1.0
    n_samples: int = 0

    @property
    def is_leaf(self):
        return self.label is not None


@dataclass
class TreeModel:
    root: Node
    max_depth: int
    classes: tuple
    n_features: int
    seed: int = 0
    impurity: str = "gini"
    feature_names: tuple = field(default_factory=tuple)

    def depth(self):
        def d(node):
            return 0 if node.is_leaf else 1 + max(d(node.left), d(node.right))
        return d(self.root)

    def leaf_for(self, x):
        node = self.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node

    def predict(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_features:
            raise ValueError(f"model expects {self.n_features} features, got {x.shape[1]}")
        return [self.leaf_for(row).label for row in x]

    def to_dict(self):
        nodes = []

        def visit(node):
            i = len(nodes)
            nodes.append(None)
            if node.is_leaf:
                nodes[i] = {"id": i, "leaf": True, "class": node.label,
                            "purity": node.purity, "n_samples": node.n_samples}
            else:
                left = visit(node.left)
                right = visit(node.right)
                nodes[i] = {"id": i, "leaf": False, "feature": node.feature,
                            "threshold": node.threshold, "left": left, "right": right,
                            "n_samples": node.n_samples}
            return i

        visit(self.root)
        return {
            "max_depth": self.max_depth,
            "impurity": self.impurity,
            "seed": self.seed,
            "classes": list(self.classes),
            "n_features": self.n_features,
            "feature_names": list(self.feature_names),
            "nodes": nodes,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d):
        raw = d["nodes"]

        def build(i):
            n = raw[i]
            if n["leaf"]:
                return Node(label=n["class"], purity=float(n["purity"]), n_samples=int(n.get("n_samples", 0)))
            return Node(feature=int(n["feature"]), threshold=float(n["threshold"]),
                        left=build(n["left"]), right=build(n["right"]),
                        n_samples=int(n.get("n_samples", 0)))

        return cls(build(0), int(d["max_depth"]), tuple(d["classes"]), int(d["n_features"]),
                   int(d.get("seed", 0)), d.get("impurity", "gini"), tuple(d.get("feature_names", ())))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def gini(counts):
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return 1.0 - float(np.sum(p * p))


def _leaf(y_idx, classes):
    counts = np.bincount(y_idx, minlength=len(classes))
    best = int(np.argmax(counts))  # first max -> lowest class index
    return Node(label=classes[best], purity=float(counts[best] / counts.sum()), n_samples=int(counts.sum()))


def best_split(x, y_idx, n_classes):
    """``(gain, feature, threshold)`` of the best split, or ``None``."""
    n = x.shape[0]
    parent = np.bincount(y_idx, minlength=n_classes)
    parent_imp = gini(parent)
    best = None
    for j in range(x.shape[1]):
        order = np.argsort(x[:, j], kind="stable")
        xs = x[order, j]
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), y_idx[order]] = 1.0
        left = np.cumsum(onehot, axis=0)[:-1]
        right = parent - left
        nl = np.arange(1, n, dtype=float)
        nr = n - nl
        valid = xs[1:] > xs[:-1]
        if not valid.any():
            continue
        gl = 1.0 - np.sum((left / nl[:, None]) ** 2, axis=1)
        gr = 1.0 - np.sum((right / nr[:, None]) ** 2, axis=1)
        child = (nl * gl + nr * gr) / n
        gain = np.where(valid, parent_imp - child, -np.inf)
        k = int(np.argmax(gain))  # first max -> lowest threshold
        if best is None or gain[k] > best[0]:
            best = (float(gain[k]), j, float(0.5 * (xs[k] + xs[k + 1])))
    if best is None or best[0] <= 1e-15:
        return None
    return best


def train_tree(x, y, max_depth=3, seed=0, feature_names=()):
    """Fit a Gini tree on rows ``x`` with labels ``y``.

    A single-class dataset yields a single leaf. ``seed`` is recorded with
    the model; training itself involves no randomness.
    """
    if isinstance(x, (list, tuple)) and x and isinstance(x[0], FeatureVector):
        feature_names = feature_names or tuple(x[0].schema.names)
        x = np.vstack([v.values for v in x])
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = [getattr(v, "value", v) for v in y]
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    if len(y) != x.shape[0]:
        raise ValueError("labels and rows differ in length")
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    classes = tuple(sorted(set(y)))
    y_idx = np.array([classes.index(v) for v in y])

    def grow(rows, depth):
        node_y = y_idx[rows]
        if depth >= max_depth or np.unique(node_y).size == 1 or rows.size < 2:
            return _leaf(node_y, classes)
        split = best_split(x[rows], node_y, len(classes))
        if split is None:
            return _leaf(node_y, classes)
        _, j, thr = split
        go_left = x[rows, j] <= thr
        return Node(feature=j, threshold=thr, left=grow(rows[go_left], depth + 1),
                    right=grow(rows[~go_left], depth + 1), n_samples=int(rows.size))

    root = grow(np.arange(x.shape[0]), 0)
    return TreeModel(root, max_depth, classes, x.shape[1], seed, "gini", tuple(feature_names))


def tree_classify(model, fv, decision_threshold=0.5):
    """Leaf class of ``fv`` with the leaf purity as confidence."""
    x = fv.values if isinstance(fv, FeatureVector) else np.asarray(fv, dtype=float)
    if x.shape != (model.n_features,):
        raise ValueError(f"model expects {model.n_features} features, got shape {x.shape}")
    leaf = model.leaf_for(x)
    return StateLabel.decide(StateKind(leaf.label), leaf.purity, decision_threshold)


def kfold_accuracy(x, y, max_depth=3, k=5, seed=0):
    """Mean held-out accuracy over ``k`` folds of a seeded shuffle."""
    x = np.asarray(x, dtype=float)
    y = np.array([getattr(v, "value", v) for v in y])
    order = np.random.default_rng(seed).permutation(len(y))
    folds = np.array_split(order, k)
    accs = []
    for i in range(k):
        test = folds[i]
        train = np.concatenate([folds[j] for j in range(k) if j != i])
        model = train_tree(x[train], y[train], max_depth, seed)
        pred = np.array(model.predict(x[test]))
        accs.append(float(np.mean(pred == y[test])))
    return float(np.mean(accs))
