"""Operator-state features, classifiers and the dual-loop controller."""

from .controller import ControllerState, run_controller, step_controller
from .features import FeatureConfig, FeatureSchema, FeatureVector, extract_features
from .labels import AssistanceMode, StateKind, StateLabel
from .rules import Baseline, fit_baseline, rule_accuracy, rule_classify, rule_classify_many
from .simulation import FeatureStream, SimulationConfig, SimulationLog, run_simulation
from .tree import TreeModel, kfold_accuracy, train_tree, tree_classify

__all__ = [
    "AssistanceMode", "Baseline", "ControllerState", "FeatureConfig", "FeatureSchema",
    "FeatureStream", "FeatureVector", "SimulationConfig", "SimulationLog", "StateKind",
    "StateLabel", "TreeModel", "extract_features", "fit_baseline", "kfold_accuracy",
    "rule_accuracy", "rule_classify", "rule_classify_many", "run_controller", "run_simulation",
    "step_controller", "train_tree", "tree_classify",
]
