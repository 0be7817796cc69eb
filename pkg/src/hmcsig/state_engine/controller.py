"""Dual-loop assistance controller with hysteresis.

Intuitive labels pull towards minimal assistance, intellectual labels towards
decision support. The mode only changes after ``hysteresis_k`` consecutive
labels that contradict it; a label agreeing with the current mode clears the
streak, and Unknown labels leave everything untouched.
"""

from dataclasses import dataclass, replace

from .labels import AssistanceMode, StateKind

DEFAULT_HYSTERESIS_K = 5

_TARGET = {
    StateKind.INTUITIVE: AssistanceMode.MINIMAL,
    StateKind.INTELLECTUAL: AssistanceMode.DECISION_SUPPORT,
}


@dataclass(frozen=True)
class ControllerState:
    current_mode: AssistanceMode = AssistanceMode.MINIMAL
    streak: int = 0
    hysteresis_k: int = DEFAULT_HYSTERESIS_K

    def __post_init__(self):
        object.__setattr__(self, "current_mode", AssistanceMode(self.current_mode))
        if self.hysteresis_k < 1:
            raise ValueError("hysteresis_k must be at least 1")
        if not 0 <= self.streak < self.hysteresis_k:
            raise ValueError("streak must lie in [0, hysteresis_k)")


def step_controller(state, label):
    """Advance the controller by one label; returns ``(new_state, mode)``."""
    kind = StateKind(getattr(label, "kind", label))
    target = _TARGET.get(kind)
    if target is None:
        return state, state.current_mode
    if target is state.current_mode:
        new = replace(state, streak=0)
    elif state.streak + 1 >= state.hysteresis_k:
        new = replace(state, current_mode=target, streak=0)
    else:
        new = replace(state, streak=state.streak + 1)
    return new, new.current_mode


def run_controller(labels, state=None):
    """Mode after each label of a sequence."""
    state = state or ControllerState()
    modes = []
    for lab in labels:
        state, mode = step_controller(state, lab)
        modes.append(mode)
    return modes, state
