import enum
from dataclasses import dataclass

DEFAULT_DECISION_THRESHOLD = 0.5


class StateKind(str, enum.Enum):
    INTUITIVE = "Intuitive"
    INTELLECTUAL = "Intellectual"
    UNKNOWN = "Unknown"


class AssistanceMode(str, enum.Enum):
    MINIMAL = "Minimal"
    DECISION_SUPPORT = "DecisionSupport"


@dataclass(frozen=True)
class StateLabel:
    kind: StateKind
    confidence: float

    def __post_init__(self):
        object.__setattr__(self, "kind", StateKind(self.kind))
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")

    @classmethod
    def decide(cls, kind, confidence, threshold=DEFAULT_DECISION_THRESHOLD):
        """Label that falls back to Unknown when confidence is below ``threshold``."""
        if confidence < threshold:
            return cls(StateKind.UNKNOWN, confidence)
        return cls(kind, confidence)
