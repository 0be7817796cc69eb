"""EEG/EMG spectral analysis, corticomuscular coherence and operator-state control."""

__version__ = "0.1.0"
