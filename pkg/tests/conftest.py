import numpy as np
import pytest

from hmcsig.montage import DEFAULT_EEG_CHANNELS
from hmcsig.signal_io import ChannelMeta, Marker, Recording


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_recording(n=1024, fs=256.0, seed=0, markers=()):
    rng = np.random.default_rng(seed)
    chans = tuple(ChannelMeta.eeg(c) for c in DEFAULT_EEG_CHANNELS) + (ChannelMeta.emg("EMG1"),)
    return Recording(fs, chans, 20 * rng.standard_normal((n, len(chans))), tuple(markers))


@pytest.fixture
def recording():
    return make_recording(markers=(Marker("rest", 0, 256), Marker("trenching", 256, 1024)))


# one summary line per acceptance criterion, filled in by tests/test_acceptance.py
CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[key])
