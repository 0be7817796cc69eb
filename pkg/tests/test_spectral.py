import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import signal

from hmcsig.spectral import (
    ALPHA, BETA, BandSpec, WelchConfig, band_power, cross_psd, integrate_band,
    sliding_band_power, welch_psd,
)

from .oracles import trapezoid_on_fine_grid

FS = 256.0


def noise(n, seed=0):
    return np.random.default_rng(seed).standard_normal(n)


def sine(freq, seconds=60.0, fs=FS, amp=1.0):
    t = np.arange(int(seconds * fs)) / fs
    return amp * np.sin(2 * np.pi * freq * t)


def test_parseval_white_noise():
    x = noise(int(60 * FS))
    spec = welch_psd(x, WelchConfig.eighths(x.size, FS))
    assert abs(np.sum(spec.values) * spec.df_hz - 1.0) <= 0.05


def test_sinusoid_peak_and_band_power():
    x = sine(10.0)
    spec = welch_psd(x, WelchConfig(256, FS))
    assert abs(spec.freqs_hz[np.argmax(spec.values)] - 10.0) <= spec.df_hz
    assert abs(band_power(spec, ALPHA) - 0.5) <= 0.025


def test_matches_scipy_welch():
    x = noise(5000, 3)
    cfg = WelchConfig(500, FS)
    ours = welch_psd(x, cfg)
    f, ref = signal.welch(x, FS, window="hann", nperseg=500, noverlap=250, detrend=False)
    assert np.allclose(ours.freqs_hz, f)
    assert np.allclose(ours.values, ref, rtol=1e-10, atol=0)


def test_paper_resolution():
    cfg = WelchConfig(64, FS)
    assert cfg.df_hz == 4.0
    assert np.all(np.diff(cfg.freqs()) == 4.0)


def test_grid_spacing_exact():
    for n, fs in [(100, 250.0), (128, 1024.0), (37, 100.0)]:
        assert WelchConfig(n, fs).df_hz == fs / n


def test_default_segmentation_gives_15_segments():
    n = int(120 * FS)
    cfg = WelchConfig.eighths(n, FS)
    assert cfg.segment_len_samples == n // 8
    assert cfg.n_segments(n) == 15


def test_psd_invariants():
    spec = welch_psd(noise(4096, 5), WelchConfig(256, FS))
    assert spec.freqs_hz[0] == 0 and np.all(spec.values >= 0)
    assert len(spec.freqs_hz) == len(spec.values)


def test_too_short_segment_rejected():
    with pytest.raises(ValueError):
        WelchConfig(4, FS)
    with pytest.raises(ValueError):
        welch_psd(np.zeros(100), WelchConfig(200, FS))


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_amplitude_scaling(c):
    x = noise(2048, 9)
    cfg = WelchConfig(256, FS)
    a = welch_psd(c * x, cfg).values
    b = c * c * welch_psd(x, cfg).values
    assert np.max(np.abs(a - b)) <= 1e-9 * max(1.0, np.max(np.abs(b)))


def test_delay_invariance():
    x = noise(int(120 * FS) + 10, 2)
    cfg = WelchConfig(256, FS)
    a = welch_psd(x[10:], cfg).values
    b = welch_psd(x[:-10], cfg).values
    assert abs(a.sum() - b.sum()) / a.sum() <= 0.02


def test_cross_psd_self_is_auto():
    x = noise(4096, 1)
    cfg = WelchConfig(256, FS)
    pxy = cross_psd(x, x, cfg).values
    assert np.max(np.abs(pxy.imag)) <= 1e-9
    assert np.max(np.abs(pxy.real - welch_psd(x, cfg).values)) <= 1e-9


def test_cross_psd_conjugate_symmetry():
    x, y = noise(4096, 1), noise(4096, 2)
    cfg = WelchConfig(256, FS)
    assert np.allclose(cross_psd(x, y, cfg).values, np.conj(cross_psd(y, x, cfg).values),
                       rtol=0, atol=1e-12)


def test_cross_psd_delay_phase_slope():
    d = 3
    w = noise(int(60 * FS) + d, 4)
    x, y = w[d:], w[:-d]  # y lags x by d samples
    cfg = WelchConfig(256, FS)
    pxy = cross_psd(x, y, cfg)
    band = (pxy.freqs_hz > 2) & (pxy.freqs_hz < 40)
    phase = np.unwrap(np.angle(pxy.values[band]))
    slope = np.polyfit(pxy.freqs_hz[band], phase, 1)[0]
    expected = -2 * np.pi * d / FS
    assert abs(slope - expected) <= 0.02 * abs(expected)


def test_cross_psd_length_mismatch():
    with pytest.raises(ValueError):
        cross_psd(np.zeros(512), np.zeros(513), WelchConfig(64, FS))


def test_band_power_additivity():
    spec = welch_psd(noise(8192, 6), WelchConfig(200, FS))
    total = band_power(spec, BandSpec("x", 8, 30))
    parts = band_power(spec, BandSpec("a", 8, 12)) + band_power(spec, BandSpec("b", 12, 30))
    assert abs(total - parts) <= 1e-9


def test_integrate_band_matches_dense_quadrature():
    spec = welch_psd(noise(8192, 7), WelchConfig(200, FS))
    ours = integrate_band(spec.freqs_hz, spec.values, 8.3, 29.1)
    ref = trapezoid_on_fine_grid(spec.freqs_hz, spec.values, 8.3, 29.1)
    assert abs(ours - ref) <= 1e-6 * abs(ref)


def test_band_outside_grid():
    spec = welch_psd(noise(1024), WelchConfig(64, FS))
    with pytest.raises(ValueError):
        band_power(spec, BandSpec("x", 100, 200))


@pytest.mark.parametrize("text,lo,hi", [("beta", 15, 30), ("15:30", 15, 30), ("8.5:12", 8.5, 12)])
def test_band_parse(text, lo, hi):
    b = BandSpec.parse(text)
    assert (b.lo_hz, b.hi_hz) == (lo, hi)


@pytest.mark.parametrize("text", ["", "delta", "12:8", "a:b", "-1:4"])
def test_band_parse_rejects(text):
    with pytest.raises(ValueError):
        BandSpec.parse(text)


def test_sliding_stationary_tone():
    _, p = sliding_band_power(sine(10.0, 10.0), ALPHA, FS)
    assert p.std() / p.mean() <= 0.10


def test_sliding_gated_tone():
    x = sine(10.0, 6.0)
    x[: int(2 * FS)] = 0.0
    t, p = sliding_band_power(x, ALPHA, FS)
    plateau = np.median(p[t > 3.0])
    # window start time plus half a window marks the window centre
    centre = t + 0.125
    cross = centre[np.argmax(p >= 0.5 * plateau)]
    assert abs(cross - 2.0) <= 0.25


def test_sliding_zero_signal():
    _, p = sliding_band_power(np.zeros(1024), BETA, FS)
    assert np.all(p == 0)


def test_sliding_unresolvable_band():
    with pytest.raises(ValueError):
        sliding_band_power(np.zeros(1024), BandSpec("narrow", 10, 11), FS)


def test_sliding_grid_matches_epochs():
    t, p = sliding_band_power(np.zeros(256), BETA, FS)
    assert len(t) == 39 and t[1] == 5 / FS
