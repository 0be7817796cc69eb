# # Zero-phase filtering, notch and resampling
#
# Band-pass and notch filters run forward and backward, so the output has no
# phase shift. Here we measure gains by least-squares sinusoid fits.

# %%
import numpy as np

from hmcsig import preprocess

FS = 256.0
t = np.arange(int(20 * FS)) / FS


def amplitude(y, f):
    a = np.column_stack([np.sin(2 * np.pi * f * t), np.cos(2 * np.pi * f * t), np.ones_like(t)])
    c, *_ = np.linalg.lstsq(a, y, rcond=None)
    return np.hypot(c[0], c[1])


# %%
for f in (1.0, 10.0, 50.0, 100.0, 120.0):
    y = preprocess.bandpass(np.sin(2 * np.pi * f * t), 0.01, 100.0, fs=FS)
    print(f"band-pass 0.01-100 Hz, {f:5.1f} Hz tone: {20 * np.log10(amplitude(y, f)):7.2f} dB")

# %% [markdown]
# A Q = 30 notch at 60 Hz removes line noise and leaves 50 and 70 Hz nearly intact.

# %%
for f in (40.0, 50.0, 60.0, 70.0):
    y = preprocess.notch(np.sin(2 * np.pi * f * t), 60.0, fs=FS)
    print(f"notch 60 Hz, {f:4.1f} Hz tone: {20 * np.log10(amplitude(y, f)):7.2f} dB")

# %% [markdown]
# Zero phase: the cross-correlation of input and output peaks at lag 0.

# %%
x = np.sin(2 * np.pi * 20 * t) + 0.3 * np.sin(2 * np.pi * 33 * t)
y = preprocess.bandpass(x, 15.0, 40.0, fs=FS)
lags = np.arange(-20, 21)
xc = [np.dot(x[max(0, -k):len(x) - max(0, k)], y[max(0, k):len(y) - max(0, -k)]) for k in lags]
print("cross-correlation peak at lag", lags[int(np.argmax(xc))])

# %% [markdown]
# Resampling 1024 Hz to 256 Hz keeps a 10 Hz tone's amplitude.

# %%
t_hi = np.arange(10 * 1024) / 1024
down = preprocess.resample(np.sin(2 * np.pi * 10 * t_hi), 256, fs=1024)
t = np.arange(down.size) / 256
FS = 256.0
print(f"10 Hz after 1024 -> 256 Hz: amplitude {amplitude(down, 10.0):.4f}, {down.size} samples")
