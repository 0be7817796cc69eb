"""Idealised 10-20 electrode positions on the unit sphere.

Axes: x towards the right ear, y towards the nose, z through the vertex (Cz).
Positions follow the geometric 10-20 construction: the nasion-inion arc is
split into 10%/20% steps of 180 degrees, so Fz/Pz/C3/C4 sit 36 degrees from
the vertex and Fpz 72 degrees. F3 is the great-circle midpoint of Fz and F7;
F4 is its mirror image, which keeps the montage exactly left/right symmetric.
"""

import numpy as np

DEFAULT_EEG_CHANNELS = ("Fpz", "Fz", "F3", "F4", "C3", "Cz", "C4", "Pz")


def _point(polar_deg, azimuth_deg):
    # azimuth measured from +x (right ear) towards +y (nose)
    th, ph = np.deg2rad(polar_deg), np.deg2rad(azimuth_deg)
    p = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
    # cos(90 deg) and friends are not exactly zero in floating point
    p[np.abs(p) < 1e-15] = 0.0
    return p


def _midpoint(a, b):
    m = a + b
    return m / np.linalg.norm(m)


def _build():
    pos = {
        "Cz": np.array([0.0, 0.0, 1.0]),
        "Fz": _point(36, 90),
        "Pz": _point(36, 270),
        "C3": _point(36, 180),
        "C4": _point(36, 0),
        "Fpz": _point(72, 90),
        "Oz": _point(72, 270),
        "T7": _point(90, 180),
        "T8": _point(90, 0),
        "F7": _point(72, 90 + 54),
        "F8": _point(72, 90 - 54),
        "P7": _point(72, 270 - 54),
        "P8": _point(72, 270 + 54),
    }
    pos["F3"] = _midpoint(pos["Fz"], pos["F7"])
    pos["P3"] = _midpoint(pos["Pz"], pos["P7"])
    for left, right in (("F3", "F4"), ("P3", "P4")):
        x, y, z = pos[left]
        pos[right] = np.array([-x, y, z])
    return {name: tuple(float(c) for c in p) for name, p in pos.items()}


STANDARD_POSITIONS = _build()


def position(name):
    """Unit-sphere coordinates of a standard electrode, or ``None``."""
    return STANDARD_POSITIONS.get(name)


def mirror_name(name):
    """Left/right counterpart of an electrode name (midline maps to itself)."""
    if name.endswith("z"):
        return name
    prefix, digits = name.rstrip("0123456789"), name[len(name.rstrip("0123456789")):]
    if not digits:
        return name
    n = int(digits)
    return f"{prefix}{n + 1 if n % 2 else n - 1}"
