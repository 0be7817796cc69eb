"""Scalp maps by spherical-spline interpolation.

The interpolant is

    V(r) = c0 + sum_i c_i g(r . r_i),
    g(x) = 1/(4 pi) sum_{n=1..N} (2n+1) / (n^m (n+1)^m) P_n(x),

with the coefficients solving [G + lambda I, 1; 1^T, 0] [c; c0] = [v; 0].
Maps are drawn in an azimuthal-equidistant projection centred on the vertex:
a point at polar angle theta lands at radius theta / (pi/2), so the equator
(the head outline) is the unit circle.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre

from .errors import SingularSystemError

DEFAULT_ORDER = 4
DEFAULT_TERMS = 20
DEFAULT_LAMBDA = 1e-5


def _kernel_coefs(order_m, n_terms):
    n = np.arange(1, n_terms + 1, dtype=float)
    c = np.zeros(n_terms + 1)
    c[1:] = (2 * n + 1) / (n ** order_m * (n + 1) ** order_m) / (4 * np.pi)
    return c


def spline_kernel(cos_angle, order_m=DEFAULT_ORDER, n_terms=DEFAULT_TERMS):
    """g(cos theta) evaluated elementwise."""
    x = np.clip(np.asarray(cos_angle, dtype=float), -1.0, 1.0)
    return legendre.legval(x, _kernel_coefs(order_m, n_terms))


@dataclass(frozen=True, eq=False)
class SplineModel:
    positions: np.ndarray
    weights: np.ndarray
    offset: float
    order_m: int
    n_terms: int
    names: tuple = ()

    def evaluate(self, points):
        """Interpolated value at unit-sphere points (shape (..., 3))."""
        p = np.asarray(points, dtype=float)
        g = spline_kernel(p @ self.positions.T, self.order_m, self.n_terms)
        return self.offset + g @ self.weights


def spline_fit(positions, values, order_m=DEFAULT_ORDER, n_terms=DEFAULT_TERMS,
               lam=DEFAULT_LAMBDA, names=()):
    """Fit spline coefficients to electrode values.

    ``lam=0`` interpolates exactly; a small positive ``lam`` smooths.
    """
    pos = np.asarray(positions, dtype=float)
    v = np.asarray(values, dtype=float).ravel()
    if pos.ndim != 2 or pos.shape[1] != 3:
        raise ValueError("positions must have shape (n, 3)")
    n = pos.shape[0]
    if n < 3:
        raise ValueError("need at least 3 electrodes")
    if v.size != n:
        raise ValueError(f"{v.size} values for {n} electrodes")
    if not np.allclose(np.sum(pos * pos, axis=1), 1.0, atol=1e-6):
        raise ValueError("electrode positions must lie on the unit sphere")
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    d2 = np.sum((pos[:, None, :] - pos[None, :, :]) ** 2, axis=-1)
    if np.any(d2[np.triu_indices(n, 1)] < 1e-12):
        raise SingularSystemError("duplicate electrode positions")
    a = np.zeros((n + 1, n + 1))
    a[:n, :n] = spline_kernel(pos @ pos.T, order_m, n_terms) + lam * np.eye(n)
    a[:n, n] = 1.0
    a[n, :n] = 1.0
    rhs = np.concatenate([v, [0.0]])
    try:
        sol = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from None
    return SplineModel(pos, sol[:n], float(sol[n]), order_m, n_terms, tuple(names))


def fit_electrodes(values_by_name, positions_by_name=None, **kwargs):
    """:func:`spline_fit` keyed by electrode name, defaulting to 10-20 positions."""
    from . import montage

    names = list(values_by_name)
    table = positions_by_name or {}
    pos = []
    for n in names:
        p = table.get(n) or montage.position(n)
        if p is None:
            raise ValueError(f"no position for electrode {n!r}")
        pos.append(p)
    return spline_fit(pos, [values_by_name[n] for n in names], names=names, **kwargs)


def project(points):
    """Unit-sphere points -> 2-D azimuthal-equidistant coordinates."""
    p = np.asarray(points, dtype=float)
    theta = np.arccos(np.clip(p[..., 2], -1.0, 1.0))
    rho = theta / (np.pi / 2)
    phi = np.arctan2(p[..., 1], p[..., 0])
    return np.stack([rho * np.cos(phi), rho * np.sin(phi)], axis=-1)


def unproject(uv):
    """Inverse of :func:`project` for radii in [0, 2)."""
    uv = np.asarray(uv, dtype=float)
    u, v = uv[..., 0], uv[..., 1]
    rho = np.hypot(u, v)
    theta = rho * (np.pi / 2)
    phi = np.arctan2(v, u)
    s = np.sin(theta)
    return np.stack([s * np.cos(phi), s * np.sin(phi), np.cos(theta)], axis=-1)


def grid_coords(resolution):
    """Cell coordinates spanning [-1, 1] in both axes."""
    return np.linspace(-1.0, 1.0, resolution)


@dataclass(frozen=True, eq=False)
class ScalpField:
    """Values on an R x R grid; row 0 is the back of the head (v = -1)."""

    u: np.ndarray
    v: np.ndarray
    values: np.ndarray
    mask: np.ndarray
    electrodes: np.ndarray = None

    @property
    def resolution(self):
        return self.values.shape[0]


def evaluate_field(model, resolution=64):
    """Evaluate a fitted spline on the projected upper hemisphere."""
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    c = grid_coords(resolution)
    uu, vv = np.meshgrid(c, c)
    mask = np.hypot(uu, vv) <= 1.0
    vals = np.full(uu.shape, np.nan)
    pts = unproject(np.stack([uu[mask], vv[mask]], axis=-1))
    vals[mask] = model.evaluate(pts)
    return ScalpField(c, c, vals, mask, project(model.positions))


def write_grid_csv(field, path):
    """R rows x R columns, masked cells left empty."""
    lines = []
    for row, m in zip(field.values, field.mask):
        lines.append(",".join(repr(float(x)) if ok else "" for x, ok in zip(row, m)))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# blue -> white -> red
_ANCHORS = np.array([
    [33, 102, 172],
    [146, 197, 222],
    [247, 247, 247],
    [244, 165, 130],
    [178, 24, 43],
], dtype=float)
BACKGROUND = (255, 255, 255)
OUTLINE = (0, 0, 0)
MARKER = (0, 0, 0)


def colormap(t):
    """Map t in [0, 1] to RGB bytes by linear interpolation between anchors."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    x = t * (len(_ANCHORS) - 1)
    i = np.minimum(np.floor(x).astype(int), len(_ANCHORS) - 2)
    f = (x - i)[..., None]
    rgb = _ANCHORS[i] * (1 - f) + _ANCHORS[i + 1] * f
    return np.rint(rgb).astype(np.uint8)


def render_image(field, vmin, vmax, electrodes=True, outline=True):
    """RGB array (R x R x 3, uint8) for a field; values outside the scale are clamped."""
    if not vmin < vmax:
        raise ValueError("color scale needs min < max")
    r = field.resolution
    t = (np.nan_to_num(field.values, nan=vmin) - vmin) / (vmax - vmin)
    img = colormap(t)
    img[~field.mask] = BACKGROUND
    # image row 0 is the top (nose side), so flip the v axis
    img = img[::-1].copy()
    if outline:
        c = grid_coords(r)
        uu, vv = np.meshgrid(c, c[::-1])
        rho = np.hypot(uu, vv)
        step = 2.0 / (r - 1)
        img[np.abs(rho - 1.0) < 0.5 * step] = OUTLINE
    if electrodes and field.electrodes is not None:
        for u, v in field.electrodes:
            col = int(round((u + 1.0) / 2.0 * (r - 1)))
            row = int(round((1.0 - v) / 2.0 * (r - 1)))
            img[max(row - 1, 0):row + 2, max(col - 1, 0):col + 2] = MARKER
    return img


def write_ppm(img, path):
    """Binary portable pixmap (P6)."""
    h, w, _ = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def read_ppm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


def render_map(field, out_path, color_scale, electrodes=True, outline=True):
    """Render ``field`` to a PPM with a linear colour scale ``(min, max)``."""
    vmin, vmax = color_scale
    img = render_image(field, vmin, vmax, electrodes=electrodes, outline=outline)
    write_ppm(img, out_path)
    return img


def minmax_normalize(values_by_group):
    """Scale several {electrode: value} maps jointly into [0, 1].

    The min and max run over all groups together so maps stay comparable.
    """
    allv = np.array([v for g in values_by_group.values() for v in g.values()], dtype=float)
    lo, hi = allv.min(), allv.max()
    span = hi - lo if hi > lo else 1.0
    return {k: {e: (float(v) - lo) / span for e, v in g.items()} for k, g in values_by_group.items()}
