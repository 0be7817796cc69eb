import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from hmcsig import montage
from hmcsig.errors import SingularSystemError
from hmcsig.topomap import (
    colormap, evaluate_field, fit_electrodes, minmax_normalize, project, read_ppm,
    render_image, render_map, spline_fit, spline_kernel, unproject, write_grid_csv,
)

NAMES = montage.DEFAULT_EEG_CHANNELS
POS = np.array([montage.position(n) for n in NAMES])


def random_values(seed):
    return np.random.default_rng(seed).normal(0, 3, len(NAMES))


def test_kernel_tail_small():
    # terms beyond the truncation contribute less than 1e-8 at cos = 1
    n = np.arange(21, 2000, dtype=float)
    assert np.sum((2 * n + 1) / (n ** 4 * (n + 1) ** 4)) / (4 * np.pi) < 1e-8
    assert np.isfinite(spline_kernel(np.linspace(-1, 1, 11))).all()


@pytest.mark.parametrize("seed", range(5))
def test_interpolates_electrodes(seed):
    v = random_values(seed)
    model = spline_fit(POS, v, lam=0.0)
    assert np.max(np.abs(model.evaluate(POS) - v)) <= 1e-6


def test_smoothing_leaves_small_residual():
    v = random_values(9)
    model = spline_fit(POS, v)
    fitted = model.evaluate(POS)
    assert np.max(np.abs(fitted - v)) > 0
    assert np.corrcoef(fitted, v)[0, 1] > 0.9


def test_constant_field():
    field = evaluate_field(spline_fit(POS, np.full(8, 7.0)), 32)
    assert np.max(np.abs(field.values[field.mask] - 7.0)) <= 1e-9


@pytest.mark.parametrize("c", [-4.0, 0.5, 1e3])
def test_affine_equivariance(c):
    v = random_values(3)
    a = evaluate_field(spline_fit(POS, v), 32)
    b = evaluate_field(spline_fit(POS, v + c), 32)
    assert np.max(np.abs(b.values[a.mask] - a.values[a.mask] - c)) <= 1e-6 * max(1, abs(c))


def test_mirror_symmetry():
    base = dict(zip(NAMES, random_values(4)))
    sym = {n: 0.5 * (base[n] + base[montage.mirror_name(n)]) for n in NAMES}
    field = evaluate_field(fit_electrodes(sym), 48)
    mirrored = field.values[:, ::-1]
    assert np.max(np.abs(field.values[field.mask] - mirrored[field.mask])) <= 1e-6


def test_mirrored_input_gives_mirrored_field():
    base = dict(zip(NAMES, random_values(5)))
    flipped = {n: base[montage.mirror_name(n)] for n in NAMES}
    a = evaluate_field(fit_electrodes(base), 48)
    b = evaluate_field(fit_electrodes(flipped), 48)
    assert np.max(np.abs(a.values[:, ::-1][a.mask] - b.values[a.mask])) <= 1e-6


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_rotation_invariance(seed):
    rot = Rotation.random(random_state=seed).as_matrix()
    v = random_values(seed % 1000)
    pts = unproject(np.random.default_rng(seed).uniform(-0.7, 0.7, (50, 2)))
    a = spline_fit(POS, v).evaluate(pts)
    b = spline_fit(POS @ rot.T, v).evaluate(pts @ rot.T)
    assert np.max(np.abs(a - b)) <= 1e-6


def test_resolution_independence():
    model = spline_fit(POS, random_values(6))
    lo, hi = evaluate_field(model, 65), evaluate_field(model, 129)
    # odd resolutions share every other grid point
    shared = hi.values[::2, ::2]
    assert np.allclose(hi.u[::2], lo.u, atol=1e-15)
    m = lo.mask & hi.mask[::2, ::2]
    assert np.max(np.abs(shared[m] - lo.values[m])) <= 1e-9


def test_gradient_finite_inside_head():
    for seed in range(5):
        f = evaluate_field(spline_fit(POS, random_values(seed)), 64)
        gy, gx = np.gradient(f.values)
        inner = f.mask & np.roll(f.mask, 1, 0) & np.roll(f.mask, -1, 0) & np.roll(f.mask, 1, 1) & np.roll(f.mask, -1, 1)
        assert np.isfinite(np.hypot(gx, gy)[inner]).all()


def test_mask_is_unit_disk():
    f = evaluate_field(spline_fit(POS, random_values(0)), 32)
    uu, vv = np.meshgrid(f.u, f.v)
    assert np.array_equal(f.mask, np.hypot(uu, vv) <= 1.0)
    assert np.isnan(f.values[~f.mask]).all()


def test_projection_round_trip():
    pts = POS
    assert np.allclose(unproject(project(pts)), pts, atol=1e-12)
    assert np.allclose(project(np.array([0.0, 0.0, 1.0])), [0, 0])


def test_fit_errors():
    with pytest.raises(SingularSystemError):
        spline_fit(np.vstack([POS[:3], POS[:1]]), np.ones(4))
    with pytest.raises(ValueError):
        spline_fit(2 * POS, np.ones(8))
    with pytest.raises(ValueError):
        spline_fit(POS[:2], np.ones(2))
    with pytest.raises(ValueError):
        evaluate_field(spline_fit(POS, np.ones(8)), 8)
    with pytest.raises(ValueError):
        fit_electrodes({"Xx9": 1.0, "Cz": 2.0, "Pz": 3.0})


def test_midpoint_render_uniform():
    f = evaluate_field(spline_fit(POS, np.full(8, 0.5)), 32)
    img = render_image(f, 0.0, 1.0, electrodes=False, outline=False)
    inside = img[f.mask[::-1]]
    assert (inside == (247, 247, 247)).all()


def test_render_clamps():
    f = evaluate_field(spline_fit(POS, np.full(8, 50.0)), 32)
    img = render_image(f, 0.0, 1.0, electrodes=False, outline=False)
    assert (img[f.mask[::-1]] == colormap(1.0)).all()
    assert (render_image(evaluate_field(spline_fit(POS, np.full(8, -50.0)), 32), 0, 1,
                         electrodes=False, outline=False)[f.mask[::-1]] == colormap(0.0)).all()


def test_render_bad_scale():
    f = evaluate_field(spline_fit(POS, np.ones(8)), 16)
    with pytest.raises(ValueError):
        render_image(f, 1.0, 1.0)


def test_render_deterministic(tmp_path):
    f = evaluate_field(fit_electrodes(dict(zip(NAMES, random_values(7)))), 64)
    render_map(f, tmp_path / "a.ppm", (-5, 5))
    render_map(f, tmp_path / "b.ppm", (-5, 5))
    a, b = (tmp_path / "a.ppm").read_bytes(), (tmp_path / "b.ppm").read_bytes()
    assert a == b and a.startswith(b"P6\n64 64\n255\n")
    assert read_ppm(tmp_path / "a.ppm").shape == (64, 64, 3)


def test_render_unwritable(tmp_path):
    f = evaluate_field(spline_fit(POS, np.ones(8)), 16)
    with pytest.raises(OSError):
        render_map(f, tmp_path / "missing" / "x.ppm", (0, 1))


def test_nose_at_top():
    # a frontal bump should land in the upper half of the image
    vals = {n: (10.0 if n == "Fpz" else 0.0) for n in NAMES}
    f = evaluate_field(fit_electrodes(vals), 64)
    img = render_image(f, -10, 10, electrodes=False, outline=False)
    red = (img[..., 0].astype(int) - img[..., 2].astype(int)) > 100
    rows = np.nonzero(red)[0]
    assert rows.size and rows.mean() < 32


def test_grid_csv(tmp_path):
    f = evaluate_field(spline_fit(POS, np.ones(8)), 16)
    write_grid_csv(f, tmp_path / "g.csv")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert len(lines) == 16 and all(len(l.split(",")) == 16 for l in lines)
    assert lines[0].split(",")[0] == ""


def test_minmax_joint():
    out = minmax_normalize({"expert": {"Cz": 2.0, "Pz": 4.0}, "novice": {"Cz": 6.0, "Pz": 2.0}})
    assert out == {"expert": {"Cz": 0.0, "Pz": 0.5}, "novice": {"Cz": 1.0, "Pz": 0.0}}
