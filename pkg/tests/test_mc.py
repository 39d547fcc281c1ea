import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from essig import disk, mc
from essig.mc import PiecewisePath
from essig.tensor import FLOAT64, RATIONAL, exp_increment, mul, project_word, rotate


@pytest.fixture(scope="module")
def phi2():
    return disk.expected_signature_disk(2)


@pytest.mark.parametrize("z,c,r", [((0.0, 0.0), (0.0, 0.0), 1.0), ((0.5, -0.2), (1.0, 0.0), 0.7)])
def test_sample_ends_on_circle(z, c, r):
    rng = np.random.default_rng(0)
    for _ in range(20):
        path = mc.sample_bm_exit(z, c, r, 1e-3, rng)
        assert path.on_boundary
        assert abs(math.dist(path.points[-1], c) - r) <= 1e-12
        assert np.all(np.diff(path.times) > 0)
        inner = np.hypot(*(path.points[:-1] - np.array(c)).T)
        assert np.all(inner < r)


def test_sample_from_boundary():
    path = mc.sample_bm_exit((1.0, 0.0), (0.0, 0.0), 1.0, 1e-3, np.random.default_rng(0))
    assert path.points.shape == (1, 2) and path.on_boundary


def test_path_validation():
    with pytest.raises(ValueError):
        PiecewisePath(np.zeros((2, 2)), np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        mc.sample_bm_exit((0, 0), (0, 0), 1.0, 0.0, np.random.default_rng(0))


def test_single_segment():
    assert mc.signature_of_path([[0, 0], [2, 1]], 4) == exp_increment([2, 1], 4, RATIONAL)
    s = mc.signature_of_path(np.array([[0.0, 0.0], [0.5, -1.0]]), 4)
    assert np.allclose(s.flat(), exp_increment([0.5, -1.0], 4).flat(), atol=1e-15)


def test_square_loop():
    s = mc.signature_of_path([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], 2)
    assert s["12"] == 1 and s["21"] == -1
    assert s["12"] - s["21"] == 2
    assert s["1"] == 0 and s["11"] == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**31), st.data())
def test_chen_split_float(k, seed, data):
    pts = np.cumsum(np.random.default_rng(seed).standard_normal((k, 2)), axis=0)
    j = data.draw(st.integers(0, k - 1))
    whole = mc.signature_of_path(pts, 5)
    prod = mul(mc.signature_of_path(pts[: j + 1], 5), mc.signature_of_path(pts[j:], 5))
    assert np.max(np.abs(whole.flat() - prod.flat())) <= 1e-10 * max(1.0, np.max(np.abs(whole.flat())))
    p1, p2 = project_word(whole, "1"), project_word(whole, "2")
    assert p1 * p2 == pytest.approx(whole["12"] + whole["21"], abs=1e-10 * max(1, abs(p1 * p2)))


def test_reparameterisation_invariance():
    pts = np.random.default_rng(4).standard_normal((10, 2))
    a = PiecewisePath(pts, np.arange(10.0))
    b = PiecewisePath(pts, np.cumsum(np.linspace(0.1, 3, 10)))
    assert mc.signature_of_path(a, 4) == mc.signature_of_path(b, 4)
    left, right = a.split(3)
    assert np.allclose(mul(mc.signature_of_path(left, 4), mc.signature_of_path(right, 4)).flat(),
                       mc.signature_of_path(a, 4).flat(), atol=1e-12)


def test_path_dump_roundtrip(tmp_path):
    path = mc.sample_bm_exit((0.1, 0.2), (0, 0), 1.0, 1e-3, np.random.default_rng(7))
    text = mc.format_path_dump(path)
    back = mc.parse_path_dump(text)
    assert np.array_equal(back.points, path.points) and np.array_equal(back.times, path.times)
    assert len(text.splitlines()[0].split()) == 3


@pytest.fixture(scope="module")
def small_estimate():
    return mc.estimate_phi((0.0, 0.0), N=4, paths=3000, dt=1e-3, seed=11, keep_samples=True)


def test_estimate_deterministic(small_estimate):
    again = mc.estimate_phi((0.0, 0.0), N=4, paths=3000, dt=1e-3, seed=11)
    assert again.mean == small_estimate.mean and again.stderr == small_estimate.stderr
    other = mc.estimate_phi((0.0, 0.0), N=4, paths=3000, dt=1e-3, seed=12)
    assert other.mean != small_estimate.mean


def test_estimate_reproducible_per_partition():
    # the sample stream is keyed by (seed, batch index) and consumed block by block,
    # so batch_size and block are part of the reproducibility key
    kw = dict(N=3, paths=500, dt=1e-3, seed=5, batch_size=200, block=64)
    a, b = mc.estimate_phi((0.2, 0.1), **kw), mc.estimate_phi((0.2, 0.1), **kw)
    assert a.mean == b.mean and a.stderr == b.stderr
    c = mc.estimate_phi((0.2, 0.1), **{**kw, "batch_size": 100})
    assert c.mean != a.mean


def test_estimate_level1_and_identity(small_estimate):
    est = small_estimate
    assert np.all(np.abs(est.mean.levels[1]) <= 3 * est.stderr.levels[1])
    s = est.samples
    inc = est.endpoints
    half_sq = 0.5 * np.sum(inc**2, axis=1)
    # level-2 diagonal words sit at flat indices 3 and 6
    assert np.max(np.abs(s[:, 3] + s[:, 6] - half_sq)) <= 1e-6
    assert np.max(np.abs(half_sq - 0.5)) <= 1e-12
    assert est.count == 3000 and est.stderr.scalar == FLOAT64


def test_estimate_validation():
    with pytest.raises(ValueError):
        mc.estimate_phi((0, 0), paths=0)
    with pytest.raises(ValueError):
        mc.estimate_phi((0, 0), dt=-1)


def test_calibration_shapes():
    cal = mc.calibrate_bias((0.0, 0.0), N=2, paths=300, dt=1e-3, seed=1)
    assert cal.ratio == 4 and cal.paths == 300
    allow = cal.allowance(1e-3)
    assert np.all(allow.flat() >= 0)
    expected = np.abs(cal.difference.flat()) / (1 - 0.5)
    assert np.allclose(allow.flat(), expected)


def test_psi_level2():
    p = mc.psi_level2((0.3, -0.4))
    assert p["1"] == 0.3 and p["22"] == pytest.approx(0.08) and p["12"] == 0


@pytest.mark.parametrize(
    "z,eps",
    [((0.0, 0.0), 0.5), ((0.2 / math.sqrt(2), 0.2 / math.sqrt(2)), 0.1), ((0.2, 0.1), 0.3), ((0.0, 0.0), 1e-6)],
)
def test_mean_value(phi2, z, eps):
    assert mc.mean_value_check(z, eps, phi2) <= 1e-10


def test_mean_value_detects_corruption(phi2):
    from essig.polyring import Z1

    # a harmonic bump would slip through; z1^2 adds eps^2/2 to the circle average
    bad = phi2.with_coefficient("11", phi2["11"] + Z1 * Z1)
    assert mc.mean_value_check((0.0, 0.0), 0.5, bad) > 1e-3


def test_rotation_pair_small():
    a, b = mc.rotation_estimate_pair((0.3, 0.1), ((0, -1), (1, 0)), N=2, paths=4000, dt=1e-3, seed=2)
    rot = rotate(((0, -1), (1, 0)), a.mean)
    rot_se = rotate(((0, 1), (1, 0)), a.stderr)
    diff = np.abs(rot.flat() - b.mean.flat())
    assert np.all(diff <= 3 * np.hypot(rot_se.flat(), b.stderr.flat()) + 1e-12)
