"""End-to-end acceptance criteria, one PASS/FAIL line each.

Tolerances are fixed here and not tuned after the fact.  The Monte Carlo
seed was chosen before any run and is not to be changed to make a
comparison pass.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; the
lines are repeated in pytest's terminal summary.
"""

import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reference_tables import expected_level  # noqa: E402
from essig import checks, disk, interval, lattice, mc  # noqa: E402
from essig.cli import main as cli_main  # noqa: E402
from essig.tensor import FLOAT64, dilate  # noqa: E402

SEED = 7
MC_PATHS = 20_000
MC_DT = 1e-4
RICHARDSON_RATIO = 4
IDENTITY_TOL = 1e-6
RESULTS: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS.append(line)
    print(line)


def test_1_degree4_table(tmp_path):
    disk._disk_levels.cache_clear()
    out = tmp_path / "disk4.json"
    t0 = time.perf_counter()
    code = cli_main(["disk", "-N", "4", "--scalar", "rational", "-o", str(out)])
    elapsed = time.perf_counter() - t0
    import json

    pt = disk.PolyTensor.from_dict(json.loads(out.read_text())["expected_signature"])
    mismatched = [w for n in (2, 3, 4) for w, p in expected_level(n).items() if pt[w] != p]
    ok = code == 0 and not mismatched and elapsed < 5.0
    report(1, ok, f"{2**2 + 2**3 + 2**4} words, {len(mismatched)} mismatched, {elapsed:.2f}s (< 5s)")
    assert ok


def test_2_residual_n8():
    disk._disk_levels.cache_clear()
    t0 = time.perf_counter()
    report_ = checks.residual_suite(8)
    elapsed = time.perf_counter() - t0
    ok = report_.passed and len(report_.items) == 7 and elapsed < 60.0
    report(2, ok, f"levels 2..8 exact ({sum(2**n for n in range(2, 9))} words), {elapsed:.2f}s (< 60s)")
    assert ok


def test_3_boundary_factor():
    pt = disk.expected_signature_disk(8)
    from essig.polyring import DISK_FACTOR, divide_exact

    worst = 0
    ok = True
    for n in range(2, 9):
        for p in pt.levels[n]:
            q = divide_exact(p, DISK_FACTOR)
            ok = ok and DISK_FACTOR * q == p and (q.is_zero() or q.degree <= n - 2)
            if not q.is_zero():
                worst = max(worst, q.degree - (n - 2))
    report(3, ok, f"all coefficients of levels 2..8 divisible, max(deg q - (n-2)) = {worst}")
    assert ok


def test_4_interval_oracle():
    ode = interval.ode_recursion(10)
    bad = [n for n in range(2, 11) if not ode[n] == interval.closed_form_level(n) == interval.two_point_enumeration(n)]
    report(4, not bad, f"levels 2..10 three-way exact, disagreements at {bad or 'none'}")
    assert not bad


def test_5_chen_shuffle():
    r = checks.chen_suite(paths=100, N=5, seed=SEED, max_segments=50, tol=1e-10)
    detail = "; ".join(f"{i.name}: {i.detail}" for i in r.items)
    report(5, r.passed, detail)
    assert r.passed


@pytest.mark.slow
def test_6_mc_versus_exact():
    pt = disk.expected_signature_disk(4)
    t0 = time.perf_counter()
    lines, ok = [], True
    for z in ((0.0, 0.0), (0.3, 0.4)):
        est = mc.estimate_phi(z, N=4, paths=MC_PATHS, dt=MC_DT, seed=SEED, keep_samples=True)
        # Richardson calibration of the discrete-monitoring bias: coarse (dt) and
        # fine (dt/4) paths share increments, c = E[S_dt - S_fine] / (sqrt(dt)(1 - 1/2)),
        # allowance |c| sqrt(dt); independent stream from the estimate above
        cal = mc.calibrate_bias(z, N=4, paths=MC_PATHS, dt=MC_DT, seed=SEED + 1, ratio=RICHARDSON_RATIO)
        exact = disk.evaluate_phi(pt, z, FLOAT64).flat()
        band = 3 * est.stderr.flat() + cal.allowance(MC_DT).flat()
        err = np.abs(est.mean.flat() - exact)
        inside = err <= band
        s = est.samples
        half_sq = 0.5 * np.sum((est.endpoints - np.array(z)) ** 2, axis=1)
        ident = float(np.max(np.abs(s[:, 3] + s[:, 6] - half_sq)))
        ok = ok and bool(inside.all()) and ident <= IDENTITY_TOL
        worst = int(np.argmax(err / np.where(band > 0, band, np.inf)))
        lines.append(
            f"z={z}: {int(inside.sum())}/{inside.size} in band, worst ratio {err[worst] / max(band[worst], 1e-300):.2f}, "
            f"max allowance {float(np.max(cal.allowance(MC_DT).flat())):.1e}, identity {ident:.1e}"
        )
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 600
    report(6, ok, "; ".join(lines) + f"; {elapsed:.0f}s (< 600s)")
    assert ok


def test_7_lattice():
    field = lattice.expected_signature_lattice(lattice.LatticeDomain(1, [(0,)]), 4)
    v = field[(0,)]
    one_step = v["11"] == Fraction(1, 2) and v["1111"] == Fraction(1, 24) and v["1"] == 0 and v["111"] == 0
    r = checks.lattice_mc_suite(N=4, walks=100_000, seed=SEED, side=5, coverage=0.95)
    ok = one_step and r.passed
    detail = f"single point (1/2, 1/24): {one_step}; " + "; ".join(f"{i.name}: {i.passed} {i.detail}" for i in r.items)
    report(7, ok, detail)
    assert ok


@pytest.mark.slow
def test_8_equivariance():
    rot = checks.rotation_suite(N=6, seed=SEED, points=20, tol=1e-12)
    pt = disk.expected_signature_disk(4)
    lines, ok = [], rot.passed
    for r, center, w in ((2.0, (0.5, -1.0), (0.3, 0.2)), (0.5, (0.0, 0.0), (-0.4, 0.1))):
        z = (center[0] + r * w[0], center[1] + r * w[1])
        # same number of steps per unit exit time as the unit disk at dt = 1e-4
        est = mc.estimate_phi(z, center, r, N=4, paths=10_000, dt=MC_DT * r * r, seed=SEED + 2)
        target = dilate(r, disk.evaluate_phi(pt, w, FLOAT64)).flat()
        via_transport = disk.transport(pt, center, r, z, FLOAT64).flat()
        err = np.abs(est.mean.flat() - target)
        inside = err <= 3 * est.stderr.flat()
        same = np.allclose(target, via_transport, atol=1e-14)
        ok = ok and bool(inside.all()) and same
        lines.append(f"r={r}: {int(inside.sum())}/{inside.size} within 3 SE")
    detail = "; ".join(f"{i.name}: {i.passed} {i.detail}".strip() for i in rot.items) + "; " + "; ".join(lines)
    report(8, ok, detail)
    assert ok


def test_9_mean_value():
    pt = disk.expected_signature_disk(2)
    res = {z: mc.mean_value_check(z, 0.3, pt, 1024) for z in ((0.0, 0.0), (0.2, 0.1))}
    ok = all(v <= 1e-10 for v in res.values())
    report(9, ok, ", ".join(f"z={z}: {v:.1e}" for z, v in res.items()) + " (<= 1e-10)")
    assert ok


if __name__ == "__main__":
    import tempfile

    failures = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_")):
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
