"""Named verification suites shared by the CLI ``check`` command and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import disk, interval, lattice, mc
from .tensor import (
    FLOAT64,
    RATIONAL,
    TruncatedTensor,
    mul,
    project_word,
    rotate,
    rotation_matrix,
)


@dataclass
class CheckItem:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CheckReport:
    suite: str
    items: list[CheckItem] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.items.append(CheckItem(name, bool(passed), detail))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "items": [{"name": i.name, "passed": i.passed, "detail": i.detail} for i in self.items],
        }


def residual_suite(N: int = 8) -> CheckReport:
    report = CheckReport("residual")
    pt = disk.expected_signature_disk(N)
    for n in range(2, N + 1):
        report.add(f"level {n}", disk.residual_check(pt, n), f"{2**n} words")
    return report


def boundary_factor_suite(N: int = 8) -> CheckReport:
    report = CheckReport("boundary-factor")
    pt = disk.expected_signature_disk(N)
    for n in range(2, N + 1):
        report.add(f"level {n}", disk.boundary_factor_check(pt, n))
    return report


def random_path(rng: np.random.Generator, d: int, max_segments: int, exact: bool):
    k = int(rng.integers(1, max_segments + 1))
    if exact:
        steps = rng.integers(-3, 4, size=(k, d))
        dens = rng.integers(1, 5, size=(k, d))
        pts = [[Fraction(0)] * d]
        for row, den in zip(steps, dens):
            pts.append([p + Fraction(int(s), int(q)) for p, s, q in zip(pts[-1], row, den)])
        return pts
    return np.concatenate([np.zeros((1, d)), np.cumsum(rng.standard_normal((k, d)), axis=0)])


def _shuffle_defects(s: TruncatedTensor) -> list:
    p1, p2 = project_word(s, "1"), project_word(s, "2")
    return [
        p1 * p2 - project_word(s, "12") - project_word(s, "21"),
        p1 * p1 - 2 * project_word(s, "11"),
    ]


def chen_suite(paths: int = 100, N: int = 5, seed: int = 0, max_segments: int = 50, tol: float = 1e-10) -> CheckReport:
    """Split-product and shuffle identities on random float and rational paths."""
    report = CheckReport("chen")
    rng = np.random.Generator(np.random.Philox(seed))
    worst_split = worst_shuffle = 0.0
    exact_ok = True
    for _ in range(paths):
        pts = random_path(rng, 2, max_segments, exact=False)
        k = int(rng.integers(0, len(pts)))
        whole = mc.signature_of_path(pts, N)
        left, right = mc.signature_of_path(pts[: k + 1], N), mc.signature_of_path(pts[k:], N)
        prod = mul(left, right)
        scale_ = max(1.0, float(np.max(np.abs(whole.flat()))))
        worst_split = max(worst_split, float(np.max(np.abs(prod.flat() - whole.flat()))) / scale_)
        worst_shuffle = max(worst_shuffle, max(abs(x) for x in _shuffle_defects(whole)) / scale_)

        qpts = random_path(rng, 2, max_segments, exact=True)
        k = int(rng.integers(0, len(qpts)))
        whole_q = mc.signature_of_path(qpts, N, RATIONAL)
        prod_q = mul(mc.signature_of_path(qpts[: k + 1], N, RATIONAL), mc.signature_of_path(qpts[k:], N, RATIONAL))
        exact_ok = exact_ok and prod_q == whole_q and all(x == 0 for x in _shuffle_defects(whole_q))
    report.add("split product (float)", worst_split <= tol, f"max relative error {worst_split:.3e}")
    report.add("shuffle (float)", worst_shuffle <= tol, f"max relative error {worst_shuffle:.3e}")
    report.add("split product and shuffle (rational)", exact_ok, "exact equality")
    return report


QUARTER_TURN = ((0, -1), (1, 0))


def rotation_suite(N: int = 6, seed: int = 0, points: int = 10, tol: float = 1e-12) -> CheckReport:
    """Rotating the start point rotates the expected signature letter-wise."""
    report = CheckReport("rotation")
    pt = disk.expected_signature_disk(N)
    rng = np.random.Generator(np.random.Philox(seed))
    exact_ok = True
    for _ in range(points):
        z = (Fraction(int(rng.integers(-5, 6)), 10), Fraction(int(rng.integers(-5, 6)), 10))
        Rz = (-z[1], z[0])
        exact_ok = exact_ok and rotate(QUARTER_TURN, disk.evaluate_phi(pt, z)) == disk.evaluate_phi(pt, Rz)
    report.add("quarter turn (exact)", exact_ok)
    worst = 0.0
    for _ in range(points):
        theta = float(rng.uniform(0, 2 * math.pi))
        r, phi = 0.9 * math.sqrt(float(rng.uniform())), float(rng.uniform(0, 2 * math.pi))
        z = np.array([r * math.cos(phi), r * math.sin(phi)])
        R = rotation_matrix(theta)
        lhs = rotate(R, disk.evaluate_phi(pt, tuple(z), FLOAT64))
        rhs = disk.evaluate_phi(pt, tuple(R @ z), FLOAT64)
        worst = max(worst, float(np.max(np.abs(lhs.flat() - rhs.flat()))))
    report.add("arbitrary angle (float)", worst <= tol, f"max error {worst:.3e}")
    return report


def meanvalue_suite(eps: float = 0.3, points: int = 1024, tol: float = 1e-10) -> CheckReport:
    report = CheckReport("meanvalue")
    pt = disk.expected_signature_disk(2)
    for z in ((0.0, 0.0), (0.2, 0.1)):
        res = mc.mean_value_check(z, eps, pt, points)
        report.add(f"z={z}", res <= tol, f"residual {res:.3e}")
    return report


def lattice_mc_suite(
    N: int = 4, walks: int = 100_000, seed: int = 0, side: int = 5, coverage: float = 0.95
) -> CheckReport:
    """Exact lattice solve versus the random-walk representation of each level."""
    report = CheckReport("lattice-mc")
    dom = lattice.LatticeDomain.box((0, 0), (side - 1, side - 1))
    field_ = lattice.expected_signature_lattice(dom, N)
    report.add("one-step identity (exact)", lattice.fixed_point_check(field_))
    hits = total = 0
    for n in range(2, N + 1):
        g = lattice.source_table(field_, n)
        for i, x in enumerate(dom.interior):
            est = lattice.representation_estimate(dom, n, g, x, walks, seed + 1000 * n + i)
            exact = np.array([float(v) for v in field_[x].levels[n]])
            ok = np.abs(est.mean - exact) <= 3 * est.stderr
            hits += int(ok.sum())
            total += ok.size
    frac = hits / total
    report.add("representation within 3 SE", frac >= coverage, f"{hits}/{total} = {frac:.4f}")
    return report


def interval_suite(N: int = 10) -> CheckReport:
    report = CheckReport("interval-oracle")
    ode = interval.ode_recursion(N)
    for n in range(2, N + 1):
        closed = interval.closed_form_level(n)
        enum = interval.two_point_enumeration(n)
        report.add(f"level {n}", ode[n] == closed == enum)
    return report


SUITES = {
    "residual": residual_suite,
    "boundary-factor": boundary_factor_suite,
    "chen": chen_suite,
    "rotation": rotation_suite,
    "meanvalue": meanvalue_suite,
    "lattice-mc": lattice_mc_suite,
    "interval-oracle": interval_suite,
}
