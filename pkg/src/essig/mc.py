"""Monte Carlo estimates of the expected signature of Brownian motion in a disk.

Paths are Euler walks with Gaussian increments of variance ``dt`` per
coordinate, stopped at the first step that leaves the disk.  That last step
is cut where the segment meets the circle, so every path ends on the
boundary.  The signature of the resulting piecewise-linear path is the
ordered product of segment exponentials (Chen's identity).

Random numbers come from numpy's Philox counter-based generator.  Batch
``b`` of a run with master seed ``s`` uses ``SeedSequence(s, spawn_key=(b,))``,
so an estimate is reproducible from ``(seed, paths, dt, batch_size)`` alone.
Monitoring the exit only at grid times misses short excursions, which biases
estimates by O(sqrt(dt)); :func:`calibrate_bias` measures that bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .disk import PolyTensor, evaluate_phi
from .tensor import (
    FLOAT64,
    RATIONAL,
    TruncatedTensor,
    add,
    exp_increment,
    mul,
    scale,
    unit,
)

STEP_CAP = 10**9


@dataclass(frozen=True)
class PiecewisePath:
    points: np.ndarray
    times: np.ndarray
    on_boundary: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be an (M, d) array with M >= 1")
        ts = np.asarray(self.times, dtype=np.float64)
        if ts.shape != (pts.shape[0],):
            raise ValueError("need one timestamp per point")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "times", ts)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def split(self, k: int) -> tuple["PiecewisePath", "PiecewisePath"]:
        """Two pieces sharing vertex ``k``."""
        if not 0 <= k < len(self.points):
            raise IndexError("split vertex out of range")
        left = PiecewisePath(self.points[: k + 1], self.times[: k + 1])
        right = PiecewisePath(self.points[k:], self.times[k:], self.on_boundary)
        return left, right


@dataclass
class McEstimate:
    mean: TruncatedTensor
    stderr: TruncatedTensor
    count: int
    seed: int
    dt: float
    batch_size: int
    samples: np.ndarray | None = field(default=None, repr=False)
    endpoints: np.ndarray | None = field(default=None, repr=False)
    steps: np.ndarray | None = field(default=None, repr=False)


# ------------------------------------------------------------------ sampling


def sample_bm_exit(z, center, radius: float, dt: float, rng: np.random.Generator, chunk: int = 4096) -> PiecewisePath:
    """One Brownian path from ``z`` until it leaves the disk ``|x - center| < radius``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if radius <= 0:
        raise ValueError("radius must be positive")
    z = np.asarray(z, dtype=np.float64)
    c = np.asarray(center, dtype=np.float64)
    r2 = radius * radius
    if np.sum((z - c) ** 2) >= r2:
        return PiecewisePath(z[None, :], np.zeros(1), on_boundary=True)
    pieces = [z[None, :]]
    cur = z
    taken = 0
    sd = math.sqrt(dt)
    while True:
        inc = rng.standard_normal((chunk, z.shape[0])) * sd
        pts = cur + np.cumsum(inc, axis=0)
        outside = np.flatnonzero(np.sum((pts - c) ** 2, axis=1) >= r2)
        if outside.size:
            k = outside[0]
            prev = pts[k - 1] if k else cur
            t = _kernels._exit_fraction(prev, inc[k], c, r2)
            pieces.append(pts[:k])
            times_tail = t
            if t > 0:
                pieces.append((prev + t * inc[k])[None, :])
            points = np.concatenate(pieces)
            n_grid = taken + k + 1
            times = np.arange(n_grid, dtype=np.float64) * dt
            if t > 0:
                times = np.append(times, (taken + k + times_tail) * dt)
            return PiecewisePath(points, times, on_boundary=True)
        pieces.append(pts)
        cur = pts[-1]
        taken += chunk
        if taken > STEP_CAP:
            raise RuntimeError(f"no exit after {STEP_CAP} steps (dt={dt}); step size is unreasonable")


def signature_of_path(path, N: int, scalar: str | None = None) -> TruncatedTensor:
    """Truncated signature of a piecewise-linear path.

    ``path`` is a :class:`PiecewisePath` or a sequence of points.  Timestamps
    are never read.  Rational points give an exact rational signature.
    """
    pts = path.points if isinstance(path, PiecewisePath) else path
    if scalar is None:
        exact = not isinstance(pts, np.ndarray) or pts.dtype == object
        exact = exact and all(isinstance(c, (int, Fraction)) for p in pts for c in p)
        scalar = RATIONAL if exact else FLOAT64
    if scalar == RATIONAL:
        pts = [[Fraction(c) for c in p] for p in pts]
        if not pts:
            raise ValueError("path needs at least one point")
        out = unit(len(pts[0]), N, RATIONAL)
        for a, b in zip(pts[:-1], pts[1:]):
            out = mul(out, exp_increment([y - x for x, y in zip(a, b)], N, RATIONAL))
        return out
    arr = np.asarray(pts, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError("path needs at least one point")
    d = arr.shape[1]
    off = _kernels.level_offsets(d, N)
    flat = _kernels.path_signature(np.ascontiguousarray(arr), N, off)
    return TruncatedTensor.from_flat(d, N, flat)


def _batch_rng(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(batch,))))


def _simulate(z, center, radius, N, paths, dt, seed, batch_size, block, ratio=0):
    z = np.asarray(z, dtype=np.float64)
    c = np.asarray(center, dtype=np.float64)
    d = z.shape[0]
    off = _kernels.level_offsets(d, N)
    width = int(off[N + 1])
    r2 = float(radius) ** 2
    sd = math.sqrt(dt / ratio if ratio else dt)
    sigs = np.zeros((paths, width))
    ends = np.zeros((paths, d))
    steps = np.zeros(paths, dtype=np.int64)
    fsigs = np.zeros((paths, width)) if ratio else None
    start_inside = np.sum((z - c) ** 2) < r2
    for b, lo in enumerate(range(0, paths, batch_size)):
        m = min(batch_size, paths - lo)
        rng = _batch_rng(seed, b)
        pos = np.tile(z[:, None], (1, m))
        sig = np.zeros((width, m))
        sig[0] = 1.0
        done = np.full(m, not start_inside)
        nsteps = np.zeros(m, dtype=np.int64)
        if ratio:
            fpos, fsig, fdone = pos.copy(), sig.copy(), done.copy()
        active = np.flatnonzero(~done)
        while active.size:
            # compact live paths into contiguous columns for the kernel
            a_pos, a_sig = np.ascontiguousarray(pos[:, active]), np.ascontiguousarray(sig[:, active])
            a_done, a_steps = done[active].copy(), nsteps[active].copy()
            inc = rng.standard_normal((block * max(ratio, 1), d, active.size)) * sd
            if ratio:
                f_pos, f_sig = np.ascontiguousarray(fpos[:, active]), np.ascontiguousarray(fsig[:, active])
                f_done = fdone[active].copy()
                _kernels.advance_block_coupled(
                    a_pos, a_sig, a_done, f_pos, f_sig, f_done, a_steps, inc, c, r2, N, off, ratio
                )
                fpos[:, active], fsig[:, active], fdone[active] = f_pos, f_sig, f_done
            else:
                _kernels.advance_block(a_pos, a_sig, a_done, a_steps, inc, c, r2, N, off)
            pos[:, active], sig[:, active], done[active], nsteps[active] = a_pos, a_sig, a_done, a_steps
            finished = a_done & f_done if ratio else a_done
            active = active[~finished]
            if active.size and nsteps[active].max() > STEP_CAP:
                raise RuntimeError(f"no exit after {STEP_CAP} steps (dt={dt}); step size is unreasonable")
        sigs[lo : lo + m] = sig.T
        ends[lo : lo + m] = pos.T
        steps[lo : lo + m] = nsteps
        if ratio:
            fsigs[lo : lo + m] = fsig.T
    return sigs, ends, steps, fsigs


def _mean_se(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = samples.shape[0]
    mean = samples.mean(axis=0)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, samples.std(axis=0, ddof=1) / math.sqrt(n)


def estimate_phi(
    z,
    center=(0.0, 0.0),
    radius: float = 1.0,
    N: int = 4,
    paths: int = 10000,
    dt: float = 1e-4,
    seed: int = 0,
    batch_size: int = 5000,
    block: int = 256,
    keep_samples: bool = False,
) -> McEstimate:
    """Mean signature of Brownian paths from ``z`` stopped on leaving the disk.

    Paths are simulated in batches of ``batch_size``; batch ``b`` draws from
    a Philox stream keyed by ``(seed, b)``, consumed ``block`` steps at a
    time.  The result is bit-reproducible for fixed
    ``(seed, paths, dt, batch_size, block)``.
    """
    if paths < 1:
        raise ValueError("need at least one path")
    if dt <= 0 or radius <= 0:
        raise ValueError("dt and radius must be positive")
    if N < 0:
        raise ValueError("truncation must be non-negative")
    sigs, ends, steps, _ = _simulate(z, center, radius, N, paths, dt, seed, batch_size, block)
    d = len(z)
    mean, se = _mean_se(sigs)
    return McEstimate(
        TruncatedTensor.from_flat(d, N, mean),
        TruncatedTensor.from_flat(d, N, se),
        paths,
        seed,
        dt,
        batch_size,
        sigs if keep_samples else None,
        ends if keep_samples else None,
        steps if keep_samples else None,
    )


@dataclass
class BiasCalibration:
    """Paired coarse/fine comparison on shared Brownian increments.

    ``difference`` is the mean of ``S(coarse) - S(fine)`` per coefficient and
    ``constant`` the fitted ``c`` in ``bias(dt) ~ c sqrt(dt)``.
    """

    difference: TruncatedTensor
    difference_se: TruncatedTensor
    constant: TruncatedTensor
    dt: float
    ratio: int
    paths: int

    def allowance(self, dt: float) -> TruncatedTensor:
        """Bias allowance ``|c| sqrt(dt)`` per coefficient."""
        c = self.constant
        return TruncatedTensor(
            c.dimension, c.truncation, [np.abs(lev) * math.sqrt(dt) for lev in c.levels], FLOAT64
        )


def calibrate_bias(
    z,
    center=(0.0, 0.0),
    radius: float = 1.0,
    N: int = 4,
    paths: int = 10000,
    dt: float = 1e-4,
    seed: int = 0,
    ratio: int = 4,
    batch_size: int = 5000,
    block: int = 128,
) -> BiasCalibration:
    """Richardson estimate of the discrete-monitoring bias at step ``dt``.

    Each coarse path (step ``dt``) is the subsequence of a fine path (step
    ``dt/ratio``) built from the same increments, so their difference is
    mostly bias.  With ``bias(h) = c sqrt(h)``,
    ``E[S_dt - S_fine] = c sqrt(dt) (1 - 1/sqrt(ratio))``.
    """
    if ratio < 2:
        raise ValueError("ratio must be at least 2")
    sigs, _, _, fsigs = _simulate(z, center, radius, N, paths, dt, seed, batch_size, block, ratio)
    diff, diff_se = _mean_se(sigs - fsigs)
    c = diff / (math.sqrt(dt) * (1.0 - 1.0 / math.sqrt(ratio)))
    d = len(z)
    return BiasCalibration(
        TruncatedTensor.from_flat(d, N, diff),
        TruncatedTensor.from_flat(d, N, diff_se),
        TruncatedTensor.from_flat(d, N, c),
        dt,
        ratio,
        paths,
    )


# ---------------------------------------------------------- mean value check


def psi_level2(w) -> TruncatedTensor:
    """Level-2 truncation of the expected signature of BM from 0 conditioned to exit at ``w``.

    ``1 + sum w_i e_i + sum w_i^2 / 2 e_i e_i``; the Levy-area part vanishes
    in expectation.
    """
    w1, w2 = float(w[0]), float(w[1])
    return TruncatedTensor(2, 2, [[1.0], [w1, w2], [0.5 * w1 * w1, 0.0, 0.0, 0.5 * w2 * w2]])


def mean_value_check(z, eps: float, phi: PolyTensor, points: int = 1024) -> float:
    """Max coefficient error of the circle-average identity at truncation 2.

    Averages ``psi(eps e^{i theta}) (x) Phi(z + eps e^{i theta})`` over
    ``points`` equally spaced angles (trapezoid rule, exact for the
    trigonometric polynomials involved) and compares with ``Phi(z)``.
    """
    if phi.truncation < 2:
        raise ValueError("need at least levels 0..2")
    z1, z2 = float(z[0]), float(z[1])
    if math.hypot(z1, z2) + eps > 1.0 + 1e-12:
        raise ValueError("the circle of radius eps around z must stay inside the unit disk")
    phi2 = phi.truncate(2)
    total = None
    for theta in 2 * np.pi * np.arange(points) / points:
        w = (eps * math.cos(theta), eps * math.sin(theta))
        term = mul(psi_level2(w), evaluate_phi(phi2, (z1 + w[0], z2 + w[1]), FLOAT64))
        total = term if total is None else add(total, term)
    avg = scale(1.0 / points, total)
    target = evaluate_phi(phi2, (z1, z2), FLOAT64)
    return max(float(np.max(np.abs(a - b))) for a, b in zip(avg.levels, target.levels))


# --------------------------------------------------------------- path files


def format_path_dump(path: PiecewisePath) -> str:
    lines = [" ".join(repr(float(x)) for x in (t, *p)) for t, p in zip(path.times, path.points)]
    return "\n".join(lines) + "\n"


def parse_path_dump(text: str) -> PiecewisePath:
    """Read one point per line: ``t x1 x2 ...``."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError("empty path file")
    arr = np.array([[float(x) for x in r] for r in rows])
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValueError("each line needs a time and at least one coordinate")
    return PiecewisePath(arr[:, 1:], arr[:, 0])


def rotation_estimate_pair(z, R: Sequence[Sequence[float]], **kwargs) -> tuple[McEstimate, McEstimate]:
    """Estimates started at ``z`` and at ``R z`` (same keyword arguments)."""
    Rz = np.asarray(R, dtype=np.float64) @ np.asarray(z, dtype=np.float64)
    return estimate_phi(z, **kwargs), estimate_phi(tuple(Rz), **kwargs)
