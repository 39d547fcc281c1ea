"""Expected signature of the simple random walk stopped on leaving a finite set.

For a finite interior set ``Gamma`` of ``Z^d`` the expected signature
satisfies the one-step identity

    Phi(x) = sum_{|e|=1} 1/(2d) exp(e) (x) Phi(x + e),   x in Gamma,

with ``Phi = 1`` on the outer boundary.  Reading it level by level gives a
discrete Dirichlet problem for ``rho_n`` whose source depends on every lower
level, so levels are solved in order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .linalg import SingularMatrixError, solve_rational
from .tensor import (
    RATIONAL,
    TruncatedTensor,
    exp_increment,
    mul,
    tensor_to_dict,
    tensor_from_dict,
)

Point = tuple[int, ...]


class MalformedDomainError(ValueError):
    pass


class LatticeDomain:
    """Finite set of interior lattice points; the boundary is derived from it."""

    def __init__(self, dimension: int, interior: Iterable[Iterable[int]]):
        if dimension < 1:
            raise MalformedDomainError("dimension must be positive")
        pts = sorted({tuple(int(c) for c in p) for p in interior})
        if not pts:
            raise MalformedDomainError("domain needs at least one interior point")
        if any(len(p) != dimension for p in pts):
            raise MalformedDomainError(f"every point must have {dimension} coordinates")
        self.dimension = dimension
        self.interior: tuple[Point, ...] = tuple(pts)
        self.index = {p: i for i, p in enumerate(pts)}
        self.directions: tuple[Point, ...] = tuple(
            tuple(sign if k == j else 0 for k in range(dimension)) for j in range(dimension) for sign in (1, -1)
        )
        boundary = {self.shift(p, e) for p in pts for e in self.directions} - set(pts)
        self.boundary: tuple[Point, ...] = tuple(sorted(boundary))

    @classmethod
    def box(cls, lo: Iterable[int], hi: Iterable[int]) -> "LatticeDomain":
        """All points with ``lo <= x <= hi`` coordinate-wise."""
        lo, hi = tuple(lo), tuple(hi)
        ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
        return cls(len(lo), itertools.product(*ranges))

    @staticmethod
    def shift(p: Point, e: Point) -> Point:
        return tuple(a + b for a, b in zip(p, e))

    def neighbors(self, p: Point) -> list[Point]:
        return [self.shift(p, e) for e in self.directions]

    def closure(self) -> tuple[Point, ...]:
        return self.interior + self.boundary

    def __contains__(self, p) -> bool:
        return tuple(p) in self.index

    def __len__(self) -> int:
        return len(self.interior)

    def generator_matrix(self) -> list[list[int]]:
        """Integer matrix ``2d I - A`` of ``-2d`` times the walk Laplacian, zero boundary data."""
        n, two_d = len(self.interior), 2 * self.dimension
        M = [[0] * n for _ in range(n)]
        for i, p in enumerate(self.interior):
            M[i][i] = two_d
            for q in self.neighbors(p):
                j = self.index.get(q)
                if j is not None:
                    M[i][j] -= 1
        return M


def parse_domain(text: str) -> tuple[LatticeDomain, int]:
    """Read the ``d N`` header followed by one interior point per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MalformedDomainError("empty domain file")
    header = lines[0].split()
    if len(header) != 2:
        raise MalformedDomainError("header must be 'd N'")
    d, N = int(header[0]), int(header[1])
    pts = []
    for ln in lines[1:]:
        coords = [int(c) for c in ln.split()]
        if len(coords) != d:
            raise MalformedDomainError(f"point {ln!r} does not have {d} coordinates")
        pts.append(coords)
    return LatticeDomain(d, pts), N


def format_domain(domain: LatticeDomain, N: int) -> str:
    rows = [f"{domain.dimension} {N}"] + [" ".join(str(c) for c in p) for p in domain.interior]
    return "\n".join(rows) + "\n"


def point_key(p: Point) -> str:
    return ",".join(str(c) for c in p)


@dataclass
class LatticeField:
    """Expected-signature values on the closure of a lattice domain."""

    domain: LatticeDomain
    truncation: int
    scalar: str
    values: dict

    def __getitem__(self, p) -> TruncatedTensor:
        return self.values[tuple(p)]

    def to_dict(self) -> dict:
        return {
            "dimension": self.domain.dimension,
            "truncation": self.truncation,
            "scalar": self.scalar,
            "interior": [point_key(p) for p in self.domain.interior],
            "points": {point_key(p): tensor_to_dict(self.values[p]) for p in self.domain.closure()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeField":
        d = int(data["dimension"])
        interior = [tuple(int(c) for c in key.split(",")) for key in data["interior"]]
        domain = LatticeDomain(d, interior)
        values = {tuple(int(c) for c in k.split(",")): tensor_from_dict(v) for k, v in data["points"].items()}
        return cls(domain, int(data["truncation"]), data["scalar"], values)


# ----------------------------------------------------------------- operators


def discrete_laplacian(values: Mapping, x: Point):
    """Walk generator ``(1/2d) sum_{|e|=1} f(x+e) - f(x)``."""
    x = tuple(x)
    d = len(x)
    total = 0
    for j in range(d):
        for sign in (1, -1):
            y = tuple(c + (sign if k == j else 0) for k, c in enumerate(x))
            total = total + values[y]
    if _is_exact(values[x]):
        return total * Fraction(1, 2 * d) - values[x]
    return total / (2 * d) - values[x]


def _is_exact(v) -> bool:
    if isinstance(v, np.ndarray):
        return v.dtype == object
    return isinstance(v, (int, Fraction))


def _exp_levels(domain: LatticeDomain, N: int, scalar: str) -> list[tuple]:
    return [exp_increment(list(e), N, scalar).levels for e in domain.directions]


def _source(n: int, x: Point, domain: LatticeDomain, levels: Mapping, exps, scalar: str) -> np.ndarray:
    d = domain.dimension
    acc = None
    for e, ex in zip(domain.directions, exps):
        y = domain.shift(x, e)
        for i in range(1, n + 1):
            term = np.multiply.outer(ex[i], levels[y][n - i]).ravel()
            acc = term if acc is None else acc + term
    return acc * Fraction(1, 2 * d) if scalar == RATIONAL else acc / (2 * d)


def rhs_level(n: int, field: LatticeField, x: Point) -> np.ndarray:
    """Source ``g_n(x) = sum_e 1/(2d) sum_{i=1..n} e^(x)i / i! (x) rho_{n-i}(Phi(x+e))``.

    Only levels below ``n`` of ``field`` are read, so ``field`` may be the
    output of a lower truncation.
    """
    if n < 2:
        raise ValueError("the level recursion starts at n = 2")
    if field.truncation < n - 1:
        raise ValueError(f"field must carry levels up to {n - 1}")
    levels = {p: t.levels for p, t in field.values.items()}
    exps = _exp_levels(field.domain, n, field.scalar)
    return _source(n, tuple(x), field.domain, levels, exps, field.scalar)


def _gauss_seidel(domain: LatticeDomain, G: np.ndarray, tol: float, max_sweeps: int) -> np.ndarray:
    two_d = 2 * domain.dimension
    nbrs = [[domain.index.get(q, -1) for q in domain.neighbors(p)] for p in domain.interior]
    F = np.zeros_like(G)
    for _ in range(max_sweeps):
        delta = 0.0
        for i, row in enumerate(nbrs):
            s = G[i] * two_d
            for j in row:
                if j >= 0:
                    s = s + F[j]
            new = s / two_d
            delta = max(delta, float(np.max(np.abs(new - F[i]))))
            F[i] = new
        if delta <= tol:
            return F
    raise RuntimeError(f"Gauss-Seidel did not reach tolerance {tol} in {max_sweeps} sweeps")


def solve_level(
    n: int,
    domain: LatticeDomain,
    levels: Mapping,
    scalar: str = RATIONAL,
    method: str = "exact",
    tol: float = 1e-12,
    max_sweeps: int = 10**6,
) -> dict:
    """Solve ``Lap f = -g_n`` on the interior, ``f = 0`` on the boundary, for every word.

    ``levels`` maps each closure point to its level arrays ``0..n-1``.
    Returns ``{point: level-n array}`` over the closure.
    """
    if n < 2:
        raise ValueError("the level recursion starts at n = 2")
    d = domain.dimension
    exps = _exp_levels(domain, n, scalar)
    G = [_source(n, p, domain, levels, exps, scalar) for p in domain.interior]
    width = d**n
    if method == "exact":
        if scalar != RATIONAL:
            raise ValueError("exact solve needs rational scalars")
        rhs = [[2 * d * v for v in g] for g in G]
        try:
            X = solve_rational(domain.generator_matrix(), rhs)
        except SingularMatrixError as exc:
            raise MalformedDomainError(f"discrete Dirichlet system is singular: {exc}") from exc
        solved = {}
        for p, row in zip(domain.interior, X):
            arr = np.empty(width, dtype=object)
            arr[:] = row
            solved[p] = arr
    elif method == "gauss-seidel":
        Gf = np.array([[float(v) for v in g] for g in G], dtype=np.float64)
        F = _gauss_seidel(domain, Gf, tol, max_sweeps)
        solved = {p: F[i] for i, p in enumerate(domain.interior)}
    else:
        raise ValueError(f"unknown method {method!r}")
    zero = np.zeros(width, dtype=np.float64) if method != "exact" else None
    for p in domain.boundary:
        if zero is None:
            arr = np.empty(width, dtype=object)
            arr[:] = [Fraction(0)] * width
            solved[p] = arr
        else:
            solved[p] = zero.copy()
    return solved


def expected_signature_lattice(
    domain: LatticeDomain, N: int, scalar: str = RATIONAL, method: str | None = None
) -> LatticeField:
    """Expected signature on the closure of ``domain`` up to level ``N``.

    ``method`` defaults to exact elimination for rational scalars and
    Gauss-Seidel for floats.
    """
    if N < 0:
        raise ValueError("truncation must be non-negative")
    method = method or ("exact" if scalar == RATIONAL else "gauss-seidel")
    d = domain.dimension
    one = Fraction(1) if scalar == RATIONAL else 1.0
    zero = Fraction(0) if scalar == RATIONAL else 0.0
    levels: dict[Point, list] = {}
    for p in domain.closure():
        lv = [np.array([one], dtype=object if scalar == RATIONAL else np.float64)]
        if N >= 1:
            lv.append(np.array([zero] * d, dtype=object if scalar == RATIONAL else np.float64))
        levels[p] = lv
    for n in range(2, N + 1):
        solved = solve_level(n, domain, levels, scalar, method)
        for p, arr in solved.items():
            levels[p].append(arr)
    values = {p: TruncatedTensor(d, N, lv, scalar) for p, lv in levels.items()}
    return LatticeField(domain, N, scalar, values)


def fixed_point_residual(field: LatticeField) -> dict:
    """``Phi(x) - sum_e 1/(2d) exp(e) (x) Phi(x+e)`` at every interior point."""
    domain, N, scalar = field.domain, field.truncation, field.scalar
    d = domain.dimension
    weight = Fraction(1, 2 * d) if scalar == RATIONAL else 1.0 / (2 * d)
    exps = [exp_increment(list(e), N, scalar) for e in domain.directions]
    out = {}
    for x in domain.interior:
        total = None
        for e, ex in zip(domain.directions, exps):
            term = mul(ex, field[domain.shift(x, e)])
            total = term if total is None else total + term
        out[x] = field[x] - weight * total
    return out


def fixed_point_check(field: LatticeField, atol: float = 0.0) -> bool:
    """Exact (``atol=0``) or tolerant check of the one-step identity at all interior points."""
    for r in fixed_point_residual(field).values():
        for lev in r.levels:
            if any(abs(v) > atol for v in lev):
                return False
    return True


# ------------------------------------------------------------- Monte Carlo


@dataclass(frozen=True)
class RepresentationEstimate:
    mean: np.ndarray
    stderr: np.ndarray
    paths: int
    seed: int


def _index_grid(domain: LatticeDomain):
    pts = np.array(domain.closure())
    lo = pts.min(axis=0)
    shape = tuple(pts.max(axis=0) - lo + 1)
    grid = np.full(shape, -1, dtype=np.int64)
    for p, i in domain.index.items():
        grid[tuple(np.array(p) - lo)] = i
    return grid, lo


def representation_estimate(
    domain: LatticeDomain, n: int, g_n, x: Point, paths: int, seed: int, batch: int = 20000
) -> RepresentationEstimate:
    """Monte Carlo value of ``E^x[sum_{j < tau} g_n(S_j)]`` for every word.

    ``g_n`` is either a mapping from interior points to level-n arrays or an
    array with one row per interior point in ``domain.interior`` order.  The
    walk uses a Philox stream keyed by ``seed``.
    """
    if isinstance(g_n, Mapping):
        G = np.array([[float(v) for v in g_n[p]] for p in domain.interior], dtype=np.float64)
    else:
        G = np.asarray(g_n, dtype=np.float64)
    if G.shape[0] != len(domain):
        raise ValueError("g_n must have one row per interior point")
    x = tuple(x)
    if x not in domain:
        raise ValueError("walks must start inside the domain")
    grid, lo = _index_grid(domain)
    dirs = np.array(domain.directions, dtype=np.int64)
    rng = np.random.Generator(np.random.Philox(seed))
    width = G.shape[1]
    total = np.zeros(width)
    total_sq = np.zeros(width)
    done = 0
    while done < paths:
        m = min(batch, paths - done)
        pos = np.tile(np.array(x, dtype=np.int64) - lo, (m, 1))
        acc = np.zeros((m, width))
        live = np.arange(m)
        while live.size:
            rows = grid[tuple(pos[live].T)]
            inside = rows >= 0
            live, rows = live[inside], rows[inside]
            if not live.size:
                break
            acc[live] += G[rows]
            pos[live] += dirs[rng.integers(0, dirs.shape[0], size=live.size)]
        total += acc.sum(axis=0)
        total_sq += (acc**2).sum(axis=0)
        done += m
    mean = total / paths
    var = (total_sq - paths * mean**2) / (paths - 1) if paths > 1 else np.zeros(width)
    se = np.sqrt(np.maximum(var, 0.0) / paths)
    return RepresentationEstimate(mean, se, paths, seed)


def source_table(field: LatticeField, n: int) -> np.ndarray:
    """``g_n`` at every interior point as a float array (rows follow ``domain.interior``)."""
    return np.array(
        [[float(v) for v in rhs_level(n, field, p)] for p in field.domain.interior], dtype=np.float64
    )
