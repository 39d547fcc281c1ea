"""Expected signature of planar Brownian motion stopped on exiting the unit disk.

Each coefficient of level ``n`` of the expected signature ``Phi(z)`` is an
exact polynomial in ``(z1, z2)``.  Levels are obtained one at a time:

    Lap rho_n = -2 sum_i e_i (x) d rho_{n-1}/dz_i - (sum_i e_i (x) e_i) (x) rho_{n-2}

with ``rho_n = 0`` on the unit circle, starting from ``rho_0 = 1`` and
``rho_1 = 0``.  Each scalar Dirichlet problem is solved by
:func:`poisson_solve_disk`, which writes the answer as ``(1 - |z|^2) g`` and
recovers ``g`` one homogeneous degree at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .linalg import solve_rational
from .polyring import (
    DISK_FACTOR,
    ONE,
    BivarPoly,
    DivisionRemainderError,
    divide_exact,
    evaluate,
    homogeneous_parts,
    laplacian,
    partial,
    poly_from_json,
    poly_to_json,
)
from .tensor import (
    FLOAT64,
    RATIONAL,
    TruncatedTensor,
    dilate,
    index_to_word,
    tensor_to_dict,
    word_str,
    word_to_index,
)

__all__ = [
    "PolyTensor",
    "MnSystem",
    "rhs_level",
    "build_mn",
    "solve_mn",
    "apply_L",
    "poisson_solve_disk",
    "expected_signature_disk",
    "evaluate_phi",
    "transport",
    "residual_level",
    "residual_check",
    "boundary_factor_check",
]

ZERO = BivarPoly()


def _poly_level(n: int, fill: BivarPoly = ZERO) -> np.ndarray:
    out = np.empty(2**n, dtype=object)
    out[:] = [fill] * (2**n)
    return out


class PolyTensor:
    """Truncated tensor over R^2 whose coefficients are polynomials in z."""

    dimension = 2

    def __init__(self, levels):
        built = []
        for k, lev in enumerate(levels):
            arr = np.empty(2**k, dtype=object)
            arr[:] = list(lev)
            if arr.shape != (2**k,):
                raise ValueError(f"level {k} must hold {2**k} polynomials")
            arr.flags.writeable = False
            built.append(arr)
        self.levels = tuple(built)
        self.truncation = len(built) - 1

    def __getitem__(self, word) -> BivarPoly:
        if isinstance(word, str):
            n = len(word)
        else:
            n = len(tuple(word))
        return self.levels[n][word_to_index(word, 2)]

    def with_coefficient(self, word, poly: BivarPoly) -> "PolyTensor":
        """Copy with one coefficient replaced (used for sensitivity controls)."""
        levels = [lev.copy() for lev in self.levels]
        n = len(word)
        levels[n][word_to_index(word, 2)] = poly
        return PolyTensor(levels)

    def truncate(self, N: int) -> "PolyTensor":
        return PolyTensor(self.levels[: N + 1])

    def __call__(self, z1, z2) -> TruncatedTensor:
        return evaluate_phi(self, (z1, z2))

    def __eq__(self, other):
        if not isinstance(other, PolyTensor):
            return NotImplemented
        return self.truncation == other.truncation and all(
            list(a) == list(b) for a, b in zip(self.levels, other.levels)
        )

    __hash__ = None

    def to_dict(self) -> dict:
        levels = []
        for k, lev in enumerate(self.levels):
            coeffs = {
                word_str(index_to_word(i, k, 2)): poly_to_json(p) for i, p in enumerate(lev) if not p.is_zero()
            }
            levels.append({"level": k, "coeffs": coeffs})
        return {"dimension": 2, "truncation": self.truncation, "scalar": "polynomial", "levels": levels}

    @classmethod
    def from_dict(cls, data: dict) -> "PolyTensor":
        N = int(data["truncation"])
        levels = [_poly_level(k) for k in range(N + 1)]
        for entry in data["levels"]:
            for word, terms in entry["coeffs"].items():
                levels[len(word)][word_to_index(word, 2)] = poly_from_json(terms)
        return cls(levels)


# ------------------------------------------------------------------ recursion


def rhs_level(n: int, levels) -> np.ndarray:
    """Right-hand side of the level-n Poisson problem, one polynomial per word.

    For ``I = i1 i2 ... in`` the value is
    ``-2 d/dz_{i1} pi^{i2..in}(rho_{n-1}) - [i1 == i2] pi^{i3..in}(rho_{n-2})``.
    """
    if n < 2:
        raise ValueError("the level recursion starts at n = 2")
    prev, prev2 = levels[n - 1], levels[n - 2]
    out = _poly_level(n)
    tail1 = 2 ** (n - 1)
    tail2 = 2 ** (n - 2)
    for idx in range(2**n):
        i1, rest = divmod(idx, tail1)
        term = partial(prev[rest], i1 + 1) * -2
        i2, rest2 = divmod(rest, tail2)
        if i1 == i2:
            term = term - prev2[rest2]
        out[idx] = term
    return out


def build_mn(n: int) -> np.ndarray:
    """The (n+1)x(n+1) integer matrix matching leading homogeneous parts.

    Unknown ``a_j`` and equation ``j`` both refer to the monomial
    ``z1**j * z2**(n-j)``.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    M = np.zeros((n + 1, n + 1), dtype=np.int64)
    for j in range(n + 1):
        M[j, j] = -4 * (n + 1) - (j * (j - 1) if j >= 2 else 0) - ((n - j) * (n - j - 1) if j <= n - 2 else 0)
        if j <= n - 2:
            M[j, j + 2] = -(j + 2) * (j + 1)
        if j >= 2:
            M[j, j - 2] = -(n - j + 2) * (n - j + 1)
    return M


@dataclass(frozen=True)
class MnSystem:
    degree: int
    matrix: np.ndarray
    rhs: tuple
    solution: tuple

    def polynomial(self) -> BivarPoly:
        n = self.degree
        return BivarPoly({(j, n - j): a for j, a in enumerate(self.solution)})


def solve_mn(n: int, rhs) -> MnSystem:
    M = build_mn(n)
    rhs = tuple(Fraction(b) for b in rhs)
    sol = solve_rational([[int(x) for x in row] for row in M], list(rhs))
    return MnSystem(n, M, rhs, tuple(sol))


def apply_L(h: BivarPoly) -> BivarPoly:
    """``L(h) = Lap((1 - |z|^2) h)``."""
    return laplacian(DISK_FACTOR * h)


def poisson_solve_disk(f: BivarPoly) -> BivarPoly:
    """Solve ``Lap F = f`` in the unit disk with ``F = 0`` on the circle.

    Returns ``F = (1 - |z|^2) g`` exactly.  ``g`` is assembled from its top
    degree down: the leading homogeneous part of the residual fixes one
    homogeneous block of ``g`` through an M_n system, and ``L`` of that block
    only adds terms two degrees lower.
    """
    g = ZERO
    residual = f
    while not residual.is_zero():
        m = int(residual.degree)
        top = homogeneous_parts(residual)[m]
        system = solve_mn(m, [top.coeff(j, m - j) for j in range(m + 1)])
        gm = system.polynomial()
        g = g + gm
        residual = residual - apply_L(gm)
    return DISK_FACTOR * g


@lru_cache(maxsize=None)
def _disk_levels(N: int) -> tuple:
    if N == 0:
        return (_poly_level(0, ONE),)
    if N == 1:
        return (_poly_level(0, ONE), _poly_level(1))
    levels = list(_disk_levels(N - 1))
    rhs = rhs_level(N, levels)
    solved = _poly_level(N)
    cache: dict[BivarPoly, BivarPoly] = {}
    for idx, f in enumerate(rhs):
        if f not in cache:
            cache[f] = poisson_solve_disk(f)
        solved[idx] = cache[f]
    solved.flags.writeable = False
    return tuple(levels) + (solved,)


def expected_signature_disk(N: int) -> PolyTensor:
    """Exact expected signature of BM from z up to exit of the unit disk, levels 0..N."""
    if N < 0:
        raise ValueError("truncation must be non-negative")
    return PolyTensor(_disk_levels(N))


# ---------------------------------------------------------------- evaluation


def evaluate_phi(pt: PolyTensor, z, scalar: str | None = None) -> TruncatedTensor:
    """Evaluate every coefficient at ``z``.

    Rational coordinates give an exact rational tensor; anything else gives
    floats.
    """
    z1, z2 = z
    if scalar is None:
        exact = all(isinstance(c, (int, Fraction)) for c in (z1, z2))
        scalar = RATIONAL if exact else FLOAT64
    if scalar == RATIONAL:
        z1, z2 = Fraction(z1), Fraction(z2)
        levels = [[Fraction(evaluate(p, z1, z2)) for p in lev] for lev in pt.levels]
    else:
        z1, z2 = float(z1), float(z2)
        levels = [[float(evaluate(p, z1, z2)) for p in lev] for lev in pt.levels]
    return TruncatedTensor(2, pt.truncation, levels, scalar)


def transport(pt: PolyTensor, center, radius, z, scalar: str | None = None) -> TruncatedTensor:
    """Expected signature for the disk of given center and radius, started at ``z``.

    Translation moves the problem to the origin, then the scaling property
    turns a radius-r disk into ``dilate(r, .)`` of the unit disk.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    exact = all(isinstance(v, (int, Fraction)) for v in (*z, *center, radius))
    if exact and scalar != FLOAT64:
        z, center, radius = tuple(map(Fraction, z)), tuple(map(Fraction, center)), Fraction(radius)
    w = ((z[0] - center[0]) / radius, (z[1] - center[1]) / radius)
    if float(w[0]) ** 2 + float(w[1]) ** 2 > 1 + 1e-12:
        raise ValueError("starting point lies outside the disk")
    local = evaluate_phi(pt, w, scalar)
    return dilate(radius, local)


def residual_level(pt: PolyTensor, n: int) -> np.ndarray:
    """``Lap rho_n + 2 sum e_i (x) d rho_{n-1}/dz_i + (sum e_i (x) e_i) (x) rho_{n-2}`` per word."""
    rhs = rhs_level(n, pt.levels)
    out = _poly_level(n)
    for idx in range(2**n):
        out[idx] = laplacian(pt.levels[n][idx]) - rhs[idx]
    return out


def residual_check(pt: PolyTensor, n: int) -> bool:
    """True iff level n satisfies the PDE exactly (boundary data checked separately)."""
    return all(p.is_zero() for p in residual_level(pt, n))


def boundary_factor_check(pt: PolyTensor, n: int) -> bool:
    """True iff every level-n coefficient is ``(1 - |z|^2) q`` with ``deg q <= n - 2``."""
    for p in pt.levels[n]:
        try:
            q = divide_exact(p, DISK_FACTOR)
        except DivisionRemainderError:
            return False
        if q.degree > n - 2:
            return False
    return True

