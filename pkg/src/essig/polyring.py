"""Exact bivariate polynomials in (z1, z2) over the rationals."""

from __future__ import annotations

from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from .tensor import to_scalar, RATIONAL

__all__ = [
    "BivarPoly",
    "DivisionRemainderError",
    "Z1",
    "Z2",
    "ONE",
    "DISK_FACTOR",
    "p_add",
    "p_mul",
    "p_scale",
    "partial",
    "laplacian",
    "homogeneous_parts",
    "divide_exact",
    "evaluate",
    "poly_to_json",
    "poly_from_json",
]


class DivisionRemainderError(ArithmeticError):
    """Division left a nonzero remainder; the remainder is attached."""

    def __init__(self, remainder: "BivarPoly"):
        super().__init__(f"division is not exact, remainder {remainder}")
        self.remainder = remainder


class BivarPoly:
    """Sparse map ``(i, j) -> coefficient`` for the monomial ``z1**i * z2**j``."""

    __slots__ = ("_terms", "degree", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError("exponents must be non-negative")
            c = to_scalar(c, RATIONAL)
            if c != 0:
                clean[(int(i), int(j))] = c
        self._terms = clean
        self.degree = max((i + j for i, j in clean), default=float("-inf"))
        self._hash = None

    @classmethod
    def constant(cls, c) -> "BivarPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "BivarPoly":
        return cls({(i, j): c})

    @property
    def terms(self) -> Mapping[tuple[int, int], Fraction]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, i: int, j: int) -> Fraction:
        return self._terms.get((i, j), Fraction(0))

    # ring operations -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, BivarPoly):
            other = BivarPoly.constant(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return BivarPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, BivarPoly):
            other = BivarPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BivarPoly):
            c = to_scalar(other, RATIONAL)
            return BivarPoly({m: c * v for m, v in self._terms.items()})
        out: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + c1 * c2
        return BivarPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, BivarPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == BivarPoly.constant(other)
        return NotImplemented

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __call__(self, z1, z2):
        return evaluate(self, z1, z2)

    def sorted_terms(self) -> list[tuple[tuple[int, int], Fraction]]:
        """Terms ordered by (total degree, exponent of z1)."""
        return sorted(self._terms.items(), key=lambda t: (t[0][0] + t[0][1], t[0][0]))

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for (i, j), c in self.sorted_terms():
            mono = "*".join(
                s for s in (f"z1^{i}" if i > 1 else "z1" if i else "", f"z2^{j}" if j > 1 else "z2" if j else "") if s
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


ONE = BivarPoly.constant(1)
Z1 = BivarPoly.monomial(1, 0)
Z2 = BivarPoly.monomial(0, 1)
DISK_FACTOR = ONE - Z1 * Z1 - Z2 * Z2


def p_add(p: BivarPoly, q: BivarPoly) -> BivarPoly:
    return p + q


def p_mul(p: BivarPoly, q: BivarPoly) -> BivarPoly:
    return p * q


def p_scale(c, p: BivarPoly) -> BivarPoly:
    return p * to_scalar(c, RATIONAL)


def partial(p: BivarPoly, axis: int) -> BivarPoly:
    """Formal derivative in z1 (``axis=1``) or z2 (``axis=2``)."""
    if axis == 1:
        return BivarPoly({(i - 1, j): i * c for (i, j), c in p.terms.items() if i})
    if axis == 2:
        return BivarPoly({(i, j - 1): j * c for (i, j), c in p.terms.items() if j})
    raise ValueError(f"axis must be 1 or 2, got {axis}")


def laplacian(p: BivarPoly) -> BivarPoly:
    return partial(partial(p, 1), 1) + partial(partial(p, 2), 2)


def homogeneous_parts(p: BivarPoly) -> dict[int, BivarPoly]:
    """Split into homogeneous components keyed by total degree."""
    buckets: dict[int, dict] = {}
    for (i, j), c in p.terms.items():
        buckets.setdefault(i + j, {})[(i, j)] = c
    return {k: BivarPoly(buckets[k]) for k in sorted(buckets)}


def _lex_leading(p: BivarPoly) -> tuple[tuple[int, int], Fraction]:
    m = max(p.terms)
    return m, p.terms[m]


def divide_exact(p: BivarPoly, q: BivarPoly) -> BivarPoly:
    """Return ``r`` with ``p == q * r``; raise if the division leaves a remainder.

    Uses multivariate division with lexicographic order (z1 > z2).  With a
    single divisor that order is a Groebner basis of the ideal, so a zero
    remainder is equivalent to divisibility.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    (qi, qj), qc = _lex_leading(q)
    quotient: dict = {}
    remainder: dict = {}
    work = p
    while not work.is_zero():
        (i, j), c = _lex_leading(work)
        if i >= qi and j >= qj:
            t = BivarPoly.monomial(i - qi, j - qj, c / qc)
            quotient[(i - qi, j - qj)] = quotient.get((i - qi, j - qj), 0) + c / qc
            work = work - t * q
        else:
            remainder[(i, j)] = c
            work = work - BivarPoly.monomial(i, j, c)
    if remainder:
        raise DivisionRemainderError(BivarPoly(remainder))
    return BivarPoly(quotient)


def evaluate(p: BivarPoly, z1, z2):
    """Evaluate at a point; exact when the point is rational, float otherwise."""
    total = 0
    for (i, j), c in p.terms.items():
        total += c * z1**i * z2**j
    if not isinstance(total, (int, Fraction)):
        return float(total)
    return Fraction(total)


def poly_to_json(p: BivarPoly) -> list[dict]:
    return [
        {"e1": i, "e2": j, "c": f"{c.numerator}/{c.denominator}"} for (i, j), c in p.sorted_terms()
    ]


def poly_from_json(data: list[dict]) -> BivarPoly:
    return BivarPoly({(int(t["e1"]), int(t["e2"])): Fraction(t["c"]) for t in data})
