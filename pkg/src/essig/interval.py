"""One-dimensional Brownian motion stopped on leaving [-1, 1].

In one dimension level n of the signature is the single coefficient of
``e1^(x)n``, so each level of the expected signature is a polynomial in the
starting point ``x``.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Sequence

from .tensor import RATIONAL, FLOAT64, TruncatedTensor, dilate


class UnivarPoly:
    """Dense polynomial in x with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    def __add__(self, other: "UnivarPoly") -> "UnivarPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UnivarPoly([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "UnivarPoly":
        return UnivarPoly([-x for x in self.coeffs])

    def __sub__(self, other: "UnivarPoly") -> "UnivarPoly":
        return self + (-other)

    def __mul__(self, other) -> "UnivarPoly":
        if not isinstance(other, UnivarPoly):
            return UnivarPoly([Fraction(other) * x for x in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return UnivarPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UnivarPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UnivarPoly":
        out = UnivarPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnivarPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def derivative(self) -> "UnivarPoly":
        return UnivarPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def antiderivative(self) -> "UnivarPoly":
        """Antiderivative vanishing at 0."""
        return UnivarPoly([0] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def __call__(self, x):
        total = 0
        for c in reversed(self.coeffs):
            total = total * x + c
        return total

    def __repr__(self):
        return f"UnivarPoly({[str(c) for c in self.coeffs]})"


X = UnivarPoly([0, 1])
ONE = UnivarPoly([1])


def closed_form_level(n: int) -> UnivarPoly:
    """``(1 - x^2) ((1 - x)^(n-1) - (-1 - x)^(n-1)) / (2 n!)`` for n >= 2."""
    if n == 0:
        return ONE
    if n == 1:
        return UnivarPoly()
    base = ONE - X * X
    diff = (ONE - X) ** (n - 1) - (-ONE - X) ** (n - 1)
    return base * diff * Fraction(1, 2 * factorial(n))


def two_point_enumeration(n: int) -> UnivarPoly:
    """Average of ``(B_tau - x)^n / n!`` over the two exit points.

    Exit at +1 has probability ``(1 + x)/2`` and at -1 probability
    ``(1 - x)/2``; the path's signature only depends on its increment.
    """
    up = (ONE - X) ** n * ((ONE + X) * Fraction(1, 2))
    down = (-ONE - X) ** n * ((ONE - X) * Fraction(1, 2))
    return (up + down) * Fraction(1, factorial(n))


def _affine_fix(p: UnivarPoly) -> UnivarPoly:
    # add a + b x so that the result vanishes at x = -1 and x = 1
    p_plus, p_minus = p(Fraction(1)), p(Fraction(-1))
    a = -(p_plus + p_minus) / 2
    b = -(p_plus - p_minus) / 2
    return p + UnivarPoly([a, b])


def ode_recursion(N: int) -> list[UnivarPoly]:
    """Levels 0..N from ``rho_n'' = -rho_{n-2} - 2 rho_{n-1}'`` with zero boundary data."""
    if N < 0:
        raise ValueError("truncation must be non-negative")
    levels = [ONE, UnivarPoly()][: N + 1]
    for n in range(2, N + 1):
        rhs = -levels[n - 2] - levels[n - 1].derivative() * 2
        levels.append(_affine_fix(rhs.antiderivative().antiderivative()))
    return levels


def evaluate_interval(levels: Sequence[UnivarPoly], x, a=-1, b=1, scalar: str | None = None) -> TruncatedTensor:
    """Expected signature at ``x`` for exit from ``[a, b]``.

    The interval is mapped affinely onto ``[-1, 1]``; the half-length acts as
    a dilation of the tensor.
    """
    if not a < b:
        raise ValueError("need a < b")
    if scalar is None:
        scalar = RATIONAL if all(isinstance(v, (int, Fraction)) for v in (x, a, b)) else FLOAT64
    if scalar == RATIONAL:
        x, a, b = Fraction(x), Fraction(a), Fraction(b)
    else:
        x, a, b = float(x), float(a), float(b)
    if not a <= x <= b:
        raise ValueError("starting point outside the interval")
    half = (b - a) / 2
    u = (x - (a + b) / 2) / half
    values = [[p(u)] for p in levels]
    local = TruncatedTensor(1, len(levels) - 1, values, scalar)
    return dilate(half, local)


def levels_to_json(levels: Sequence[UnivarPoly]) -> list[dict]:
    return [
        {"level": n, "coeffs": [f"{c.numerator}/{c.denominator}" for c in p.coeffs]} for n, p in enumerate(levels)
    ]


def levels_from_json(data: list[dict]) -> list[UnivarPoly]:
    return [UnivarPoly([Fraction(c) for c in entry["coeffs"]]) for entry in sorted(data, key=lambda e: e["level"])]
