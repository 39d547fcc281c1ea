"""Truncated free tensor algebra T^(N)(R^d).

A :class:`TruncatedTensor` stores one dense coefficient array per level
``k = 0..N``, of length ``d**k``.  Coefficients are indexed by words in the
letters ``1..d`` with the first letter most significant, so the word
``i_1 ... i_k`` lives at ``sum((i_j - 1) * d**(k - j))``.

Two scalar kinds are supported: ``"rational"`` (``fractions.Fraction`` held
in object arrays, exact) and ``"float64"``.  Arithmetic between different
kinds is rejected rather than coerced.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

RATIONAL = "rational"
FLOAT64 = "float64"
SCALAR_KINDS = (RATIONAL, FLOAT64)

__all__ = [
    "RATIONAL",
    "FLOAT64",
    "TruncatedTensor",
    "word_to_index",
    "index_to_word",
    "words",
    "zero",
    "unit",
    "add",
    "scale",
    "mul",
    "inverse",
    "exp_increment",
    "project_word",
    "project_level",
    "dilate",
    "rotate",
    "homogeneous_norm",
    "rotation_matrix",
    "tensor_to_dict",
    "tensor_from_dict",
]


class SingularElementError(ArithmeticError):
    """Raised when inverting a tensor whose level-0 coefficient vanishes."""


def to_scalar(value, scalar: str):
    """Convert ``value`` to the representation used by ``scalar``.

    Floats are refused for the rational kind: an inexact input would silently
    poison an exact computation.
    """
    if scalar == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (Rational, np.integer)):
            return Fraction(int(value.numerator), int(value.denominator))
        if isinstance(value, str):
            return Fraction(value)
        raise TypeError(f"cannot use inexact value {value!r} with rational scalars")
    if scalar == FLOAT64:
        return float(value)
    raise ValueError(f"unknown scalar kind {scalar!r}")


def _check_kind(scalar: str) -> None:
    if scalar not in SCALAR_KINDS:
        raise ValueError(f"unknown scalar kind {scalar!r}; expected one of {SCALAR_KINDS}")


def _dtype(scalar: str):
    return object if scalar == RATIONAL else np.float64


def _zeros(length: int, scalar: str) -> np.ndarray:
    if scalar == RATIONAL:
        out = np.empty(length, dtype=object)
        out[:] = [Fraction(0)] * length
        return out
    return np.zeros(length, dtype=np.float64)


def _as_level(values, length: int, scalar: str) -> np.ndarray:
    if scalar == RATIONAL:
        seq = list(np.asarray(values, dtype=object).ravel())
        out = np.empty(len(seq), dtype=object)
        out[:] = [to_scalar(v, RATIONAL) for v in seq]
    else:
        out = np.array(values, dtype=np.float64).ravel()
    if out.shape != (length,):
        raise ValueError(f"level array has {out.shape[0]} entries, expected {length}")
    return out


# --------------------------------------------------------------------- words


def word_to_index(word, d: int) -> int:
    """Integer position of ``word`` inside its level.

    ``word`` may be a string of digits (``"112"``, only for ``d <= 9``) or a
    sequence of integer letters.
    """
    letters = _letters(word)
    idx = 0
    for letter in letters:
        if not 1 <= letter <= d:
            raise IndexError(f"letter {letter} outside 1..{d}")
        idx = idx * d + (letter - 1)
    return idx


def index_to_word(index: int, length: int, d: int) -> tuple[int, ...]:
    if not 0 <= index < d**length:
        raise IndexError(f"index {index} outside level {length} of dimension {d}")
    letters = []
    for _ in range(length):
        index, r = divmod(index, d)
        letters.append(r + 1)
    return tuple(reversed(letters))


def words(d: int, length: int) -> list[tuple[int, ...]]:
    """All words of a given length, in storage order."""
    return list(itertools.product(range(1, d + 1), repeat=length))


def word_str(word: Sequence[int]) -> str:
    return "".join(str(letter) for letter in word)


def _letters(word) -> tuple[int, ...]:
    if isinstance(word, str):
        return tuple(int(ch) for ch in word)
    return tuple(int(letter) for letter in word)


# -------------------------------------------------------------------- tensor


class TruncatedTensor:
    """Element of the truncated tensor algebra, immutable once built."""

    __slots__ = ("dimension", "truncation", "scalar", "levels")

    def __init__(self, dimension: int, truncation: int, levels, scalar: str = FLOAT64):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        if truncation < 0:
            raise ValueError("truncation must be non-negative")
        _check_kind(scalar)
        levels = list(levels)
        if len(levels) != truncation + 1:
            raise ValueError(f"expected {truncation + 1} levels, got {len(levels)}")
        built = []
        for k, lev in enumerate(levels):
            arr = _as_level(lev, dimension**k, scalar)
            arr.flags.writeable = False
            built.append(arr)
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "truncation", truncation)
        object.__setattr__(self, "scalar", scalar)
        object.__setattr__(self, "levels", tuple(built))

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedTensor is immutable")

    @classmethod
    def from_flat(cls, dimension: int, truncation: int, flat, scalar: str = FLOAT64):
        """Build from levels concatenated in order 0..N."""
        flat = np.asarray(flat, dtype=_dtype(scalar)).ravel()
        levels, start = [], 0
        for k in range(truncation + 1):
            n = dimension**k
            levels.append(flat[start : start + n])
            start += n
        if start != flat.shape[0]:
            raise ValueError("flat array length does not match dimension/truncation")
        return cls(dimension, truncation, levels, scalar)

    @classmethod
    def from_words(cls, dimension: int, truncation: int, coeffs: dict, scalar: str = FLOAT64):
        """Build from a ``{word: value}`` mapping; missing words are zero."""
        levels = [_zeros(dimension**k, scalar) for k in range(truncation + 1)]
        for word, value in coeffs.items():
            letters = _letters(word)
            if len(letters) > truncation:
                raise IndexError(f"word {word!r} longer than truncation {truncation}")
            levels[len(letters)][word_to_index(letters, dimension)] = to_scalar(value, scalar)
        return cls(dimension, truncation, levels, scalar)

    # -- conversions

    def flat(self) -> np.ndarray:
        return np.concatenate(self.levels)

    def astype(self, scalar: str) -> "TruncatedTensor":
        """Change scalar kind: rational -> float is rounding, float -> rational is exact."""
        _check_kind(scalar)
        if scalar == self.scalar:
            return self
        if scalar == FLOAT64:
            levels = [np.array([float(x) for x in lev], dtype=np.float64) for lev in self.levels]
        else:
            levels = [[Fraction(float(x)) for x in lev] for lev in self.levels]
        return TruncatedTensor(self.dimension, self.truncation, levels, scalar)

    def truncate(self, truncation: int) -> "TruncatedTensor":
        """Project onto a lower truncation level (the quotient map)."""
        if truncation > self.truncation:
            raise ValueError("can only truncate to a lower level")
        return TruncatedTensor(self.dimension, truncation, self.levels[: truncation + 1], self.scalar)

    def __getitem__(self, word):
        return project_word(self, word)

    def items(self):
        """Iterate ``(word, value)`` over all coefficients."""
        for k, lev in enumerate(self.levels):
            for idx, value in enumerate(lev):
                yield index_to_word(idx, k, self.dimension), value

    # -- arithmetic sugar

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1, other))

    def __neg__(self):
        return scale(-1, self)

    def __rmul__(self, lam):
        return scale(lam, self)

    def __matmul__(self, other):
        return mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, TruncatedTensor):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.truncation == other.truncation
            and self.scalar == other.scalar
            and all(np.array_equal(a, b) for a, b in zip(self.levels, other.levels))
        )

    __hash__ = None

    def allclose(self, other: "TruncatedTensor", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        _check_compatible(self, other, kinds=False)
        return all(
            np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), atol=atol, rtol=rtol)
            for a, b in zip(self.levels, other.levels)
        )

    def __repr__(self):
        parts = []
        for word, value in self.items():
            if value != 0:
                parts.append(f"{word_str(word) or '()'}: {value}")
        body = ", ".join(parts) if parts else "0"
        return f"TruncatedTensor(d={self.dimension}, N={self.truncation}, {self.scalar}; {body})"


def _check_compatible(a: TruncatedTensor, b: TruncatedTensor, kinds: bool = True) -> None:
    if a.dimension != b.dimension or a.truncation != b.truncation:
        raise ValueError(
            f"shape mismatch: (d={a.dimension}, N={a.truncation}) vs (d={b.dimension}, N={b.truncation})"
        )
    if kinds and a.scalar != b.scalar:
        raise TypeError(f"scalar kind mismatch: {a.scalar} vs {b.scalar}")


# ---------------------------------------------------------------- operations


def zero(d: int, N: int, scalar: str = FLOAT64) -> TruncatedTensor:
    return TruncatedTensor(d, N, [_zeros(d**k, scalar) for k in range(N + 1)], scalar)


def unit(d: int, N: int, scalar: str = FLOAT64) -> TruncatedTensor:
    levels = [_zeros(d**k, scalar) for k in range(N + 1)]
    levels[0][0] = to_scalar(1, scalar)
    return TruncatedTensor(d, N, levels, scalar)


def add(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    _check_compatible(a, b)
    return TruncatedTensor(a.dimension, a.truncation, [x + y for x, y in zip(a.levels, b.levels)], a.scalar)


def scale(lam, a: TruncatedTensor) -> TruncatedTensor:
    lam = to_scalar(lam, a.scalar)
    return TruncatedTensor(a.dimension, a.truncation, [lam * x for x in a.levels], a.scalar)


def _mul_levels(a_levels, b_levels, N: int, scalar: str, d: int) -> list[np.ndarray]:
    out = []
    for n in range(N + 1):
        acc = _zeros(d**n, scalar)
        for k in range(n + 1):
            acc = acc + np.multiply.outer(a_levels[k], b_levels[n - k]).ravel()
        out.append(acc)
    return out


def mul(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    """Tensor product truncated at level N (graded convolution)."""
    _check_compatible(a, b)
    levels = _mul_levels(a.levels, b.levels, a.truncation, a.scalar, a.dimension)
    return TruncatedTensor(a.dimension, a.truncation, levels, a.scalar)


def inverse(a: TruncatedTensor) -> TruncatedTensor:
    """Multiplicative inverse via the finite geometric series in ``1 - a/a_0``."""
    a0 = a.levels[0][0]
    if a0 == 0:
        raise SingularElementError("level-0 coefficient is zero; tensor is not invertible")
    inv0 = 1 / a0 if a.scalar == FLOAT64 else Fraction(1) / a0
    one = unit(a.dimension, a.truncation, a.scalar)
    x = add(one, scale(-inv0, a))  # level 0 of x is zero, so x^(N+1) vanishes
    total, power = one, one
    for _ in range(a.truncation):
        power = mul(power, x)
        total = add(total, power)
    return scale(inv0, total)


def exp_increment(v, N: int, scalar: str = FLOAT64) -> TruncatedTensor:
    """Signature of the straight segment with increment ``v``: level n is v^n / n!."""
    v = _as_level(v, len(v), scalar)
    d = v.shape[0]
    levels = [_as_level([1], 1, scalar)]
    for n in range(1, N + 1):
        step = np.multiply.outer(levels[-1], v).ravel()
        levels.append(step * Fraction(1, n) if scalar == RATIONAL else step / n)
    return TruncatedTensor(d, N, levels, scalar)


def project_word(a: TruncatedTensor, word):
    letters = _letters(word)
    if len(letters) > a.truncation:
        raise IndexError(f"word of length {len(letters)} exceeds truncation {a.truncation}")
    return a.levels[len(letters)][word_to_index(letters, a.dimension)]


def project_level(a: TruncatedTensor, n: int) -> np.ndarray:
    if not 0 <= n <= a.truncation:
        raise IndexError(f"level {n} outside 0..{a.truncation}")
    return a.levels[n]


def dilate(eps, a: TruncatedTensor) -> TruncatedTensor:
    """Scale level n by ``eps**n``."""
    eps = to_scalar(eps, a.scalar)
    if eps < 0:
        raise ValueError("dilation factor must be non-negative")
    return TruncatedTensor(a.dimension, a.truncation, [eps**n * lev for n, lev in enumerate(a.levels)], a.scalar)


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotate(R, a: TruncatedTensor) -> TruncatedTensor:
    """Letter-wise linear action of a 2x2 matrix: level n transforms by R^{(x)n}."""
    if a.dimension != 2:
        raise ValueError("rotate is only defined for dimension 2")
    R = np.asarray(R, dtype=object if a.scalar == RATIONAL else np.float64)
    if R.shape != (2, 2):
        raise ValueError("rotation must be a 2x2 matrix")
    if a.scalar == RATIONAL:
        R = np.vectorize(lambda x: to_scalar(x, RATIONAL), otypes=[object])(R)
    levels = []
    for n, lev in enumerate(a.levels):
        if n == 0:
            levels.append(lev)
            continue
        t = lev.reshape((2,) * n)
        for axis in range(n):
            t = np.moveaxis(np.tensordot(R, t, axes=([1], [axis])), 0, axis)
        levels.append(t.ravel())
    return TruncatedTensor(2, a.truncation, levels, a.scalar)


def homogeneous_norm(a: TruncatedTensor) -> float:
    """``max_i |rho_i(a)|^(1/i)`` with the Euclidean norm on each level."""
    if a.truncation < 1:
        raise ValueError("homogeneous norm needs truncation >= 1")
    best = 0.0
    for i in range(1, a.truncation + 1):
        lev = np.asarray([float(x) for x in a.levels[i]]) if a.scalar == RATIONAL else a.levels[i]
        best = max(best, float(np.linalg.norm(lev)) ** (1.0 / i))
    return best


# --------------------------------------------------------------------- JSON


def _encode_scalar(value, scalar: str):
    if scalar == RATIONAL:
        return f"{value.numerator}/{value.denominator}"
    return float(value)


def tensor_to_dict(a: TruncatedTensor, encode=None) -> dict:
    """JSON-ready mapping; zero coefficients are omitted.

    ``encode`` overrides scalar encoding (used for polynomial-valued tensors).
    """
    enc = encode or (lambda v: _encode_scalar(v, a.scalar))
    levels = []
    for k, lev in enumerate(a.levels):
        coeffs = {}
        for idx, value in enumerate(lev):
            if value != 0:
                coeffs[word_str(index_to_word(idx, k, a.dimension))] = enc(value)
        levels.append({"level": k, "coeffs": coeffs})
    return {"dimension": a.dimension, "truncation": a.truncation, "scalar": a.scalar, "levels": levels}


def tensor_from_dict(data: dict) -> TruncatedTensor:
    d, N, scalar = int(data["dimension"]), int(data["truncation"]), data["scalar"]
    coeffs = {}
    for entry in data["levels"]:
        for word, value in entry["coeffs"].items():
            if len(word) != int(entry["level"]):
                raise ValueError(f"word {word!r} listed under level {entry['level']}")
            coeffs[word] = Fraction(value) if scalar == RATIONAL else float(value)
    return TruncatedTensor.from_words(d, N, coeffs, scalar)


def group_like_from_increments(increments: Iterable, N: int, scalar: str = FLOAT64) -> TruncatedTensor:
    """Ordered product of segment exponentials (signature of a piecewise-linear path)."""
    increments = list(increments)
    if not increments:
        raise ValueError("need at least one increment")
    d = len(increments[0])
    out = unit(d, N, scalar)
    for v in increments:
        out = mul(out, exp_increment(v, N, scalar))
    return out
