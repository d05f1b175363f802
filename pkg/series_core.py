"""
Series Core - Complex polynomial arithmetic and unit-circle sampling
Every function in the library enters as a finite Taylor truncation f = sum c_k z^k
"""

import logging
from dataclasses import dataclass
from typing import Any, Iterable, List, Sequence, Union

import numpy as np

from errors import NonFiniteValue

logger = logging.getLogger(__name__)

# degree() of the zero polynomial
ZERO_DEGREE = -1

Scalar = Union[complex, float, int]


def _as_coefficients(values: Any) -> np.ndarray:
    arr = np.array(values, dtype=complex).ravel()
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue("coefficients must be finite")
    return arr


def _as_scalar(value: Scalar) -> complex:
    c = complex(value)
    if not (np.isfinite(c.real) and np.isfinite(c.imag)):
        raise NonFiniteValue(f"scalar {value!r} is not finite")
    return c


def _horner(coeffs: np.ndarray, z):
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


class TaylorPoly:
    """Immutable dense coefficient vector c_0..c_d.

    Storage may carry trailing zeros; degree, equality and hashing only see
    the trimmed coefficients.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        arr = _as_coefficients(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs)
        arr.setflags(write=False)
        self._coeffs = arr

    # ---------- constructors ----------

    @classmethod
    def zero(cls) -> "TaylorPoly":
        return cls(())

    @classmethod
    def constant(cls, c: Scalar) -> "TaylorPoly":
        return cls([_as_scalar(c)])

    @classmethod
    def monomial(cls, n: int, c: Scalar = 1.0) -> "TaylorPoly":
        if n < 0:
            raise ValueError("monomial degree must be nonnegative")
        coeffs = np.zeros(n + 1, dtype=complex)
        coeffs[n] = _as_scalar(c)
        return cls(coeffs)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "TaylorPoly":
        """Build from JSON-style [[re, im], ...] pairs."""
        return cls([complex(re, im) for re, im in pairs])

    # ---------- inspection ----------

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    def degree(self) -> int:
        nonzero = np.flatnonzero(self._coeffs)
        return int(nonzero[-1]) if nonzero.size else ZERO_DEGREE

    def is_zero(self) -> bool:
        return self.degree() == ZERO_DEGREE

    def trimmed(self) -> np.ndarray:
        return self._coeffs[: self.degree() + 1]

    def padded(self, length: int) -> np.ndarray:
        """Coefficients as a length-`length` array; drops nothing but zeros."""
        trimmed = self.trimmed()
        if trimmed.size > length:
            raise ValueError(f"degree {trimmed.size - 1} does not fit in {length} slots")
        out = np.zeros(length, dtype=complex)
        out[: trimmed.size] = trimmed
        return out

    def coefficient(self, k: int) -> complex:
        return complex(self._coeffs[k]) if 0 <= k < self._coeffs.size else 0j

    def to_pairs(self) -> List[List[float]]:
        return [[float(c.real), float(c.imag)] for c in self.trimmed()]

    # ---------- derived polynomials ----------

    def truncate(self, n: int) -> "TaylorPoly":
        """Keep c_0..c_n."""
        if n < 0:
            return TaylorPoly.zero()
        return TaylorPoly(self._coeffs[: n + 1])

    def shift(self, k: int) -> "TaylorPoly":
        """Multiply by z^k."""
        if self.is_zero():
            return self
        return TaylorPoly(np.concatenate([np.zeros(k, dtype=complex), self.trimmed()]))

    def dilate(self, r: float) -> "TaylorPoly":
        """The polynomial z -> p(r z)."""
        trimmed = self.trimmed()
        return TaylorPoly(trimmed * r ** np.arange(trimmed.size))

    def allclose(self, other: "TaylorPoly", atol: float = 1e-12) -> bool:
        size = max(self._coeffs.size, other._coeffs.size, 1)
        a = np.zeros(size, dtype=complex)
        b = np.zeros(size, dtype=complex)
        a[: self._coeffs.size] = self._coeffs
        b[: other._coeffs.size] = other._coeffs
        return bool(np.max(np.abs(a - b)) <= atol)

    # ---------- operators ----------

    def __add__(self, other: "TaylorPoly") -> "TaylorPoly":
        return add(self, other)

    def __sub__(self, other: "TaylorPoly") -> "TaylorPoly":
        return subtract(self, other)

    def __neg__(self) -> "TaylorPoly":
        return negate(self)

    def __mul__(self, other):
        if isinstance(other, TaylorPoly):
            return multiply(self, other)
        return scale(other, self)

    def __rmul__(self, other):
        return scale(other, self)

    def __call__(self, z):
        return evaluate(self, z)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TaylorPoly):
            return NotImplemented
        return np.array_equal(self.trimmed(), other.trimmed())

    def __hash__(self) -> int:
        return hash(self.trimmed().tobytes())

    def __len__(self) -> int:
        return self._coeffs.size

    def __repr__(self) -> str:
        deg = self.degree()
        if deg == ZERO_DEGREE:
            return "TaylorPoly(0)"
        if deg <= 6:
            return f"TaylorPoly({np.array2string(self.trimmed(), precision=4)})"
        return f"TaylorPoly(degree={deg})"


@dataclass(frozen=True)
class CircleGrid:
    """The m nodes exp(2 pi i j / m), j = 0..m-1; nodes are computed on demand."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"CircleGrid needs a positive integer size, got {self.m!r}")

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.m) / self.m

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(1j * self.angles)


# ============== ARITHMETIC ==============

def add(p: TaylorPoly, q: TaylorPoly) -> TaylorPoly:
    a, b = p.coeffs, q.coeffs
    out = np.zeros(max(a.size, b.size), dtype=complex)
    out[: a.size] += a
    out[: b.size] += b
    return TaylorPoly(out)


def negate(p: TaylorPoly) -> TaylorPoly:
    return TaylorPoly(-p.coeffs)


def subtract(p: TaylorPoly, q: TaylorPoly) -> TaylorPoly:
    return add(p, negate(q))


def scale(c: Scalar, p: TaylorPoly) -> TaylorPoly:
    return TaylorPoly(_as_scalar(c) * p.coeffs)


def multiply(p: TaylorPoly, q: TaylorPoly) -> TaylorPoly:
    """Cauchy product."""
    if p.is_zero() or q.is_zero():
        return TaylorPoly.zero()
    return TaylorPoly(np.convolve(p.trimmed(), q.trimmed()))


def evaluate(p: TaylorPoly, z):
    """Horner evaluation; z may be a scalar or an array of points."""
    value = _horner(p.trimmed(), z)
    return complex(value) if np.ndim(value) == 0 else value


# ============== CIRCLE SAMPLING ==============

def sample_on_circle(p: TaylorPoly, grid: CircleGrid) -> np.ndarray:
    """Values of p at every grid node, by Horner per node."""
    return np.asarray(_horner(p.trimmed(), grid.nodes))


def fast_sample_on_circle(p: TaylorPoly, grid: CircleGrid) -> np.ndarray:
    """Same nodes as sample_on_circle, evaluated with one inverse FFT.

    Coefficients beyond m - 1 fold onto k mod m, since z^m = 1 on the grid.
    """
    m = grid.m
    trimmed = p.trimmed()
    if trimmed.size == 0:
        return np.zeros(m, dtype=complex)
    blocks = -(-trimmed.size // m)
    folded = np.zeros(blocks * m, dtype=complex)
    folded[: trimmed.size] = trimmed
    folded = folded.reshape(blocks, m).sum(axis=0)
    return m * np.fft.ifft(folded)


def circle_sup(p: TaylorPoly, oversampling: int, fft_threshold: int = 64) -> float:
    """Sampled max |p| on the circle with m = oversampling * (deg p + 1) nodes."""
    deg = p.degree()
    if deg == ZERO_DEGREE:
        return 0.0
    grid = CircleGrid(oversampling * (deg + 1))
    if deg >= fft_threshold:
        values = fast_sample_on_circle(p, grid)
    else:
        values = sample_on_circle(p, grid)
    return float(np.max(np.abs(values)))


def random_taylor_poly(rng: np.random.Generator, degree: int, scale: float = 1.0) -> TaylorPoly:
    """Complex Gaussian coefficients c_0..c_degree with E|c_k|^2 = scale^2."""
    size = degree + 1
    coeffs = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) * (scale / np.sqrt(2.0))
    return TaylorPoly(coeffs)
