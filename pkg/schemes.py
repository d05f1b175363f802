"""
Schemes - Linear polynomial approximation schemes T_n
Partial sums, Cesaro means, triangular arrays, Gram projections and certified projection schemes
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from errors import (
    DegreeExceedsHorizon,
    HorizonExhausted,
    MissingRow,
    NotAHilbertSpace,
    SingularGram,
)
from series_core import TaylorPoly
from spaces import FunctionSpace

logger = logging.getLogger(__name__)

BUILTIN_ARRAYS = ("partial", "cesaro", "vallee-poussin")
SCHEME_NAMES = BUILTIN_ARRAYS + ("projection",)


# ============== TRIANGULAR ARRAYS ==============

class TriangularArray:
    """Rows a_n0..a_nn defining T_n(f) = sum_k a_nk s_k(f).

    Builtins generate rows on demand; explicit arrays hold a finite list
    and raise MissingRow past its end.
    """

    def __init__(
        self,
        rows: Optional[Sequence[Sequence[complex]]] = None,
        rule: Optional[Callable[[int], np.ndarray]] = None,
        name: str = "array",
    ):
        if (rows is None) == (rule is None):
            raise ValueError("give exactly one of rows or rule")
        self.name = name
        self._rule = rule
        self._rows: Optional[List[np.ndarray]] = None
        if rows is not None:
            checked = []
            for n, row in enumerate(rows):
                arr = np.asarray(row, dtype=complex).ravel()
                if arr.size != n + 1:
                    raise ValueError(f"row {n} has {arr.size} entries, expected {n + 1}")
                checked.append(arr)
            self._rows = checked

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[complex]], name: str = "array") -> "TriangularArray":
        return cls(rows=rows, name=name)

    @classmethod
    def from_pairs(cls, rows: Sequence[Sequence[Sequence[float]]], name: str = "array") -> "TriangularArray":
        """Rows of [re, im] pairs, as stored in array files."""
        return cls(rows=[[complex(re, im) for re, im in row] for row in rows], name=name)

    @classmethod
    def partial(cls) -> "TriangularArray":
        def rule(n: int) -> np.ndarray:
            row = np.zeros(n + 1, dtype=complex)
            row[n] = 1.0
            return row

        return cls(rule=rule, name="partial")

    @classmethod
    def cesaro(cls) -> "TriangularArray":
        return cls(rule=lambda n: np.full(n + 1, 1.0 / (n + 1), dtype=complex), name="cesaro")

    @classmethod
    def vallee_poussin(cls) -> "TriangularArray":
        """Row n averages s_k over ceil(n/2) <= k <= n."""

        def rule(n: int) -> np.ndarray:
            start = (n + 1) // 2
            row = np.zeros(n + 1, dtype=complex)
            row[start:] = 1.0 / (n + 1 - start)
            return row

        return cls(rule=rule, name="vallee-poussin")

    @classmethod
    def builtin(cls, name: str) -> "TriangularArray":
        constructors = {
            "partial": cls.partial,
            "cesaro": cls.cesaro,
            "vallee-poussin": cls.vallee_poussin,
        }
        if name not in constructors:
            raise ValueError(f"unknown builtin array {name!r}, expected one of {BUILTIN_ARRAYS}")
        return constructors[name]()

    def row(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("row index must be nonnegative")
        if self._rule is not None:
            return self._rule(n)
        if n >= len(self._rows):
            raise MissingRow(f"array {self.name!r} has rows 0..{len(self._rows) - 1}, asked for {n}")
        return self._rows[n]

    def coefficient_weights(self, n: int) -> np.ndarray:
        """Multiplier of c_j in T_n(f): sum_{k >= j} a_nk."""
        return np.cumsum(self.row(n)[::-1])[::-1]

    def __repr__(self) -> str:
        return f"TriangularArray({self.name!r})"


# ============== BASIC SCHEMES ==============

def partial_sum(n: int, f: TaylorPoly) -> TaylorPoly:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return f.truncate(n)


def cesaro(n: int, f: TaylorPoly, form: str = "coefficient") -> TaylorPoly:
    """sigma_n(f) = (1/(n+1)) sum_{k<=n} s_k(f).

    form="average" sums the partial sums; form="coefficient" scales c_k by
    (n + 1 - k)/(n + 1).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if form == "average":
        total = TaylorPoly.zero()
        for k in range(n + 1):
            total = total + partial_sum(k, f)
        return total * (1.0 / (n + 1))
    if form != "coefficient":
        raise ValueError(f"unknown Cesaro form {form!r}")
    c = f.padded(max(f.degree(), n) + 1)[: n + 1]
    weights = (n + 1 - np.arange(n + 1)) / (n + 1)
    return TaylorPoly(c * weights)


def apply_array(array: TriangularArray, n: int, f: TaylorPoly) -> TaylorPoly:
    weights = array.coefficient_weights(n)
    c = f.padded(max(f.degree(), n) + 1)[: n + 1]
    return TaylorPoly(c * weights)


def gram_projection(space: FunctionSpace, n: int, f: TaylorPoly) -> TaylorPoly:
    """Orthogonal projection of f onto polynomials of degree <= n.

    Solves H_n x = H[:n+1, :] c with the cached Cholesky factor of the
    leading block, where H = conj(G) is the coefficient form of the space.
    """
    if not space.is_hilbert:
        raise NotAHilbertSpace(f"{space.kind} space has no orthogonal projections")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > space.horizon:
        raise DegreeExceedsHorizon(f"n = {n} > horizon {space.horizon}")
    space.check_degree(f)
    deg = f.degree()
    if deg <= n:
        return f.truncate(n)

    c = f.padded(deg + 1)
    rhs = space.hermitian_form(deg)[: n + 1, :] @ c
    L = space.cholesky_factor(n)
    try:
        x = scipy.linalg.cho_solve((L, True), rhs)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SingularGram(str(e)) from e
    if not np.all(np.isfinite(x)):
        raise SingularGram(f"non-finite projection coefficients at n = {n}")
    return TaylorPoly(x)


# ============== SCHEME OBJECTS ==============

class Scheme(ABC):
    """A sequence of linear maps T_n with deg T_n(f) <= n."""

    kind: str = "scheme"

    @property
    def name(self) -> str:
        return self.kind

    @abstractmethod
    def apply(self, n: int, f: TaylorPoly) -> TaylorPoly:
        ...

    def __call__(self, n: int, f: TaylorPoly) -> TaylorPoly:
        return self.apply(n, f)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class PartialSumScheme(Scheme):
    kind = "partial"

    def apply(self, n: int, f: TaylorPoly) -> TaylorPoly:
        return partial_sum(n, f)


class CesaroScheme(Scheme):
    kind = "cesaro"

    def apply(self, n: int, f: TaylorPoly) -> TaylorPoly:
        return cesaro(n, f)


class ArrayScheme(Scheme):
    kind = "array"

    def __init__(self, array: TriangularArray):
        self.array = array

    @property
    def name(self) -> str:
        return self.array.name

    def apply(self, n: int, f: TaylorPoly) -> TaylorPoly:
        return apply_array(self.array, n, f)


class GramProjectionScheme(Scheme):
    kind = "projection"

    def __init__(self, space: FunctionSpace):
        if not space.is_hilbert:
            raise NotAHilbertSpace(f"{space.kind} space has no orthogonal projections")
        self.space = space

    def apply(self, n: int, f: TaylorPoly) -> TaylorPoly:
        return gram_projection(self.space, min(n, self.space.horizon), f)


# ============== CERTIFIED SCHEMES ==============

@dataclass(frozen=True)
class SchemeCertificate:
    """Stage k: projection of degree degrees[k] brings y_0..y_min(k, S-1) within 1/(k+1)."""

    M: float
    dense_sample: Tuple[TaylorPoly, ...]
    degrees: Tuple[int, ...]
    residuals: Tuple[float, ...]

    def target(self, k: int) -> float:
        return 1.0 / (k + 1)

    def holds(self, slack: float = 1e-10) -> bool:
        return all(r <= self.target(k) + slack for k, r in enumerate(self.residuals))


class CertifiedScheme(Scheme):
    """T_n = P_d with d the largest certified stage degree not above n.

    Before the first certified degree is reachable, T_n = P_n.
    """

    kind = "certified"

    def __init__(self, space: FunctionSpace, certificate: SchemeCertificate):
        self.space = space
        self.certificate = certificate
        self._degrees = np.asarray(certificate.degrees, dtype=int)

    def degree_for(self, n: int) -> int:
        reachable = self._degrees[self._degrees <= n]
        return int(reachable.max()) if reachable.size else n

    def apply(self, n: int, f: TaylorPoly) -> TaylorPoly:
        return gram_projection(self.space, min(self.degree_for(n), self.space.horizon), f)


def build_scheme_from_approximants(
    space: FunctionSpace,
    dense_sample: Sequence[TaylorPoly],
    M: float = 1.0,
    stages: Optional[int] = None,
    max_degree: Optional[int] = None,
) -> Tuple[CertifiedScheme, SchemeCertificate]:
    """Projection scheme with recorded residual certificate.

    Stage k targets 1/(k+1) over samples y_0..y_min(k, S-1) and uses the
    smallest adequate degree; degrees are nondecreasing because targets
    shrink and projection residuals are nonincreasing in the degree.
    """
    if not space.is_hilbert:
        raise NotAHilbertSpace(f"{space.kind} space has no orthogonal projections")
    if not dense_sample:
        raise ValueError("dense sample must be nonempty")
    if M < 1.0:
        raise ValueError(f"norm bound M must be at least 1, got {M}")
    for y in dense_sample:
        space.check_degree(y)
    stages = space.horizon + 1 if stages is None else int(stages)
    max_degree = space.horizon if max_degree is None else min(int(max_degree), space.horizon)

    start = time.perf_counter()
    cache: Dict[Tuple[int, int], float] = {}

    def residual(j: int, d: int) -> float:
        if (j, d) not in cache:
            y = dense_sample[j]
            cache[(j, d)] = space.norm(gram_projection(space, d, y) - y)
        return cache[(j, d)]

    degrees: List[int] = []
    residuals: List[float] = []
    d = 0
    for k in range(stages):
        target = 1.0 / (k + 1)
        active = range(min(k, len(dense_sample) - 1) + 1)
        while True:
            worst = max(residual(j, d) for j in active)
            if worst <= target:
                break
            if d >= max_degree:
                raise HorizonExhausted(
                    f"stage {k}: residual {worst:.3e} > {target:.3e} at max degree {max_degree}"
                )
            d += 1
        degrees.append(d)
        residuals.append(worst)

    certificate = SchemeCertificate(
        M=float(M),
        dense_sample=tuple(dense_sample),
        degrees=tuple(degrees),
        residuals=tuple(residuals),
    )
    logger.info(
        "Certified %d stages over %d samples, final degree %d, %.3fs",
        stages, len(dense_sample), degrees[-1], time.perf_counter() - start,
    )
    return CertifiedScheme(space, certificate), certificate


def scheme_from_name(name: str, space: Optional[FunctionSpace] = None) -> Scheme:
    if name == "partial":
        return PartialSumScheme()
    if name == "cesaro":
        return CesaroScheme()
    if name == "vallee-poussin":
        return ArrayScheme(TriangularArray.vallee_poussin())
    if name == "projection":
        if space is None:
            raise ValueError("the projection scheme needs a space")
        return GramProjectionScheme(space)
    raise ValueError(f"unknown scheme {name!r}, expected one of {SCHEME_NAMES}")


# ============== ERROR CURVES ==============

@dataclass
class SchemeReport:
    n: int
    error_norm: float
    image_norm: float
    degree: int
    opnorm: Optional[Any] = field(default=None)


def scheme_error_curve(
    scheme: Scheme,
    space: FunctionSpace,
    f: TaylorPoly,
    n_max: int,
    n_min: int = 0,
    opnorm: Optional[Callable[[int], Any]] = None,
) -> List[SchemeReport]:
    """||T_n f - f|| and ||T_n f|| for n_min <= n <= n_max; measurement only.

    opnorm, when given, maps n to an operator-norm estimate stored on each report.
    """
    if n_max > space.horizon:
        raise DegreeExceedsHorizon(f"n_max = {n_max} > horizon {space.horizon}")
    reports = []
    for n in range(n_min, n_max + 1):
        image = scheme.apply(n, f)
        reports.append(
            SchemeReport(
                n=n,
                error_norm=space.norm(image - f),
                image_norm=space.norm(image),
                degree=image.degree(),
                opnorm=None if opnorm is None else opnorm(n),
            )
        )
    return reports
