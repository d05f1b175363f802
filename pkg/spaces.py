"""
Spaces - Banach holomorphic function spaces on the unit disk, truncated at degree N
Each space evaluates a norm (and an inner product when Hilbert) on TaylorPoly inputs
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg

import config
from errors import (
    DegreeExceedsHorizon,
    NonFiniteValue,
    NonpositiveWeight,
    NotAHilbertSpace,
    NotHermitian,
    NotPositiveDefinite,
)
from series_core import TaylorPoly, circle_sup

logger = logging.getLogger(__name__)


# ============== WEIGHTS ==============

@dataclass(frozen=True)
class WeightSequence:
    """Positive monomial weights alpha_0..alpha_N.

    certificate, when given, is a claimed bound delta_n >= |alpha_n^(1/n) - 1|.
    """

    alpha: np.ndarray
    certificate: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float).ravel()
        if alpha.size == 0:
            raise NonpositiveWeight("weight sequence is empty")
        if not np.all(np.isfinite(alpha)):
            raise NonFiniteValue("weights must be finite")
        bad = np.flatnonzero(alpha <= 0)
        if bad.size:
            raise NonpositiveWeight(f"alpha_{bad[0]} = {alpha[bad[0]]} is not positive")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        if self.certificate is not None:
            cert = np.array(self.certificate, dtype=float).ravel()
            if cert.size != alpha.size:
                raise ValueError("certificate must have one entry per weight")
            cert.setflags(write=False)
            object.__setattr__(self, "certificate", cert)

    @property
    def horizon(self) -> int:
        return self.alpha.size - 1

    @classmethod
    def constant(cls, horizon: int, value: float = 1.0) -> "WeightSequence":
        return cls(np.full(horizon + 1, float(value)))

    @classmethod
    def from_exponent(cls, exponent: float, horizon: int) -> "WeightSequence":
        """alpha_n = (n + 1)^exponent."""
        return cls((np.arange(horizon + 1) + 1.0) ** exponent)


def _root_deviation(alpha: np.ndarray, indices: np.ndarray) -> np.ndarray:
    # |alpha_n^(1/n) - 1| through logs, so 2^n style weights never overflow
    return np.abs(np.expm1(np.log(alpha[indices]) / indices))


def check_weight_admissible(weights, threshold: Optional[float] = None) -> Dict[str, Any]:
    """Trend check of lim alpha_n^(1/n) = 1 on the last half of the horizon.

    A finite horizon can never decide the limit, so the report is marked
    non-conclusive whatever the outcome.
    """
    if not isinstance(weights, WeightSequence):
        weights = WeightSequence(weights)
    threshold = config.ADMISSIBILITY_THRESHOLD if threshold is None else threshold
    N = weights.horizon

    if N < 1:
        return {
            "horizon": N,
            "tail_start": None,
            "tail_max_deviation": 0.0,
            "horizon_deviation": 0.0,
            "threshold": threshold,
            "passes": True,
            "certificate_holds": None,
            "conclusive": False,
            "note": "horizon too short for any trend",
        }

    tail = np.arange(max(1, (N + 1) // 2), N + 1)
    deviations = _root_deviation(weights.alpha, tail)
    tail_max = float(np.max(deviations))

    certificate_holds = None
    if weights.certificate is not None:
        cert = weights.certificate[tail]
        monotone = bool(np.all(np.diff(cert) <= 0))
        certificate_holds = monotone and bool(np.all(deviations <= cert))

    return {
        "horizon": N,
        "tail_start": int(tail[0]),
        "tail_max_deviation": tail_max,
        "horizon_deviation": float(deviations[-1]),
        "threshold": threshold,
        "passes": tail_max <= threshold,
        "certificate_holds": certificate_holds,
        "conclusive": False,
        "note": "finite-horizon trend diagnostic, not a decision about the limit",
    }


# ============== GRAM MATRICES ==============

class GramMatrix:
    """Hermitian positive definite G[j, k] = <z^j, z^k>, 0 <= j, k <= N.

    Inner products are linear in the first slot, so for coefficient vectors
    <f, g> = g^H H f with H = G^T = conj(G). The Cholesky factor of H is
    computed once here and reused by every projection.
    """

    def __init__(self, entries, hermitian_tol: float = config.HERMITIAN_TOL):
        G = np.array(entries, dtype=complex)
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] == 0:
            raise ValueError(f"Gram matrix must be square and nonempty, got shape {G.shape}")
        if not np.all(np.isfinite(G)):
            raise NonFiniteValue("Gram matrix has non-finite entries")

        scale = max(1.0, float(np.max(np.abs(G))))
        asymmetry = float(np.max(np.abs(G - G.conj().T)))
        if asymmetry > hermitian_tol * scale:
            raise NotHermitian(f"max |G - G^H| = {asymmetry:.3e}")
        G = 0.5 * (G + G.conj().T)

        start = time.perf_counter()
        try:
            L = scipy.linalg.cholesky(G.conj(), lower=True)
        except np.linalg.LinAlgError as e:
            raise NotPositiveDefinite(str(e)) from e
        pivots = np.real(np.diag(L))
        if not np.all(pivots > 0):
            raise NotPositiveDefinite(f"smallest pivot {pivots.min():.3e}")

        G.setflags(write=False)
        L.setflags(write=False)
        self._entries = G
        self._factor = L
        logger.info(
            "Factored %dx%d Gram matrix in %.3fs (smallest pivot %.3e)",
            G.shape[0], G.shape[0], time.perf_counter() - start, pivots.min(),
        )

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "GramMatrix":
        return cls(np.diag(np.asarray(values, dtype=complex)))

    @classmethod
    def from_pairs(cls, rows: Sequence[Sequence[Sequence[float]]]) -> "GramMatrix":
        """Row-major [[[re, im], ...], ...] as stored in space descriptors."""
        return cls([[complex(re, im) for re, im in row] for row in rows])

    def to_pairs(self) -> List[List[List[float]]]:
        return [[[float(x.real), float(x.imag)] for x in row] for row in self._entries]

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def horizon(self) -> int:
        return self._entries.shape[0] - 1

    def hermitian_form(self, up_to: int) -> np.ndarray:
        """Leading block of H = conj(G)."""
        return self._entries[: up_to + 1, : up_to + 1].conj()

    def cholesky_factor(self, up_to: int) -> np.ndarray:
        """Lower L_n with H_n = L_n L_n^H (leading block of the full factor)."""
        return self._factor[: up_to + 1, : up_to + 1]


# ============== SPACES ==============

class FunctionSpace(ABC):
    """A finite-horizon truncation of a Banach holomorphic function space."""

    kind: str = "abstract"

    def __init__(self, horizon: int):
        if horizon < 0:
            raise ValueError("horizon must be nonnegative")
        self.horizon = int(horizon)

    @property
    def is_hilbert(self) -> bool:
        return False

    def check_degree(self, f: TaylorPoly) -> None:
        if f.degree() > self.horizon:
            raise DegreeExceedsHorizon(f"degree {f.degree()} > horizon {self.horizon} ({self.kind})")

    @abstractmethod
    def norm(self, f: TaylorPoly) -> float:
        ...

    def inner_product(self, f: TaylorPoly, g: TaylorPoly) -> complex:
        raise NotAHilbertSpace(f"{self.kind} space has no inner product")

    def hermitian_form(self, up_to: int) -> np.ndarray:
        raise NotAHilbertSpace(f"{self.kind} space has no Gram matrix")

    def cholesky_factor(self, up_to: int) -> np.ndarray:
        raise NotAHilbertSpace(f"{self.kind} space has no Gram matrix")

    def monomial_norms(self, up_to: int) -> np.ndarray:
        self._check_up_to(up_to)
        return np.array([self.norm(TaylorPoly.monomial(n)) for n in range(up_to + 1)])

    def _check_up_to(self, up_to: int) -> None:
        if up_to > self.horizon:
            raise DegreeExceedsHorizon(f"up_to {up_to} > horizon {self.horizon}")

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """JSON descriptor of the space."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}(horizon={self.horizon})"


class _GramFormMixin:
    """Norm and inner product from a Hermitian coefficient form H."""

    def _form_vectors(self, f: TaylorPoly, g: TaylorPoly):
        self.check_degree(f)
        self.check_degree(g)
        size = max(f.degree(), g.degree(), 0) + 1
        return f.padded(size), g.padded(size), size

    def inner_product(self, f: TaylorPoly, g: TaylorPoly) -> complex:
        a, b, size = self._form_vectors(f, g)
        H = self.hermitian_form(size - 1)
        return complex(np.vdot(b, H @ a))

    def _form_norm(self, f: TaylorPoly) -> float:
        self.check_degree(f)
        if f.is_zero():
            return 0.0
        c = f.trimmed()
        # ||L^H c||_2 avoids the cancellation in sqrt(c^H H c)
        L = self.cholesky_factor(c.size - 1)
        return float(np.linalg.norm(L.conj().T @ c))


class WeightedCoefficientSpace(_GramFormMixin, FunctionSpace):
    """||f|| = (sum |c_n|^p alpha_n^p)^(1/p); p = 2 with alpha = 1 is H^2."""

    kind = "weighted"

    def __init__(self, weights: WeightSequence, p: float = 2.0):
        if not 1.0 <= p < np.inf:
            raise ValueError(f"p must lie in [1, inf), got {p}")
        super().__init__(weights.horizon)
        self.weights = weights
        self.p = float(p)

    @classmethod
    def hardy(cls, horizon: int = None) -> "WeightedCoefficientSpace":
        horizon = config.DEFAULT_HORIZON if horizon is None else horizon
        return cls(WeightSequence.constant(horizon), p=2.0)

    @property
    def is_hilbert(self) -> bool:
        return self.p == 2.0

    def norm(self, f: TaylorPoly) -> float:
        self.check_degree(f)
        if f.is_zero():
            return 0.0
        c = f.trimmed()
        v = np.abs(c) * self.weights.alpha[: c.size]
        if self.p == 2.0:
            return float(np.linalg.norm(v))
        top = float(np.max(v))
        if top == 0.0:
            return 0.0
        return top * float(np.sum((v / top) ** self.p) ** (1.0 / self.p))

    def inner_product(self, f: TaylorPoly, g: TaylorPoly) -> complex:
        if not self.is_hilbert:
            raise NotAHilbertSpace(f"weighted l^{self.p:g} space has no inner product")
        a, b, size = self._form_vectors(f, g)
        return complex(np.sum(a * b.conj() * self.weights.alpha[:size] ** 2))

    def hermitian_form(self, up_to: int) -> np.ndarray:
        if not self.is_hilbert:
            return super().hermitian_form(up_to)
        return np.diag(self.weights.alpha[: up_to + 1] ** 2).astype(complex)

    def cholesky_factor(self, up_to: int) -> np.ndarray:
        if not self.is_hilbert:
            return super().cholesky_factor(up_to)
        return np.diag(self.weights.alpha[: up_to + 1]).astype(complex)

    def monomial_norms(self, up_to: int) -> np.ndarray:
        self._check_up_to(up_to)
        return np.array(self.weights.alpha[: up_to + 1])

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "p": self.p, "alpha": self.weights.alpha.tolist()}


class GramHilbertSpace(_GramFormMixin, FunctionSpace):
    """Hilbert space given by its monomial Gram matrix."""

    kind = "gram"

    def __init__(self, gram: GramMatrix):
        super().__init__(gram.horizon)
        self.gram_matrix = gram

    @property
    def is_hilbert(self) -> bool:
        return True

    def norm(self, f: TaylorPoly) -> float:
        return self._form_norm(f)

    def hermitian_form(self, up_to: int) -> np.ndarray:
        return self.gram_matrix.hermitian_form(up_to)

    def cholesky_factor(self, up_to: int) -> np.ndarray:
        return self.gram_matrix.cholesky_factor(up_to)

    def monomial_norms(self, up_to: int) -> np.ndarray:
        self._check_up_to(up_to)
        return np.sqrt(np.real(np.diag(self.gram_matrix.entries))[: up_to + 1])

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "matrix": self.gram_matrix.to_pairs()}


class HbSpace(GramHilbertSpace):
    """de Branges-Rovnyak space; the Gram matrix comes from an hb descriptor."""

    kind = "hb"

    def __init__(self, descriptor):
        super().__init__(descriptor.gram)
        self.descriptor = descriptor

    def describe(self) -> Dict[str, Any]:
        return self.descriptor.describe()


class SupCircleSpace(FunctionSpace):
    """Disk-algebra norm, estimated as the max of |f| on an oversampled circle grid.

    A degree-d polynomial sampled on m = k(d + 1) nodes satisfies
    ||f||_inf <= sec(pi d / (2m)) * sampled max, so the gap is below 0.5%
    for k >= 16.
    """

    kind = "sup"

    def __init__(self, oversampling: int = None, horizon: int = None):
        super().__init__(config.DEFAULT_HORIZON if horizon is None else horizon)
        self.oversampling = config.DEFAULT_OVERSAMPLING if oversampling is None else int(oversampling)
        if self.oversampling < 1:
            raise ValueError("oversampling factor must be positive")

    def norm(self, f: TaylorPoly) -> float:
        self.check_degree(f)
        return circle_sup(f, self.oversampling, config.FFT_THRESHOLD)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "oversampling": self.oversampling, "horizon": self.horizon}


# ============== MODULE-LEVEL OPERATIONS ==============

def norm(space: FunctionSpace, f: TaylorPoly) -> float:
    return space.norm(f)


def inner_product(space: FunctionSpace, f: TaylorPoly, g: TaylorPoly) -> complex:
    return space.inner_product(f, g)


def monomial_norms(space: FunctionSpace, up_to: int) -> np.ndarray:
    return space.monomial_norms(up_to)
