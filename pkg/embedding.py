"""
Embedding - Build X = J(Y) from a weight sequence and the unit-vector model Y = l^p
J sends y to the power series sum e_n*(y) z^n; ||z^n||_X = alpha_n by construction
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Union

import numpy as np

import config
from errors import (
    DegreeExceedsHorizon,
    DivergentEvidence,
    InadmissibleWeights,
    NonFiniteValue,
    TailNotControlled,
)
from series_core import TaylorPoly, circle_sup
from spaces import WeightSequence, WeightedCoefficientSpace, check_weight_admissible

logger = logging.getLogger(__name__)

CoefficientRule = Union[Callable[[int], complex], Sequence[complex], np.ndarray]


@dataclass(frozen=True)
class EmbeddingSpec:
    weights: WeightSequence
    p: float = 2.0
    M: float = 1.0

    def __post_init__(self):
        if not 1.0 <= self.p < np.inf:
            raise ValueError(f"p must lie in [1, inf), got {self.p}")
        if self.M < 1.0:
            raise ValueError(f"biorthogonal bound M must be at least 1, got {self.M}")

    @classmethod
    def checked(cls, weights: WeightSequence, p: float = 2.0, M: float = 1.0) -> "EmbeddingSpec":
        """Constructor that also runs the admissibility trend check."""
        report = check_weight_admissible(weights)
        if not report["passes"]:
            raise InadmissibleWeights(
                f"|alpha_n^(1/n) - 1| reaches {report['tail_max_deviation']:.4f} "
                f"on the tail (threshold {report['threshold']})"
            )
        return cls(weights=weights, p=p, M=M)

    @property
    def horizon(self) -> int:
        return self.weights.horizon

    @property
    def alpha(self) -> np.ndarray:
        return self.weights.alpha

    def space(self) -> WeightedCoefficientSpace:
        return WeightedCoefficientSpace(self.weights, p=self.p)


@dataclass(frozen=True)
class CoefficientVector:
    """Coordinates of y in the unit vectors u_n of l^p."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex).ravel()
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue("coefficient vector entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def norm(self, p: float) -> float:
        if self.entries.size == 0:
            return 0.0
        return float(np.linalg.norm(self.entries, ord=p))


def basis_vector(spec: EmbeddingSpec, n: int) -> CoefficientVector:
    """e_n = alpha_n u_n, so that e_n*(e_n) = 1."""
    if not 0 <= n <= spec.horizon:
        raise DegreeExceedsHorizon(f"basis index {n} outside 0..{spec.horizon}")
    entries = np.zeros(n + 1, dtype=complex)
    entries[n] = spec.alpha[n]
    return CoefficientVector(entries)


def embed_J(spec: EmbeddingSpec, y: CoefficientVector) -> TaylorPoly:
    entries = y.entries
    support = np.flatnonzero(entries)
    if support.size and support[-1] > spec.horizon:
        raise DegreeExceedsHorizon(f"support of y reaches {support[-1]} > horizon {spec.horizon}")
    entries = entries[: spec.horizon + 1]
    return TaylorPoly(entries / spec.alpha[: entries.size])


def _last_quarter(horizon: int) -> slice:
    return slice(horizon - horizon // 4, horizon + 1)


def inclusion_constant(spec: EmbeddingSpec, r: float) -> Dict[str, Any]:
    """Bound C_r on sum M r^n / alpha_n: partial sum plus a geometric tail.

    The tail uses the smallest alpha over the last quarter of the horizon as
    a lower bound for every later alpha.
    """
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    N = spec.horizon
    n = np.arange(N + 1)
    partial = float(spec.M * np.sum(r ** n / spec.alpha))
    alpha_inf = float(np.min(spec.alpha[_last_quarter(N)]))
    tail = float(spec.M * r ** (N + 1) / ((1.0 - r) * alpha_inf))
    ratio = tail / partial

    if ratio > config.TAIL_UNCONTROLLED_RATIO:
        raise TailNotControlled(
            f"tail bound {tail:.3e} is {100 * ratio:.1f}% of the partial sum at r = {r}, N = {N}"
        )
    negligible = ratio < config.TAIL_NEGLIGIBLE_RATIO
    if not negligible:
        logger.warning("Inclusion tail at r = %s is %.2f%% of the partial sum", r, 100 * ratio)
    return {
        "r": r,
        "partial_sum": partial,
        "tail_bound": tail,
        "value": partial + tail,
        "tail_negligible": negligible,
    }


def _random_vector(rng: np.random.Generator, size: int) -> CoefficientVector:
    return CoefficientVector((rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0))


def verify_inclusion_bound(
    spec: EmbeddingSpec,
    samples: int,
    r: float,
    seed: Optional[int] = None,
    oversampling: Optional[int] = None,
) -> Dict[str, Any]:
    """Sampled max over |z| = r of |Jy| against C_r ||y|| for random y."""
    C_r = inclusion_constant(spec, r)["value"]
    rng = np.random.default_rng(config.DEFAULT_SEED if seed is None else seed)
    oversampling = config.DEFAULT_OVERSAMPLING if oversampling is None else oversampling

    max_ratio = 0.0
    for _ in range(samples):
        y = _random_vector(rng, spec.horizon + 1)
        size = y.norm(spec.p)
        if size == 0.0:
            continue
        peak = circle_sup(embed_J(spec, y).dilate(r), oversampling, config.FFT_THRESHOLD)
        max_ratio = max(max_ratio, peak / size)

    return {
        "r": r,
        "C_r": C_r,
        "samples": samples,
        "max_ratio": max_ratio,
        "holds": max_ratio <= C_r * (1.0 + 1e-12),
    }


def _coefficients(rule: CoefficientRule, horizon: int) -> np.ndarray:
    if callable(rule):
        c = np.array([rule(n) for n in range(horizon + 1)], dtype=complex)
    else:
        c = np.zeros(horizon + 1, dtype=complex)
        given = np.asarray(rule, dtype=complex).ravel()[: horizon + 1]
        c[: given.size] = given
    if not np.all(np.isfinite(c)):
        raise NonFiniteValue("coefficient rule produced non-finite values")
    return c


def membership_beyond_disk(spec: EmbeddingSpec, coefficients: CoefficientRule, R: float) -> Dict[str, Any]:
    """Evidence that f with radius of convergence R > 1 lies in X, plus a norm bound.

    Uses |c_n| <= C_rho rho^(-n) for sampled 1 < rho < R and the trailing
    growth ratio lambda of alpha to bound sum_{n > N} |c_n| alpha_n.
    """
    if not R > 1.0:
        raise ValueError(f"radius of convergence must exceed 1, got {R}")
    N = spec.horizon
    c = _coefficients(coefficients, N)
    magnitude = np.abs(c)
    terms = magnitude * spec.alpha
    partial = float(np.sum(terms))
    cauchy_increment = float(np.sum(terms[_last_quarter(N)]))

    quarter = spec.alpha[_last_quarter(N)]
    growth = float(np.max(quarter[1:] / quarter[:-1])) if quarter.size > 1 else 1.0

    support = np.flatnonzero(magnitude)
    best_tail, best_rho = None, None
    if support.size == 0:
        best_tail, best_rho = 0.0, None
    else:
        log_c = np.log(magnitude[support])
        top = 1.0 + (min(R, 1e3) - 1.0) * np.linspace(0.1, 0.9, 9)
        for rho in top:
            q = growth / rho
            if q >= 1.0:
                continue
            log_C = float(np.max(log_c + support * np.log(rho)))
            log_tail = log_C + np.log(spec.alpha[N]) - N * np.log(rho) + np.log(q / (1.0 - q))
            tail = float(np.exp(log_tail))
            if best_tail is None or tail < best_tail:
                best_tail, best_rho = tail, float(rho)
        if best_tail is None:
            raise DivergentEvidence(
                f"trailing weight growth {growth:.4f} is not below any sampled rho < R = {R}"
            )

    if best_tail > config.MEMBERSHIP_TAIL_TOL * partial:
        raise DivergentEvidence(
            f"tail bound {best_tail:.3e} does not settle against partial sum {partial:.6g}"
        )

    return {
        "R": R,
        "partial_sum": partial,
        "tail_bound": best_tail,
        "bound": partial + best_tail,
        "rho": best_rho,
        "growth_ratio": growth,
        "cauchy_increment": cauchy_increment,
    }


# ============== PROPERTY CHECKS ==============

def check_isometry(spec: EmbeddingSpec, samples: int = 100, seed: Optional[int] = None) -> Dict[str, Any]:
    """max relative gap between ||Jy||_X and ||y||_Y over random y."""
    rng = np.random.default_rng(config.DEFAULT_SEED if seed is None else seed)
    space = spec.space()
    worst = 0.0
    for _ in range(samples):
        y = _random_vector(rng, spec.horizon + 1)
        size = y.norm(spec.p)
        worst = max(worst, abs(space.norm(embed_J(spec, y)) - size) / size)
    return {"samples": samples, "max_relative_deviation": worst, "holds": worst <= 1e-12}


def check_injectivity(spec: EmbeddingSpec) -> Dict[str, Any]:
    """Every basis image is nonzero and J(0) = 0."""
    failures = [n for n in range(spec.horizon + 1) if embed_J(spec, basis_vector(spec, n)).is_zero()]
    zero_image = embed_J(spec, CoefficientVector(np.zeros(spec.horizon + 1)))
    return {"failures": failures, "holds": not failures and zero_image.is_zero()}


def check_monomial_norms(spec: EmbeddingSpec) -> Dict[str, Any]:
    space = spec.space()
    measured = np.array([space.norm(TaylorPoly.monomial(n)) for n in range(spec.horizon + 1)])
    deviation = float(np.max(np.abs(measured - spec.alpha) / spec.alpha))
    return {"max_relative_deviation": deviation, "holds": deviation <= 1e-12}
