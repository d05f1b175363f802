"""
Diagnostics - Operator-norm witnesses and finite-horizon divergence trends
Lebesgue constants, Fejer and Landau hump blocks, gliding humps, scheme norm estimates
"""

import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
import scipy.linalg

import config
from errors import DegreeExceedsHorizon, HorizonExceeded, InsufficientQuadrature
from schemes import (
    ArrayScheme,
    CertifiedScheme,
    CesaroScheme,
    GramProjectionScheme,
    PartialSumScheme,
    Scheme,
    scheme_error_curve,
)
from series_core import TaylorPoly, random_taylor_poly
from spaces import FunctionSpace, SupCircleSpace, WeightedCoefficientSpace

logger = logging.getLogger(__name__)

HUMP_BLOCKS = ("landau", "fejer")

# Gauss-Legendre order per piece above which extra nodes add nothing
_MAX_PIECE_ORDER = 256


@dataclass(frozen=True)
class OperatorNormEstimate:
    """lower is witnessed by an explicit input; upper is structural or exact when known."""

    lower: float
    upper: Optional[float]
    method: str

    def consistent(self, tol: float = 1e-9) -> bool:
        return self.upper is None or self.lower <= self.upper * (1.0 + tol) + tol


# ============== LEBESGUE CONSTANTS ==============

def lebesgue_constant(n: int, quadrature_points: Optional[int] = None) -> float:
    """(1/2pi) * integral of |sum_{k<=n} e^{ik theta}| over the circle.

    The kernel |sin((n+1) theta/2) / sin(theta/2)| is smooth between its zeros
    2 pi k/(n+1), so each of the n+1 pieces gets its own Gauss-Legendre rule.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    minimum = config.LEBESGUE_POINTS_PER_DEGREE * (n + 1)
    quadrature_points = minimum if quadrature_points is None else int(quadrature_points)
    if quadrature_points < minimum:
        raise InsufficientQuadrature(f"{quadrature_points} nodes < {minimum} needed for n = {n}")

    order = min(quadrature_points // (n + 1), _MAX_PIECE_ORDER)
    x, w = np.polynomial.legendre.leggauss(order)
    h = 2.0 * np.pi / (n + 1)
    starts = h * np.arange(n + 1)
    theta = starts[:, None] + 0.5 * h * (x[None, :] + 1.0)
    kernel = np.abs(np.sin(0.5 * (n + 1) * theta) / np.sin(0.5 * theta))
    piece_means = np.sum(w * kernel, axis=1) / np.sum(w)
    return float(np.mean(piece_means))


def partial_sum_norm_bound(n: int, quadrature_points: Optional[int] = None) -> OperatorNormEstimate:
    """||s_n|| on the disk algebra lies between 1 and L_n."""
    return OperatorNormEstimate(lower=1.0, upper=lebesgue_constant(n, quadrature_points), method="lebesgue")


# ============== HUMP BLOCKS ==============

def fejer_block(m: int) -> TaylorPoly:
    """F_m = sum_{k=1..m} (z^(m-k) - z^(m+k)) / k, degree 2m."""
    if m < 1:
        raise ValueError("block size must be positive")
    c = np.zeros(2 * m + 1)
    k = np.arange(1, m + 1)
    c[m - k] = 1.0 / k
    c[m + k] = -1.0 / k
    return TaylorPoly(c)


def landau_coefficients(m: int) -> np.ndarray:
    """binom(2k, k) / 4^k for k = 0..m, the degree-m section of (1 - z)^(-1/2)."""
    k = np.arange(1, m + 1)
    # ratio form; binom(2k, k) and 4^k overflow separately near k = 512
    return np.concatenate([[1.0], np.cumprod((2 * k - 1) / (2.0 * k))])


def landau_block(m: int) -> TaylorPoly:
    """Cesaro mean of order 6m of the Blaschke product z^m P(1/z) / P(z).

    Sup norm is at most 1; the partial sum cut at degree m has value close
    to sum_{k<=m} binom(2k, k)^2 / 16^k at z = 1.
    """
    if m < 1:
        raise ValueError("block size must be positive")
    d = landau_coefficients(m)
    reversed_d = d[::-1]
    K = 6 * m
    b = np.zeros(K + 1)
    for k in range(K + 1):
        numerator = reversed_d[k] if k <= m else 0.0
        hi = min(k, m)
        if hi >= 1:
            numerator -= np.dot(d[1 : hi + 1], b[k - hi : k][::-1])
        b[k] = numerator / d[0]
    weights = (K + 1 - np.arange(K + 1)) / (K + 1)
    return TaylorPoly(b * weights)


def _block(kind: str, m: int) -> TaylorPoly:
    if kind == "landau":
        return landau_block(m)
    if kind == "fejer":
        return fejer_block(m)
    raise ValueError(f"unknown hump block {kind!r}, expected one of {HUMP_BLOCKS}")


def hump_layout(blocks: int, base_degree: int, block: str = "landau") -> List[Dict[str, Any]]:
    """Block sizes, disjoint offsets, weights and spike indices of a gliding hump."""
    if blocks < 1:
        raise ValueError("need at least one block")
    if base_degree < 2:
        raise ValueError("base degree must be at least 2")
    layout = []
    offset = 0
    for j in range(1, blocks + 1):
        size = base_degree ** j
        degree = 6 * size if block == "landau" else 2 * size
        layout.append({
            "block": j,
            "size": size,
            "offset": offset,
            "degree": degree,
            "weight": 1.0 / (blocks + 1 - j) ** 2,
            "spike": offset + size,
        })
        offset += degree + 1
    return layout


def gliding_hump(
    blocks: int,
    base_degree: int,
    horizon: Optional[int] = None,
    block: str = "landau",
) -> TaylorPoly:
    """sum_j w_j z^(D_j) B_(m_j) with disjoint coefficient ranges; m_j = base^j."""
    if block not in HUMP_BLOCKS:
        raise ValueError(f"unknown hump block {block!r}, expected one of {HUMP_BLOCKS}")
    horizon = config.DEFAULT_HORIZON if horizon is None else horizon
    layout = hump_layout(blocks, base_degree, block)
    total = layout[-1]["offset"] + layout[-1]["degree"]
    if total > horizon:
        raise HorizonExceeded(f"hump ({blocks}, {base_degree}, {block}) has degree {total} > horizon {horizon}")

    start = time.perf_counter()
    f = TaylorPoly.zero()
    for entry in layout:
        f = f + _block(block, entry["size"]).shift(entry["offset"]) * entry["weight"]
    logger.info(
        "Built %s gliding hump: %d blocks, base %d, degree %d, %.3fs",
        block, blocks, base_degree, total, time.perf_counter() - start,
    )
    return f


# ============== OPERATOR NORM ESTIMATES ==============

def _operator_matrix(scheme: Scheme, n: int, size: int) -> np.ndarray:
    """Coefficient matrix of T_n on polynomials of degree < size."""
    A = np.zeros((size, size), dtype=complex)
    for k in range(size):
        A[:, k] = scheme.apply(n, TaylorPoly.monomial(k)).padded(size)
    return A


def _gram_coordinates(space: FunctionSpace, A: np.ndarray) -> np.ndarray:
    """L^H A L^(-H), whose spectral norm is the operator norm of A in the space."""
    L = space.cholesky_factor(A.shape[0] - 1)
    left = L.conj().T @ A
    # right-multiplying by L^(-H) is solving X L^H = left, i.e. L X^H = left^H
    return scipy.linalg.solve_triangular(L, left.conj().T, lower=True).conj().T


def _power_witness(B: np.ndarray, rng: np.random.Generator, steps: int = 20) -> float:
    v = rng.standard_normal(B.shape[1]) + 1j * rng.standard_normal(B.shape[1])
    for _ in range(steps):
        w = B.conj().T @ (B @ v)
        size = np.linalg.norm(w)
        if size == 0.0:
            return 0.0
        v = w / size
    return float(np.linalg.norm(B @ v) / np.linalg.norm(v))


def _structural_upper(scheme: Scheme, space: FunctionSpace, n: int):
    """(upper, method) from kernel positivity, Lebesgue constants or diagonal multipliers."""
    if isinstance(space, WeightedCoefficientSpace):
        if isinstance(scheme, ArrayScheme):
            return float(np.max(np.abs(scheme.array.coefficient_weights(n)))), "diagonal-multiplier"
        if isinstance(scheme, (PartialSumScheme, CesaroScheme)):
            return 1.0, "diagonal-multiplier"
    if isinstance(space, SupCircleSpace):
        if isinstance(scheme, CesaroScheme):
            return 1.0, "fejer-positivity"
        if isinstance(scheme, PartialSumScheme):
            return lebesgue_constant(n), "lebesgue"
        if isinstance(scheme, ArrayScheme):
            row = scheme.array.row(n)
            return float(sum(abs(a) * lebesgue_constant(k) for k, a in enumerate(row) if a != 0)), "array-lebesgue"
    if isinstance(scheme, (GramProjectionScheme, CertifiedScheme)):
        return 1.0, "projection"
    return None, "sampled"


def _hump_seed(n: int, horizon: int) -> Optional[TaylorPoly]:
    """Landau block whose cut at degree m lands on n."""
    m = min(n, (horizon - n) // 5)
    if m < 1:
        return None
    return landau_block(m).shift(n - m)


def scheme_norm_estimate(
    scheme: Scheme,
    space: FunctionSpace,
    n: int,
    trials: int,
    seed: Optional[int] = None,
) -> OperatorNormEstimate:
    """Witnessed lower bound for ||T_n|| plus the best upper bound available."""
    if n > space.horizon:
        raise DegreeExceedsHorizon(f"n = {n} > horizon {space.horizon}")
    rng = np.random.default_rng(config.DEFAULT_SEED if seed is None else seed)

    inputs = [TaylorPoly.constant(1.0)]
    degree = min(space.horizon, 2 * n + 1)
    inputs.extend(random_taylor_poly(rng, degree) for _ in range(trials))
    seed_hump = _hump_seed(n, space.horizon)
    if seed_hump is not None:
        inputs.append(seed_hump)

    lower = 0.0
    for f in inputs:
        size = space.norm(f)
        if size > 0.0:
            lower = max(lower, space.norm(scheme.apply(n, f)) / size)

    if space.is_hilbert:
        B = _gram_coordinates(space, _operator_matrix(scheme, n, space.horizon + 1))
        lower = max(lower, _power_witness(B, rng))
        exact = float(scipy.linalg.svdvals(B)[0])
        return OperatorNormEstimate(lower=lower, upper=exact, method="exact-hilbert")

    upper, method = _structural_upper(scheme, space, n)
    return OperatorNormEstimate(lower=lower, upper=upper, method=method)


# ============== DIVERGENCE TRENDS ==============

def _fit(n: np.ndarray, y: np.ndarray, basis: Optional[np.ndarray]):
    columns = [np.ones_like(n, dtype=float)]
    if basis is not None:
        columns.append(basis)
    design = np.column_stack(columns)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sum((design @ coef - y) ** 2))
    return coef, residual


def divergence_trend(
    space: FunctionSpace,
    scheme: Scheme,
    f: TaylorPoly,
    n_max: int,
    n_min: int = 0,
    opnorm_trials: int = 0,
    seed: Optional[int] = None,
) -> Dict[str, Any]:
    """Norm sequences of T_n f with a descriptive growth tag.

    The sequence is "bounded" when no image exceeds ||f|| beyond the growth
    tolerance, or when neither growth model rises by more than that
    tolerance over the last half of the n range. Otherwise the tag is the
    better-fitting growth model. This is a finite-horizon trend, not a
    statement about boundedness.

    With opnorm_trials > 0 every n also gets a scheme_norm_estimate seeded
    with seed + n.
    """
    opnorm = None
    if opnorm_trials > 0:
        base = config.DEFAULT_SEED if seed is None else seed

        def opnorm(k: int) -> OperatorNormEstimate:
            return scheme_norm_estimate(scheme, space, k, opnorm_trials, seed=base + k)

    reports = scheme_error_curve(scheme, space, f, n_max, n_min, opnorm=opnorm)
    n = np.array([r.n for r in reports], dtype=float)
    image = np.array([r.image_norm for r in reports])
    errors = np.array([r.error_norm for r in reports])
    size = space.norm(f)
    tol = config.BOUNDED_GROWTH_TOL

    half = n >= n[0] + (n[-1] - n[0]) / 2.0
    n_tail, y_tail = n[half], image[half]
    level = max(size, float(np.mean(np.abs(y_tail)))) if y_tail.size else size

    fits = {}
    if np.max(image) <= (1.0 + tol) * size:
        tag = "bounded"
    elif y_tail.size >= 3 and level > 0.0:
        _, fits["constant"] = _fit(n_tail, y_tail, None)
        rises = {}
        for label, transform in (("log-like", np.log1p), ("power-like", np.sqrt)):
            g = transform(n_tail)
            coef, fits[label] = _fit(n_tail, y_tail, g)
            rises[label] = float(coef[1] * (g[-1] - g[0]))
        if all(rise < tol * level for rise in rises.values()):
            tag = "bounded"
        else:
            tag = min(("log-like", "power-like"), key=lambda label: fits[label])
    else:
        tag = "bounded"

    return {
        "n": n.astype(int).tolist(),
        "image_norms": image.tolist(),
        "error_norms": errors.tolist(),
        "opnorms": [r.opnorm for r in reports],
        "input_norm": size,
        "tag": tag,
        "fit_residuals": fits,
        "note": "finite-horizon trend, not a proof of boundedness or divergence",
    }
