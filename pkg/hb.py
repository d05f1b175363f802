"""
H(b) Builder - Monomial Gram matrices of de Branges-Rovnyak spaces for polynomial b
Norm: ||f||_b^2 = ||f||_2^2 + ||f+||_2^2 where T_conj(a) f+ = T_conj(b) f and |a|^2 + |b|^2 = 1
"""

import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
import scipy.linalg

import config
from errors import DegenerateSymbol, IllConditionedMate, NotContractive
from series_core import CircleGrid, TaylorPoly, fast_sample_on_circle
from spaces import GramMatrix, HbSpace

logger = logging.getLogger(__name__)

GRAM_METHODS = ("direct", "polarization")


def _dense_grid(degree: int) -> CircleGrid:
    return CircleGrid(max(256, 64 * (max(degree, 0) + 1)))


@dataclass(frozen=True)
class SymbolB:
    """A polynomial b with sampled sup-norm at most 1 on the circle."""

    b: TaylorPoly

    def __post_init__(self):
        if not isinstance(self.b, TaylorPoly):
            object.__setattr__(self, "b", TaylorPoly(self.b))
        peak = float(np.max(np.abs(fast_sample_on_circle(self.b, _dense_grid(self.b.degree())))))
        if peak > 1.0 + config.CONTRACTIVE_SLACK:
            raise NotContractive(f"sampled max |b| = {peak:.12f} exceeds 1")

    @property
    def degree(self) -> int:
        return max(self.b.degree(), 0)

    def defect_laurent(self) -> np.ndarray:
        """Coefficients w_0..w_d of 1 - |b|^2 = sum_{|k|<=d} w_k z^k; w_{-k} = conj(w_k)."""
        c = self.b.trimmed()
        d = self.degree
        w = np.zeros(d + 1, dtype=complex)
        for k in range(min(d + 1, c.size)):
            w[k] = -np.sum(c[k:] * np.conj(c[: c.size - k]))
        w[0] += 1.0
        w[0] = w[0].real
        return w


@dataclass(frozen=True)
class PythagoreanMate:
    """Outer polynomial a with |a|^2 + |b|^2 = 1 on the circle and a(0) > 0."""

    a: TaylorPoly
    identity_residual: float


def _defect_values(w: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Real values of 1 - |b|^2 at the given angles."""
    values = np.full(angles.shape, w[0].real)
    for k in range(1, w.size):
        values += 2.0 * np.real(w[k] * np.exp(1j * k * angles))
    return values


def _pair_circle_roots(roots: np.ndarray) -> List[complex]:
    """Merge near-circle roots into pairs and snap each pair onto the circle."""
    remaining = list(roots)
    paired = []
    while remaining:
        first = remaining.pop(0)
        if not remaining:
            raise DegenerateSymbol(f"unpaired boundary root {first:.6f} of 1 - |b|^2")
        idx = int(np.argmin([abs(first - r) for r in remaining]))
        mid = 0.5 * (first + remaining.pop(idx))
        paired.append(mid / abs(mid))
    return paired


def fejer_riesz_mate(symbol: SymbolB) -> PythagoreanMate:
    """Outer factor a of the nonnegative trigonometric polynomial 1 - |b|^2."""
    if not isinstance(symbol, SymbolB):
        symbol = SymbolB(symbol)
    w = symbol.defect_laurent()
    magnitude = np.abs(w)
    if np.all(magnitude <= 1e-14):
        raise DegenerateSymbol("1 - |b|^2 vanishes identically (b is inner)")

    nonzero = np.flatnonzero(magnitude > 1e-14 * magnitude.max())
    d_eff = int(nonzero[-1])

    if d_eff == 0:
        a = TaylorPoly.constant(np.sqrt(w[0].real))
    else:
        # z^d w(z), highest power first: w_d, ..., w_1, w_0, w_-1, ..., w_-d
        laurent = np.concatenate([w[d_eff:0:-1], w[:1], np.conj(w[1 : d_eff + 1])])
        roots = np.roots(laurent)
        moduli = np.abs(roots)
        tol = config.ROOT_PAIRING_TOL
        outside = list(roots[moduli > 1.0 + tol])
        boundary = _pair_circle_roots(roots[np.abs(moduli - 1.0) <= tol])
        a_roots = outside + boundary
        if len(a_roots) != d_eff:
            raise IllConditionedMate(
                f"root split gave {len(a_roots)} outer roots for effective degree {d_eff}"
            )
        q = np.poly(np.array(a_roots))[::-1]
        # w_0 = sum |a_k|^2 fixes |c|; the phase makes a(0) = c q_0 positive
        modulus = np.sqrt(w[0].real / np.sum(np.abs(q) ** 2))
        c = modulus * np.conj(q[0]) / abs(q[0])
        a = TaylorPoly(c * q)

    grid = _dense_grid(max(symbol.degree, a.degree()))
    identity = (
        np.abs(fast_sample_on_circle(a, grid)) ** 2
        + np.abs(fast_sample_on_circle(symbol.b, grid)) ** 2
    )
    residual = float(np.max(np.abs(identity - 1.0)))
    if residual > config.MATE_IDENTITY_TOL:
        logger.warning("Mate identity residual %.3e above %.1e", residual, config.MATE_IDENTITY_TOL)
        raise IllConditionedMate(f"|a|^2 + |b|^2 - 1 reaches {residual:.3e} on the grid")
    return PythagoreanMate(a=a, identity_residual=residual)


# ============== TOEPLITZ MACHINERY ==============

def coanalytic_toeplitz(g: TaylorPoly, rows: int, cols: Optional[int] = None) -> np.ndarray:
    """Dense truncation of T_conj(g): entry [j, j + k] = conj(g_k)."""
    cols = rows if cols is None else cols
    row = np.zeros(cols, dtype=complex)
    c = g.trimmed()[:cols]
    row[: c.size] = np.conj(c)
    col = np.zeros(rows, dtype=complex)
    col[0] = row[0]
    return scipy.linalg.toeplitz(col, row)


def _banded_upper(g: TaylorPoly, size: int) -> np.ndarray:
    """T_conj(g) in solve_banded storage with u = deg g, l = 0."""
    c = g.trimmed()
    d = c.size - 1
    ab = np.zeros((d + 1, size), dtype=complex)
    for k in range(d + 1):
        ab[d - k, k:] = np.conj(c[k])
    return ab


def _mate_condition(a: TaylorPoly, size: int, ab: np.ndarray) -> float:
    """Exact 1-norm condition number of the size x size upper Toeplitz T_conj(a).

    Its inverse is upper Toeplitz too, and its last column carries every entry.
    """
    d = ab.shape[0] - 1
    last = np.zeros(size, dtype=complex)
    last[-1] = 1.0
    inverse_column = scipy.linalg.solve_banded((0, d), ab, last)
    return float(np.sum(np.abs(a.trimmed())) * np.sum(np.abs(inverse_column)))


def companion_columns(symbol: SymbolB, mate: PythagoreanMate, horizon: int, working: int) -> np.ndarray:
    """W x (N + 1) matrix whose column n is (z^n)+, solved on the working horizon."""
    ab = _banded_upper(mate.a, working)
    rhs = coanalytic_toeplitz(symbol.b, working, horizon + 1)
    return scipy.linalg.solve_banded((0, ab.shape[0] - 1), ab, rhs)


@dataclass(frozen=True)
class HbDescriptor:
    """Everything needed to rebuild and use one truncated H(b) space."""

    symbol: SymbolB
    mate: PythagoreanMate
    horizon: int
    working_factor: int
    gram: GramMatrix
    condition_number: float
    method: str = "direct"

    def to_space(self) -> HbSpace:
        return HbSpace(self)

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": "hb",
            "b": self.symbol.b.to_pairs(),
            "horizon": self.horizon,
            "working_factor": self.working_factor,
            "method": self.method,
        }


def hb_gram(
    symbol,
    horizon: int,
    working_factor: Optional[int] = None,
    method: str = "direct",
) -> HbDescriptor:
    """Monomial Gram matrix of H(b) up to degree `horizon`.

    method="direct" forms I + X^T conj(X) from the companion columns X;
    method="polarization" recovers every entry from H(b) norms of
    z^j + i^m z^k.
    """
    if method not in GRAM_METHODS:
        raise ValueError(f"unknown Gram method {method!r}, expected one of {GRAM_METHODS}")
    if not isinstance(symbol, SymbolB):
        symbol = SymbolB(symbol)
    working_factor = config.DEFAULT_WORKING_FACTOR if working_factor is None else int(working_factor)
    if working_factor < 1:
        raise ValueError("working factor must be at least 1")

    start = time.perf_counter()
    mate = fejer_riesz_mate(symbol)
    working = max(working_factor * horizon, horizon + 1, mate.a.degree() + 1)
    ab = _banded_upper(mate.a, working)
    cond = _mate_condition(mate.a, working, ab)
    if cond > config.TOEPLITZ_CONDITION_CEILING:
        raise IllConditionedMate(f"condition number {cond:.3e} of T_conj(a) at W = {working}")

    size = horizon + 1
    if method == "direct":
        X = companion_columns(symbol, mate, horizon, working)
        G = np.eye(size, dtype=complex) + X.T @ X.conj()
    else:
        rhs = coanalytic_toeplitz(symbol.b, working, size)
        G = _polarized_gram(ab, ab.shape[0] - 1, rhs, size)

    gram = GramMatrix(G)
    logger.info(
        "Built H(b) Gram: deg b = %d, N = %d, W = %d, cond = %.3e, method = %s, %.3fs",
        symbol.degree, horizon, working, cond, method, time.perf_counter() - start,
    )
    return HbDescriptor(
        symbol=symbol,
        mate=mate,
        horizon=horizon,
        working_factor=working_factor,
        gram=gram,
        condition_number=cond,
        method=method,
    )


def _polarized_gram(ab: np.ndarray, d: int, rhs: np.ndarray, size: int) -> np.ndarray:
    G = np.zeros((size, size), dtype=complex)
    eye = np.eye(size, dtype=complex)
    for j in range(size):
        for m in range(4):
            unit = 1j ** m
            # column k holds z^j + i^m z^k
            F = eye[:, j : j + 1] + unit * eye
            plus = scipy.linalg.solve_banded((0, d), ab, rhs[:, j : j + 1] + unit * rhs)
            norms_sq = np.sum(np.abs(F) ** 2, axis=0) + np.sum(np.abs(plus) ** 2, axis=0)
            G[j, :] += 0.25 * unit * norms_sq
    return G


def hb_density_diagnostic(symbol) -> Dict[str, Any]:
    """Midpoint-rule estimate of the integral of log(1 - |b|^2) under grid refinement."""
    if not isinstance(symbol, SymbolB):
        symbol = SymbolB(symbol)
    w = symbol.defect_laurent()
    m0 = max(256, 64 * (symbol.degree + 1))

    levels = []
    for level in range(config.DENSITY_LEVELS):
        m = m0 * 2 ** level
        angles = 2.0 * np.pi * (np.arange(m) + 0.5) / m
        values = _defect_values(w, angles)
        if np.any(values <= 0):
            integral = -np.inf
        else:
            integral = float(2.0 * np.pi * np.mean(np.log(values)))
        levels.append({"nodes": m, "integral": integral})

    last = levels[-1]["integral"]
    prev = levels[-2]["integral"] if len(levels) > 1 else last
    finite = bool(np.isfinite(last))
    stable = finite and np.isfinite(prev) and abs(last - prev) <= config.DENSITY_STABILITY_TOL * max(1.0, abs(last))
    likely_dense = bool(finite and last > config.DENSITY_FLOOR and stable)

    return {
        "value": last,
        "levels": levels,
        "floor": config.DENSITY_FLOOR,
        "likely_dense": likely_dense,
        "flag": "likely-dense" if likely_dense else "likely-non-dense",
    }
