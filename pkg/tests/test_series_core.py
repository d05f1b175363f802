import numpy as np
import pytest

from errors import NonFiniteValue
from series_core import (
    CircleGrid,
    TaylorPoly,
    add,
    circle_sup,
    evaluate,
    fast_sample_on_circle,
    multiply,
    random_taylor_poly,
    sample_on_circle,
    scale,
)


def test_degree_ignores_trailing_zeros():
    assert TaylorPoly([1, 2, 0, 0]).degree() == 1
    assert TaylorPoly.zero().degree() == -1
    assert TaylorPoly([0, 0]).is_zero()


def test_equality_on_trimmed_coefficients():
    assert TaylorPoly([1, 2, 0]) == TaylorPoly([1, 2])
    assert hash(TaylorPoly([1, 2, 0])) == hash(TaylorPoly([1, 2]))
    assert TaylorPoly([1, 2]) != TaylorPoly([1, 3])


def test_non_finite_coefficients_rejected():
    with pytest.raises(NonFiniteValue):
        TaylorPoly([1.0, np.nan])
    with pytest.raises(NonFiniteValue):
        TaylorPoly([np.inf])


def test_coefficients_are_read_only():
    p = TaylorPoly([1, 2])
    with pytest.raises(ValueError):
        p.coeffs[0] = 5


def test_arithmetic():
    p = TaylorPoly([1, 1])
    q = TaylorPoly([1, -1])
    assert multiply(p, q) == TaylorPoly([1, 0, -1])
    assert p + q == TaylorPoly([2])
    assert p - p == TaylorPoly.zero()
    assert 2 * p == TaylorPoly([2, 2])
    assert -p == TaylorPoly([-1, -1])


def test_truncate_shift_dilate():
    f = TaylorPoly([1, 1, 0, 1])
    assert f.truncate(1) == TaylorPoly([1, 1])
    assert f.shift(2) == TaylorPoly([0, 0, 1, 1, 0, 1])
    assert f.dilate(0.5).allclose(TaylorPoly([1, 0.5, 0, 0.125]))


def test_evaluate_horner():
    f = TaylorPoly([1, 2, 3])
    assert evaluate(f, 2.0) == pytest.approx(17.0)
    assert evaluate(TaylorPoly.zero(), 1j) == 0
    values = f(np.array([0.0, 1.0]))
    assert np.allclose(values, [1.0, 6.0])


def test_circle_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        CircleGrid(0)
    assert CircleGrid(4).nodes[1] == pytest.approx(1j)


def test_fft_sampling_matches_horner(rng):
    f = random_taylor_poly(rng, 40)
    grid = CircleGrid(128)
    assert np.allclose(fast_sample_on_circle(f, grid), sample_on_circle(f, grid), atol=1e-10)


def test_fft_sampling_folds_high_degrees(rng):
    f = random_taylor_poly(rng, 30)
    grid = CircleGrid(8)
    assert np.allclose(fast_sample_on_circle(f, grid), sample_on_circle(f, grid), atol=1e-10)


def test_circle_sup_of_simple_polynomials():
    assert circle_sup(TaylorPoly.monomial(5), 16) == pytest.approx(1.0)
    assert circle_sup(TaylorPoly([1, 1]), 16) == pytest.approx(2.0)
    assert circle_sup(TaylorPoly.zero(), 16) == 0.0


def test_circle_sup_paths_agree(rng):
    f = random_taylor_poly(rng, 100)
    assert circle_sup(f, 16, fft_threshold=64) == pytest.approx(circle_sup(f, 16, fft_threshold=1000), rel=1e-12)


def test_ring_axioms_on_random_triples(rng):
    for _ in range(20):
        p, q, r = (random_taylor_poly(rng, int(d)) for d in rng.integers(0, 12, size=3))
        c = complex(rng.standard_normal(), rng.standard_normal())
        assert add(p, q) == add(q, p)
        assert add(add(p, q), r).allclose(add(p, add(q, r)))
        assert multiply(p, q).allclose(multiply(q, p))
        assert multiply(multiply(p, q), r).allclose(multiply(p, multiply(q, r)), atol=1e-10)
        assert multiply(p, add(q, r)).allclose(add(multiply(p, q), multiply(p, r)), atol=1e-10)
        assert scale(c, add(p, q)).allclose(add(scale(c, p), scale(c, q)))
        assert add(p, TaylorPoly.zero()) == p
        assert multiply(p, TaylorPoly([1.0])) == p


def test_evaluate_is_multiplicative(rng):
    p, q = random_taylor_poly(rng, 9), random_taylor_poly(rng, 14)
    for z in (0.3 - 0.4j, 1.0, np.exp(0.7j), -0.95):
        assert evaluate(multiply(p, q), z) == pytest.approx(evaluate(p, z) * evaluate(q, z), rel=1e-10, abs=1e-12)
        assert evaluate(add(p, q), z) == pytest.approx(evaluate(p, z) + evaluate(q, z), rel=1e-12, abs=1e-12)


def test_sampling_z_on_four_nodes():
    values = sample_on_circle(TaylorPoly.monomial(1), CircleGrid(4))
    assert np.allclose(values, [1, 1j, -1, -1j], atol=1e-15)


def test_sampling_aliases_above_grid_size():
    grid = CircleGrid(2)
    # z^2 = 1 at both nodes of the two-point grid
    assert np.allclose(sample_on_circle(TaylorPoly.monomial(2), grid), [1.0, 1.0], atol=1e-15)
    assert np.allclose(fast_sample_on_circle(TaylorPoly.monomial(2), grid), [1.0, 1.0], atol=1e-15)
