import numpy as np
import pytest

from errors import (
    DegreeExceedsHorizon,
    NonpositiveWeight,
    NotAHilbertSpace,
    NotHermitian,
    NotPositiveDefinite,
)
from series_core import TaylorPoly, random_taylor_poly
from spaces import (
    GramHilbertSpace,
    GramMatrix,
    SupCircleSpace,
    WeightedCoefficientSpace,
    WeightSequence,
    check_weight_admissible,
    inner_product,
    monomial_norms,
    norm,
)


def test_hardy_norm_of_one_plus_z(hardy):
    assert norm(hardy, TaylorPoly([1, 1])) == pytest.approx(np.sqrt(2.0))


def test_weighted_l1_norm():
    space = WeightedCoefficientSpace(WeightSequence.from_exponent(1.0, 8), p=1.0)
    assert norm(space, TaylorPoly([1, 1, 1])) == pytest.approx(6.0)


def test_sup_norm_of_z():
    assert norm(SupCircleSpace(16, horizon=8), TaylorPoly.monomial(1)) == pytest.approx(1.0)


def test_degree_above_horizon_rejected():
    space = WeightedCoefficientSpace.hardy(4)
    with pytest.raises(DegreeExceedsHorizon):
        norm(space, TaylorPoly.monomial(5))
    with pytest.raises(DegreeExceedsHorizon):
        monomial_norms(space, 5)


def test_nonpositive_weight_rejected():
    with pytest.raises(NonpositiveWeight):
        WeightSequence([1.0, 0.0, 1.0])
    with pytest.raises(NonpositiveWeight):
        WeightSequence([1.0, -2.0])


def test_inner_product_needs_hilbert():
    space = WeightedCoefficientSpace(WeightSequence.constant(4), p=1.0)
    with pytest.raises(NotAHilbertSpace):
        inner_product(space, TaylorPoly([1]), TaylorPoly([1]))
    with pytest.raises(NotAHilbertSpace):
        inner_product(SupCircleSpace(16, horizon=4), TaylorPoly([1]), TaylorPoly([1]))


def test_inner_product_matches_norm(weighted_linear, rng):
    f = random_taylor_poly(rng, 20)
    assert inner_product(weighted_linear, f, f).real == pytest.approx(norm(weighted_linear, f) ** 2)
    assert inner_product(weighted_linear, f, f).imag == pytest.approx(0.0, abs=1e-10)


def test_inner_product_is_linear_in_first_slot(weighted_linear):
    f, g = TaylorPoly([1, 2j]), TaylorPoly([1j, 1])
    assert inner_product(weighted_linear, 1j * f, g) == pytest.approx(1j * inner_product(weighted_linear, f, g))


def test_monomial_norms_weighted_exact():
    weights = WeightSequence.from_exponent(1.0, 10)
    space = WeightedCoefficientSpace(weights, p=2.0)
    assert np.array_equal(monomial_norms(space, 10), np.arange(1.0, 12.0))


def test_monomial_norms_sup_are_one():
    assert np.allclose(monomial_norms(SupCircleSpace(16, horizon=12), 12), 1.0)


def test_gram_space_matches_weighted_space(rng):
    alpha = np.arange(1.0, 10.0)
    weighted = WeightedCoefficientSpace(WeightSequence(alpha), p=2.0)
    gram = GramHilbertSpace(GramMatrix.diagonal(alpha ** 2))
    f = random_taylor_poly(rng, 8)
    assert norm(gram, f) == pytest.approx(norm(weighted, f), rel=1e-12)
    assert np.allclose(monomial_norms(gram, 8), alpha)


def test_gram_norm_uses_full_form():
    G = np.array([[2.0, 1j], [-1j, 2.0]])
    space = GramHilbertSpace(GramMatrix(G))
    f = TaylorPoly([1.0, 1.0])
    # <f, f> = sum_jk f_j conj(f_k) G[j, k]
    expected = np.real(np.sum(G))
    assert norm(space, f) ** 2 == pytest.approx(expected)
    assert inner_product(space, TaylorPoly.monomial(0), TaylorPoly.monomial(1)) == pytest.approx(1j)


def test_gram_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        GramMatrix([[1.0, 0.5], [0.2, 1.0]])


def test_gram_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        GramMatrix([[1.0, 2.0], [2.0, 1.0]])


def test_gram_pairs_roundtrip_preserves_entries():
    G = GramMatrix([[2.0, 1j], [-1j, 3.0]])
    assert np.allclose(GramMatrix.from_pairs(G.to_pairs()).entries, G.entries)


def test_admissibility_linear_weights_at_horizon_1000():
    report = check_weight_admissible(WeightSequence.from_exponent(1.0, 1000))
    assert report["passes"]
    assert report["conclusive"] is False
    assert report["horizon_deviation"] == pytest.approx(np.expm1(np.log(1001.0) / 1000), rel=1e-12)
    assert report["horizon_deviation"] == pytest.approx(0.0069, abs=1e-4)
    assert report["tail_max_deviation"] == pytest.approx(0.0125, abs=5e-4)


def test_admissibility_fails_for_exponential_weights():
    report = check_weight_admissible(WeightSequence(2.0 ** np.arange(200)))
    assert not report["passes"]
    assert report["tail_max_deviation"] == pytest.approx(1.0)


def test_admissibility_certificate():
    N = 100
    n = np.arange(N + 1)
    alpha = n + 1.0
    certificate = np.full(N + 1, 1.0)
    assert check_weight_admissible(WeightSequence(alpha, certificate))["certificate_holds"]
    tight = np.full(N + 1, 1e-6)
    assert not check_weight_admissible(WeightSequence(alpha, tight))["certificate_holds"]


def _sample_spaces():
    yield WeightedCoefficientSpace.hardy(24)
    yield WeightedCoefficientSpace(WeightSequence.from_exponent(1.0, 24), p=1.0)
    yield WeightedCoefficientSpace(WeightSequence.from_exponent(-0.5, 24), p=3.0)
    off = np.full(24, 0.5j)
    yield GramHilbertSpace(GramMatrix(2.0 * np.eye(25) + np.diag(off, 1) + np.diag(off.conj(), -1)))
    yield SupCircleSpace(16, horizon=24)


@pytest.mark.parametrize("space", list(_sample_spaces()), ids=lambda s: s.kind)
def test_norm_homogeneity_and_triangle_inequality(space, rng):
    for _ in range(25):
        f, g = random_taylor_poly(rng, 24), random_taylor_poly(rng, 24)
        c = complex(rng.standard_normal(), rng.standard_normal())
        assert norm(space, c * f) == pytest.approx(abs(c) * norm(space, f), rel=1e-10)
        # sampled sup norms get the 1% grid allowance
        slack = 1.01 if space.kind == "sup" else 1.0 + 1e-12
        assert norm(space, f + g) <= slack * (norm(space, f) + norm(space, g))
    assert norm(space, TaylorPoly.zero()) == 0.0


@pytest.mark.parametrize("space", [s for s in _sample_spaces() if s.is_hilbert], ids=lambda s: s.kind)
def test_cauchy_schwarz(space, rng):
    for _ in range(25):
        f, g = random_taylor_poly(rng, 24), random_taylor_poly(rng, 24)
        assert abs(inner_product(space, f, g)) <= norm(space, f) * norm(space, g) * (1.0 + 1e-12)
        assert inner_product(space, g, f) == pytest.approx(np.conj(inner_product(space, f, g)))
