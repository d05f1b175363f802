import numpy as np
import pytest

from embedding import (
    CoefficientVector,
    EmbeddingSpec,
    basis_vector,
    check_injectivity,
    check_isometry,
    check_monomial_norms,
    embed_J,
    inclusion_constant,
    membership_beyond_disk,
    verify_inclusion_bound,
)
from errors import DivergentEvidence, InadmissibleWeights, TailNotControlled
from series_core import TaylorPoly
from spaces import WeightSequence, monomial_norms, norm


@pytest.fixture
def flat_spec():
    return EmbeddingSpec(WeightSequence.constant(512))


@pytest.fixture
def linear_spec():
    return EmbeddingSpec(WeightSequence.from_exponent(1.0, 512))


def test_basis_images_are_monomials(linear_spec):
    space = linear_spec.space()
    for n in (0, 1, 7, 512):
        image = embed_J(linear_spec, basis_vector(linear_spec, n))
        assert image.allclose(TaylorPoly.monomial(n), atol=1e-15)
        assert norm(space, image) == pytest.approx(linear_spec.alpha[n])


def test_two_term_vector_norm():
    spec = EmbeddingSpec(WeightSequence([1.0, 2.0]))
    # e_0 + e_1 with e_n = alpha_n u_n
    y = CoefficientVector(np.array([1.0, 0.0]) + basis_vector(spec, 1).entries)
    image = embed_J(spec, y)
    assert image.allclose(TaylorPoly([1.0, 1.0]))
    assert y.norm(2.0) == pytest.approx(np.sqrt(5.0))
    assert norm(spec.space(), image) == pytest.approx(np.sqrt(5.0), rel=1e-12)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
def test_isometry(p):
    spec = EmbeddingSpec(WeightSequence.from_exponent(0.5, 64), p=p)
    assert check_isometry(spec, samples=1000, seed=3)["holds"]


def test_injectivity_and_monomial_norms(linear_spec):
    assert check_injectivity(linear_spec)["holds"]
    assert check_monomial_norms(linear_spec)["holds"]
    assert np.array_equal(monomial_norms(linear_spec.space(), 512), linear_spec.alpha)


def test_inclusion_constant_flat(flat_spec):
    result = inclusion_constant(flat_spec, 0.5)
    assert result["value"] == pytest.approx(2.0, abs=1e-12)
    assert result["tail_negligible"]


def test_inclusion_constant_linear(linear_spec):
    assert inclusion_constant(linear_spec, 0.5)["value"] == pytest.approx(2 * np.log(2.0), abs=1e-10)


def test_inclusion_constant_close_to_boundary(flat_spec):
    with pytest.raises(TailNotControlled):
        inclusion_constant(flat_spec, 0.999)


def test_verify_inclusion_bound(flat_spec, linear_spec):
    flat = verify_inclusion_bound(flat_spec, samples=1000, r=0.5, seed=0)
    assert flat["holds"]
    assert flat["max_ratio"] <= 2.0
    linear = verify_inclusion_bound(linear_spec, samples=1000, r=0.9, seed=0)
    assert linear["holds"]
    assert 0.0 < linear["max_ratio"] <= linear["C_r"]


def test_membership_geometric(flat_spec, linear_spec):
    rule = lambda n: 0.5 ** n  # noqa: E731
    assert membership_beyond_disk(flat_spec, rule, R=2.0)["bound"] == pytest.approx(2.0, abs=1e-10)
    assert membership_beyond_disk(linear_spec, rule, R=2.0)["bound"] == pytest.approx(4.0, abs=1e-10)


def test_membership_entire_monomial(linear_spec):
    coefficients = np.zeros(513)
    coefficients[5] = 1.0
    result = membership_beyond_disk(linear_spec, coefficients, R=1e6)
    assert result["bound"] == pytest.approx(6.0, rel=1e-12)


def test_membership_rejects_false_radius():
    # c_n = 0.999^n does not decay fast enough for a short horizon
    spec = EmbeddingSpec(WeightSequence.constant(64))
    with pytest.raises(DivergentEvidence):
        membership_beyond_disk(spec, lambda n: 0.999 ** n, R=1.001)


def test_checked_spec_rejects_exponential_weights():
    with pytest.raises(InadmissibleWeights):
        EmbeddingSpec.checked(WeightSequence(2.0 ** np.arange(100)))
    assert EmbeddingSpec.checked(WeightSequence.from_exponent(1.0, 512)).horizon == 512
