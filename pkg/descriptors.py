"""
Descriptors - pydantic models for every JSON document the CLI reads
Each model validates its document and builds the library object it describes
"""

from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

import config
from diagnostics import fejer_block, gliding_hump
from embedding import EmbeddingSpec
from hb import GRAM_METHODS, hb_gram
from schemes import SCHEME_NAMES, ArrayScheme, Scheme, TriangularArray, scheme_from_name
from series_core import TaylorPoly, random_taylor_poly
from spaces import (
    FunctionSpace,
    GramHilbertSpace,
    GramMatrix,
    SupCircleSpace,
    WeightedCoefficientSpace,
    WeightSequence,
)

ComplexPair = Tuple[float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _pairs_to_complex(pairs: List[ComplexPair]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def _weights(alpha: Optional[List[float]], exponent: Optional[float], horizon: int) -> WeightSequence:
    if alpha is not None:
        return WeightSequence(np.asarray(alpha[: horizon + 1], dtype=float))
    return WeightSequence.from_exponent(exponent if exponent is not None else 0.0, horizon)


# ============== PYDANTIC MODELS: SPACES ==============

class HardyDescriptor(_Strict):
    kind: Literal["h2"]
    horizon: int = Field(default_factory=lambda: config.DEFAULT_HORIZON, ge=0)

    def build(self) -> FunctionSpace:
        return WeightedCoefficientSpace.hardy(self.horizon)


class WeightedDescriptor(_Strict):
    """alpha given explicitly, or alpha_n = (n + 1)^exponent."""

    kind: Literal["weighted"]
    alpha: Optional[List[float]] = None
    exponent: Optional[float] = None
    p: float = Field(default=2.0, ge=1.0)
    horizon: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _one_weight_source(self):
        if self.alpha is not None and self.exponent is not None:
            raise ValueError("give either alpha or exponent, not both")
        if self.alpha is not None and len(self.alpha) == 0:
            raise ValueError("alpha must be nonempty")
        return self

    def resolved_horizon(self) -> int:
        if self.horizon is not None:
            return self.horizon if self.alpha is None else min(self.horizon, len(self.alpha) - 1)
        return len(self.alpha) - 1 if self.alpha is not None else config.DEFAULT_HORIZON

    def build(self) -> FunctionSpace:
        weights = _weights(self.alpha, self.exponent, self.resolved_horizon())
        return WeightedCoefficientSpace(weights, p=self.p)


class GramDescriptor(_Strict):
    kind: Literal["gram"]
    matrix: List[List[ComplexPair]]

    @field_validator("matrix")
    @classmethod
    def _square(cls, rows):
        if not rows or any(len(row) != len(rows) for row in rows):
            raise ValueError("Gram matrix must be square and nonempty")
        return rows

    def build(self) -> FunctionSpace:
        return GramHilbertSpace(GramMatrix.from_pairs(self.matrix))


class HbDescriptorModel(_Strict):
    """Symbol descriptor; also serves as a space descriptor."""

    kind: Literal["hb"]
    b: List[ComplexPair]
    horizon: int = Field(default_factory=lambda: config.DEFAULT_HORIZON, ge=0)
    working_factor: int = Field(default_factory=lambda: config.DEFAULT_WORKING_FACTOR, ge=1)
    method: str = "direct"

    @field_validator("method")
    @classmethod
    def _known_method(cls, value):
        if value not in GRAM_METHODS:
            raise ValueError(f"method must be one of {GRAM_METHODS}")
        return value

    def symbol(self) -> TaylorPoly:
        return TaylorPoly(_pairs_to_complex(self.b))

    def descriptor(self):
        return hb_gram(self.symbol(), self.horizon, self.working_factor, self.method)

    def build(self) -> FunctionSpace:
        return self.descriptor().to_space()


class SupDescriptor(_Strict):
    kind: Literal["sup"]
    oversampling: int = Field(default_factory=lambda: config.DEFAULT_OVERSAMPLING, ge=1)
    horizon: int = Field(default_factory=lambda: config.DEFAULT_HORIZON, ge=0)

    def build(self) -> FunctionSpace:
        return SupCircleSpace(self.oversampling, self.horizon)


SpaceDescriptor = Annotated[
    Union[HardyDescriptor, WeightedDescriptor, GramDescriptor, HbDescriptorModel, SupDescriptor],
    Field(discriminator="kind"),
]

_SPACE_ADAPTER = TypeAdapter(SpaceDescriptor)


def parse_space(document: Dict[str, Any]) -> SpaceDescriptor:
    return _SPACE_ADAPTER.validate_python(document)


def describe_space(space: FunctionSpace) -> Dict[str, Any]:
    """Space descriptor document of a built space; it rebuilds the same space."""
    document = space.describe()
    parse_space(document)
    return document


# ============== PYDANTIC MODELS: FUNCTIONS ==============

class _FunctionBase(_Strict):
    name: Optional[str] = None


class CoefficientsInput(_FunctionBase):
    kind: Literal["coefficients"]
    coefficients: List[ComplexPair]

    def build(self, horizon: int, rng: np.random.Generator) -> TaylorPoly:
        return TaylorPoly(_pairs_to_complex(self.coefficients))


class RandomInput(_FunctionBase):
    kind: Literal["random"]
    degree: int = Field(ge=0)
    scale: float = Field(default=1.0, gt=0)

    def build(self, horizon: int, rng: np.random.Generator) -> TaylorPoly:
        return random_taylor_poly(rng, self.degree, self.scale)


class GeometricInput(_FunctionBase):
    """c_n = q^n for n <= degree (defaults to the horizon)."""

    kind: Literal["geometric"]
    q: Union[float, ComplexPair]
    degree: Optional[int] = Field(default=None, ge=0)

    def build(self, horizon: int, rng: np.random.Generator) -> TaylorPoly:
        q = complex(*self.q) if isinstance(self.q, tuple) else complex(self.q)
        degree = horizon if self.degree is None else self.degree
        return TaylorPoly(q ** np.arange(degree + 1))


class MonomialInput(_FunctionBase):
    kind: Literal["monomial"]
    degree: int = Field(ge=0)

    def build(self, horizon: int, rng: np.random.Generator) -> TaylorPoly:
        return TaylorPoly.monomial(self.degree)


class GlidingHumpInput(_FunctionBase):
    kind: Literal["gliding-hump"]
    blocks: int = Field(ge=1)
    base_degree: int = Field(ge=2)
    block: Literal["landau", "fejer"] = "landau"

    def build(self, horizon: int, rng: np.random.Generator) -> TaylorPoly:
        return gliding_hump(self.blocks, self.base_degree, horizon, self.block)


class FejerBlockInput(_FunctionBase):
    kind: Literal["fejer-block"]
    m: int = Field(ge=1)

    def build(self, horizon: int, rng: np.random.Generator) -> TaylorPoly:
        return fejer_block(self.m)


FunctionDescriptor = Annotated[
    Union[CoefficientsInput, RandomInput, GeometricInput, MonomialInput, GlidingHumpInput, FejerBlockInput],
    Field(discriminator="kind"),
]


# ============== PYDANTIC MODELS: SCHEMES AND ARRAYS ==============

class ArrayFile(_Strict):
    rows: List[List[ComplexPair]]

    @field_validator("rows")
    @classmethod
    def _triangular(cls, rows):
        for n, row in enumerate(rows):
            if len(row) != n + 1:
                raise ValueError(f"row {n} has {len(row)} entries, expected {n + 1}")
        return rows

    def build(self, name: str = "array") -> TriangularArray:
        return TriangularArray.from_pairs(self.rows, name=name)


def _space_horizon(space) -> int:
    if isinstance(space, GramDescriptor):
        return len(space.matrix) - 1
    if isinstance(space, WeightedDescriptor):
        return space.resolved_horizon()
    return space.horizon


def build_scheme(name: str, space: FunctionSpace) -> Scheme:
    """Builtin scheme name, or the path of a triangular array file."""
    if name in SCHEME_NAMES:
        return scheme_from_name(name, space)
    array_file = ArrayFile.model_validate_json(Path(name).read_text())
    return ArrayScheme(array_file.build(name=Path(name).stem))


# ============== PYDANTIC MODELS: COMMAND CONFIGS ==============

class NormsConfig(_Strict):
    space: SpaceDescriptor
    n_max: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _within_horizon(self):
        horizon = _space_horizon(self.space)
        if self.n_max is not None and self.n_max > horizon:
            raise ValueError(f"n_max {self.n_max} exceeds space horizon {horizon}")
        return self


class ExperimentConfig(_Strict):
    space: SpaceDescriptor
    scheme: str
    inputs: List[FunctionDescriptor] = Field(min_length=1)
    n_max: int = Field(ge=0)
    n_min: int = Field(default=0, ge=0)
    seed: Optional[int] = None
    output: Optional[str] = None
    opnorm_trials: int = Field(default=0, ge=0)

    @field_validator("scheme")
    @classmethod
    def _known_scheme(cls, value):
        if value not in SCHEME_NAMES and not Path(value).is_file():
            raise ValueError(f"scheme must be one of {SCHEME_NAMES} or an existing array file")
        return value

    @model_validator(mode="after")
    def _within_horizon(self):
        horizon = _space_horizon(self.space)
        if self.n_max > horizon:
            raise ValueError(f"n_max {self.n_max} exceeds space horizon {horizon}")
        if self.n_min > self.n_max:
            raise ValueError("n_min must not exceed n_max")
        return self


class EmbeddingSpecDescriptor(_Strict):
    alpha: Optional[List[float]] = None
    exponent: Optional[float] = None
    p: float = Field(default=2.0, ge=1.0)
    M: float = Field(default=1.0, ge=1.0)
    horizon: Optional[int] = Field(default=None, ge=1)

    def build(self) -> EmbeddingSpec:
        weighted = WeightedDescriptor(kind="weighted", alpha=self.alpha, exponent=self.exponent, horizon=self.horizon)
        return EmbeddingSpec(_weights(self.alpha, self.exponent, weighted.resolved_horizon()), p=self.p, M=self.M)


class MembershipTarget(_Strict):
    """Function with radius of convergence R: c_n = q^n, or a single monomial z^k."""

    name: str
    R: float = Field(gt=1.0)
    q: Optional[float] = None
    monomial: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _one_rule(self):
        if (self.q is None) == (self.monomial is None):
            raise ValueError("give exactly one of q or monomial")
        return self

    def coefficients(self, horizon: int) -> np.ndarray:
        if self.q is not None:
            return float(self.q) ** np.arange(horizon + 1)
        c = np.zeros(horizon + 1)
        if self.monomial <= horizon:
            c[self.monomial] = 1.0
        return c


class EmbedConfig(_Strict):
    spec: EmbeddingSpecDescriptor
    r_list: List[float] = Field(default_factory=lambda: [0.5])
    membership: List[MembershipTarget] = Field(default_factory=list)
    samples: int = Field(default=100, ge=1)

    @field_validator("r_list")
    @classmethod
    def _radii(cls, values):
        for r in values:
            if not 0.0 < r < 1.0:
                raise ValueError(f"every r must lie in (0, 1), got {r}")
        return values
