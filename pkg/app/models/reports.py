"""Result models for Moore-Penrose and reverse-order-law computations."""

from enum import Enum
from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.models.matrix import Matrix
from app.models.weights import Weight, WeightTriple


class MpResult(BaseModel):
    """Existence verdict (and inverse, when computed) for A between two IIPSs."""

    model_config = ConfigDict(frozen=True)

    exists: bool
    inverse: Optional[Matrix] = None
    rank_a: int
    rank_aastar: int
    rank_astara: int


class PenroseChecks(BaseModel):
    """Exact verdict on each of the four Penrose equations."""

    axa: bool = Field(..., description="AXA = A")
    xax: bool = Field(..., description="XAX = X")
    ax_self_adjoint: bool = Field(..., description="(AX)^[*] = AX")
    xa_self_adjoint: bool = Field(..., description="(XA)^[*] = XA")

    @property
    def all_hold(self) -> bool:
        return self.axa and self.xax and self.ax_self_adjoint and self.xa_self_adjoint


class MpPropertyReport(BaseModel):
    """The six standard properties of the Moore-Penrose inverse between IIPSs."""

    adjoint_absorbs_projectors: bool
    adjoint_commutes_with_inverse: bool
    gram_inverses_factor: bool
    closed_forms: bool
    gram_inverse_fixes_a: bool
    gram_projectors_commute: bool

    @property
    def all_hold(self) -> bool:
        return all(self.model_dump().values())


class GrevilleConditions(BaseModel):
    """The four equivalent conditions for the reverse order law."""

    range_hermitian: bool
    range_inclusions: bool
    projectors_range_hermitian: bool
    projector_equalities: bool

    @property
    def all_hold(self) -> bool:
        return all(self.model_dump().values())

    @property
    def agree(self) -> bool:
        return len(set(self.model_dump().values())) == 1


class RolStatus(str, Enum):
    """Reverse order law outcome for a pair (A, B)."""

    HOLDS_EQUAL = "holds_equal"
    EXISTS_BUT_UNEQUAL = "exists_but_unequal"
    AB_DAG_MISSING = "ab_dag_missing"
    FACTOR_MISSING = "factor_missing"


class RolReport(BaseModel):
    """Full classification of a pair (A, B) under weights (M, N, L)."""

    a_exists: bool
    b_exists: bool
    ab_exists: bool
    greville: Optional[GrevilleConditions] = None
    rank_criterion: Optional[bool] = None
    rank_hypothesis: Optional[bool] = None
    status: RolStatus
    ab_dag: Optional[Matrix] = None
    bdag_adag: Optional[Matrix] = None


class IdentityId(str, Enum):
    """Catalogued rank identities."""

    SCHUR_GENERIC = "schur-generic"
    SCHUR_EUCLIDEAN_MP = "schur-euclidean-mp"
    SCHUR_WEIGHTED_MP = "schur-weighted-mp"
    BLOCK_RANK_ABCD = "block-rank-abcd"
    RANGE_INTERSECTION = "range-intersection"
    IDEMPOTENT_COMMUTATOR = "idempotent-commutator"
    HERMITIAN_IDEMPOTENT_COMMUTATOR = "hermitian-idempotent-commutator"
    ADJOINT_SWAP = "adjoint-swap"
    TRIPLE_PRODUCT = "triple-product"
    REVERSE_ORDER_GAP = "reverse-order-gap"
    PROJECTOR_COMMUTATOR = "projector-commutator"
    RANK_PRESERVING_BLOCK = "rank-preserving-block"
    PROJECTOR_RANGE_RANK = "projector-range-rank"
    PRODUCT_PROJECTOR_RANK = "product-projector-rank"


class IdentityInstance(BaseModel):
    """One evaluation of a rank identity; holds iff lhs == rhs."""

    identity_id: IdentityId
    operands: Dict[str, Matrix]
    weights: Dict[str, Weight]
    lhs: int
    rhs: int
    holds: bool
    details: Dict[str, int] = Field(default_factory=dict)
