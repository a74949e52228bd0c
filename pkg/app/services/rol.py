"""Reverse order law for the Moore-Penrose inverse between IIPSs."""

import logging
from enum import Enum
from functools import cached_property
from typing import Sequence, Tuple

from app.errors import DimensionError, InternalInconsistencyError, NotExistsError
from app.models.matrix import Matrix
from app.models.reports import GrevilleConditions, MpResult, RolReport, RolStatus
from app.models.weights import Weight, WeightTriple
from app.services.iips import adjoint, is_range_hermitian, mp_inverse
from app.services.linalg import block_assemble, hstack, range_contains, rank

logger = logging.getLogger(__name__)


class ProductPair:
    """
    A pair A (m x n) and B (n x l) under weights (M, N, L).

    Adjoints and Moore-Penrose inverses are computed once and shared by the
    condition checkers.
    """

    def __init__(self, a: Matrix, b: Matrix, w: WeightTriple):
        if a.cols != b.rows:
            raise DimensionError(f"cannot form AB from {a.rows}x{a.cols} and {b.rows}x{b.cols}")
        if (a.rows, a.cols, b.cols) != w.orders:
            raise DimensionError(
                f"weights of orders {w.orders} do not fit A {a.rows}x{a.cols}, B {b.rows}x{b.cols}"
            )
        self.a = a
        self.b = b
        self.w = w

    @cached_property
    def a_star(self) -> Matrix:
        return adjoint(self.a, self.w.m, self.w.n)

    @cached_property
    def b_star(self) -> Matrix:
        return adjoint(self.b, self.w.n, self.w.l)

    @cached_property
    def d(self) -> Matrix:
        return self.a @ self.b

    @cached_property
    def d_star(self) -> Matrix:
        return adjoint(self.d, self.w.m, self.w.l)

    @cached_property
    def a_result(self) -> MpResult:
        return _mp_result(self.a, self.w.m, self.w.n)

    @cached_property
    def b_result(self) -> MpResult:
        return _mp_result(self.b, self.w.n, self.w.l)

    @cached_property
    def d_result(self) -> MpResult:
        return _mp_result(self.d, self.w.m, self.w.l)

    @property
    def a_exists(self) -> bool:
        return self.a_result.exists

    @property
    def b_exists(self) -> bool:
        return self.b_result.exists

    @property
    def a_dag(self) -> Matrix:
        return _inverse_of(self.a_result, "A")

    @property
    def b_dag(self) -> Matrix:
        return _inverse_of(self.b_result, "B")

    def require_inverses(self) -> None:
        """Raise NotExistsError unless both A^[+] and B^[+] exist."""
        self.a_dag
        self.b_dag


def _mp_result(a: Matrix, m: Weight, n: Weight) -> MpResult:
    """mp_inverse, with a missing inverse returned as the failed existence result."""
    try:
        return mp_inverse(a, m, n)
    except NotExistsError as e:
        return e.result


def _inverse_of(result: MpResult, name: str) -> Matrix:
    if not result.exists:
        raise NotExistsError(
            f"{name}^[+] does not exist: rank={result.rank_a}, "
            f"rank({name}{name}^[*])={result.rank_aastar}, rank({name}^[*]{name})={result.rank_astara}",
            result,
        )
    return result.inverse


def greville_conditions(a: Matrix, b: Matrix, w: WeightTriple) -> GrevilleConditions:
    """
    Evaluate the four reverse-order-law conditions exactly.

    Raises:
        NotExistsError: If A^[+] or B^[+] does not exist
    """
    return _greville(ProductPair(a, b, w))


def _greville(pair: ProductPair) -> GrevilleConditions:
    pair.require_inverses()
    a, b, n = pair.a, pair.b, pair.w.n
    a_star, b_star, a_dag, b_dag = pair.a_star, pair.b_star, pair.a_dag, pair.b_dag

    astar_a_b = a_star @ a @ b
    b_bstar_astar = b @ b_star @ a_star
    b_bdag = b @ b_dag
    adag_a = a_dag @ a

    return GrevilleConditions(
        range_hermitian=is_range_hermitian(astar_a_b @ b_star, n),
        range_inclusions=range_contains(b, astar_a_b) and range_contains(a_star, b_bstar_astar),
        projectors_range_hermitian=(
            is_range_hermitian(b_bdag @ a_star @ a, n)
            and is_range_hermitian(adag_a @ b @ b_star, n)
        ),
        projector_equalities=(
            b_bdag @ astar_a_b == astar_a_b and adag_a @ b_bstar_astar == b_bstar_astar
        ),
    )


def rol_rank_criterion(a: Matrix, b: Matrix, w: WeightTriple) -> bool:
    """
    rank [[D, AA^[*]D], [DB^[*]B, DD^[*]D]] == rank(D) with D = AB.

    Raises:
        NotExistsError: If A^[+] or B^[+] does not exist
    """
    return _rank_criterion(ProductPair(a, b, w))


def _rank_criterion(pair: ProductPair) -> bool:
    pair.require_inverses()
    d = pair.d
    block = block_assemble([
        [d, pair.a @ pair.a_star @ d],
        [d @ pair.b_star @ pair.b, d @ pair.d_star @ d],
    ])
    return rank(block) == rank(d)


def _rank_hypothesis(pair: ProductPair) -> bool:
    """rank [[B^[*]A^[*], B^[*]B], [AA^[*], AB]] == rank [A^[*]  B]."""
    a, b, a_star, b_star = pair.a, pair.b, pair.a_star, pair.b_star
    block = block_assemble([
        [b_star @ a_star, b_star @ b],
        [a @ a_star, pair.d],
    ])
    return rank(block) == rank(hstack(a_star, b))


def rol_classify(a: Matrix, b: Matrix, w: WeightTriple) -> RolReport:
    """
    Classify the reverse order law (AB)^[+] = B^[+]A^[+] for a pair.

    Missing inverses are recorded in the report, never raised.
    """
    return classify_pair(ProductPair(a, b, w))


def classify_pair(pair: ProductPair) -> RolReport:
    a_exists, b_exists = pair.a_exists, pair.b_exists
    ab_dag = pair.d_result.inverse
    ab_exists = pair.d_result.exists

    if not (a_exists and b_exists):
        logger.debug(f"rol_classify: factor inverse missing (A: {a_exists}, B: {b_exists})")
        return RolReport(
            a_exists=a_exists,
            b_exists=b_exists,
            ab_exists=ab_exists,
            status=RolStatus.FACTOR_MISSING,
            ab_dag=ab_dag,
        )

    bdag_adag = pair.b_dag @ pair.a_dag
    if not ab_exists:
        status = RolStatus.AB_DAG_MISSING
    elif ab_dag == bdag_adag:
        status = RolStatus.HOLDS_EQUAL
    else:
        status = RolStatus.EXISTS_BUT_UNEQUAL

    report = RolReport(
        a_exists=True,
        b_exists=True,
        ab_exists=ab_exists,
        greville=_greville(pair),
        rank_criterion=_rank_criterion(pair),
        rank_hypothesis=_rank_hypothesis(pair),
        status=status,
        ab_dag=ab_dag,
        bdag_adag=bdag_adag,
    )
    logger.debug(f"rol_classify: status={status.value} greville={report.greville.model_dump()}")
    return report


class BlockLayout(str, Enum):
    """Placement of A and B in a 2x2 block matrix."""

    DIAG = "diag"
    ANTIDIAG = "antidiag"


def _block_weight(first: Weight, second: Weight) -> Weight:
    return Weight(
        h=block_assemble([[first.h, None], [None, second.h]]),
        h_inverse=block_assemble([[first.h_inverse, None], [None, second.h_inverse]]),
    )


def _block_operator(
    a: Matrix,
    b: Matrix,
    w_blocks: Sequence[Weight],
    layout: BlockLayout
) -> Tuple[Matrix, Weight, Weight]:
    """The block matrix T with its codomain and domain weights."""
    m_a, n_a, m_b, n_b = w_blocks
    codomain = _block_weight(m_a, m_b)
    if layout is BlockLayout.DIAG:
        return block_assemble([[a, None], [None, b]]), codomain, _block_weight(n_a, n_b)
    return block_assemble([[None, a], [b, None]]), codomain, _block_weight(n_b, n_a)


def _arrange(layout: BlockLayout, first: Matrix, second: Matrix) -> Matrix:
    """diag(first, second), or [[0, second], [first, 0]] for the antidiagonal layout."""
    if layout is BlockLayout.DIAG:
        return block_assemble([[first, None], [None, second]])
    return block_assemble([[None, second], [first, None]])


def block_adjoint_holds(
    a: Matrix,
    b: Matrix,
    w_blocks: Sequence[Weight],
    layout: BlockLayout
) -> bool:
    """The block adjoint equals the block of adjoints, rearranged for the layout."""
    m_a, n_a, m_b, n_b = w_blocks
    t, codomain, domain = _block_operator(a, b, w_blocks, layout)
    expected = _arrange(layout, adjoint(a, m_a, n_a), adjoint(b, m_b, n_b))
    return adjoint(t, codomain, domain) == expected


def block_mp(
    a: Matrix,
    b: Matrix,
    w_blocks: Sequence[Weight],
    layout: BlockLayout
) -> Matrix:
    """
    Moore-Penrose inverse of diag(A, B) or [[0, A], [B, 0]].

    `w_blocks` is (M_a, N_a, M_b, N_b): A is under (M_a, N_a) and B under
    (M_b, N_b). The block inverse is computed with block weights and checked
    against diag(A^[+], B^[+]) (or [[0, B^[+]], [A^[+], 0]]), and the block
    adjoint against the block of adjoints.

    Raises:
        NotExistsError: If A^[+] or B^[+] does not exist
        InternalInconsistencyError: If the block result disagrees with the blocks
    """
    m_a, n_a, m_b, n_b = w_blocks
    a_dag = mp_inverse(a, m_a, n_a).inverse
    b_dag = mp_inverse(b, m_b, n_b).inverse

    if not block_adjoint_holds(a, b, w_blocks, layout):
        raise InternalInconsistencyError(f"{layout.value} block adjoint differs from blockwise adjoints")
    t, codomain, domain = _block_operator(a, b, w_blocks, layout)
    t_dag = mp_inverse(t, codomain, domain).inverse
    if t_dag != _arrange(layout, a_dag, b_dag):
        logger.error(f"{layout.value} block inverse mismatch for {a.shape} and {b.shape} blocks")
        raise InternalInconsistencyError(f"{layout.value} block inverse differs from blockwise inverses")
    return t_dag
