"""Catalog of block-rank identities, each evaluated on both sides independently."""

import logging
from abc import ABC, abstractmethod
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from app.errors import DimensionError, NotExistsError, PreconditionUnmetError
from app.models.matrix import Matrix
from app.models.reports import IdentityId, IdentityInstance
from app.models.weights import Weight, WeightTriple
from app.services.iips import adjoint, identity_weight, is_w_hermitian, mp_inverse
from app.services.linalg import (
    block_assemble,
    euclidean_pinv,
    hstack,
    index,
    range_contains,
    rank,
    vstack,
)

logger = logging.getLogger(__name__)

Orders = Tuple[Optional[int], ...]
Weights = Mapping[str, Weight]
Known = Mapping[str, Matrix]
Sides = Tuple[int, int, Dict[str, int]]


def _first_departure(pairs: Sequence[Tuple[int, int]]) -> Tuple[int, int]:
    """The first (lhs, rhs) pair that differs, or the first pair when all agree."""
    for lhs, rhs in pairs:
        if lhs != rhs:
            return lhs, rhs
    return pairs[0]


def _dag(a: Matrix, m: Weight, n: Weight, name: str, known: Known) -> Matrix:
    cached = known.get(f"{name}^[+]")
    if cached is not None:
        return cached
    try:
        return mp_inverse(a, m, n).inverse
    except NotExistsError as exc:
        raise NotExistsError(f"{name}^[+] does not exist: {exc}", exc.result)


def _star(a: Matrix, m: Weight, n: Weight, name: str, known: Known) -> Matrix:
    cached = known.get(f"{name}^[*]")
    return cached if cached is not None else adjoint(a, m, n)


def _need(condition: bool, message: str) -> None:
    if not condition:
        raise DimensionError(message)


class RankIdentity(ABC):
    """A rank identity with named operands and the weight orders it uses."""

    identity_id: IdentityId
    operand_names: Tuple[str, ...]
    weight_names: Tuple[str, ...] = ("M", "N", "L")

    @abstractmethod
    def weight_orders(self, ops: Mapping[str, Matrix]) -> Orders:
        """
        Orders of the weights named in `weight_names`, None for unused weights.

        Raises:
            DimensionError: If the operand shapes do not fit together
        """

    @abstractmethod
    def sides(self, ops: Mapping[str, Matrix], w: Weights, known: Known) -> Sides:
        """
        Compute (lhs, rhs, details) through independent code paths.

        `known` may hold precomputed inverses and adjoints keyed "A^[+]" and
        "A^[*]"; they are used as given.

        Raises:
            PreconditionUnmetError: If the identity's hypotheses fail
        """


class _Schur(RankIdentity):
    """Shared shape check for A (p x q), B (q x s), C (t x p), D (t x s)."""

    operand_names = ("A", "B", "C", "D")

    def weight_orders(self, ops):
        a, b, c, d = (ops[k] for k in self.operand_names)
        _need(b.rows == a.cols, "B must have as many rows as A has columns")
        _need(c.cols == a.rows, "C must have as many columns as A has rows")
        _need(d.shape == (c.rows, b.cols), "D must be (rows of C) x (columns of B)")
        return (None, None, None)


class SchurGeneric(_Schur):
    """rank [[A, AB], [CA, D]] = rank(A) + rank(D - CAB)."""

    identity_id = IdentityId.SCHUR_GENERIC

    def sides(self, ops, w, known):
        a, b, c, d = (ops[k] for k in self.operand_names)
        lhs = rank(block_assemble([[a, a @ b], [c @ a, d]]))
        rank_a = rank(a)
        schur = rank(d - c @ a @ b)
        return lhs, rank_a + schur, {"rank_a": rank_a, "rank_schur": schur}


class _MpSchurShapes(RankIdentity):
    """A (m x n), B (m x q), C (p x n), D (p x q)."""

    operand_names = ("A", "B", "C", "D")

    def weight_orders(self, ops):
        a, b, c, d = (ops[k] for k in self.operand_names)
        _need(b.rows == a.rows, "B must have as many rows as A")
        _need(c.cols == a.cols, "C must have as many columns as A")
        _need(d.shape == (c.rows, b.cols), "D must be (rows of C) x (columns of B)")
        return (a.rows, a.cols, None)


class SchurEuclideanMP(_MpSchurShapes):
    """rank [[A*AA*, A*B], [CA*, D]] = rank(A) + rank(D - CA^+B), Euclidean."""

    identity_id = IdentityId.SCHUR_EUCLIDEAN_MP

    def weight_orders(self, ops):
        super().weight_orders(ops)
        return (None, None, None)

    def sides(self, ops, w, known):
        a, b, c, d = (ops[k] for k in self.operand_names)
        a_h = a.conj_transpose()
        lhs = rank(block_assemble([[a_h @ a @ a_h, a_h @ b], [c @ a_h, d]]))
        rank_a = rank(a)
        schur = rank(d - c @ euclidean_pinv(a) @ b)
        return lhs, rank_a + schur, {"rank_a": rank_a, "rank_schur": schur}


class SchurWeightedMP(_MpSchurShapes):
    """
    rank [[A^[*]AA^[*], A^[*]B], [CA^[*], D]] = rank [[D, CA^[*]], [A^[*]B, A^[*]AA^[*]]]
    = rank(A) + rank(D - CA^[+]B).
    """

    identity_id = IdentityId.SCHUR_WEIGHTED_MP

    def sides(self, ops, w, known):
        a, b, c, d = (ops[k] for k in self.operand_names)
        a_dag = _dag(a, w["M"], w["N"], "A", known)
        a_star = _star(a, w["M"], w["N"], "A", known)
        corner = a_star @ a @ a_star
        top_left = rank(block_assemble([[corner, a_star @ b], [c @ a_star, d]]))
        bottom_right = rank(block_assemble([[d, c @ a_star], [a_star @ b, corner]]))
        rank_a = rank(a)
        schur = rank(d - c @ a_dag @ b)
        rhs = rank_a + schur
        lhs, rhs = _first_departure([(top_left, rhs), (bottom_right, rhs)])
        return lhs, rhs, {
            "rank_block_top_left": top_left,
            "rank_block_bottom_right": bottom_right,
            "rank_a": rank_a,
            "rank_schur": schur,
        }


class _BlockShapes(RankIdentity):
    """M = [[A, B], [C, D]] with A (p x q), B (p x s), C (t x q), D (t x s)."""

    operand_names = ("A", "B", "C", "D")

    def weight_orders(self, ops):
        a, b, c, d = (ops[k] for k in self.operand_names)
        _need(b.rows == a.rows, "B must have as many rows as A")
        _need(c.cols == a.cols, "C must have as many columns as A")
        _need(d.shape == (c.rows, b.cols), "D must be (rows of C) x (columns of B)")
        return (None, None, None)


class BlockRankAbcd(_BlockShapes):
    """rank(M) = rank(A) = rank(B) = rank(C) implies rank(A) = rank(D)."""

    identity_id = IdentityId.BLOCK_RANK_ABCD

    def sides(self, ops, w, known):
        a, b, c, d = (ops[k] for k in self.operand_names)
        rank_m = rank(block_assemble([[a, b], [c, d]]))
        rank_a, rank_b, rank_c = rank(a), rank(b), rank(c)
        if not rank_m == rank_a == rank_b == rank_c:
            raise PreconditionUnmetError(
                f"premise fails: rank(M)={rank_m}, rank(A)={rank_a}, "
                f"rank(B)={rank_b}, rank(C)={rank_c}"
            )
        return rank_a, rank(d), {"rank_m": rank_m, "rank_b": rank_b, "rank_c": rank_c}


class RankPreservingBlock(_BlockShapes):
    """rank(M) = rank(A) iff D = CA^+B, N(A) in N(C) and N(A*) in N(B*)."""

    identity_id = IdentityId.RANK_PRESERVING_BLOCK

    def sides(self, ops, w, known):
        a, b, c, d = (ops[k] for k in self.operand_names)
        rank_m = rank(block_assemble([[a, b], [c, d]]))
        rank_a = rank(a)
        schur_zero = (d - c @ euclidean_pinv(a) @ b).is_zero()
        kernel_c = range_contains(a.conj_transpose(), c.conj_transpose())
        kernel_b = range_contains(a, b)
        lhs = int(rank_m == rank_a)
        rhs = int(schur_zero and kernel_c and kernel_b)
        return lhs, rhs, {
            "rank_m": rank_m,
            "rank_a": rank_a,
            "schur_zero": int(schur_zero),
            "kernel_a_in_kernel_c": int(kernel_c),
            "kernel_a_star_in_kernel_b_star": int(kernel_b),
        }


class RangeIntersection(RankIdentity):
    """ind(A) = 1 and R(AB) in R(B) give rank(AB) = rank(A) + rank(B) - rank [A B]."""

    identity_id = IdentityId.RANGE_INTERSECTION
    operand_names = ("A", "B")

    def weight_orders(self, ops):
        a, b = ops["A"], ops["B"]
        _need(a.is_square, "A must be square")
        _need(b.rows == a.rows, "B must have as many rows as A")
        return (None, None, None)

    def sides(self, ops, w, known):
        a, b = ops["A"], ops["B"]
        ind = index(a)
        ab = a @ b
        if ind != 1:
            raise PreconditionUnmetError(f"ind(A) = {ind}, expected 1")
        if not range_contains(b, ab):
            raise PreconditionUnmetError("R(AB) is not contained in R(B)")
        rank_a, rank_b, rank_ab_cols = rank(a), rank(b), rank(hstack(a, b))
        return rank(ab), rank_a + rank_b - rank_ab_cols, {
            "rank_a": rank_a,
            "rank_b": rank_b,
            "rank_a_b": rank_ab_cols,
        }


class _CommutatorShapes(RankIdentity):
    operand_names = ("P", "Q")

    def _check(self, p: Matrix, q: Matrix) -> None:
        _need(p.is_square and q.is_square and p.shape == q.shape,
              "P and Q must be square of the same order")

    def _require_idempotent(self, p: Matrix, q: Matrix) -> None:
        if p @ p != p:
            raise PreconditionUnmetError("P is not idempotent")
        if q @ q != q:
            raise PreconditionUnmetError("Q is not idempotent")


class IdempotentCommutator(_CommutatorShapes):
    """
    rank(PQ - QP) = rank [P; Q] + rank [P Q] + rank(PQ) + rank(QP)
    - 2 rank(P) - 2 rank(Q) for idempotent P, Q.
    """

    identity_id = IdentityId.IDEMPOTENT_COMMUTATOR

    def weight_orders(self, ops):
        self._check(ops["P"], ops["Q"])
        return (None, None, None)

    def sides(self, ops, w, known):
        p, q = ops["P"], ops["Q"]
        self._require_idempotent(p, q)
        pq, qp = p @ q, q @ p
        parts = {
            "rank_stacked": rank(vstack(p, q)),
            "rank_side_by_side": rank(hstack(p, q)),
            "rank_pq": rank(pq),
            "rank_qp": rank(qp),
            "rank_p": rank(p),
            "rank_q": rank(q),
        }
        rhs = (
            parts["rank_stacked"] + parts["rank_side_by_side"] + parts["rank_pq"]
            + parts["rank_qp"] - 2 * parts["rank_p"] - 2 * parts["rank_q"]
        )
        return rank(pq - qp), rhs, parts


class HermitianIdempotentCommutator(_CommutatorShapes):
    """rank(PQ - QP) = 2 rank [P Q] + 2 rank(PQ) - 2 rank(P) - 2 rank(Q), N-Hermitian idempotents."""

    identity_id = IdentityId.HERMITIAN_IDEMPOTENT_COMMUTATOR

    def weight_orders(self, ops):
        p, q = ops["P"], ops["Q"]
        self._check(p, q)
        return (None, p.rows, None)

    def sides(self, ops, w, known):
        p, q = ops["P"], ops["Q"]
        self._require_idempotent(p, q)
        if not (is_w_hermitian(p, w["N"]) and is_w_hermitian(q, w["N"])):
            raise PreconditionUnmetError("P and Q must be N-Hermitian")
        pq = p @ q
        parts = {
            "rank_side_by_side": rank(hstack(p, q)),
            "rank_pq": rank(pq),
            "rank_p": rank(p),
            "rank_q": rank(q),
        }
        rhs = 2 * (parts["rank_side_by_side"] + parts["rank_pq"] - parts["rank_p"] - parts["rank_q"])
        return rank(pq - q @ p), rhs, parts


class AdjointSwap(RankIdentity):
    """rank [A B] = rank [A^[*]; B^[*]] and rank [A; C] = rank [A^[*] C^[*]]."""

    identity_id = IdentityId.ADJOINT_SWAP
    operand_names = ("A", "B", "C")

    def weight_orders(self, ops):
        a, b, c = ops["A"], ops["B"], ops["C"]
        _need(b.rows == a.rows, "B must have as many rows as A")
        _need(c.shape == (b.cols, a.cols), "C must be (columns of B) x (columns of A)")
        return (a.rows, a.cols, b.cols)

    def sides(self, ops, w, known):
        a, b, c = ops["A"], ops["B"], ops["C"]
        a_star = adjoint(a, w["M"], w["N"])
        row_pair = rank(hstack(a, b))
        row_pair_adjoint = rank(vstack(a_star, adjoint(b, w["M"], w["L"])))
        col_pair = rank(vstack(a, c))
        col_pair_adjoint = rank(hstack(a_star, adjoint(c, w["L"], w["N"])))
        lhs, rhs = _first_departure([(row_pair, row_pair_adjoint), (col_pair, col_pair_adjoint)])
        return lhs, rhs, {
            "rank_a_b": row_pair,
            "rank_adjoints_stacked": row_pair_adjoint,
            "rank_a_over_c": col_pair,
            "rank_adjoints_side_by_side": col_pair_adjoint,
        }


class TripleProduct(RankIdentity):
    """
    rank(D - CP^[+]AQ^[+]B) =
    rank [[P^[*]AQ^[*], P^[*]PP^[*], 0], [Q^[*]QQ^[*], 0, Q^[*]B], [0, CP^[*], -D]]
    - rank(P) - rank(Q), with P (n x l) under (N, L), Q (m x k) under (M, K)
    and A (n x k).
    """

    identity_id = IdentityId.TRIPLE_PRODUCT
    operand_names = ("A", "B", "C", "D", "P", "Q")
    weight_names = ("M", "N", "L", "K")

    def weight_orders(self, ops):
        a, b, c, d, p, q = (ops[k] for k in self.operand_names)
        _need(a.shape == (p.rows, q.cols), "A must be (rows of P) x (columns of Q)")
        _need(c.cols == p.cols, "C must have as many columns as P")
        _need(b.rows == q.rows, "B must have as many rows as Q")
        _need(d.shape == (c.rows, b.cols), "D must be (rows of C) x (columns of B)")
        return (q.rows, p.rows, p.cols, q.cols)

    def sides(self, ops, w, known):
        a, b, c, d, p, q = (ops[k] for k in self.operand_names)
        p_dag = _dag(p, w["N"], w["L"], "P", known)
        q_dag = _dag(q, w["M"], w["K"], "Q", known)
        p_star = _star(p, w["N"], w["L"], "P", known)
        q_star = _star(q, w["M"], w["K"], "Q", known)
        lhs = rank(d - c @ p_dag @ a @ q_dag @ b)
        block = block_assemble([
            [p_star @ a @ q_star, p_star @ p @ p_star, None],
            [q_star @ q @ q_star, None, q_star @ b],
            [None, c @ p_star, -d],
        ])
        rank_block, rank_p, rank_q = rank(block), rank(p), rank(q)
        return lhs, rank_block - rank_p - rank_q, {
            "rank_block": rank_block,
            "rank_p": rank_p,
            "rank_q": rank_q,
        }


class _PairIdentity(RankIdentity):
    """Identities on A (m x n) under (M, N) and B (n x l) under (N, L), both invertible."""

    operand_names = ("A", "B")

    def weight_orders(self, ops):
        a, b = ops["A"], ops["B"]
        _need(b.rows == a.cols, "B must have as many rows as A has columns")
        return (a.rows, a.cols, b.cols)

    def _inverses(self, ops, w, known) -> Tuple[Matrix, Matrix]:
        return (
            _dag(ops["A"], w["M"], w["N"], "A", known),
            _dag(ops["B"], w["N"], w["L"], "B", known),
        )

    def _a_star(self, ops, w, known) -> Matrix:
        return _star(ops["A"], w["M"], w["N"], "A", known)


class ReverseOrderGap(_PairIdentity):
    """
    rank(AB - ABB^[+]A^[+]AB) =
    rank [[B^[*]A^[*], B^[*]B], [AA^[*], AB]] + rank(AB) - rank(A) - rank(B).
    """

    identity_id = IdentityId.REVERSE_ORDER_GAP

    def sides(self, ops, w, known):
        a, b = ops["A"], ops["B"]
        a_dag, b_dag = self._inverses(ops, w, known)
        a_star = self._a_star(ops, w, known)
        b_star = _star(b, w["N"], w["L"], "B", known)
        ab = a @ b
        lhs = rank(ab - ab @ b_dag @ a_dag @ ab)
        rank_block = rank(block_assemble([[b_star @ a_star, b_star @ b], [a @ a_star, ab]]))
        rank_ab, rank_a, rank_b = rank(ab), rank(a), rank(b)
        return lhs, rank_block + rank_ab - rank_a - rank_b, {
            "rank_block": rank_block,
            "rank_ab": rank_ab,
            "rank_a": rank_a,
            "rank_b": rank_b,
        }


class ProjectorCommutator(_PairIdentity):
    """rank(BB^[+]A^[+]A - A^[+]ABB^[+]) = 2 rank [A^[*] B] + 2 rank(AB) - 2 rank(A) - 2 rank(B)."""

    identity_id = IdentityId.PROJECTOR_COMMUTATOR

    def sides(self, ops, w, known):
        a, b = ops["A"], ops["B"]
        a_dag, b_dag = self._inverses(ops, w, known)
        range_b = b @ b_dag
        corange_a = a_dag @ a
        lhs = rank(range_b @ corange_a - corange_a @ range_b)
        rank_pair = rank(hstack(self._a_star(ops, w, known), b))
        rank_ab, rank_a, rank_b = rank(a @ b), rank(a), rank(b)
        return lhs, 2 * (rank_pair + rank_ab - rank_a - rank_b), {
            "rank_a_star_b": rank_pair,
            "rank_ab": rank_ab,
            "rank_a": rank_a,
            "rank_b": rank_b,
        }


class ProjectorRangeRank(_PairIdentity):
    """rank [BB^[+]  A^[+]A] = rank [B  A^[*]]."""

    identity_id = IdentityId.PROJECTOR_RANGE_RANK

    def sides(self, ops, w, known):
        a, b = ops["A"], ops["B"]
        a_dag, b_dag = self._inverses(ops, w, known)
        return rank(hstack(b @ b_dag, a_dag @ a)), rank(hstack(b, self._a_star(ops, w, known))), {}


class ProductProjectorRank(_PairIdentity):
    """rank(AB) = rank(BB^[+]A^[+]A)."""

    identity_id = IdentityId.PRODUCT_PROJECTOR_RANK

    def sides(self, ops, w, known):
        a, b = ops["A"], ops["B"]
        a_dag, b_dag = self._inverses(ops, w, known)
        return rank(a @ b), rank(b @ b_dag @ a_dag @ a), {}


CATALOG: Dict[IdentityId, RankIdentity] = {
    identity.identity_id: identity
    for identity in (
        SchurGeneric(),
        SchurEuclideanMP(),
        SchurWeightedMP(),
        BlockRankAbcd(),
        RangeIntersection(),
        IdempotentCommutator(),
        HermitianIdempotentCommutator(),
        AdjointSwap(),
        TripleProduct(),
        ReverseOrderGap(),
        ProjectorCommutator(),
        RankPreservingBlock(),
        ProjectorRangeRank(),
        ProductProjectorRank(),
    )
}


def get_identity(identity_id: IdentityId) -> RankIdentity:
    return CATALOG[IdentityId(identity_id)]


def _resolve_weights(
    names: Sequence[str],
    orders: Orders,
    weights: Union[WeightTriple, Weights, None]
) -> Dict[str, Weight]:
    """
    Check supplied weights against the orders an identity reads.

    Weights may be a full triple or any subset keyed by name ("M", "N", "L",
    and "K" where the identity reads it); a missing weight defaults to the
    identity of the needed order.
    """
    if isinstance(weights, WeightTriple):
        given = {"M": weights.m, "N": weights.n, "L": weights.l}
    else:
        given = dict(weights or {})
    resolved = {}
    for name, needed in zip(names, orders):
        weight = given.get(name)
        if weight is None:
            weight = identity_weight(needed or 1)
        elif needed is not None and weight.order != needed:
            raise DimensionError(f"weight {name} has order {weight.order}, operands need {needed}")
        resolved[name] = weight
    return resolved


def evaluate_rank_identity(
    identity_id: IdentityId,
    operands: Mapping[str, Matrix],
    weights: Union[WeightTriple, Weights, None] = None,
    known: Optional[Known] = None
) -> IdentityInstance:
    """
    Evaluate one catalogued identity on concrete operands.

    Args:
        identity_id: Which identity to evaluate
        operands: Matrices keyed by the identity's operand names
        weights: Weights by name, complete or partial; missing ones default to I
        known: Already verified inverses and adjoints keyed "A^[+]", "A^[*]"

    Returns:
        IdentityInstance with both sides computed independently

    Raises:
        DimensionError: If operands are missing or their shapes do not fit
        PreconditionUnmetError: If the identity's hypotheses fail
        NotExistsError: If a required Moore-Penrose inverse does not exist
    """
    identity = get_identity(identity_id)
    missing: List[str] = [k for k in identity.operand_names if k not in operands]
    if missing:
        raise DimensionError(f"{identity.identity_id.value} needs operands {', '.join(missing)}")
    ops = {k: operands[k] for k in identity.operand_names}
    w = _resolve_weights(identity.weight_names, identity.weight_orders(ops), weights)
    lhs, rhs, details = identity.sides(ops, w, known or {})
    holds = lhs == rhs
    if not holds:
        logger.error(f"{identity.identity_id.value} fails: lhs={lhs} rhs={rhs} details={details}")
    return IdentityInstance(
        identity_id=identity.identity_id,
        operands=ops,
        weights=w,
        lhs=lhs,
        rhs=rhs,
        holds=holds,
        details=details,
    )
