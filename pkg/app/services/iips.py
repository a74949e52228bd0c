"""Indefinite inner product structure: weights, adjoints and Moore-Penrose inverses."""

import logging
from typing import Iterable, Optional

from app.errors import (
    DimensionError,
    InternalInconsistencyError,
    NotExistsError,
    SingularError,
    WeightDefect,
    WeightError,
)
from app.models.matrix import Matrix
from app.models.reports import MpPropertyReport, MpResult, PenroseChecks
from app.models.weights import Weight, WeightTriple
from app.services.linalg import full_rank_factorization, inverse, range_contains, rank

logger = logging.getLogger(__name__)


def weight_validate(h: Matrix, field: Optional[str] = None) -> Weight:
    """
    Check that `h` is an invertible Hermitian matrix and cache its inverse.

    Args:
        h: Candidate weight
        field: Name reported in the error (e.g. "M")

    Raises:
        WeightError: If `h` is not square, not Hermitian or singular
    """
    if not h.is_square:
        raise WeightError(WeightDefect.NOT_SQUARE, field)
    if h.conj_transpose() != h:
        raise WeightError(WeightDefect.NOT_HERMITIAN, field)
    try:
        h_inverse = inverse(h)
    except SingularError:
        raise WeightError(WeightDefect.SINGULAR, field)
    return Weight(h=h, h_inverse=h_inverse)


def identity_weight(order: int) -> Weight:
    eye = Matrix.identity(order)
    return Weight(h=eye, h_inverse=eye)


def signature_weight(signs: Iterable[int]) -> Weight:
    """diag(+-1); a signature matrix is its own inverse."""
    h = Matrix.diagonal(signs)
    return Weight(h=h, h_inverse=h)


def identity_triple(m: int, n: int, l: int) -> WeightTriple:
    return WeightTriple(m=identity_weight(m), n=identity_weight(n), l=identity_weight(l))


def _check_orders(a: Matrix, m: Weight, n: Weight) -> None:
    if a.rows != m.order or a.cols != n.order:
        raise DimensionError(
            f"{a.rows}x{a.cols} matrix does not fit weights of orders {m.order} and {n.order}"
        )


def adjoint(a: Matrix, m: Weight, n: Weight) -> Matrix:
    """MN-adjoint N^-1 A* M of an m x n matrix."""
    _check_orders(a, m, n)
    return n.h_inverse @ a.conj_transpose() @ m.h


def is_w_hermitian(a: Matrix, n: Weight) -> bool:
    return adjoint(a, n, n) == a


def is_range_hermitian(a: Matrix, n: Weight) -> bool:
    """R(A) == R(A^[*]) with both adjoint weights equal to `n`."""
    a_star = adjoint(a, n, n)
    return range_contains(a, a_star) and range_contains(a_star, a)


def mp_exists(a: Matrix, m: Weight, n: Weight) -> MpResult:
    """
    Existence test rank(A) = rank(AA^[*]) = rank(A^[*]A).

    Returns:
        MpResult with the three ranks and no inverse
    """
    a_star = adjoint(a, m, n)
    rank_a = rank(a)
    rank_aastar = rank(a @ a_star)
    rank_astara = rank(a_star @ a)
    exists = rank_a == rank_aastar == rank_astara
    logger.debug(f"mp_exists: ranks=({rank_a}, {rank_aastar}, {rank_astara}) exists={exists}")
    return MpResult(
        exists=exists,
        rank_a=rank_a,
        rank_aastar=rank_aastar,
        rank_astara=rank_astara,
    )


def penrose_residuals(a: Matrix, x: Matrix, m: Weight, n: Weight) -> PenroseChecks:
    """Evaluate the four Penrose equations for candidate X exactly."""
    _check_orders(a, m, n)
    if x.shape != (a.cols, a.rows):
        raise DimensionError(
            f"candidate inverse must be {a.cols}x{a.rows}, got {x.rows}x{x.cols}"
        )
    ax = a @ x
    xa = x @ a
    return PenroseChecks(
        axa=ax @ a == a,
        xax=x @ ax == x,
        ax_self_adjoint=adjoint(ax, m, m) == ax,
        xa_self_adjoint=adjoint(xa, n, n) == xa,
    )


def mp_inverse(a: Matrix, m: Weight, n: Weight) -> MpResult:
    """
    Moore-Penrose inverse of A between IIPSs.

    With A = FG a full-rank factorization, F^[*] = F* M and G^[*] = N^-1 G*,
    the inverse is G^[*] (F^[*] A G^[*])^-1 F^[*]. The middle factor is
    invertible exactly when the existence criterion holds. The result is
    re-verified against the four Penrose equations before it is returned.

    Raises:
        NotExistsError: If the existence criterion fails
        InternalInconsistencyError: If the criterion holds but verification fails
    """
    result = mp_exists(a, m, n)
    if not result.exists:
        raise NotExistsError(
            f"Moore-Penrose inverse does not exist: rank(A)={result.rank_a}, "
            f"rank(AA^[*])={result.rank_aastar}, rank(A^[*]A)={result.rank_astara}",
            result,
        )
    factors = full_rank_factorization(a)
    if factors is None:
        x = Matrix.zeros(a.cols, a.rows)
    else:
        f, g = factors
        f_star = f.conj_transpose() @ m.h
        g_star = n.h_inverse @ g.conj_transpose()
        try:
            middle_inverse = inverse(f_star @ a @ g_star)
        except SingularError:
            raise InternalInconsistencyError(
                "existence criterion holds but the middle factor is singular"
            )
        x = g_star @ middle_inverse @ f_star
    checks = penrose_residuals(a, x, m, n)
    if not checks.all_hold:
        logger.error(f"Penrose verification failed: {checks.model_dump()}")
        raise InternalInconsistencyError("computed inverse fails the Penrose equations")
    return result.model_copy(update={"inverse": x})


def mp_inverse_or_none(a: Matrix, m: Weight, n: Weight) -> Optional[Matrix]:
    try:
        return mp_inverse(a, m, n).inverse
    except NotExistsError:
        return None


def mp_property_report(a: Matrix, m: Weight, n: Weight) -> MpPropertyReport:
    """
    Evaluate the six standard properties of A^[+] exactly.

    Raises:
        NotExistsError: If A^[+] does not exist
    """
    a_dag = mp_inverse(a, m, n).inverse
    a_star = adjoint(a, m, n)

    adjoint_absorbs = a_star == a_star @ a @ a_dag and a_star == a_dag @ a @ a_star

    a_star_dag = mp_inverse_or_none(a_star, n, m)
    commutes = a_star_dag is not None and a_star_dag == adjoint(a_dag, n, m)

    gram = a @ a_star
    cogram = a_star @ a
    gram_dag = mp_inverse_or_none(gram, m, m)
    cogram_dag = mp_inverse_or_none(cogram, n, n)
    factor = (
        gram_dag is not None
        and cogram_dag is not None
        and a_star_dag is not None
        and gram_dag == a_star_dag @ a_dag
        and cogram_dag == a_dag @ a_star_dag
    )

    closed_forms = (
        gram_dag is not None
        and cogram_dag is not None
        and a_dag == a_star @ gram_dag
        and a_dag == cogram_dag @ a_star
    )

    fixes_a = gram_dag is not None and gram_dag @ gram @ a == a and gram @ gram_dag @ a == a
    projectors_commute = gram_dag is not None and gram_dag @ gram == gram @ gram_dag

    return MpPropertyReport(
        adjoint_absorbs_projectors=adjoint_absorbs,
        adjoint_commutes_with_inverse=commutes,
        gram_inverses_factor=factor,
        closed_forms=closed_forms,
        gram_inverse_fixes_a=fixes_a,
        gram_projectors_commute=projectors_commute,
    )
