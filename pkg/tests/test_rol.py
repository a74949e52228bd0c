"""Tests for the reverse order law checkers and the block Moore-Penrose lemma."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from app.errors import DimensionError, NotExistsError
from app.models.matrix import Matrix, matrix
from app.models.reports import RolStatus
from app.models.weights import WeightTriple
from app.services.iips import identity_triple, mp_exists, mp_inverse, signature_weight
from app.services.linalg import rank
from app.services.rol import (
    BlockLayout,
    ProductPair,
    block_adjoint_holds,
    block_mp,
    classify_pair,
    greville_conditions,
    rol_classify,
    rol_rank_criterion,
)
from tests.strategies import weighted_pairs

J = signature_weight([1, -1])
JJJ = WeightTriple(m=J, n=J, l=J)

EXAMPLE_ONE = (matrix([[1, 1], [1, 0]]), matrix([[0, 1], [0, 0]]))
EXAMPLE_TWO = (matrix([[1, 2], [0, 0]]), matrix([[2, 1], [0, 0]]))


def _both_inverses(a, b, w) -> bool:
    return mp_exists(a, w.m, w.n).exists and mp_exists(b, w.n, w.l).exists


class TestClassifyExamples:
    """Test classification on the worked examples."""

    def test_example_one_product_inverse_missing(self):
        report = rol_classify(*EXAMPLE_ONE, JJJ)
        assert report.a_exists and report.b_exists
        assert not report.ab_exists
        assert report.status is RolStatus.AB_DAG_MISSING
        assert report.ab_dag is None
        assert report.rank_criterion is False
        assert report.greville.agree and not report.greville.all_hold

    def test_example_two_exists_but_unequal(self):
        report = rol_classify(*EXAMPLE_TWO, JJJ)
        assert report.status is RolStatus.EXISTS_BUT_UNEQUAL
        assert report.ab_dag == matrix([[2, 0], [-1, 0]]).scale(Fraction(1, 3))
        assert report.bdag_adag == matrix([[2, 0], [-1, 0]]).scale(Fraction(-1, 9))
        assert report.rank_criterion is False

    def test_example_two_greville_flags_all_false(self):
        flags = greville_conditions(*EXAMPLE_TWO, JJJ)
        assert flags.model_dump() == {
            "range_hermitian": False,
            "range_inclusions": False,
            "projectors_range_hermitian": False,
            "projector_equalities": False,
        }
        assert not rol_rank_criterion(*EXAMPLE_TWO, JJJ)

    def test_identity_pair_holds(self):
        report = rol_classify(Matrix.identity(2), Matrix.identity(2), JJJ)
        assert report.status is RolStatus.HOLDS_EQUAL
        assert report.greville.all_hold
        assert report.rank_criterion

    def test_factor_missing(self):
        report = rol_classify(matrix([[1, 1], [0, 0]]), Matrix.identity(2), JJJ)
        assert report.status is RolStatus.FACTOR_MISSING
        assert not report.a_exists and report.b_exists
        assert report.greville is None and report.rank_criterion is None

    def test_conditions_need_factor_inverses(self):
        with pytest.raises(NotExistsError):
            greville_conditions(matrix([[1, 1], [0, 0]]), Matrix.identity(2), JJJ)

    def test_shape_checks(self):
        with pytest.raises(DimensionError):
            ProductPair(matrix([[1, 2]]), matrix([[1, 2]]), JJJ)
        with pytest.raises(DimensionError):
            ProductPair(Matrix.identity(2), Matrix.identity(2), identity_triple(2, 2, 3))

    def test_report_serializes_exactly(self):
        dumped = rol_classify(*EXAMPLE_TWO, JJJ).model_dump(mode="json")
        assert dumped["status"] == "exists_but_unequal"
        assert dumped["bdag_adag"]["data"] == [["-2/9", "0"], ["1/9", "0"]]


class TestTheorems:
    """Test the proven relations between the conditions on random pairs."""

    @settings(max_examples=150, deadline=None)
    @given(weighted_pairs())
    def test_greville_conditions_agree(self, case):
        a, b, w = case
        if not _both_inverses(a, b, w):
            return
        assert greville_conditions(a, b, w).agree

    @settings(max_examples=150, deadline=None)
    @given(weighted_pairs())
    def test_rank_criterion_matches_status(self, case):
        a, b, w = case
        if not _both_inverses(a, b, w):
            return
        report = rol_classify(a, b, w)
        assert report.rank_criterion == (report.status is RolStatus.HOLDS_EQUAL)

    @settings(max_examples=150, deadline=None)
    @given(weighted_pairs())
    def test_greville_implies_reverse_order_law(self, case):
        a, b, w = case
        if not _both_inverses(a, b, w):
            return
        report = rol_classify(a, b, w)
        if report.greville.all_hold:
            assert report.rank_criterion
            assert report.status is RolStatus.HOLDS_EQUAL

    @settings(max_examples=150, deadline=None)
    @given(weighted_pairs())
    def test_rank_hypothesis_gives_equivalence(self, case):
        a, b, w = case
        if not _both_inverses(a, b, w):
            return
        report = rol_classify(a, b, w)
        if report.rank_hypothesis:
            assert (report.status is RolStatus.HOLDS_EQUAL) == report.greville.all_hold

    @settings(max_examples=100, deadline=None)
    @given(weighted_pairs())
    def test_holds_equal_means_verified_inverse(self, case):
        a, b, w = case
        report = rol_classify(a, b, w)
        if report.status is RolStatus.HOLDS_EQUAL:
            assert mp_inverse(a @ b, w.m, w.l).inverse == report.bdag_adag

    @settings(max_examples=100, deadline=None)
    @given(weighted_pairs())
    def test_product_rank_through_projectors(self, case):
        a, b, w = case
        if not _both_inverses(a, b, w):
            return
        pair = ProductPair(a, b, w)
        assert rank(a @ b) == rank(b @ pair.b_dag @ pair.a_dag @ a)

    def test_pair_caches_inverses(self):
        pair = ProductPair(*EXAMPLE_TWO, JJJ)
        assert pair.a_dag is pair.a_dag
        assert classify_pair(pair).status is RolStatus.EXISTS_BUT_UNEQUAL

    def test_pair_computes_each_inverse_once(self, monkeypatch):
        calls = []

        def counting(a, m, n):
            calls.append(a)
            return mp_inverse(a, m, n)

        monkeypatch.setattr("app.services.rol.mp_inverse", counting)
        pair = ProductPair(*EXAMPLE_TWO, JJJ)
        assert pair.a_exists and pair.b_exists
        report = classify_pair(pair)
        classify_pair(pair)
        assert report.ab_dag == pair.d_result.inverse
        assert calls == [pair.a, pair.b, pair.d]

    def test_pair_missing_factor(self):
        pair = ProductPair(matrix([[1, 1], [0, 0]]), Matrix.identity(2), JJJ)
        assert not pair.a_exists and pair.b_exists
        assert pair.a_result.rank_a == 1
        with pytest.raises(NotExistsError, match=r"A\^\[\+\] does not exist"):
            pair.a_dag


class TestBlockMp:
    """Test the block-diagonal and antidiagonal Moore-Penrose lemma."""

    def test_diag_example_two(self):
        a, b = EXAMPLE_TWO
        a_dag = matrix([[1, 0], [-2, 0]]).scale(Fraction(-1, 3))
        b_dag = matrix([[2, 0], [-1, 0]]).scale(Fraction(1, 3))
        out = block_mp(a, b, (J, J, J, J), BlockLayout.DIAG)
        assert out.select_rows([0, 1]).select_columns([0, 1]) == a_dag
        assert out.select_rows([2, 3]).select_columns([2, 3]) == b_dag
        assert out.select_rows([0, 1]).select_columns([2, 3]).is_zero()

    def test_antidiag_swaps_blocks(self):
        a = matrix([[1, 2], [0, 0]])
        b = matrix([[3]])
        n1 = signature_weight([-1])
        out = block_mp(a, b, (J, J, n1, n1), BlockLayout.ANTIDIAG)
        a_dag = mp_inverse(a, J, J).inverse
        b_dag = mp_inverse(b, n1, n1).inverse
        assert out.shape == (3, 3)
        assert out.select_rows([0]).select_columns([2]) == b_dag
        assert out.select_rows([1, 2]).select_columns([0, 1]) == a_dag
        assert out.select_rows([0]).select_columns([0, 1]).is_zero()
        assert out.select_rows([1, 2]).select_columns([2]).is_zero()

    def test_requires_factor_inverses(self):
        with pytest.raises(NotExistsError):
            block_mp(matrix([[1, 1], [0, 0]]), Matrix.identity(2), (J, J, J, J), BlockLayout.DIAG)

    @settings(max_examples=100, deadline=None)
    @given(weighted_pairs(max_dim=2), weighted_pairs(max_dim=2))
    def test_block_lemma(self, first, second):
        a, _, wa = first
        b, _, wb = second
        blocks = (wa.m, wa.n, wb.m, wb.n)
        for layout in BlockLayout:
            assert block_adjoint_holds(a, b, blocks, layout)
        if not (mp_exists(a, wa.m, wa.n).exists and mp_exists(b, wb.m, wb.n).exists):
            return
        for layout in BlockLayout:
            block_mp(a, b, blocks, layout)
