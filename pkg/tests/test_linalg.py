"""Tests for exact scalars, matrices and dense linear algebra."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.errors import DimensionError, ParseError, SingularError
from app.models.matrix import Matrix, matrix
from app.models.scalar import GaussianRational, parse_rational
from app.services.iips import identity_weight, penrose_residuals
from app.services.linalg import (
    ArithKind,
    arith,
    block_assemble,
    euclidean_pinv,
    full_rank_factorization,
    hstack,
    index,
    inverse,
    range_contains,
    rank,
    rref,
    solve_exists,
    vstack,
)
from tests.strategies import matrices, sized_matrices, square_matrices


class TestScalars:
    """Test exact rational and Gaussian-rational scalars."""

    def test_parse_rational_lowest_terms(self):
        assert parse_rational("6/4") == Fraction(3, 2)
        assert parse_rational(" -3 ") == Fraction(-3)
        assert parse_rational(7) == Fraction(7)

    @pytest.mark.parametrize("text", ["1/0", "0.5", "1e3", "", "a/b", True, 1.5, None])
    def test_parse_rational_rejects(self, text):
        with pytest.raises(ParseError):
            parse_rational(text, "data[0][0]")

    def test_zero_denominator_names_field(self):
        with pytest.raises(ParseError) as exc:
            parse_rational("3/0", "data[1][0]")
        assert exc.value.field == "data[1][0]"
        assert "data[1][0]" in str(exc.value)

    def test_parse_rational_any_whitespace(self):
        assert parse_rational("1\t/3") == Fraction(1, 3)
        assert parse_rational("\n-2 /\t4 ") == Fraction(-1, 2)

    def test_parse_rational_many_digits(self):
        text = "7" * 5000
        assert parse_rational(text) == Fraction(int(text))
        assert parse_rational(f"1/{text}").denominator == int(text)

    def test_json_many_digits(self):
        big = GaussianRational(10 ** 5000, 1)
        assert big.to_json()[0] == "1" + "0" * 5000
        assert GaussianRational.from_json(big.to_json()) == big

    def test_gaussian_arithmetic(self):
        a = GaussianRational(1, 2)
        b = GaussianRational(3, -1)
        assert a * b == GaussianRational(5, 5)
        assert a + b == GaussianRational(4, 1)
        assert 1 / GaussianRational(1, 1) == GaussianRational(Fraction(1, 2), Fraction(-1, 2))
        assert GaussianRational(0, 1) * GaussianRational(0, 1) == -1

    def test_conjugate_and_modulus(self):
        z = GaussianRational(3, 4)
        assert z.conjugate() == GaussianRational(3, -4)
        assert z.abs2() == 25
        assert (z * z.conjugate()).is_real()

    def test_json_forms(self):
        assert GaussianRational(Fraction(2, 4)).to_json() == "1/2"
        assert GaussianRational(0, 1).to_json() == ["0", "1"]
        assert GaussianRational.from_json(["1/2", "-3"]) == GaussianRational(Fraction(1, 2), -3)

    def test_immutable(self):
        with pytest.raises(AttributeError):
            GaussianRational(1).re = Fraction(2)


class TestMatrix:
    """Test the Matrix value type and its JSON codec."""

    def test_requires_nonempty(self):
        with pytest.raises(DimensionError):
            Matrix([])
        with pytest.raises(DimensionError):
            Matrix([[]])

    def test_ragged_rows(self):
        with pytest.raises(DimensionError):
            Matrix([[1, 2], [3]])

    def test_to_json(self):
        a = matrix([[1, "1/2"], [[0, 1], "4/2"]])
        assert a.to_json() == {
            "rows": 2,
            "cols": 2,
            "data": [["1", "1/2"], [["0", "1"], "2"]],
        }

    def test_from_json_round_trip(self):
        a = matrix([[1, (Fraction(1, 3), -2)], [0, "-5/7"]])
        assert Matrix.from_json(a.to_json()) == a

    def test_from_json_reports_entry_path(self):
        payload = {"rows": 1, "cols": 2, "data": [["1", "x"]]}
        with pytest.raises(ParseError) as exc:
            Matrix.from_json(payload)
        assert exc.value.field == "matrix.data[0][1]"

    def test_from_json_shape_mismatch(self):
        with pytest.raises(ParseError) as exc:
            Matrix.from_json({"rows": 2, "cols": 1, "data": [["1"]]}, "A")
        assert exc.value.field == "A.data"

    def test_product(self):
        a = matrix([[1, 1], [1, 0]])
        b = matrix([[0, 1], [0, 0]])
        assert a @ b == matrix([[0, 1], [0, 1]])
        assert matrix([[1, 2], [0, 0]]) @ matrix([[2, 1], [0, 0]]) == matrix([[2, 1], [0, 0]])

    def test_product_shape_mismatch(self):
        with pytest.raises(DimensionError):
            matrix([[1, 2]]) @ matrix([[1, 2]])

    def test_conj_transpose(self):
        a = matrix([[(1, 2), 3]])
        assert a.H == matrix([[(1, -2)], [3]])

    def test_arith(self):
        a = matrix([[1, 2], [3, 4]])
        assert arith(a, a, ArithKind.ADD) == a.scale(2)
        assert arith(a, a, ArithKind.SUB).is_zero()
        assert arith(a, None, ArithKind.SCALE, GaussianRational(-1)) == -a

    def test_usable_as_dict_key(self):
        assert {matrix([[1]]): "one"}[matrix([["2/2"]])] == "one"


class TestEchelon:
    """Test rref, rank and inverse."""

    def test_rref_rank_one(self):
        echelon = rref(matrix([[1, 2], [2, 4]]))
        assert echelon.reduced == matrix([[1, 2], [0, 0]])
        assert echelon.pivot_columns == (0,)
        assert echelon.rank == 1

    def test_rank_examples(self):
        assert rank(matrix([[0, 1], [0, 1]])) == 1
        assert rank(Matrix.zeros(2, 2)) == 0
        assert rank(Matrix.identity(3)) == 3

    def test_rank_complex_dependent_rows(self):
        assert rank(matrix([[1, (0, 1)], [(0, 1), -1]])) == 1

    def test_rank_with_fractions(self):
        assert rank(matrix([["1/2", "1/3"], ["3/2", 1]])) == 1

    @settings(max_examples=200)
    @given(sized_matrices(max_dim=4, bound=3))
    def test_rank_agrees_with_rref(self, a):
        assert rank(a) == rref(a).rank

    @given(sized_matrices())
    def test_rank_of_adjoint(self, a):
        assert rank(a) == rank(a.H)

    @given(sized_matrices())
    def test_rref_is_idempotent(self, a):
        reduced = rref(a).reduced
        assert rref(reduced).reduced == reduced

    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(
        matrices(2, n), matrices(n, 3), matrices(2, n),
    )))
    def test_rank_bounds(self, case):
        a, b, c = case
        assert rank(a @ b) <= min(rank(a), rank(b))
        assert rank(a + c) <= rank(a) + rank(c)

    def test_inverse_example(self):
        assert inverse(matrix([[1, 1], [1, 0]])) == matrix([[0, 1], [1, -1]])

    def test_inverse_singular(self):
        with pytest.raises(SingularError):
            inverse(matrix([[1, 2], [2, 4]]))

    def test_inverse_not_square(self):
        with pytest.raises(DimensionError):
            inverse(matrix([[1, 2]]))

    @given(square_matrices())
    def test_inverse_property(self, a):
        if rank(a) < a.rows:
            with pytest.raises(SingularError):
                inverse(a)
            return
        assert inverse(a) @ a == Matrix.identity(a.rows)


class TestFactorization:
    """Test full-rank factorization and the Euclidean pseudoinverse."""

    def test_zero_matrix(self):
        assert full_rank_factorization(Matrix.zeros(2, 3)) is None
        assert euclidean_pinv(Matrix.zeros(2, 3)) == Matrix.zeros(3, 2)

    @given(sized_matrices())
    def test_factors_multiply_back(self, a):
        factors = full_rank_factorization(a)
        if factors is None:
            assert a.is_zero()
            return
        f, g = factors
        assert f @ g == a
        assert rank(f) == f.cols == rank(a)
        assert rank(g) == g.rows == rank(a)

    @given(sized_matrices())
    def test_euclidean_pinv_satisfies_penrose(self, a):
        x = euclidean_pinv(a)
        checks = penrose_residuals(a, x, identity_weight(a.rows), identity_weight(a.cols))
        assert checks.all_hold


class TestBlocks:
    """Test block assembly and the range tests."""

    def test_zero_blocks_take_sizes_from_neighbours(self):
        out = block_assemble([[Matrix.identity(2), None], [None, matrix([[5]])]])
        assert out == Matrix.diagonal([1, 1, 5])

    def test_inconsistent_heights(self):
        with pytest.raises(DimensionError):
            block_assemble([[Matrix.identity(2), matrix([[1]])]])

    def test_unsized_column(self):
        with pytest.raises(DimensionError):
            block_assemble([[None, matrix([[1]])]])

    def test_stacks(self):
        a = matrix([[1, 2]])
        assert hstack(a, a).shape == (1, 4)
        assert vstack(a, a) == matrix([[1, 2], [1, 2]])

    def test_range_contains(self):
        y = matrix([[1], [0]])
        assert range_contains(y, matrix([[3, 0], [0, 0]]))
        assert not range_contains(y, matrix([[0], [1]]))

    @settings(max_examples=150)
    @given(st.integers(1, 3).flatmap(
        lambda r: st.tuples(matrices(r, 2, bound=1), matrices(r, 2, bound=1))
    ))
    def test_range_contains_matches_solvability(self, pair):
        y, x = pair
        assert range_contains(y, x) == solve_exists(y, x)


class TestIndex:
    """Test the index of square matrices."""

    def test_nilpotent(self):
        assert index(matrix([[0, 1], [0, 0]])) == 2

    def test_invertible_and_zero(self):
        assert index(Matrix.identity(3)) == 1
        assert index(Matrix.zeros(2, 2)) == 1

    def test_requires_square(self):
        with pytest.raises(DimensionError):
            index(matrix([[1, 2]]))
