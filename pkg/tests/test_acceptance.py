"""Seeded acceptance loops at full sample size.

Run with `pytest -m slow`; every comparison is exact.
"""

import itertools
import json
from fractions import Fraction
from typing import Iterator

import pytest

from app.errors import PreconditionUnmetError
from app.models.matrix import Matrix, matrix
from app.models.reports import IdentityId, RolStatus
from app.models.search import SearchConfig, WeightKind
from app.models.weights import Weight, WeightTriple
from app.services.hunter import derive_seed, gen_matrix, gen_weight, hunt, replay_record
from app.services.identities import evaluate_rank_identity
from app.services.iips import adjoint, identity_weight, mp_exists, mp_inverse, mp_property_report, signature_weight
from app.services.linalg import euclidean_pinv, inverse, rank
from app.services.rol import BlockLayout, block_mp, rol_classify

pytestmark = pytest.mark.slow

J = signature_weight([1, -1])
JJJ = WeightTriple(m=J, n=J, l=J)
WEIGHT_KINDS = (WeightKind.SIGNATURE, WeightKind.RANDOM_HERMITIAN)


class Source:
    """Deterministic stream of generated matrices and weights for one sample."""

    def __init__(self, seed: int, sample: int):
        base = derive_seed(seed, sample)
        self._seeds: Iterator[int] = (derive_seed(base, k) for k in itertools.count())

    def below(self, high: int) -> int:
        return next(self._seeds) % high

    def dim(self, high: int) -> int:
        return 1 + self.below(high)

    def matrix(self, rows: int, cols: int, bound: int = 2) -> Matrix:
        return gen_matrix(next(self._seeds), rows, cols, bound)

    def weight(self, order: int, kind: WeightKind) -> Weight:
        return gen_weight(next(self._seeds), order, kind)

    def invertible(self, order: int) -> Matrix:
        s = self.matrix(order, order)
        for candidate in (s, s + Matrix.identity(order).scale(7)):
            if rank(candidate) == order:
                return candidate
        return Matrix.identity(order)

    def idempotent(self, order: int) -> Matrix:
        s = self.invertible(order)
        d = Matrix.diagonal([self.below(2) for _ in range(order)])
        return s @ d @ inverse(s)

    def pair(self, high: int = 3):
        m, n, l = self.dim(high), self.dim(high), self.dim(high)
        kind = WEIGHT_KINDS[self.below(2)]
        w = WeightTriple(m=self.weight(m, kind), n=self.weight(n, kind), l=self.weight(l, kind))
        return self.matrix(m, n), self.matrix(n, l), w


def _mp_pairs(seed: int, count: int, high: int = 3):
    """The first `count` seeded pairs with both factor inverses."""
    found = 0
    for sample in itertools.count():
        a, b, w = Source(seed, sample).pair(high)
        if mp_exists(a, w.m, w.n).exists and mp_exists(b, w.n, w.l).exists:
            yield a, b, w
            found += 1
            if found == count:
                return


class TestFixtures:
    """Test the two worked examples bit for bit."""

    def test_example_one(self):
        a, b = matrix([[1, 1], [1, 0]]), matrix([[0, 1], [0, 0]])
        assert adjoint(b, J, J) == matrix([[0, 0], [-1, 0]])
        assert adjoint(a @ b, J, J) == matrix([[0, 0], [-1, 1]])
        assert mp_exists(a, J, J).exists and mp_exists(b, J, J).exists
        assert not mp_exists(a @ b, J, J).exists

    def test_example_two(self):
        a, b = matrix([[1, 2], [0, 0]]), matrix([[2, 1], [0, 0]])
        base = matrix([[2, 0], [-1, 0]])
        assert mp_inverse(a, J, J).inverse == matrix([[1, 0], [-2, 0]]).scale(Fraction(-1, 3))
        assert mp_inverse(b, J, J).inverse == base.scale(Fraction(1, 3))
        report = rol_classify(a, b, JJJ)
        assert report.ab_dag == base.scale(Fraction(1, 3))
        assert report.bdag_adag == base.scale(Fraction(-1, 9))
        assert report.status is RolStatus.EXISTS_BUT_UNEQUAL


class TestInverses:
    """Test the inverse on large seeded samples."""

    def test_euclidean_reduction(self):
        for sample in range(1000):
            src = Source(3, sample)
            a = src.matrix(src.dim(5), src.dim(5), bound=3)
            x = mp_inverse(a, identity_weight(a.rows), identity_weight(a.cols)).inverse
            assert x == euclidean_pinv(a), sample

    def test_six_properties(self):
        checked = 0
        for sample in itertools.count():
            src = Source(4, sample)
            m, n = src.dim(4), src.dim(4)
            kind = WEIGHT_KINDS[sample % 2]
            a, wm, wn = src.matrix(m, n), src.weight(m, kind), src.weight(n, kind)
            if not mp_exists(a, wm, wn).exists:
                continue
            assert mp_property_report(a, wm, wn).all_hold, sample
            checked += 1
            if checked == 500:
                break


class TestReverseOrderLaw:
    """Test the relations between the reverse order law conditions."""

    def test_condition_relations(self):
        for a, b, w in _mp_pairs(5, 500):
            report = rol_classify(a, b, w)
            greville = report.greville
            holds = report.status is RolStatus.HOLDS_EQUAL
            assert greville.agree
            assert report.rank_criterion == holds
            if greville.all_hold:
                assert report.rank_criterion and holds
            if report.rank_hypothesis:
                assert holds == greville.all_hold

    def test_block_lemma(self):
        for a, b, w in _mp_pairs(6, 200):
            blocks = (w.m, w.n, w.n, w.l)
            a_dag = mp_inverse(a, w.m, w.n).inverse
            b_dag = mp_inverse(b, w.n, w.l).inverse
            diag = block_mp(a, b, blocks, BlockLayout.DIAG)
            rows_a, cols_a = list(range(a.cols)), list(range(a.rows))
            assert diag.select_rows(rows_a).select_columns(cols_a) == a_dag
            anti = block_mp(a, b, blocks, BlockLayout.ANTIDIAG)
            rows_b = list(range(b.cols))
            cols_b = list(range(a.rows, a.rows + b.rows))
            assert anti.select_rows(rows_b).select_columns(cols_b) == b_dag


class TestIdentityCatalog:
    """Test every catalogued identity on seeded instances that meet its premises."""

    SAMPLES = 500

    def _holds(self, identity_id, ops, weights=None):
        instance = evaluate_rank_identity(identity_id, ops, weights)
        assert instance.holds, instance.model_dump(mode="json")

    def test_schur_identities(self):
        applicable = 0
        for sample in range(self.SAMPLES):
            src = Source(7, sample)
            p, q, s, t = (src.dim(3) for _ in range(4))
            self._holds(IdentityId.SCHUR_GENERIC, {
                "A": src.matrix(p, q), "B": src.matrix(q, s), "C": src.matrix(t, p), "D": src.matrix(t, s),
            })
            ops = {"A": src.matrix(p, q), "B": src.matrix(p, s), "C": src.matrix(t, q), "D": src.matrix(t, s)}
            self._holds(IdentityId.SCHUR_EUCLIDEAN_MP, ops)
            kind = WEIGHT_KINDS[sample % 2]
            weights = {"M": src.weight(p, kind), "N": src.weight(q, kind)}
            if mp_exists(ops["A"], weights["M"], weights["N"]).exists:
                self._holds(IdentityId.SCHUR_WEIGHTED_MP, ops, weights)
                applicable += 1
        assert applicable > 0

    def test_block_identities(self):
        for sample in range(self.SAMPLES):
            src = Source(8, sample)
            p, q = src.dim(3), src.dim(3)
            a, x, y = src.matrix(p, q, bound=1), src.invertible(p), src.invertible(q)
            ops = {"A": a, "B": a @ y, "C": x @ a, "D": x @ a @ y}
            self._holds(IdentityId.BLOCK_RANK_ABCD, ops)
            self._holds(IdentityId.RANK_PRESERVING_BLOCK, ops)
            t, s = src.dim(3), src.dim(3)
            self._holds(IdentityId.RANK_PRESERVING_BLOCK, {
                "A": a, "B": src.matrix(p, s, 1), "C": src.matrix(t, q, 1), "D": src.matrix(t, s, 1),
            })

    def test_range_and_commutators(self):
        for sample in range(self.SAMPLES):
            src = Source(9, sample)
            order = src.dim(3)
            s = src.invertible(order)
            d = Matrix.diagonal([src.below(3) for _ in range(order)])
            columns = [k for k in range(order) if src.below(2)] or [0]
            self._holds(IdentityId.RANGE_INTERSECTION, {"A": s @ d @ inverse(s), "B": s.select_columns(columns)})
            self._holds(IdentityId.IDEMPOTENT_COMMUTATOR, {"P": src.idempotent(order), "Q": src.idempotent(order)})

    def test_weighted_identities(self):
        pair_ids = (
            IdentityId.REVERSE_ORDER_GAP,
            IdentityId.PROJECTOR_COMMUTATOR,
            IdentityId.PROJECTOR_RANGE_RANK,
            IdentityId.PRODUCT_PROJECTOR_RANK,
        )
        for a, b, w in _mp_pairs(10, self.SAMPLES):
            for identity_id in pair_ids:
                self._holds(identity_id, {"A": a, "B": b}, w)
            a_dag = mp_inverse(a, w.m, w.n).inverse
            b_dag = mp_inverse(b, w.n, w.l).inverse
            self._holds(IdentityId.HERMITIAN_IDEMPOTENT_COMMUTATOR, {"P": a_dag @ a, "Q": b @ b_dag}, w)

    def test_adjoint_swap_and_triple_product(self):
        triples = 0
        for sample in range(self.SAMPLES):
            src = Source(11, sample)
            m, n, l = src.dim(3), src.dim(3), src.dim(3)
            kind = WEIGHT_KINDS[sample % 2]
            w = WeightTriple(m=src.weight(m, kind), n=src.weight(n, kind), l=src.weight(l, kind))
            self._holds(IdentityId.ADJOINT_SWAP, {
                "A": src.matrix(m, n), "B": src.matrix(m, l), "C": src.matrix(l, n),
            }, w)
            k = src.dim(3)
            weights = {"M": w.m, "N": w.n, "L": w.l, "K": src.weight(k, kind)}
            p, q = src.matrix(n, l), src.matrix(m, k)
            if not (mp_exists(p, w.n, w.l).exists and mp_exists(q, w.m, weights["K"]).exists):
                continue
            t, r = src.dim(3), src.dim(3)
            ops = {
                "A": src.matrix(n, k), "B": src.matrix(m, r), "C": src.matrix(t, l),
                "D": src.matrix(t, r), "P": p, "Q": q,
            }
            self._holds(IdentityId.TRIPLE_PRODUCT, ops, weights)
            triples += 1
        assert triples > 0

    def test_preconditions_are_reported(self):
        with pytest.raises(PreconditionUnmetError):
            evaluate_rank_identity(IdentityId.RANGE_INTERSECTION, {
                "A": matrix([[0, 1], [0, 0]]), "B": Matrix.identity(2),
            })


class TestHunter:
    """Test the hunter at full scale."""

    def test_determinism_and_soundness(self, tmp_path):
        config = SearchConfig.create(seed=42, trials=100_000, max_dim=3, entry_bound=2)
        out = tmp_path / "hunt.jsonl"
        with out.open("w", encoding="utf-8") as stream:
            first = hunt(config, stream)
        assert first.trials_run == 100_000
        assert first.violations == []
        for line in out.read_text(encoding="utf-8").splitlines():
            payload = json.loads(line)
            assert replay_record(payload).model_dump(mode="json") == payload

    def test_workers_match_single_process(self):
        single = SearchConfig.create(seed=42, trials=5_000, max_dim=3, entry_bound=2)
        pooled = SearchConfig.create(seed=42, trials=5_000, max_dim=3, entry_bound=2, workers=2)
        assert hunt(pooled).model_dump_json() == hunt(single).model_dump_json()
