"""Deterministic search for pairs (A, B) that satisfy the reverse order law without the Greville conditions."""

import itertools
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from enum import IntEnum
from functools import lru_cache, partial
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, TextIO, Tuple

from app.errors import ConfigError, PreconditionUnmetError, WeightError
from app.models.matrix import Matrix
from app.models.reports import IdentityId, RolReport, RolStatus
from app.models.scalar import GaussianRational
from app.models.search import HuntSummary, SearchConfig, SearchMode, TrialRecord, WeightKind
from app.models.weights import Weight, WeightTriple
from app.services.identities import evaluate_rank_identity
from app.services.iips import identity_weight, signature_weight, weight_validate
from app.services.linalg import index
from app.services.rol import ProductPair, classify_pair

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
PROGRESS_EVERY = 1000

PAIR_IDENTITIES = (
    IdentityId.REVERSE_ORDER_GAP,
    IdentityId.PROJECTOR_COMMUTATOR,
    IdentityId.PROJECTOR_RANGE_RANK,
    IdentityId.PRODUCT_PROJECTOR_RANK,
)


class Component(IntEnum):
    """Sub-seed slots of a trial."""

    DIMS = 0
    A = 1
    B = 2
    M = 3
    N = 4
    L = 5


def derive_seed(seed: int, index: int) -> int:
    """SplitMix64 output for `seed` advanced `index + 1` steps."""
    z = (seed + (index + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _entry(rng: random.Random, bound: int, real: bool) -> GaussianRational:
    re = rng.randint(-bound, bound)
    im = 0 if real else rng.randint(-bound, bound)
    return GaussianRational(re, im)


def gen_matrix(
    derived_seed: int,
    rows: int,
    cols: int,
    entry_bound: int,
    real_entries: bool = False
) -> Matrix:
    """
    Random Gaussian-integer matrix with re, im uniform in [-b, b].

    Raises:
        ConfigError: If a dimension or the bound is not positive
    """
    if rows < 1 or cols < 1 or entry_bound < 1:
        raise ConfigError(f"gen_matrix needs positive sizes and bound, got {rows}x{cols}, b={entry_bound}")
    rng = random.Random(derived_seed)
    return Matrix([[_entry(rng, entry_bound, real_entries) for _ in range(cols)] for _ in range(rows)])


def gen_weight(
    derived_seed: int,
    dim: int,
    kind: WeightKind,
    entry_bound: int = 2
) -> Weight:
    """
    Draw a weight of order `dim`.

    signature: diag(+-1) with at least one -1 (diag(-1) for dim 1).
    random_hermitian: G + G* + delta I with the smallest delta >= 0 that is invertible.
    identity: I.
    """
    if dim < 1:
        raise ConfigError(f"weight order must be positive, got {dim}")
    kind = WeightKind(kind)
    if kind is WeightKind.IDENTITY:
        return identity_weight(dim)

    rng = random.Random(derived_seed)
    if kind is WeightKind.SIGNATURE:
        if dim == 1:
            return signature_weight([-1])
        while True:
            signs = [rng.choice((1, -1)) for _ in range(dim)]
            if -1 in signs:
                return signature_weight(signs)

    g = Matrix([[_entry(rng, entry_bound, False) for _ in range(dim)] for _ in range(dim)])
    base = g + g.conj_transpose()
    for delta in itertools.count():
        try:
            return weight_validate(base + Matrix.identity(dim).scale(delta))
        except WeightError:
            continue


def _weights(seed: int, dims: Tuple[int, int, int], config: SearchConfig) -> WeightTriple:
    m, n, l = (
        gen_weight(derive_seed(seed, slot), order, config.weight_kind, config.weight_entry_bound)
        for slot, order in zip((Component.M, Component.N, Component.L), dims)
    )
    return WeightTriple(m=m, n=n, l=l)


# Exhaustive grid

def _entry_values(bound: int, real: bool) -> List[GaussianRational]:
    span = range(-bound, bound + 1)
    if real:
        return [GaussianRational(re) for re in span]
    return [GaussianRational(re, im) for re in span for im in span]


@lru_cache(maxsize=None)
def _sign_vectors(dim: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(s for s in itertools.product((1, -1), repeat=dim) if -1 in s)


def _weight_choices(dim: int, kind: WeightKind) -> int:
    return len(_sign_vectors(dim)) if kind is WeightKind.SIGNATURE else 1


def _grid_dims(max_dim: int) -> Iterator[Tuple[int, int, int]]:
    return itertools.product(range(1, max_dim + 1), repeat=3)


def _block_sizes(config: SearchConfig) -> Iterator[Tuple[Tuple[int, int, int], int, int, int]]:
    """(dims, weight choices, A choices, B choices) per dims block, in grid order."""
    values = len(_entry_values(config.entry_bound, config.real_entries))
    for m, n, l in _grid_dims(config.max_dim):
        weights = 1
        for order in (m, n, l):
            weights *= _weight_choices(order, config.weight_kind)
        yield (m, n, l), weights, values ** (m * n), values ** (n * l)


def grid_size(config: SearchConfig) -> int:
    return sum(w * a * b for _, w, a, b in _block_sizes(config))


def _decode_matrix(k: int, rows: int, cols: int, values: List[GaussianRational]) -> Matrix:
    digits = []
    for _ in range(rows * cols):
        k, digit = divmod(k, len(values))
        digits.append(values[digit])
    digits.reverse()
    return Matrix([digits[r * cols:(r + 1) * cols] for r in range(rows)])


def _grid_point(config: SearchConfig, k: int, trial_seed: int) -> Tuple[Matrix, Matrix, WeightTriple]:
    """Decode grid point `k`: dims, then weight triple, then A, then B (fastest)."""
    for dims, weight_count, a_count, b_count in _block_sizes(config):
        block = weight_count * a_count * b_count
        if k >= block:
            k -= block
            continue
        m, n, l = dims
        w_index, rest = divmod(k, a_count * b_count)
        a_index, b_index = divmod(rest, b_count)
        values = _entry_values(config.entry_bound, config.real_entries)
        a = _decode_matrix(a_index, m, n, values)
        b = _decode_matrix(b_index, n, l, values)
        if config.weight_kind is WeightKind.SIGNATURE:
            choices = [_sign_vectors(order) for order in dims]
            picks = []
            for options in reversed(choices):
                w_index, pick = divmod(w_index, len(options))
                picks.append(signature_weight(options[pick]))
            l_w, n_w, m_w = picks
            weights = WeightTriple(m=m_w, n=n_w, l=l_w)
        else:
            weights = _weights(trial_seed, dims, config)
        return a, b, weights
    raise ConfigError(f"grid point {k} is beyond the exhaustive grid")


def _random_point(config: SearchConfig, trial_seed: int) -> Tuple[Matrix, Matrix, WeightTriple]:
    rng = random.Random(derive_seed(trial_seed, Component.DIMS))
    dims = tuple(rng.randint(1, config.max_dim) for _ in range(3))
    m, n, l = dims
    bound, real = config.entry_bound, config.real_entries
    a = gen_matrix(derive_seed(trial_seed, Component.A), m, n, bound, real)
    b = gen_matrix(derive_seed(trial_seed, Component.B), n, l, bound, real)
    return a, b, _weights(trial_seed, dims, config)


# Theorem cross-checks

def _is_euclidean(w: WeightTriple) -> bool:
    return all(x.h == Matrix.identity(x.order) for x in (w.m, w.n, w.l))


def _theorem_checks(pair: ProductPair, report: RolReport) -> List[str]:
    """Ids of the proven statements that fail for this pair."""
    greville = report.greville
    holds = report.status is RolStatus.HOLDS_EQUAL
    failed = []
    if not greville.agree:
        failed.append("greville-equivalence")
    if report.rank_criterion != holds:
        failed.append("rank-criterion-equivalence")
    if greville.all_hold and not (report.rank_criterion and holds):
        failed.append("greville-implies-rol")
    if report.rank_hypothesis and holds != greville.all_hold:
        failed.append("rank-hypothesis-conditional")
    # With identity weights the Greville conditions are also necessary.
    if _is_euclidean(pair.w) and holds != greville.all_hold:
        failed.append("euclidean-greville")
    if index(pair.a_star @ pair.a) != 1 or index(pair.b_star @ pair.b) != 1:
        failed.append("gram-index-one")

    operands = {"A": pair.a, "B": pair.b}
    known = {"A^[+]": pair.a_dag, "B^[+]": pair.b_dag, "A^[*]": pair.a_star, "B^[*]": pair.b_star}
    projectors = {"P": pair.a_dag @ pair.a, "Q": pair.b @ pair.b_dag}
    checks = [(identity_id, operands) for identity_id in PAIR_IDENTITIES]
    checks.append((IdentityId.HERMITIAN_IDEMPOTENT_COMMUTATOR, projectors))
    for identity_id, ops in checks:
        try:
            instance = evaluate_rank_identity(identity_id, ops, pair.w, known)
        except PreconditionUnmetError as exc:
            logger.debug(f"{identity_id.value} not applicable: {exc}")
            continue
        if not instance.holds:
            failed.append(identity_id.value)
    return failed


def examine_pair(index: int, seed: int, a: Matrix, b: Matrix, weights: WeightTriple) -> TrialRecord:
    """
    Classify one pair and cross-check every applicable theorem.

    Existence of A^[+] and B^[+] is tested first; classification runs only
    when both exist. Each inverse is computed once and shared by every check.
    """
    pair = ProductPair(a, b, weights)
    a_exists, b_exists = pair.a_exists, pair.b_exists
    record = dict(
        trial_index=index,
        derived_seed=seed,
        dims=(a.rows, a.cols, b.cols),
        a=a,
        b=b,
        weights=weights,
        a_exists=a_exists,
        b_exists=b_exists,
    )
    if not (a_exists and b_exists):
        if _is_euclidean(weights):
            logger.error(f"trial {index}: Euclidean Moore-Penrose inverse missing")
            return TrialRecord(**record, theorem_violations=["euclidean-existence"])
        return TrialRecord(**record)

    report = classify_pair(pair)
    violations = _theorem_checks(pair, report)
    candidate = report.status is RolStatus.HOLDS_EQUAL and not report.greville.all_hold
    if violations:
        logger.error(f"trial {index}: theorem violations {violations}")
    elif candidate:
        logger.warning(f"trial {index}: open-problem candidate, dims={record['dims']}")
    logger.debug(f"trial {index}: status={report.status.value}")
    return TrialRecord(
        **record,
        report=report,
        theorem_violations=violations,
        is_open_problem_candidate=candidate,
    )


def run_trial(config: SearchConfig, trial_index: int) -> TrialRecord:
    """Generate the inputs of one trial from its derived seed and examine them."""
    trial_seed = derive_seed(config.seed, trial_index)
    if config.mode is SearchMode.EXHAUSTIVE:
        a, b, weights = _grid_point(config, trial_index, trial_seed)
    else:
        a, b, weights = _random_point(config, trial_seed)
    return examine_pair(trial_index, trial_seed, a, b, weights)


def _weight_from_json(payload: Any, field: str) -> Weight:
    return weight_validate(Matrix.from_json(payload, field), field)


def replay_record(payload: Mapping[str, Any]) -> TrialRecord:
    """
    Re-run a serialized TrialRecord from its matrices alone.

    Raises:
        ParseError: If a matrix in the record is malformed
        WeightError: If a recorded weight is not an invertible Hermitian matrix
    """
    weights = payload["weights"]
    triple = WeightTriple(
        m=_weight_from_json(weights["M"], "M"),
        n=_weight_from_json(weights["N"], "N"),
        l=_weight_from_json(weights["L"], "L"),
    )
    return examine_pair(
        payload["trial_index"],
        payload["derived_seed"],
        Matrix.from_json(payload["a"], "a"),
        Matrix.from_json(payload["b"], "b"),
        triple,
    )


def trial_count(config: SearchConfig) -> int:
    if config.mode is SearchMode.EXHAUSTIVE:
        return min(config.trials, grid_size(config))
    return config.trials


def _records(config: SearchConfig, count: int) -> Iterable[TrialRecord]:
    if config.workers == 1:
        return (run_trial(config, i) for i in range(count))
    chunksize = max(1, count // (config.workers * 8))
    pool = ProcessPoolExecutor(max_workers=config.workers)
    return _drain(pool, pool.map(partial(run_trial, config), range(count), chunksize=chunksize))


def _drain(pool: ProcessPoolExecutor, results: Iterable[TrialRecord]) -> Iterator[TrialRecord]:
    with pool:
        yield from results


def hunt(config: SearchConfig, out: Optional[TextIO] = None) -> HuntSummary:
    """
    Run every trial of `config` and aggregate in trial-index order.

    Candidate and violation records are streamed to `out` as JSONL.
    The summary does not depend on the number of workers.
    """
    count = trial_count(config)
    logger.info(
        f"hunt: mode={config.mode.value} trials={count} max_dim={config.max_dim} "
        f"entry_bound={config.entry_bound} weights={config.weight_kind.value} workers={config.workers}"
    )
    mp_pairs = 0
    rol_holds = 0
    status_counts: Dict[str, int] = {}
    candidates: List[TrialRecord] = []
    violations: List[TrialRecord] = []

    for done, record in enumerate(_records(config, count), start=1):
        if record.report is not None:
            mp_pairs += 1
            status = record.report.status.value
            status_counts[status] = status_counts.get(status, 0) + 1
            if record.report.status is RolStatus.HOLDS_EQUAL:
                rol_holds += 1
        flagged = False
        if record.theorem_violations:
            violations.append(record)
            flagged = True
        if record.is_open_problem_candidate:
            candidates.append(record)
            flagged = True
        if flagged and out is not None:
            out.write(record.model_dump_json() + "\n")
        if done % PROGRESS_EVERY == 0:
            logger.info(f"hunt: {done}/{count} trials, {mp_pairs} MP pairs, {len(candidates)} candidates")

    summary = HuntSummary(
        config=config,
        trials_run=count,
        mp_pairs_found=mp_pairs,
        rol_holds_count=rol_holds,
        coverage=mp_pairs / count,
        status_counts=dict(sorted(status_counts.items())),
        candidates=candidates,
        violations=violations,
    )
    logger.info(
        f"hunt finished: {mp_pairs} MP pairs, {rol_holds} with the reverse order law, "
        f"{len(candidates)} candidates, {len(violations)} violations"
    )
    return summary
