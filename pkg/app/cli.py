"""CLI entry point for iips-rol."""

import argparse
import logging
import sys
from contextlib import nullcontext
from typing import Any, List, Optional

from app.config import settings
from app.errors import (
    ConfigError,
    DimensionError,
    InternalInconsistencyError,
    NotExistsError,
    ParseError,
    PreconditionUnmetError,
    WeightError,
)
from app.models.reports import IdentityId, RolStatus
from app.models.search import SearchConfig, SearchMode, WeightKind
from app.models.weights import WeightTriple
from app.services.files import atomic_writer, dump_json, load_matrix, load_operands, load_weights, write_atomic
from app.services.hunter import hunt
from app.services.identities import evaluate_rank_identity
from app.services.iips import adjoint, mp_inverse
from app.services.rol import rol_classify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT_FALSE = 1
EXIT_BAD_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_VIOLATION = 4

LOG_LEVELS = ("debug", "info", "warning", "error", "critical")


def _emit(payload: Any) -> None:
    print(dump_json(payload, settings.json_indent))


def cmd_adjoint(args: argparse.Namespace) -> int:
    a = load_matrix(args.matrix, "matrix")
    weights = load_weights(args.weights)
    _emit(adjoint(a, weights["M"], weights["N"]).to_json())
    return EXIT_OK


def cmd_pinv(args: argparse.Namespace) -> int:
    a = load_matrix(args.matrix, "matrix")
    weights = load_weights(args.weights)
    try:
        result = mp_inverse(a, weights["M"], weights["N"])
    except NotExistsError as e:
        result = e.result
    _emit(result.model_dump(mode="json"))
    return EXIT_OK if result.exists else EXIT_VERDICT_FALSE


def cmd_rol_check(args: argparse.Namespace) -> int:
    a = load_matrix(args.a, "A")
    b = load_matrix(args.b, "B")
    weights = load_weights(args.weights, required=("M", "N", "L"))
    report = rol_classify(a, b, WeightTriple(m=weights["M"], n=weights["N"], l=weights["L"]))
    text = dump_json(report.model_dump(mode="json"), settings.json_indent)
    if args.report:
        write_atomic(args.report, text + "\n")
        logger.info(f"rol-check: wrote {report.status.value} report to {args.report}")
    else:
        print(text)
    return EXIT_OK if report.status is RolStatus.HOLDS_EQUAL else EXIT_VERDICT_FALSE


def cmd_identity(args: argparse.Namespace) -> int:
    operands = load_operands(args.operands)
    weights = load_weights(args.weights, required=()) if args.weights else None
    instance = evaluate_rank_identity(IdentityId(args.identity_id), operands, weights)
    _emit(instance.model_dump(mode="json"))
    return EXIT_OK if instance.holds else EXIT_VERDICT_FALSE


def cmd_hunt(args: argparse.Namespace) -> int:
    config = SearchConfig.create(
        seed=args.seed,
        trials=args.trials,
        max_dim=args.max_dim,
        entry_bound=args.entry_bound,
        weight_kind=args.weights,
        mode=args.mode,
        real_entries=args.real_entries,
        weight_entry_bound=settings.weight_entry_bound,
        workers=args.workers,
    )
    with (atomic_writer(args.out) if args.out else nullcontext()) as stream:
        summary = hunt(config, stream)
    _emit(summary.model_dump(mode="json"))
    if summary.violations:
        logger.error(f"hunt: {len(summary.violations)} trials violate proven theorems")
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iips-rol",
        description="Exact Moore-Penrose inverses and reverse order laws between indefinite inner product spaces.",
        epilog="Settings such as LOG_LEVEL or HUNT_TRIALS may also be set in the environment or a .env file.",
    )
    parser.add_argument(
        "--log-level",
        type=str.lower,
        choices=LOG_LEVELS,
        default=settings.log_level.lower(),
        help="Logging level (default: %(default)s)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("adjoint", help="Print the MN-adjoint of a matrix")
    p.add_argument("matrix", help="Matrix JSON file")
    p.add_argument("weights", help="Weights JSON file with M and N")
    p.set_defaults(handler=cmd_adjoint)

    p = sub.add_parser("pinv", help="Existence test and Moore-Penrose inverse (exit 1 if it does not exist)")
    p.add_argument("matrix", help="Matrix JSON file")
    p.add_argument("weights", help="Weights JSON file with M and N")
    p.set_defaults(handler=cmd_pinv)

    p = sub.add_parser("rol-check", help="Classify the reverse order law for A and B (exit 0 iff it holds)")
    p.add_argument("a", help="Matrix JSON file for A")
    p.add_argument("b", help="Matrix JSON file for B")
    p.add_argument("weights", help="Weights JSON file with M, N and L")
    p.add_argument("-o", "--report", help="Write the report here instead of standard output")
    p.set_defaults(handler=cmd_rol_check)

    p = sub.add_parser("identity", help="Evaluate a catalogued rank identity (exit 0 iff it holds)")
    p.add_argument("identity_id", choices=[i.value for i in IdentityId], metavar="ID",
                   help="One of: " + ", ".join(i.value for i in IdentityId))
    p.add_argument("operands", nargs="+", metavar="NAME=PATH", help="Operand matrix files, e.g. A=a.json")
    p.add_argument("--weights", help="Weights JSON file; missing weights default to identities")
    p.set_defaults(handler=cmd_identity)

    p = sub.add_parser("hunt", help="Search for reverse-order-law pairs outside the Greville conditions")
    p.add_argument("--seed", type=int, default=settings.hunt_seed)
    p.add_argument("--trials", type=int, default=settings.hunt_trials)
    p.add_argument("--max-dim", type=int, default=settings.hunt_max_dim)
    p.add_argument("--entry-bound", type=int, default=settings.hunt_entry_bound)
    p.add_argument("--weights", choices=[k.value for k in WeightKind], default=settings.hunt_weight_kind)
    p.add_argument("--mode", choices=[m.value for m in SearchMode], default=settings.hunt_mode)
    p.add_argument("--workers", type=int, default=settings.hunt_workers)
    p.add_argument("--real-entries", action="store_true", default=settings.hunt_real_entries)
    p.add_argument("--out", help="JSONL file receiving candidate and violation records")
    p.set_defaults(handler=cmd_hunt)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    logger.info(f"Running {args.command}")

    try:
        code = args.handler(args)
    except (ParseError, WeightError, DimensionError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except PreconditionUnmetError as e:
        print(f"precondition not met: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InternalInconsistencyError as e:
        logger.error(f"internal inconsistency: {e}")
        return EXIT_VIOLATION
    logger.info(f"{args.command} finished with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
