"""Loading exact matrix and weight files, and writing reports without partial output."""

import json
import logging
import os
import tempfile
from pathlib import Path
from contextlib import contextmanager
from typing import Any, Dict, Iterable, Iterator, Optional, TextIO, Tuple, Union

from app.errors import ParseError
from app.models.matrix import Matrix
from app.models.weights import Weight
from app.services.iips import weight_validate

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
WEIGHT_NAMES = ("M", "N", "L", "K")


def read_json(path: PathLike, field: str) -> Any:
    """
    Decode a JSON file.

    Raises:
        ParseError: If the file is unreadable or not valid JSON
    """
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as e:
        raise ParseError(field, f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise ParseError(field, f"invalid JSON at line {e.lineno} column {e.colno}")


def load_matrix(path: PathLike, field: str = "matrix") -> Matrix:
    return Matrix.from_json(read_json(path, field), field)


def load_weights(path: PathLike, required: Iterable[str] = ("M", "N")) -> Dict[str, Weight]:
    """
    Load a weights file {"M": ..., "N": ..., "L": ..., "K": ...} and validate every weight present.

    Args:
        path: Path to the weights file
        required: Weight names that must be present

    Returns:
        Validated weights keyed by name

    Raises:
        ParseError: If the file is malformed or a required weight is missing
        WeightError: If a weight is not square, not Hermitian or singular
    """
    payload = read_json(path, "weights")
    if not isinstance(payload, dict):
        raise ParseError("weights", "expected an object with M, N and optionally L")
    for name in required:
        if name not in payload:
            raise ParseError(name, "missing weight")
    weights = {}
    for name in WEIGHT_NAMES:
        if name in payload:
            weights[name] = weight_validate(Matrix.from_json(payload[name], name), name)
    logger.debug(f"loaded weights {sorted(weights)} from {path}")
    return weights


def parse_operand(text: str) -> Tuple[str, str]:
    """Split a NAME=PATH operand argument."""
    name, sep, path = text.partition("=")
    if not sep or not name or not path:
        raise ParseError("operand", f"expected NAME=PATH, got {text!r}")
    return name, path


def load_operands(specs: Iterable[str]) -> Dict[str, Matrix]:
    operands = {}
    for text in specs:
        name, path = parse_operand(text)
        if name in operands:
            raise ParseError(name, "operand given twice")
        operands[name] = load_matrix(path, name)
    return operands


@contextmanager
def atomic_writer(path: PathLike) -> Iterator[TextIO]:
    """
    Yield a handle on a temporary file beside `path`; rename it into place on success.

    On any exception the temporary file is removed and `path` is left untouched.
    """
    target = Path(path)
    fd, tmp_path = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            yield handle
        os.replace(tmp_path, target)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def write_atomic(path: PathLike, text: str) -> None:
    with atomic_writer(path) as handle:
        handle.write(text)


def dump_json(payload: Any, indent: Optional[int] = None) -> str:
    return json.dumps(payload, indent=indent)
