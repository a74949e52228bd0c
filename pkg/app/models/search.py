"""Configuration and result models for the reverse-order-law hunt."""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.errors import ConfigError
from app.models.matrix import Matrix
from app.models.reports import RolReport
from app.models.weights import WeightTriple

EXHAUSTIVE_MAX_DIM = 2
EXHAUSTIVE_MAX_ENTRY_BOUND = 1


class WeightKind(str, Enum):
    """How the weights M, N, L of a trial are drawn."""

    SIGNATURE = "signature"
    RANDOM_HERMITIAN = "random_hermitian"
    IDENTITY = "identity"


class SearchMode(str, Enum):
    RANDOM = "random"
    EXHAUSTIVE = "exhaustive"


class SearchConfig(BaseModel):
    """Parameters of one deterministic hunt."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=42, ge=0, lt=2**64, description="Master seed")
    trials: int = Field(default=1000, ge=1, description="Trials to run (exhaustive: grid prefix length)")
    max_dim: int = Field(default=3, ge=1, description="Each of m, n, l ranges over 1..max_dim")
    entry_bound: int = Field(default=2, ge=1, description="Bound on real and imaginary entry parts")
    weight_kind: WeightKind = Field(default=WeightKind.SIGNATURE)
    mode: SearchMode = Field(default=SearchMode.RANDOM)
    real_entries: bool = Field(default=False, description="Draw real integer entries only")
    weight_entry_bound: int = Field(default=2, ge=1, description="Bound on G for random Hermitian weights")
    workers: int = Field(default=1, ge=1, exclude=True, description="Process pool size")

    @model_validator(mode="after")
    def _exhaustive_guard(self) -> "SearchConfig":
        if self.mode is SearchMode.EXHAUSTIVE and (
            self.max_dim > EXHAUSTIVE_MAX_DIM or self.entry_bound > EXHAUSTIVE_MAX_ENTRY_BOUND
        ):
            raise ValueError(
                f"exhaustive mode requires max_dim <= {EXHAUSTIVE_MAX_DIM} "
                f"and entry_bound <= {EXHAUSTIVE_MAX_ENTRY_BOUND}"
            )
        return self

    @classmethod
    def create(cls, **fields: Any) -> "SearchConfig":
        """
        Build a config, reporting invariant breaches as ConfigError.

        Raises:
            ConfigError: If any field is out of range
        """
        try:
            return cls(**fields)
        except ValidationError as exc:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
                for err in exc.errors()
            )
            raise ConfigError(problems) from exc


class TrialRecord(BaseModel):
    """Inputs, classification and theorem cross-checks of one trial."""

    trial_index: int
    derived_seed: int
    dims: Tuple[int, int, int]
    a: Matrix
    b: Matrix
    weights: WeightTriple
    a_exists: bool
    b_exists: bool
    report: Optional[RolReport] = Field(
        None, description="Present only when both factor inverses exist"
    )
    theorem_violations: List[str] = Field(default_factory=list)
    is_open_problem_candidate: bool = False

    @property
    def mp_pair(self) -> bool:
        return self.a_exists and self.b_exists


class HuntSummary(BaseModel):
    """Aggregate of a hunt, built in trial-index order."""

    config: SearchConfig
    trials_run: int
    mp_pairs_found: int
    rol_holds_count: int
    coverage: float = Field(..., description="mp_pairs_found / trials_run")
    status_counts: Dict[str, int] = Field(default_factory=dict)
    candidates: List[TrialRecord] = Field(default_factory=list)
    violations: List[TrialRecord] = Field(default_factory=list)
