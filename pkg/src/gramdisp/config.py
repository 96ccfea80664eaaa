import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator

from gramdisp.errors import ConfigError

ENV_PREFIX = "GRAMDISP_"

# STTS function-word tags deleted before counting.
DEFAULT_STOP_POS: Tuple[str, ...] = tuple(sorted({
    "ART", "APPR", "APPRART", "APPO", "APZR", "KON", "KOUS", "KOUI", "KOKOM",
    "PTKZU", "PTKNEG", "PTKVZ", "PTKANT", "PTKA", "PPER", "PRF", "PPOSAT",
    "PDAT", "PIAT", "PRELS", "PWS", "PAV", "VAFIN", "VAINF", "VAIMP", "VAPP",
}))

RECOMMENDED_MIN_COUNT = 3

# Fields that change artifact contents. Everything else (paths, parallelism,
# progress, ledger) is excluded from the fingerprint.
ANALYSIS_FIELDS: Tuple[str, ...] = (
    "allowed_pos",
    "ap_ties",
    "case_fold",
    "count_unfiltered",
    "include_missing",
    "log_base",
    "longest_match",
    "match_field",
    "min_count",
    "stop_pos",
    "window",
)


def _default_threads() -> int:
    return os.cpu_count() or 1


class RunConfig(BaseModel):
    """Fully resolved configuration of one pipeline run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    window: int = Field(2, ge=1, description="Context window on each side of a target")
    min_count: int = Field(
        1, ge=0, description=f"Corpus-frequency floor for context keys (recommended {RECOMMENDED_MIN_COUNT})"
    )
    stop_pos: Tuple[str, ...] = Field(DEFAULT_STOP_POS, description="POS tags deleted as function words")
    log_base: float = Field(2.0, gt=1.0, description="Logarithm base of entropy")
    match_field: Literal["surface", "lemma"] = Field("surface", description="Token field targets are matched on")
    case_fold: bool = Field(True, description="Lowercase lemmas and match keys")
    longest_match: bool = Field(True, description="Prefer the longest gold form at a position")
    allowed_pos: Optional[Tuple[str, ...]] = Field(None, description="Accept target spans only with one of these POS tags")
    include_missing: bool = Field(True, description="Evaluate zero-frequency targets with no-data scores")
    count_unfiltered: bool = Field(False, description="Take target frequency from a separate pass over the raw corpus")
    ap_ties: Literal["id", "expected"] = Field("id", description="AP tie handling: ascending id, or expectation over tie orders")
    output_dir: Path = Field(Path("out"), description="Directory receiving all artifacts")
    threads: int = Field(default_factory=_default_threads, ge=1, description="Worker processes for counting")
    batch_size: int = Field(5000, ge=1, description="Sentences per counting shard")
    progress: bool = Field(False, description="Show a progress bar while counting")
    ledger_url: Optional[str] = Field(None, description="SQLAlchemy URL of the run ledger")

    @field_validator("stop_pos", "allowed_pos", mode="before")
    @classmethod
    def _split_pos_list(cls, value: Any, info: ValidationInfo) -> Any:
        if isinstance(value, str):
            value = [] if value.strip().lower() == "none" else [
                part.strip() for part in value.split(",") if part.strip()
            ]
        if value is None:
            return None
        tags = tuple(sorted(set(value)))
        # an empty allow-list means "no restriction", not "reject everything"
        if info.field_name == "allowed_pos" and not tags:
            return None
        return tags

    @field_validator("ledger_url", mode="before")
    @classmethod
    def _blank_is_none(cls, value: Any) -> Any:
        if isinstance(value, str) and not value.strip():
            return None
        return value

    def analysis_settings(self) -> Dict[str, Any]:
        """Fields that determine artifact contents, JSON-ready."""
        data = self.model_dump(mode="json", include=set(ANALYSIS_FIELDS))
        return {key: data[key] for key in ANALYSIS_FIELDS}

    @property
    def fingerprint(self) -> str:
        payload = json.dumps(self.analysis_settings(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def echo_lines(self) -> List[str]:
        """`key=value` lines echoing the analysis settings into artifact headers."""
        lines = []
        for key, value in self.analysis_settings().items():
            if isinstance(value, list):
                value = ",".join(value)
            elif isinstance(value, bool):
                value = str(value).lower()
            elif value is None:
                value = "none"
            lines.append(f"{key}={value}")
        return lines


def _normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def load_config_file(path: Path) -> Dict[str, str]:
    """Reads a key=value config file; `#` comments and `export` prefixes are allowed."""
    if not Path(path).is_file():
        raise FileNotFoundError(path)
    values = dotenv_values(path)
    return {_normalize_key(k): v for k, v in values.items() if v is not None}


def env_overrides(environ: Optional[Mapping[str, str]] = None) -> Dict[str, str]:
    """Collects `GRAMDISP_*` environment variables."""
    environ = os.environ if environ is None else environ
    return {
        _normalize_key(key[len(ENV_PREFIX):]): value
        for key, value in environ.items()
        if key.startswith(ENV_PREFIX)
    }


def resolve_config(
    config_file: Optional[Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """
    Builds a RunConfig from defaults, a config file, the environment and flags.

    Later layers win: config file < `GRAMDISP_*` environment < overrides.
    `None` values in overrides mean "not given" and are skipped.

    Raises:
        ConfigError: For unknown keys or values that fail validation.
    """
    layers: Dict[str, Any] = {}
    if config_file is not None:
        layers.update(load_config_file(config_file))
    layers.update(env_overrides(environ))
    layers.update({_normalize_key(k): v for k, v in (overrides or {}).items() if v is not None})

    unknown = sorted(set(layers) - set(RunConfig.model_fields))
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")
    try:
        return RunConfig(**layers)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"Invalid configuration: {problems}") from e
