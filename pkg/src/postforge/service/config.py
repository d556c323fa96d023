"""Pipeline configuration, loadable from a flat key=value file."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..matcher import SimilarityWeights

DEFAULT_RETRY_PERIOD_HOURS = 6.0  # arbitrary; nothing prescribes a value
DEFAULT_SIMILARITY_FLOOR = 0.05
DEFAULT_MIN_LINES = 6

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in _BOOL_TRUE:
        return True
    if lowered in _BOOL_FALSE:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_flat_config(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"config line {lineno} is not key = value: {line!r}")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


@dataclass
class PipelineConfig:
    store: Path
    model: Path
    profile: Path
    context_dir: Path
    outbox: Path = Path("outbox")
    weights: SimilarityWeights = field(default_factory=SimilarityWeights)
    min_lines: int = DEFAULT_MIN_LINES
    similarity_floor: float = DEFAULT_SIMILARITY_FLOOR
    retry_period_hours: float = DEFAULT_RETRY_PERIOD_HOURS
    dry_run: bool = True
    rng_seed: int = 0
    shingle_k: int = 5
    staleness_days: int = 90
    live_endpoint: str = ""
    normalize_clones: bool = False

    def __post_init__(self):
        if self.retry_period_hours <= 0:
            raise ValueError("retry_period must be positive")
        for name in ("store", "model", "profile", "context_dir", "outbox"):
            setattr(self, name, Path(getattr(self, name)))

    def validate_paths(self) -> None:
        for name in ("store", "model", "profile", "context_dir"):
            path = getattr(self, name)
            if not path.exists():
                raise FileNotFoundError(f"{name} path does not exist: {path}")

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        values = parse_flat_config(Path(path).read_text(encoding="utf-8"))
        base = Path(path).resolve().parent

        def as_path(key: str, default: str | None = None) -> Path:
            raw = values.get(key, default)
            if raw is None:
                raise ValueError(f"config is missing required key: {key}")
            p = Path(raw)
            return p if p.is_absolute() else base / p

        weights = SimilarityWeights(
            code=float(values.get("weight_code", "0.5")),
            api=float(values.get("weight_api", "0.3")),
            text=float(values.get("weight_text", "0.2")),
        )
        return cls(
            store=as_path("store"),
            model=as_path("model"),
            profile=as_path("profile"),
            context_dir=as_path("context_dir"),
            outbox=as_path("outbox", "outbox"),
            weights=weights,
            min_lines=int(values.get("min_lines", str(DEFAULT_MIN_LINES))),
            similarity_floor=float(values.get("similarity_floor", str(DEFAULT_SIMILARITY_FLOOR))),
            retry_period_hours=float(
                values.get("retry_period_hours", str(DEFAULT_RETRY_PERIOD_HOURS))
            ),
            dry_run=_parse_bool(values.get("dry_run", "true")),
            rng_seed=int(values.get("rng_seed", "0")),
            shingle_k=int(values.get("shingle_k", "5")),
            staleness_days=int(values.get("staleness_days", "90")),
            live_endpoint=values.get("live_endpoint", ""),
            normalize_clones=_parse_bool(values.get("normalize_clones", "false")),
        )

    def to_settings_dict(self) -> dict:
        return {
            "weights": self.weights.to_dict(),
            "min_lines": self.min_lines,
            "similarity_floor": self.similarity_floor,
            "retry_period_hours": self.retry_period_hours,
            "dry_run": self.dry_run,
            "staleness_days": self.staleness_days,
        }
