"""Experiment configuration: flat key=value files, tournament sources,
and the validated config object the CLI hands to the library.

Config files are plain text, one `key=value` per line, `#` comments and
blank lines allowed, no nesting. Command-line flags override file
values. A tournament source is either a generator string ("cyclone:5",
"random:7:42") or a path to a tournament text file.
"""

from dataclasses import dataclass

from .rng import MASK64
from .tournament import Tournament, cyclone, load, random_tournament
from .urn import ReinforcementRule, geometric_schedule


class ConfigError(ValueError):
    """Invalid configuration; carries the file line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def parse_kv(path: str) -> dict:
    """Read a flat key=value file; values keep their raw string form."""
    entries = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigError(f"expected key=value, got {text!r}", lineno)
        key, value = text.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError("empty key", lineno)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        entries[key] = value.strip()
    return entries


def resolve_tournament(source: str) -> Tournament:
    """Build a tournament from a generator string or a file path."""
    if source.startswith("cyclone:"):
        return cyclone(_int_field(source.split(":", 1)[1],
                                  "cyclone size"))
    if source.startswith("random:"):
        parts = source.split(":")
        if len(parts) != 3:
            raise ConfigError(
                f"random tournament source needs random:N:SEED, got {source!r}")
        return random_tournament(_int_field(parts[1], "random size"),
                                 _int_field(parts[2], "random seed"))
    try:
        return load(source)
    except OSError as exc:
        raise ConfigError(
            f"cannot read tournament file {source}: {exc}") from exc


def _int_field(text: str, what: str):
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"{what} must be an integer, got {text!r}") from exc


def parse_counts(text: str) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    return tuple(_int_field(p, "ball count") for p in parts)


def parse_schedule(text: str, horizon: int):
    """Comma-separated snapshot times, or "geometric" for the default."""
    if text == "geometric":
        return geometric_schedule(horizon)
    times = tuple(_int_field(p.strip(), "snapshot time")
                  for p in text.split(","))
    return times


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one simulate/ensemble run depends on."""
    tournament: Tournament
    tournament_source: str
    rule: ReinforcementRule
    counts: tuple
    horizon: int
    seed: int
    n_seeds: int = 1
    schedule: tuple = ()
    fast_exact: bool = False
    fmt: str = "csv"

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if len(self.counts) != self.tournament.n:
            raise ConfigError(
                f"{len(self.counts)} counts for a tournament on "
                f"{self.tournament.n} alternatives")
        for c in self.counts:
            if c < 1:
                raise ConfigError(f"every count must be >= 1, got "
                                  f"{self.counts}")
        if self.n_seeds < 1:
            raise ConfigError(f"n_seeds must be >= 1, got {self.n_seeds}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        schedule = tuple(self.schedule) or geometric_schedule(self.horizon)
        for prev, cur in zip((0,) + schedule, schedule):
            if cur <= prev:
                raise ConfigError(
                    f"schedule must be strictly increasing, got {schedule}")
        if schedule[-1] > self.horizon:
            raise ConfigError(
                f"schedule reaches {schedule[-1]} beyond horizon "
                f"{self.horizon}")
        object.__setattr__(self, "schedule", schedule)

    def manifest_dict(self) -> dict:
        from .tournament import dumps
        return {
            "tournament": dumps(self.tournament),
            "tournament_source": self.tournament_source,
            "rule": self.rule.value,
            "counts": list(self.counts),
            "horizon": self.horizon,
            "seed": self.seed,
            "n_seeds": self.n_seeds,
            "schedule": list(self.schedule),
            "fast_exact": self.fast_exact,
            "format": self.fmt,
        }

    @staticmethod
    def from_manifest_dict(data: dict) -> "ExperimentConfig":
        from .tournament import loads
        try:
            return ExperimentConfig(
                tournament=loads(data["tournament"]),
                tournament_source=data["tournament_source"],
                rule=ReinforcementRule.parse(data["rule"]),
                counts=tuple(data["counts"]),
                horizon=int(data["horizon"]),
                seed=int(data["seed"]),
                n_seeds=int(data["n_seeds"]),
                schedule=tuple(data["schedule"]),
                fast_exact=bool(data["fast_exact"]),
                fmt=data["format"],
            )
        except KeyError as exc:
            raise ConfigError(f"manifest config missing key {exc}") from exc
