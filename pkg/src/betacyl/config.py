"""Run configuration: defaults, a flat ``key = value`` file, then CLI flags.

Recognized keys (``#`` starts a comment):

    eps            enclosure width for beta, a positive rational (default 1/65536)
    budget         refinement budget in bits (default 4096)
    run_budget     digits scanned for one zero run (default 10000)
    enum_cap       longest enumerable word (default 16)
    verify_n       word length for partition checks in verify (default 8)
    bounds_n       word length for the cylinder bound check (default 10)
    bounds_m       prefix length for the expansion-of-1 bound check (default 12)
    fullness_n     fullness-law word length (default 6)
    fullness_m     fullness-law continuation length (default 4)
    r              ratio with m_k >= r * h_k (alias: ratio; default 10)
    K              number of constructed blocks (default 2)
    search_cap     horizon for lambda_hat and least window end (default 400)
    growth         window end factor over r * h_k (default 2)
    depth_cap      largest admissible r * h_k (default 65536)
    gap_tol        coverage tolerance for density summaries (default 0.2)
    format         csv or json (default csv)
    output         output path (default: standard output)
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import ConfigParseError
from .reals import parse_rational


@dataclass
class RunConfig:
    eps: Fraction = Fraction(1, 1 << 16)
    budget: int = 4096
    run_budget: int = 10_000
    enum_cap: int = 16
    verify_n: int = 8
    bounds_n: int = 10
    bounds_m: int = 12
    fullness_n: int = 6
    fullness_m: int = 4
    r: int = 10
    K: int = 2
    search_cap: int = 400
    growth: int = 2
    depth_cap: int = 1 << 16
    gap_tol: float = 0.2
    format: str = "csv"
    output: str | None = None

    def validate(self) -> "RunConfig":
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.type == "int" and value < 1:
                raise ValueError(f"{f.name} must be positive")
        if self.gap_tol <= 0:
            raise ValueError("gap_tol must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        return self

    def as_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["eps"] = str(self.eps)
        return out


_ALIASES = {"ratio": "r"}


def _convert(name: str, raw: str):
    kind = {f.name: f.type for f in dataclasses.fields(RunConfig)}[name]
    if name == "eps":
        return parse_rational(raw)
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if name == "output":
        return raw or None
    return raw


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines into a dict of typed values."""
    names = {f.name for f in dataclasses.fields(RunConfig)}
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ConfigParseError(f"expected 'key = value', got {line!r}", line=lineno)
        key = _ALIASES.get(key, key)
        if key not in names:
            raise ConfigParseError(f"unknown key {key!r}", line=lineno)
        try:
            value = _convert(key, raw)
            dataclasses.replace(RunConfig(), **{key: value}).validate()
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigParseError(f"bad value for {key}: {exc}", line=lineno) from exc
        values[key] = value
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the file (a missing file is skipped), then ``overrides``."""
    values: dict = {}
    if path is not None:
        p = Path(path)
        if p.exists():
            values.update(parse_config(p.read_text(encoding="utf-8")))
    for key, value in (overrides or {}).items():
        if value is not None:
            values[_ALIASES.get(key, key)] = value
    return RunConfig(**values).validate()
