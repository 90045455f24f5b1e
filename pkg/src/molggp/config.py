"""Run configuration files: one ``key = value`` pair per line, ``#`` comments.

Keys are the SearchConfig fields plus ``dataset``, ``grammar``, ``out_dir``
and ``train_fraction``.  Unknown keys are rejected.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .search import SearchConfig, desk_config

RUN_KEYS = ("dataset", "grammar", "out_dir", "train_fraction")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    search: SearchConfig = field(default_factory=SearchConfig)
    dataset: str | None = None
    grammar: str | None = None
    out_dir: str | None = None
    train_fraction: float = 0.9


def _convert(key: str, raw: str, kind):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {kind.__name__}") from None
    return raw


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SearchConfig.field_names() and key not in RUN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def build_run_config(pairs: dict[str, str], desk: bool = False, **overrides) -> RunConfig:
    """Defaults (or desk defaults), then file values, then non-None overrides."""
    types = {f.name: f.type for f in fields(SearchConfig)}
    search_kw = {}
    run_kw = {}
    for key, raw in pairs.items():
        if key in types:
            kind = {"int": int, "float": float}.get(str(types[key]), str)
            search_kw[key] = _convert(key, raw, kind)
        elif key == "train_fraction":
            run_kw[key] = _convert(key, raw, float)
        else:
            run_kw[key] = raw
    for key, value in overrides.items():
        if value is None:
            continue
        (search_kw if key in types else run_kw)[key] = value
    try:
        search = desk_config(**search_kw) if desk else SearchConfig(**search_kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg = RunConfig(search, **run_kw)
    if not 0.0 < cfg.train_fraction < 1.0:
        raise ConfigError("train_fraction must lie in (0, 1)")
    return cfg


def load_config(path: str | Path | None, desk: bool = False, **overrides) -> RunConfig:
    pairs = parse_config_text(Path(path).read_text(encoding="utf-8")) if path else {}
    return build_run_config(pairs, desk, **overrides)
