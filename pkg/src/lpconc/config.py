"""Experiment configuration: a flat ``key = value`` text format.

Example::

    # tail sweep on the (1, 4, 256) triple
    p = [1]
    q = [4, inf]
    n = [256]
    t_min = 2
    t_max = 3.5
    t_points = 6
    t_spacing = log
    trials = 1000000
    seed = 7
    chunks = 8

Lists are written ``[a, b, c]``; a bare scalar is a one-element list for
list-valued keys. ``#`` starts a comment. Unknown keys are errors. Seeds and
chunk counts are never filled in implicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Invalid configuration; carries the offending line and field when known."""

    def __init__(self, message: str, line: int | None = None, field_name: str | None = None,
                 source: str = "<config>"):
        self.line, self.field, self.source = line, field_name, source
        where = source if line is None else f"{source}:{line}"
        what = f" field '{field_name}':" if field_name else ""
        super().__init__(f"{where}:{what} {message}")


@dataclass
class ExperimentConfig:
    p: list = field(default_factory=lambda: [1.0])
    q: list = field(default_factory=lambda: [4.0])
    n: list = field(default_factory=lambda: [256])
    t_min: float = 2.0
    t_max: float = 3.0
    t_points: int = 6
    t_spacing: str = "linear"
    t: list | None = None  # explicit grid; overrides t_min/t_max/t_points
    trials: int = 10_000
    seed: int | None = None
    chunks: int | None = None
    workers: int = 1
    body: str = "mu-sphere"
    output: str | None = None  # None writes to stdout
    format: str = "csv"
    fit: bool = False
    samples: int = 1000
    region: str = "quadrant-sphere"
    normalization: str = "small-ell"
    order: int = 64

    def t_values(self) -> list[float]:
        if self.t is not None:
            return [float(v) for v in self.t]
        if self.t_points == 1:
            return [float(self.t_min)]
        if self.t_spacing == "log":
            return [float(v) for v in np.geomspace(self.t_min, self.t_max, self.t_points)]
        return [float(v) for v in np.linspace(self.t_min, self.t_max, self.t_points)]

    def validate(self, require_seed: bool = True) -> "ExperimentConfig":
        for name in ("p", "q", "n"):
            vals = getattr(self, name)
            if not vals:
                raise ConfigError("grid must be non-empty", field_name=name)
        if any(not (v > 0 and math.isfinite(v)) for v in self.p):
            raise ConfigError("values must be finite and positive", field_name="p")
        if any(not v > 0 for v in self.q):
            raise ConfigError("values must be positive (inf allowed)", field_name="q")
        if any(int(v) != v or v < 1 for v in self.n):
            raise ConfigError("values must be positive integers", field_name="n")
        if self.t is not None:
            if not self.t:
                raise ConfigError("grid must be non-empty", field_name="t")
            if any(not (v > 0 and math.isfinite(v)) for v in self.t):
                raise ConfigError("values must be finite and positive", field_name="t")
        else:
            if self.t_points < 1:
                raise ConfigError("must be >= 1", field_name="t_points")
            if not 0 < self.t_min <= self.t_max or not math.isfinite(self.t_max):
                raise ConfigError("need 0 < t_min <= t_max < inf", field_name="t_min")
        if self.t_spacing not in ("linear", "log"):
            raise ConfigError("must be 'linear' or 'log'", field_name="t_spacing")
        if self.format not in ("csv", "jsonl"):
            raise ConfigError("must be 'csv' or 'jsonl'", field_name="format")
        if self.body not in ("mu-sphere", "nu-ball"):
            raise ConfigError("must be 'mu-sphere' or 'nu-ball'", field_name="body")
        if self.region not in ("quadrant-sphere", "full-sphere", "full-ball"):
            raise ConfigError("must be quadrant-sphere, full-sphere or full-ball", field_name="region")
        if self.normalization not in ("small-ell", "big-L"):
            raise ConfigError("must be 'small-ell' or 'big-L'", field_name="normalization")
        for name in ("trials", "workers", "samples"):
            if getattr(self, name) < 1:
                raise ConfigError("must be >= 1", field_name=name)
        if self.order < 2:
            raise ConfigError("must be >= 2", field_name="order")
        if require_seed:
            if self.seed is None:
                raise ConfigError("seed must be given explicitly", field_name="seed")
            if self.chunks is None:
                raise ConfigError("chunks must be given explicitly", field_name="chunks")
        if self.seed is not None and self.seed < 0:
            raise ConfigError("must be >= 0", field_name="seed")
        if self.chunks is not None and self.chunks < 1:
            raise ConfigError("must be >= 1", field_name="chunks")
        return self

    def dumps(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            lines.append(f"{f.name} = {_format_value(v)}")
        return "\n".join(lines) + "\n"

    def updated(self, **overrides) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


# ---------------------------------------------------------------------------
# value codecs

_LIST_KEYS = {"p": float, "q": float, "n": int, "t": float}
_SCALAR_KEYS = {
    "t_min": float, "t_max": float, "t_points": int, "t_spacing": str, "trials": int, "seed": int,
    "chunks": int, "workers": int, "body": str, "output": str, "format": str, "fit": bool,
    "samples": int, "region": str, "normalization": str, "order": int,
}


def _format_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "inf" if math.isinf(v) and v > 0 else repr(v)
    return str(v)


def _format_value(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_format_scalar(x) for x in v) + "]"
    return _format_scalar(v)


def _parse_scalar(text: str, kind):
    text = text.strip()
    if kind is bool:
        low = text.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if kind is int:
        try:
            return int(text)  # exact for seeds beyond 2**53
        except ValueError:
            v = float(text)  # accepts forms such as 1e6
        if not v.is_integer():
            raise ValueError(f"expected an integer, got {text!r}")
        return int(v)
    if kind is float:
        v = float(text)
        if math.isnan(v):
            raise ValueError("nan is not allowed")
        return v
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        text = text[1:-1]
    return text


def _parse_value(key: str, text: str):
    if key in _LIST_KEYS:
        kind = _LIST_KEYS[key]
        body = text.strip()
        if body.startswith("["):
            if not body.endswith("]"):
                raise ValueError("unterminated list")
            body = body[1:-1]
        items = [s for s in (x.strip() for x in body.split(",")) if s]
        return [_parse_scalar(s, kind) for s in items]
    return _parse_scalar(text, _SCALAR_KEYS[key])


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    values, seen = {}, set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno, source=source)
        key, _, rhs = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _LIST_KEYS and key not in _SCALAR_KEYS:
            raise ConfigError("unknown key", lineno, key, source)
        if key in seen:
            raise ConfigError("duplicate key", lineno, key, source)
        seen.add(key)
        try:
            values[key] = _parse_value(key, rhs)
        except ValueError as exc:
            raise ConfigError(str(exc), lineno, key, source) from None
    return ExperimentConfig(**values)


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=path)
