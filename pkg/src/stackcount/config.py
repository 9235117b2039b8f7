"""Experiment configuration: key=value files merged with command-line flags."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path

from .arith import DomainError
from .points import ResidueCondition, Weights


class UsageError(ValueError):
    """Bad configuration; carries the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class ExperimentConfig:
    weights: Weights | None = None
    degree: int | None = None
    m: int | None = None
    bounds: list[Fraction] = field(default_factory=list)
    prime_bound: int = 10**6
    twists: dict[int, Fraction] = field(default_factory=dict)
    condition: ResidueCondition | None = None
    threads: int = 1
    output: str | None = None
    tol: float | None = None
    primes: list[int] = field(default_factory=list)
    s: float = 2.0
    cutoff: int = 200
    seed: int = 0

    def require(self, *keys: str) -> None:
        for key in keys:
            val = getattr(self, key)
            if val is None or val == []:
                raise UsageError(key, "required for this subcommand")


KEYS = tuple(f.name for f in fields(ExperimentConfig))


def parse_rational(text: str) -> Fraction:
    """Exact rational from '1e6', '2.5', '3/2' or '10'."""
    text = text.strip()
    try:
        if "/" in text:
            return Fraction(text)
        return Fraction(Decimal(text))
    except (ValueError, InvalidOperation, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None


def _positive_int(text: str) -> int:
    v = parse_rational(text)
    if v.denominator != 1 or v < 1:
        raise ValueError(f"expected a positive integer, got {text!r}")
    return int(v)


def _int_list(text: str) -> list[int]:
    return [_positive_int(t) for t in text.split(",") if t.strip()]


def _weights(text: str) -> Weights:
    vals = [t.strip() for t in text.split(",")]
    if not vals or any(not re.fullmatch(r"\d+", v) or int(v) < 1 for v in vals):
        raise ValueError(f"weights must be comma-separated positive integers, got {text!r}")
    return Weights(tuple(int(v) for v in vals))


def _bounds(text: str) -> list[Fraction]:
    out = [parse_rational(t) for t in text.split(",") if t.strip()]
    if not out:
        raise ValueError("empty bound ladder")
    if any(b <= 0 for b in out):
        raise ValueError("bounds must be positive")
    if any(x >= y for x, y in zip(out, out[1:])):
        raise ValueError("bound ladder must be strictly increasing")
    return out


def _twists(text: str) -> dict[int, Fraction]:
    """'5:2,7:1/3' -> {5: 2, 7: 1/3}."""
    out: dict[int, Fraction] = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        place, _, c = item.partition(":")
        if not c:
            raise ValueError(f"twist entries look like p:c, got {item!r}")
        value = parse_rational(c)
        if value <= 0:
            raise ValueError("twist constants must be positive")
        out[_positive_int(place)] = value
    return out


def _condition(text: str) -> ResidueCondition:
    """'1:2:1' -> first coordinate is 1 mod 2.  Residues are separated by '/'."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"condition looks like INDEX:MODULUS:R1/R2, got {text!r}")
    index = _positive_int(parts[0])
    modulus = _positive_int(parts[1])
    residues = [int(r) for r in parts[2].split("/") if r.strip()]
    if not residues:
        raise ValueError("condition needs at least one residue")
    return ResidueCondition(index - 1, modulus, residues)


def _tol(text: str) -> float:
    v = float(parse_rational(text))
    if v < 0:
        raise ValueError("tolerance must be nonnegative")
    return v


PARSERS = {
    "weights": _weights,
    "degree": _positive_int,
    "m": _positive_int,
    "bounds": _bounds,
    "prime_bound": _positive_int,
    "twists": _twists,
    "condition": _condition,
    "threads": _positive_int,
    "output": str,
    "tol": _tol,
    "primes": _int_list,
    "s": lambda t: float(parse_rational(t)),
    "cutoff": _positive_int,
    "seed": lambda t: int(parse_rational(t)),
}


def read_config_file(path: str | Path) -> dict[str, str]:
    """Raw key/value pairs from a line-oriented file with # comments."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"line {lineno}", f"expected key=value, got {line!r}")
        raw[key.strip().replace("-", "_")] = value.strip()
    return raw


def parse_config(flags: dict[str, str | None], path: str | Path | None = None) -> ExperimentConfig:
    """Merge file values with flags (flags win) and parse every value."""
    raw = read_config_file(path) if path else {}
    raw.update({k: v for k, v in flags.items() if v is not None})
    cfg = ExperimentConfig()
    for key, text in raw.items():
        if key not in PARSERS:
            raise UsageError(key, "unknown configuration key")
        try:
            setattr(cfg, key, PARSERS[key](str(text)))
        except (ValueError, DomainError) as exc:
            raise UsageError(key, str(exc)) from None
    if cfg.m is not None and cfg.m < 2:
        raise UsageError("m", "m must be at least 2")
    return cfg
