"""Run defaults read from a flat ``key=value`` file.

Lookup order for the file: the ``--config`` flag, then the ``QCOURNOT_CONFIG``
environment variable, then ``qcournot.conf`` in the working directory. A
missing default file is not an error; command-line flags override any value.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import DomainError

ENV_VAR = "QCOURNOT_CONFIG"
DEFAULT_FILE = "qcournot.conf"


@dataclass(frozen=True)
class RunConfig:
    default_k: float = 4.0
    default_gamma: float = 0.0
    mc_samples: int = 1_000_000
    mc_seed: int = 1
    series_tail_tol: float = 1e-12
    output_precision: int = 12

    def __post_init__(self):
        if not self.default_k >= 1:
            raise DomainError(f"default_k must be >= 1, got {self.default_k}")
        if not 0 <= self.default_gamma < math.pi / 4:
            raise DomainError(f"default_gamma must lie in [0, pi/4), got {self.default_gamma}")
        if self.mc_samples < 1:
            raise DomainError(f"mc_samples must be >= 1, got {self.mc_samples}")
        if not 0 < self.series_tail_tol <= 1e-6:
            raise DomainError(f"series_tail_tol must lie in (0, 1e-6], got {self.series_tail_tol}")
        if self.output_precision < 1:
            raise DomainError(f"output_precision must be >= 1, got {self.output_precision}")


def parse_config(text: str) -> RunConfig:
    types = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in types:
            raise DomainError(f"config line {lineno}: unrecognised entry {raw.strip()!r}")
        try:
            values[key] = int(value) if types[key] in (int, "int") else float(value)
        except ValueError:
            raise DomainError(f"config line {lineno}: bad value for {key}: {value!r}") from None
    return RunConfig(**values)


def resolve_config_path(flag: Optional[str]) -> Optional[Path]:
    if flag:
        return Path(flag)
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    default = Path(DEFAULT_FILE)
    return default if default.is_file() else None


def load_config(flag: Optional[str] = None) -> RunConfig:
    path = resolve_config_path(flag)
    if path is None:
        return RunConfig()
    try:
        text = path.read_text()
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
