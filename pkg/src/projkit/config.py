"""Numerical tolerances, budgets and the key-value config format."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "budget_from_env",
    "parse_key_values",
    "load_config",
    "BUDGET_ENV",
]

BUDGET_ENV = "PROJKIT_BUDGET"


@dataclass(frozen=True)
class Tolerances:
    """Tolerances shared by every module.

    Attributes
    ----------
    proj : float
        Allowed ``||P^2 - P||`` for a matrix to count as a projection.
    rank : float
        Singular-value cutoff, relative to ``||M||`` and also used as an absolute floor.
    spec : float
        Minimum distance between a spectral cut and the spectrum.
    angle_sq : float
        Distance from {0, 1} below which an eigenvalue of ``pqp`` is a corner.
    cluster : float
        Clustering width when listing distinct principal angles.
    psd : float
        Slack used by Loewner-order tests on model fibers.
    alpha : float
        Allowed inversion of an alpha interval before it is an inconsistency.
    eps_floor : float
        ``epsilon_i`` below this value certifies an infinite alpha.
    """

    proj: float = 1e-8
    rank: float = 1e-8
    spec: float = 1e-10
    angle_sq: float = 1e-12
    cluster: float = 1e-8
    psd: float = 1e-9
    alpha: float = 1e-6
    eps_floor: float = 0.02

    def replace(self, **changes: float) -> "Tolerances":
        return dataclasses.replace(self, **changes)


DEFAULT_TOL = Tolerances()


def budget_from_env(default: int = 4096) -> int:
    """Cap on total matrix dimension, read from ``PROJKIT_BUDGET``."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return default
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{BUDGET_ENV} must be positive, got {raw!r}")
    return value


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Examples
    --------
    >>> parse_key_values("fiber_dim = 48\\n# note\\ntrunc_len=32")
    {'fiber_dim': '48', 'trunc_len': '32'}
    """
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(path: str | Path) -> dict[str, str]:
    return parse_key_values(Path(path).read_text())
