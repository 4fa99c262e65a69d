"""Run-level quality metrics and the run report record.

Two conventions here are deliberate reconstructions (the counting rule for
selected elements and the normalization of the matching error are design
choices of this tool, documented in the README):

* an element counts as selected when its power exceeds ``rel_threshold``
  times the strongest element's power (default threshold 1e-3, i.e. within
  30 dB of the strongest element);
* the matching error is total squared pattern residual over total squared
  scaled-template energy, reported in dB.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .arrays import WeightVector
from .errors import ContractError, DegenerateInputError
from .templates import DesiredPattern

if TYPE_CHECKING:  # pragma: no cover
    from .admm import IterationRecord

#: Serialized stand-in for -inf dB (exact ratios of zero).
DB_FLOOR = -300.0


def _ratio_db(ratio: float) -> float:
    return max(10.0 * np.log10(max(ratio, 1e-30)), DB_FLOOR)


def cardinality(w: WeightVector, rel_threshold: float = 1e-3) -> int:
    """Number of selected elements: powers above rel_threshold * max power."""
    if not 0.0 < rel_threshold < 1.0:
        raise ContractError(f"rel_threshold must lie in (0, 1), got {rel_threshold}")
    p = w.powers()
    return int(np.count_nonzero(p > rel_threshold * p.max()))


def matching_error_db(pattern: np.ndarray, alpha: float, d: DesiredPattern) -> float:
    """Normalized pattern matching error in dB.

    10*log10( sum (P_k - alpha*d_k)^2 / sum (alpha*d_k)^2 ), floored at
    ``DB_FLOOR`` for an exact match.
    """
    pattern = np.asarray(pattern, dtype=float)
    if pattern.shape != d.values.shape:
        raise ContractError("pattern and template sizes differ")
    scaled = alpha * d.values
    denom = float(scaled @ scaled)
    if not denom > 0.0:
        raise DegenerateInputError("scaled template has no energy")
    residual = pattern - scaled
    return _ratio_db(float(residual @ residual) / denom)


def peak_sidelobe_db(pattern: np.ndarray, mask: np.ndarray) -> float:
    """Highest sidelobe power relative to the mainlobe peak, in dB."""
    pattern = np.asarray(pattern, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if pattern.shape != mask.shape:
        raise ContractError("pattern and mask sizes differ")
    if not mask.any() or mask.all():
        raise ContractError("mask must contain both mainlobe and sidelobe angles")
    main_peak = float(pattern[mask].max())
    side_peak = float(pattern[~mask].max())
    if not main_peak > 0.0:
        raise DegenerateInputError("mainlobe region carries no power")
    return _ratio_db(side_peak / main_peak)


@dataclass(frozen=True, eq=False)
class RunReport:
    """Final metrics of a solver run plus the full per-iteration trace."""

    cardinality: int
    matching_error_db: float
    peak_sidelobe_db: float
    runtime_seconds: float
    iterations: int
    final_alpha: float
    trace: "list[IterationRecord]"

    def __post_init__(self):
        if self.cardinality < 0:
            raise ContractError("cardinality cannot be negative")
        if self.iterations < 0 or self.runtime_seconds < 0:
            raise ContractError("iterations and runtime must be nonnegative")
