"""Log transform, min-max normalization and sign handling."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRange

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalizationSpec:
    lo: float = 0.0
    hi: float = 100.0
    epsilon: float = 1e-9

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"hi ({self.hi}) must exceed lo ({self.lo})")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


DEFAULT_SPEC = NormalizationSpec()


def log_transform(values, spec: NormalizationSpec = DEFAULT_SPEC):
    """Natural log with a floor for non-positive input.

    Values ``<= spec.epsilon`` are replaced by ``ln(epsilon)``.

    Returns
    -------
    out : ndarray
    n_floored : int
        How many values hit the floor.
    """
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("log_transform needs finite input")
    floored = v <= spec.epsilon
    out = np.log(np.where(floored, spec.epsilon, v))
    n = int(floored.sum())
    if n:
        log.warning("%d value(s) at or below epsilon=%g floored before log", n, spec.epsilon)
    return out, n


def minmax_normalize(values, spec: NormalizationSpec = DEFAULT_SPEC, what="values"):
    """Affine map of ``values`` onto ``[spec.lo, spec.hi]``."""
    v = np.asarray(values, dtype=float)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ValueError("minmax_normalize needs a non-empty finite vector")
    vmin, vmax = v.min(), v.max()
    if vmax == vmin:
        raise DegenerateRange(what)
    out = spec.lo + (spec.hi - spec.lo) * (v - vmin) / (vmax - vmin)
    # pin endpoints exactly; rounding in the division can leave them 1 ulp off
    np.clip(out, spec.lo, spec.hi, out=out)
    out[v == vmin] = spec.lo
    out[v == vmax] = spec.hi
    return out


def sign_of(x: float) -> int:
    return -1 if x < 0 else 1


def apply_sign(normalized: float, effect: float, base_effect: float, is_base: bool) -> float:
    """Attach the direction of a country's climate effect to its score.

    Non-base countries take the sign of their own dummy coefficient; the
    base country, which has no dummy, takes the sign of the intercept.
    Zero counts as positive.
    """
    return sign_of(base_effect if is_base else effect) * normalized
