"""Pillar 13 (agricultural performance) and pillar 14 (climate impact)."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import (DegenerateRange, InvalidValue, NonPositiveValue, ZeroInput,
                     ZeroWorldGdp)
from .model import (IndicatorRecord, OutputInputAggregate, Pillar13Row, Pillar14Row,
                    RegressionFit)
from .transform import (DEFAULT_SPEC, NormalizationSpec, log_transform,
                        minmax_normalize, sign_of)

SHIFT_TOL = 1e-9


def tfp_ratio(agg: OutputInputAggregate) -> float:
    """Total factor productivity as total output over total input."""
    if agg.total_input == 0:
        raise ZeroInput("total input is zero")
    if agg.total_input < 0:
        raise InvalidValue("total input must be positive")
    return agg.total_output / agg.total_input


def tfp_growth(series) -> np.ndarray:
    """Period-on-period log growth, ``ln(x[t]) - ln(x[t-1])``."""
    s = np.asarray(series, dtype=float)
    if s.ndim != 1 or s.size < 2:
        raise ValueError("tfp_growth needs at least two observations")
    if np.any(s <= 0):
        raise NonPositiveValue("TFP series must be strictly positive")
    return np.diff(np.log(s))


def compute_agcs(record: IndicatorRecord) -> float:
    """Agricultural value added as a share of world GDP."""
    if record.world_gdp == 0:
        raise ZeroWorldGdp(f"world GDP is zero for {record.country}")
    return record.value_added / record.world_gdp


def build_pillar13(records: Sequence[IndicatorRecord],
                   spec: NormalizationSpec = DEFAULT_SPEC) -> list:
    """Log, normalize across countries and average the three indicators."""
    if len(records) < 2:
        raise ValueError("pillar 13 needs at least two countries")
    raw = {
        "agtfp": [r.agtfp_level for r in records],
        "aoi": [r.aoi for r in records],
        "agcs": [compute_agcs(r) for r in records],
    }
    norm = {}
    for name, values in raw.items():
        logged, _ = log_transform(values, spec)
        norm[name] = minmax_normalize(logged, spec, what=f"indicator {name}")
    return [Pillar13Row(r.country, float(norm["agtfp"][i]), float(norm["aoi"][i]),
                        float(norm["agcs"][i]))
            for i, r in enumerate(records)]


def build_pillar14(fit: RegressionFit, spec: NormalizationSpec = DEFAULT_SPEC) -> list:
    """Normalized and signed climate-impact score per country.

    The intercept is added to (d1) and subtracted from (d2) every country
    effect; both columns normalize to the same scores, which is checked.
    Rows come back in alphabetical country order.
    """
    effects = fit.country_effects()
    countries = sorted(effects)
    b = np.array([effects[c] for c in countries])
    const = fit.intercept
    n1 = minmax_normalize(b + const, spec, what="d1 = coefficient + constant")
    n2 = minmax_normalize(b - const, spec, what="d2 = coefficient - constant")
    if not np.allclose(n1, n2, rtol=0, atol=SHIFT_TOL):
        raise DegenerateRange("d1 and d2 normalizations disagree")
    rows = []
    for c, coef, score in zip(countries, b, n1):
        is_base = c == fit.base_country
        sign = sign_of(const if is_base else coef)
        rows.append(Pillar14Row(c, float(coef), const, float(score), sign))
    return rows


def pillar14_table(rows: Sequence[Pillar14Row], spec: NormalizationSpec = DEFAULT_SPEC) -> list:
    """Rows in the published pillar-14 layout, with both normalization columns."""
    d2 = minmax_normalize([r.d2 for r in rows], spec)
    return [{"country": r.country.name, "coefficient": r.coefficient,
             "constant": r.constant, "d1": r.d1, "d2": r.d2,
             "d1_normalized": r.normalized, "d2_normalized": float(n2),
             "sign": r.sign, "signed_score": r.signed_score}
            for r, n2 in zip(rows, d2)]


def pillar13_table(rows: Sequence[Pillar13Row]) -> list:
    return [{"country": r.country.name, "agtfp": r.agtfp_norm, "aoi": r.aoi_norm,
             "agcs": r.agcs_norm, "pillar13": r.score} for r in rows]
