"""Domain types shared across the package.

All records are frozen; array-valued fields are made read-only on
construction so instances can be shared freely between threads.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import InvalidValue, UnknownCountry

N_PILLARS = 14
YEAR_MIN, YEAR_MAX = 1900, 2100

# regressor names of the climate model, as printed in the coefficient table
CONST = "Constant"
TEMP = "Temperature"
PREC = "Precipitation"


def country_key(name: str) -> str:
    """Join key: uppercase, trimmed, internal whitespace collapsed."""
    return re.sub(r"\s+", " ", name.strip()).upper()


@dataclass(frozen=True, eq=False)
class CountryId:
    """A country name whose equality and hash follow :func:`country_key`."""

    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.strip():
            raise InvalidValue("country name must be a non-empty string")
        object.__setattr__(self, "name", re.sub(r"\s+", " ", self.name.strip()))

    @property
    def key(self) -> str:
        return country_key(self.name)

    def __eq__(self, other):
        if isinstance(other, CountryId):
            return self.key == other.key
        return NotImplemented

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        return self.name


def as_country(c) -> CountryId:
    return c if isinstance(c, CountryId) else CountryId(c)


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PanelObservation:
    country: CountryId
    year: int
    agtfp: float
    temp_c: float
    prec_mm: float

    def __post_init__(self):
        object.__setattr__(self, "country", as_country(self.country))
        if not YEAR_MIN <= self.year <= YEAR_MAX:
            raise InvalidValue(f"year {self.year} outside [{YEAR_MIN}, {YEAR_MAX}]")
        if not self.agtfp > 0:
            raise InvalidValue(f"agtfp must be > 0 ({self.country}, {self.year})")
        if not self.prec_mm >= 0:
            raise InvalidValue(f"prec_mm must be >= 0 ({self.country}, {self.year})")


@dataclass(frozen=True)
class OutputInputAggregate:
    total_output: float
    total_input: float


@dataclass(frozen=True)
class IndicatorRecord:
    country: CountryId
    agtfp_level: float
    aoi: float
    value_added: float
    world_gdp: float

    def __post_init__(self):
        object.__setattr__(self, "country", as_country(self.country))
        if not self.agtfp_level > 0:
            raise InvalidValue(f"agtfp_level must be > 0 for {self.country}")
        if not self.world_gdp > 0:
            raise InvalidValue(f"world_gdp must be > 0 for {self.country}")
        if not 0 <= self.value_added <= self.world_gdp:
            raise InvalidValue(f"value_added must lie in [0, world_gdp] for {self.country}")


@dataclass(frozen=True)
class PillarMatrix:
    """Country x 14 pillar scores; pillar 14 is stored signed."""

    countries: tuple
    values: np.ndarray

    def __post_init__(self):
        countries = tuple(as_country(c) for c in self.countries)
        values = _frozen(self.values)
        if values.ndim != 2 or values.shape != (len(countries), N_PILLARS):
            raise InvalidValue(
                f"pillar matrix must be {len(countries)} x {N_PILLARS}, got {values.shape}")
        if len(set(countries)) != len(countries):
            raise InvalidValue("duplicate country in pillar matrix")
        if not np.all(np.isfinite(values)):
            raise InvalidValue("pillar matrix has non-finite cells")
        lo, hi = values[:, :13].min(initial=0.0), values[:, :13].max(initial=0.0)
        if lo < 0 or hi > 100:
            raise InvalidValue("pillars 1-13 must lie in [0, 100]")
        if np.any(np.abs(values[:, 13]) > 100):
            raise InvalidValue("pillar 14 must lie in [-100, 100]")
        object.__setattr__(self, "countries", countries)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.countries)

    def index(self, country) -> int:
        try:
            return self.countries.index(as_country(country))
        except ValueError:
            raise UnknownCountry(f"{country} not in pillar matrix") from None

    def row(self, country) -> np.ndarray:
        return self.values[self.index(country)]

    def pillar(self, k: int) -> np.ndarray:
        """Column for pillar ``k`` (1-based)."""
        if not 1 <= k <= N_PILLARS:
            raise IndexError(f"pillar index {k} outside 1..{N_PILLARS}")
        return self.values[:, k - 1]


@dataclass(frozen=True)
class RegressionFit:
    """Coefficients and robust inference for the climate model.

    ``names`` lists regressors in design order: Constant, Temperature,
    Precipitation, then one dummy per non-base country.
    """

    names: tuple
    coef: np.ndarray
    robust_se: np.ndarray
    t_value: np.ndarray
    p_value: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    base_country: CountryId
    n_obs: int
    r2_overall: float = math.nan
    r2_within: float = math.nan
    r2_between: float = math.nan
    mean_dep: float = math.nan
    sd_dep: float = math.nan
    covariance: Optional[np.ndarray] = None
    residuals: Optional[np.ndarray] = None
    fitted: Optional[np.ndarray] = None
    variant: str = "hc1"
    alpha: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "base_country", as_country(self.base_country))
        for f in ("coef", "robust_se", "t_value", "p_value", "ci_low", "ci_high"):
            arr = _frozen(getattr(self, f))
            if arr.shape != (len(self.names),):
                raise InvalidValue(f"{f} has shape {arr.shape}, expected ({len(self.names)},)")
            object.__setattr__(self, f, arr)
        for f in ("covariance", "residuals", "fitted"):
            if getattr(self, f) is not None:
                object.__setattr__(self, f, _frozen(getattr(self, f)))
        if CONST not in self.names:
            raise InvalidValue("fit has no Constant term")
        if self.base_country.name in self.names:
            raise InvalidValue(f"base country {self.base_country} must not carry a dummy")

    @property
    def k(self) -> int:
        return len(self.names)

    @property
    def dof(self) -> int:
        return self.n_obs - self.k

    def __getitem__(self, name: str) -> float:
        return float(self.coef[self.names.index(name)])

    @property
    def intercept(self) -> float:
        return self[CONST]

    def country_effects(self) -> dict:
        """Dummy coefficient per country, with the base country at 0."""
        out = {self.base_country: 0.0}
        for name, b in zip(self.names, self.coef):
            if name not in (CONST, TEMP, PREC):
                out[CountryId(name)] = float(b)
        return out


@dataclass(frozen=True)
class Pillar13Row:
    country: CountryId
    agtfp_norm: float
    aoi_norm: float
    agcs_norm: float

    @property
    def score(self) -> float:
        return (self.agtfp_norm + self.aoi_norm + self.agcs_norm) / 3


@dataclass(frozen=True)
class Pillar14Row:
    country: CountryId
    coefficient: float
    constant: float
    normalized: float
    sign: int

    @property
    def d1(self) -> float:
        return self.coefficient + self.constant

    @property
    def d2(self) -> float:
        return self.coefficient - self.constant

    @property
    def signed_score(self) -> float:
        return self.sign * self.normalized


@dataclass(frozen=True)
class ScoreEntry:
    country: CountryId
    gaci_score: Optional[float] = None
    gaci_rank: Optional[int] = None
    gci_score: Optional[float] = None
    gci_rank: Optional[int] = None
    region: Optional[str] = None
    flag: str = ""

    @property
    def diff(self) -> Optional[float]:
        if self.gaci_score is None or self.gci_score is None:
            return None
        return self.gaci_score - self.gci_score


@dataclass(frozen=True)
class ScoreBoard:
    """Per-country scores, ordered by GACI rank (unranked entries last)."""

    entries: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def get(self, country) -> ScoreEntry:
        c = as_country(country)
        for e in self.entries:
            if e.country == c:
                return e
        raise UnknownCountry(f"{country} not on score board")

    def scores(self) -> dict:
        return {e.country: e.gaci_score for e in self.entries if e.gaci_score is not None}


def country_map(items: Iterable, values: Optional[Sequence] = None) -> dict:
    """Build a ``CountryId``-keyed dict from names or (name, value) pairs."""
    if values is not None:
        return {as_country(c): v for c, v in zip(items, values)}
    if isinstance(items, Mapping):
        items = items.items()
    return {as_country(c): v for c, v in items}
