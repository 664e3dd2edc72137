"""CSV readers and writers for every table the package consumes or emits.

Dialect: comma separated, ``.`` decimal point, optional quoting, UTF-8,
header in the first row, ``\\n`` line endings on output.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from . import errors as E
from .model import (N_PILLARS, YEAR_MAX, YEAR_MIN, CountryId, IndicatorRecord,
                    PanelObservation, Pillar13Row, PillarMatrix, RegressionFit,
                    as_country)

DATA_ENV = "GACI_DATA_DIR"
PILLAR_COLUMNS = tuple(f"p{k}" for k in range(1, N_PILLARS + 1))

# fixed decimals per report family
SCORE_DP = 3
PILLAR_DP = 2
REGRESSION_DP = 3


def data_dir() -> Path:
    """Fixture directory: ``$GACI_DATA_DIR`` if set, else the bundled data."""
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("gaci") / "data"))


def fixture(name: str) -> Path:
    return data_dir() / name


# -- low-level reading -----------------------------------------------------

def _read(path, required: Sequence[str]):
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise E.SchemaError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise E.EmptyFile(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    for col in required:
        if col not in header:
            raise E.MissingColumn(col, path)
    out = []
    for lineno, r in enumerate(rows[1:], start=2):
        r = r + [""] * (len(header) - len(r))
        out.append((lineno, dict(zip(header, (c.strip() for c in r)))))
    return out


def _float(text, lineno, column, path, blank_ok=False):
    if text == "" and blank_ok:
        return None
    try:
        v = float(text)
    except ValueError:
        raise E.NonNumericCell(lineno, column, text, path) from None
    if not math.isfinite(v):
        raise E.NonNumericCell(lineno, column, text, path)
    return v


def _country(text, lineno, path):
    if not text:
        raise E.SchemaError(f"blank country at row {lineno} in {path}")
    return CountryId(text)


# -- loaders ---------------------------------------------------------------

def load_pillar_matrix(path) -> PillarMatrix:
    """Read ``country,p1,...,p14``. Extra columns are ignored."""
    rows = _read(path, ("country",) + PILLAR_COLUMNS)
    if not rows:
        raise E.EmptyFile(f"{path} has a header but no rows")
    countries, values = [], []
    for lineno, r in rows:
        c = _country(r["country"], lineno, path)
        if c in countries:
            raise E.DuplicateCountry(c.name)
        countries.append(c)
        values.append([_float(r[col], lineno, col, path) for col in PILLAR_COLUMNS])
    try:
        return PillarMatrix(tuple(countries), np.array(values))
    except E.InvalidValue as exc:
        raise E.InvalidValue(f"{path}: {exc}") from exc


def load_panel(path) -> list:
    """Read ``country,year,agtfp,temp_c,prec_mm``, sorted by (country, year)."""
    rows = _read(path, ("country", "year", "agtfp", "temp_c", "prec_mm"))
    seen = set()
    out = []
    for lineno, r in rows:
        c = _country(r["country"], lineno, path)
        year_f = _float(r["year"], lineno, "year", path)
        if year_f != int(year_f):
            raise E.NonNumericCell(lineno, "year", r["year"], path)
        year = int(year_f)
        if not YEAR_MIN <= year <= YEAR_MAX:
            raise E.YearOutOfRange(f"year {year} at row {lineno} outside [{YEAR_MIN}, {YEAR_MAX}]")
        if (c, year) in seen:
            raise E.DuplicateObservation(c.name, year)
        seen.add((c, year))
        vals = [_float(r[k], lineno, k, path) for k in ("agtfp", "temp_c", "prec_mm")]
        out.append(PanelObservation(c, year, *vals))
    out.sort(key=lambda o: (o.country.key, o.year))
    return out


def is_balanced(panel: Sequence[PanelObservation]) -> bool:
    counts = {}
    for o in panel:
        counts[o.country] = counts.get(o.country, 0) + 1
    return len(set(counts.values())) <= 1


def load_scores(path, column: str = "score") -> dict:
    """Read a ``country,score`` table into a ``CountryId -> float`` map."""
    rows = _read(path, ("country", column))
    if not rows:
        raise E.EmptyFile(f"{path} has a header but no rows")
    out = {}
    for lineno, r in rows:
        c = _country(r["country"], lineno, path)
        if c in out:
            raise E.DuplicateCountry(c.name)
        out[c] = _float(r[column], lineno, column, path)
    return out


def load_labels(path, column: str) -> dict:
    """Read a ``country,<column>`` text mapping (regions, development status)."""
    rows = _read(path, ("country", column))
    out = {}
    for lineno, r in rows:
        c = _country(r["country"], lineno, path)
        if c in out:
            raise E.DuplicateCountry(c.name)
        if r[column]:
            out[c] = r[column]
    return out


def load_indicators(path) -> list:
    """Raw pillar-13 inputs: ``country,agtfp,aoi,value_added,world_gdp``."""
    cols = ("agtfp", "aoi", "value_added", "world_gdp")
    rows = _read(path, ("country",) + cols)
    out, seen = [], set()
    for lineno, r in rows:
        c = _country(r["country"], lineno, path)
        if c in seen:
            raise E.DuplicateCountry(c.name)
        seen.add(c)
        out.append(IndicatorRecord(c, *(_float(r[k], lineno, k, path) for k in cols)))
    return out


def load_normalized_indicators(path) -> list:
    """Already-normalized pillar-13 indicators: ``country,agtfp,aoi,agcs``."""
    rows = _read(path, ("country", "agtfp", "aoi", "agcs"))
    out, seen = [], set()
    for lineno, r in rows:
        c = _country(r["country"], lineno, path)
        if c in seen:
            raise E.DuplicateCountry(c.name)
        seen.add(c)
        out.append(Pillar13Row(c, *(_float(r[k], lineno, k, path)
                                    for k in ("agtfp", "aoi", "agcs"))))
    return out


def indicator_kind(path) -> str:
    """``"raw"`` or ``"normalized"``, decided by the header."""
    header = set(_read_header(path))
    if "agcs" in header:
        return "normalized"
    for col in ("value_added", "world_gdp"):
        if col not in header:
            raise E.MissingColumn(col, path)
    return "raw"


def _read_header(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            first = next(csv.reader(fh), None)
    except OSError as exc:
        raise E.SchemaError(f"cannot read {path}: {exc}") from exc
    if not first:
        raise E.EmptyFile(f"{path} is empty")
    return [h.strip() for h in first]


def load_fit_stats(path) -> dict:
    rows = _read(path, ("statistic", "value"))
    return {r["statistic"]: r["value"] for _, r in rows}


def load_coefficients(path, stats_path=None, base_country=None, n_obs=None,
                      alpha: float = 0.05) -> RegressionFit:
    """Rebuild a climate-model fit from a coefficient table.

    A term row with blank numbers marks the base country. ``n_obs`` and
    the descriptive statistics come from ``stats_path`` when given.
    """
    from .econometrics import fit_from_table

    rows = _read(path, ("term", "coef", "robust_se"))
    terms, coef, se, blank = [], [], [], []
    for lineno, r in rows:
        if not r["term"]:
            raise E.SchemaError(f"blank term at row {lineno} in {path}")
        b = _float(r["coef"], lineno, "coef", path, blank_ok=True)
        s = _float(r["robust_se"], lineno, "robust_se", path, blank_ok=True)
        if b is None:
            blank.append(r["term"])
            continue
        if s is None:
            raise E.NonNumericCell(lineno, "robust_se", "", path)
        if r["term"] in terms:
            raise E.DuplicateCountry(r["term"])
        terms.append(r["term"])
        coef.append(b)
        se.append(s)

    stats = load_fit_stats(stats_path) if stats_path else {}
    base = base_country or (blank[0] if blank else stats.get("base_country"))
    if not base:
        raise E.SchemaError(f"{path}: base country not given and no blank term row")
    n = n_obs or (int(stats["n_obs"]) if "n_obs" in stats else None)
    if n is None:
        raise E.SchemaError(f"{path}: number of observations unknown (pass n_obs or stats)")
    extra = {k: float(stats[k]) for k in
             ("r2_overall", "r2_within", "r2_between", "mean_dep", "sd_dep") if k in stats}
    try:
        return fit_from_table(terms, coef, se, as_country(base), n, alpha=alpha, **extra)
    except E.InvalidValue as exc:
        raise E.SchemaError(f"{path}: {exc}") from exc


# -- writers ---------------------------------------------------------------

def format_cell(v, dp: int) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            return ""
        return f"{float(v):.{dp}f}"
    return str(v)


def write_table(rows: Sequence[Mapping], path, decimals: int = SCORE_DP,
                columns: Optional[Sequence[str]] = None,
                column_decimals: Optional[Mapping[str, int]] = None) -> Path:
    """Write dict-like rows as CSV with fixed-decimal reals."""
    if not rows:
        raise ValueError("write_table needs at least one row")
    columns = list(columns or rows[0].keys())
    column_decimals = column_decimals or {}
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([format_cell(r.get(c), column_decimals.get(c, decimals))
                            for c in columns])
    except OSError as exc:
        raise E.GaciError(f"IoError: cannot write {path}: {exc}") from exc
    return path


def write_scores(scores: Mapping, path, dp: int = SCORE_DP) -> Path:
    rows = [{"country": str(c), "score": v} for c, v in scores.items()]
    return write_table(rows, path, dp)


def write_pillar_matrix(matrix: PillarMatrix, path, dp: int = PILLAR_DP) -> Path:
    rows = [{"country": c.name, **dict(zip(PILLAR_COLUMNS, row))}
            for c, row in zip(matrix.countries, matrix.values.tolist())]
    return write_table(rows, path, dp)


def write_panel(panel: Sequence[PanelObservation], path, dp: int = 6) -> Path:
    rows = [{"country": o.country.name, "year": o.year, "agtfp": o.agtfp,
             "temp_c": o.temp_c, "prec_mm": o.prec_mm} for o in panel]
    return write_table(rows, path, dp)


@dataclass(frozen=True)
class DatasetBundle:
    pillar_matrix: PillarMatrix
    indicator_table: Optional[list] = None
    panel: Optional[list] = None
    gci_scores: Optional[dict] = None
    regions: Optional[dict] = None

    def __post_init__(self):
        known = set(self.pillar_matrix.countries)
        for label, m in (("gci_scores", self.gci_scores), ("regions", self.regions)):
            if m:
                unknown = [c.name for c in m if c not in known]
                if unknown:
                    raise E.UnknownCountry(f"{label} name countries absent from the "
                                           f"pillar matrix: {', '.join(unknown)}")


def load_fixture_bundle() -> DatasetBundle:
    return DatasetBundle(
        pillar_matrix=load_pillar_matrix(fixture("pillars_2019.csv")),
        gci_scores=load_scores(fixture("gci_scores.csv")),
        regions=load_labels(fixture("regions.csv"), "region"),
    )
