"""Aggregate pillars into GACI scores, rank, and compare against GCI."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from .errors import EmptyIntersection, MissingPillar
from .model import N_PILLARS, PillarMatrix, ScoreBoard, ScoreEntry, as_country

REGIONS = (
    "East Asia and the Pacific",
    "Eurasia",
    "Europe and North America",
    "Latin America and the Caribbean",
    "Middle East and North Africa",
    "South Asia",
    "Sub-Saharan Africa",
)

# figure number -> region, for the region plot-data files
REGION_FIGURES = dict(zip(range(8, 15), REGIONS))


def compute_gaci(matrix: PillarMatrix) -> dict:
    """Equal-weight mean of the 14 pillars (pillar 14 signed)."""
    if matrix.values.shape[1] != N_PILLARS:
        raise MissingPillar(f"expected {N_PILLARS} pillars, got {matrix.values.shape[1]}")
    if np.isnan(matrix.values).any():
        raise MissingPillar("pillar matrix has empty cells")
    means = matrix.values.sum(axis=1) / N_PILLARS
    return {c: float(s) for c, s in zip(matrix.countries, means)}


def rank_order(scores: Mapping) -> list:
    """Countries by descending score, ties alphabetical."""
    return sorted(scores, key=lambda c: (-scores[c], as_country(c).key))


def rank(scores: Mapping) -> ScoreBoard:
    order = rank_order(scores)
    return ScoreBoard(ScoreEntry(as_country(c), gaci_score=scores[c], gaci_rank=i)
                      for i, c in enumerate(order, start=1))


def compare(gaci: Mapping, gci: Mapping, regions: Optional[Mapping] = None) -> ScoreBoard:
    """Join GACI and GCI scores; GCI is re-ranked within the shared countries.

    Countries present on one side only are kept and flagged.
    """
    gaci = {as_country(c): v for c, v in gaci.items()}
    gci = {as_country(c): v for c, v in gci.items()}
    regions = {as_country(c): r for c, r in (regions or {}).items()}
    shared = gaci.keys() & gci.keys()
    if not shared:
        raise EmptyIntersection("GACI and GCI score maps share no country")
    gci_rank = {c: i for i, c in enumerate(rank_order({c: gci[c] for c in shared}), 1)}

    entries = []
    for e in rank(gaci):
        c = e.country
        entries.append(replace(e, gci_score=gci.get(c), gci_rank=gci_rank.get(c),
                               region=regions.get(c),
                               flag="" if c in shared else "missing GCI"))
    for c in sorted(gci.keys() - shared):
        entries.append(ScoreEntry(c, gci_score=gci[c], region=regions.get(c),
                                  flag="missing GACI"))
    return ScoreBoard(entries)


def with_regions(board: ScoreBoard, regions: Mapping) -> ScoreBoard:
    regions = {as_country(c): r for c, r in regions.items()}
    return ScoreBoard(replace(e, region=regions.get(e.country, e.region)) for e in board)


@dataclass(frozen=True)
class RegionGroup:
    region: str
    entries: tuple
    mean_diff: Optional[float]
    min_diff: Optional[float]
    max_diff: Optional[float]


def region_report(board: ScoreBoard, regions: Mapping) -> list:
    """Group board entries by region, each group sorted by diff ascending.

    Regions appear in the canonical order, then any unknown labels
    alphabetically. Countries without a diff sort last within a group.
    """
    regions = {as_country(c): r for c, r in regions.items()}
    groups = {}
    for e in board:
        r = regions.get(e.country)
        if r is not None:
            groups.setdefault(r, []).append(replace(e, region=r))
    order = [r for r in REGIONS if r in groups] + sorted(set(groups) - set(REGIONS))
    out = []
    for r in order:
        members = sorted(groups[r], key=lambda e: (e.diff is None,
                                                    e.diff if e.diff is not None else 0.0,
                                                    e.country.key))
        diffs = [e.diff for e in members if e.diff is not None]
        out.append(RegionGroup(r, tuple(members),
                               float(np.mean(diffs)) if diffs else None,
                               min(diffs) if diffs else None,
                               max(diffs) if diffs else None))
    return out


@dataclass(frozen=True)
class DisparityStats:
    n_negative: int
    n_positive: int
    n_zero: int
    threshold: float
    declines_by_group: dict = field(default_factory=dict)


def disparity_stats(board: ScoreBoard, development: Optional[Mapping] = None,
                    threshold: float = 4.0) -> DisparityStats:
    """Count negative/positive GACI-GCI differences and large declines.

    A decline counts when ``-diff > threshold``. With ``development`` (a
    country -> tag map) the large-decline count is split by tag, untagged
    countries under ``"untagged"``; otherwise everything is under ``"all"``.
    """
    diffs = {e.country: e.diff for e in board if e.diff is not None}
    neg = sum(d < 0 for d in diffs.values())
    pos = sum(d > 0 for d in diffs.values())
    dev = {as_country(c): t for c, t in (development or {}).items()}
    groups = {t: 0 for t in sorted(set(dev.values()))} if dev else {"all": 0}
    for c, d in diffs.items():
        tag = dev.get(c, "untagged") if dev else "all"
        groups.setdefault(tag, 0)
        if -d > threshold:
            groups[tag] += 1
    return DisparityStats(neg, pos, len(diffs) - neg - pos, threshold, groups)


# -- report rows -----------------------------------------------------------

def gaci_rows(board: ScoreBoard) -> list:
    return [{"country": e.country.name, "rank": e.gaci_rank, "score": e.gaci_score}
            for e in board if e.gaci_rank is not None]


def gci_rows(board: ScoreBoard) -> list:
    ranked = sorted((e for e in board if e.gci_rank is not None), key=lambda e: e.gci_rank)
    return [{"country": e.country.name, "rank": e.gci_rank, "score": e.gci_score}
            for e in ranked]


def diff_rows(board: ScoreBoard) -> list:
    """Alphabetical GACI / GCI / difference rows, flags included."""
    return [{"country": e.country.name, "gaci": e.gaci_score, "gci": e.gci_score,
             "diff": e.diff, "flag": e.flag}
            for e in sorted(board, key=lambda e: e.country.key)]


def board_rows(board: ScoreBoard) -> list:
    return [{"country": e.country.name, "gaci_rank": e.gaci_rank,
             "gaci_score": e.gaci_score, "gci_rank": e.gci_rank,
             "gci_score": e.gci_score, "diff": e.diff, "region": e.region or "",
             "flag": e.flag} for e in board]


def region_rows(report: list) -> list:
    rows = []
    for g in report:
        for e in g.entries:
            rows.append({"region": g.region, "country": e.country.name,
                         "gaci": e.gaci_score, "gci": e.gci_score, "diff": e.diff})
        rows.append({"region": g.region, "country": "(summary)", "gaci": None,
                     "gci": None, "diff": g.mean_diff, "min_diff": g.min_diff,
                     "max_diff": g.max_diff})
    return rows


def region_markdown(report: list, dp: int = 3) -> str:
    def f(v):
        return "" if v is None else f"{v:.{dp}f}"

    parts = []
    for g in report:
        parts.append(f"## {g.region}\n")
        parts.append("| Country | GACI | GCI | GACI-GCI |")
        parts.append("|---|---:|---:|---:|")
        for e in g.entries:
            parts.append(f"| {e.country.name} | {f(e.gaci_score)} | {f(e.gci_score)} | {f(e.diff)} |")
        parts.append(f"\n{len(g.entries)} countries; mean difference {f(g.mean_diff)}, "
                     f"range {f(g.min_diff)} to {f(g.max_diff)}.\n")
    return "\n".join(parts)


def plot_data(board: ScoreBoard, development: Optional[Mapping] = None,
              regions: Optional[Mapping] = None, top: int = 10) -> dict:
    """Plot-ready (country, gci, gaci) tables keyed by output file stem."""
    def rows(entries):
        return [{"country": e.country.name, "gci": e.gci_score, "gaci": e.gaci_score}
                for e in entries]

    compared = [e for e in board if e.diff is not None]
    out = {
        "fig04_top_gci": rows(sorted(compared, key=lambda e: e.gci_rank)[:top]),
        "fig05_top_gaci": rows(sorted(compared, key=lambda e: e.gaci_rank)[:top]),
        "fig07_max_difference": rows(sorted(compared, key=lambda e: (e.diff, e.country.key))[:top]),
    }
    if development:
        dev = {as_country(c): t for c, t in development.items()}
        developing = [e for e in compared if dev.get(e.country) == "developing"]
        out["fig06_top_developing_gaci"] = rows(
            sorted(developing, key=lambda e: e.gaci_rank)[:top])
    if regions:
        report = {g.region: g for g in region_report(board, regions)}
        for num, region in REGION_FIGURES.items():
            if region in report:
                stem = region.lower().replace(" ", "_")
                out[f"fig{num:02d}_{stem}"] = rows(report[region].entries)
    return dict(sorted(out.items()))
