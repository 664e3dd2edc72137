"""Item analysis: Pearson correlation of every pillar with the composite."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import stats

from .errors import DegenerateVariance, LengthMismatch
from .model import N_PILLARS, PillarMatrix, as_country

SIG_LEVEL = 0.05


def pearson(x, y):
    """Product-moment correlation and its two-sided t-test p-value."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"pearson needs equal-length vectors, got {x.shape} and {y.shape}")
    n = x.size
    if n < 3:
        raise LengthMismatch("pearson needs at least 3 observations")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = dx @ dx, dy @ dy
    if not (sxx > 0 and syy > 0):
        raise DegenerateVariance("pearson input has zero variance")
    r = float(np.clip((dx @ dy) / np.sqrt(sxx * syy), -1.0, 1.0))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * np.sqrt((n - 2) / (1 - r * r))
    return r, float(2 * stats.t.sf(abs(t), n - 2))


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: tuple
    r: np.ndarray
    p: np.ndarray

    def __getitem__(self, pair):
        a, b = pair
        i, j = self.labels.index(a), self.labels.index(b)
        return float(self.r[i, j])

    def pvalue(self, a, b) -> float:
        return float(self.p[self.labels.index(a), self.labels.index(b)])


def item_analysis(matrix: PillarMatrix, gaci: Mapping) -> CorrelationMatrix:
    """15 x 15 correlation matrix over the 14 pillars and the GACI score."""
    gaci = {as_country(c): v for c, v in gaci.items()}
    if set(gaci) != set(matrix.countries):
        raise LengthMismatch("GACI scores and pillar matrix cover different countries")
    labels = tuple(f"Pillar {k}" for k in range(1, N_PILLARS + 1)) + ("GACI",)
    cols = np.column_stack([matrix.values, [gaci[c] for c in matrix.countries]])
    m = len(labels)
    r = np.eye(m)
    p = np.zeros((m, m))
    for i in range(m):
        for j in range(i):
            try:
                r[i, j], p[i, j] = pearson(cols[:, i], cols[:, j])
            except DegenerateVariance:
                bad = labels[i] if np.ptp(cols[:, i]) == 0 else labels[j]
                raise DegenerateVariance(f"{bad} has zero variance") from None
            r[j, i], p[j, i] = r[i, j], p[i, j]
    return CorrelationMatrix(labels, r, p)


def long_rows(cm: CorrelationMatrix, dp: int = 3) -> list:
    """One row per lower-triangle cell: row, col, r, p, star."""
    rows = []
    for i, a in enumerate(cm.labels):
        for j in range(i):
            rows.append({"row": a, "col": cm.labels[j], "r": float(cm.r[i, j]),
                         "p": float(cm.p[i, j]),
                         "star": "*" if cm.p[i, j] < SIG_LEVEL else ""})
    return rows


def triangular_rows(cm: CorrelationMatrix, dp: int = 3) -> list:
    """Lower-triangular layout: an r row per variable, p-values beneath in parentheses."""
    m = len(cm.labels)
    head = ["Variables"] + [f"({k})" for k in range(1, m + 1)]
    rows = []
    for i, a in enumerate(cm.labels):
        rrow = {"Variables": a}
        prow = {"Variables": ""}
        for j in range(i + 1):
            col = head[j + 1]
            if i == j:
                rrow[col] = f"{1:.{dp}f}"
            else:
                star = "*" if cm.p[i, j] < SIG_LEVEL else ""
                rrow[col] = f"{cm.r[i, j]:.{dp}f}{star}"
                prow[col] = f"({cm.p[i, j]:.{dp}f})"
        rows.append(rrow)
        if i:
            rows.append(prow)
    return [{h: row.get(h, "") for h in head} for row in rows]
