"""Pooled OLS with country dummies and heteroskedasticity-robust inference.

The climate model regresses agricultural TFP on annual mean temperature,
annual precipitation and one dummy per country (the base country omitted)::

    agtfp = b0 + b1 * temp + b2 * prec + sum_c bc * [country == c] + u

Coefficients come from a column-pivoted Householder QR; the normal
equations are never formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla
from scipy import stats

from .errors import (DegenerateVariance, RankDeficient, SingularMoment,
                     TooFewObservations, UnknownBaseCountry, ZeroStandardError)
from .model import CONST, PREC, TEMP, CountryId, RegressionFit, as_country

RANK_TOL = 1e-10
VARIANTS = ("hc0", "hc1", "hc3")


@dataclass(frozen=True)
class DesignMatrix:
    names: tuple
    X: np.ndarray
    y: np.ndarray
    groups: tuple
    base_country: CountryId

    @property
    def n_obs(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]


def encode_design(panel: Sequence, base_country=None, slopes: bool = True) -> DesignMatrix:
    """Build ``[1, temp, prec, dummies...]`` from panel observations.

    Dummy columns follow alphabetical country order and omit
    ``base_country`` (default: alphabetically first country). Rows keep
    the order of ``panel``. ``slopes=False`` drops temp and prec, leaving
    a dummies-only model.
    """
    if not panel:
        raise TooFewObservations("empty panel")
    countries = sorted({o.country for o in panel})
    base = countries[0] if base_country is None else as_country(base_country)
    if base not in countries:
        raise UnknownBaseCountry(f"base country {base} not in panel")
    others = [c for c in countries if c != base]
    col = {c: j for j, c in enumerate(others)}

    n = len(panel)
    lead = 3 if slopes else 1
    X = np.zeros((n, lead + len(others)))
    X[:, 0] = 1.0
    for i, o in enumerate(panel):
        if slopes:
            X[i, 1] = o.temp_c
            X[i, 2] = o.prec_mm
        if o.country != base:
            X[i, lead + col[o.country]] = 1.0
    names = (CONST, TEMP, PREC)[:lead] + tuple(c.name for c in others)
    y = np.array([o.agtfp for o in panel], dtype=float)
    return DesignMatrix(names, X, y, tuple(o.country for o in panel), base)


@dataclass(frozen=True)
class OLSFit:
    coef: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    q: np.ndarray
    r: np.ndarray
    pivot: np.ndarray


def _qr(X, names):
    q, r, piv = sla.qr(X, mode="economic", pivoting=True)
    d = np.abs(np.diag(r))
    tol = RANK_TOL * (d[0] if d.size else 0.0)
    if d.size and d[-1] <= tol:
        # name the first column that is (numerically) a combination of its predecessors
        d0 = np.abs(np.diag(sla.qr(X, mode="r")[0]))
        flagged = np.flatnonzero(d0 <= RANK_TOL * d0.max())
        bad = int(flagged[0]) if flagged.size else int(piv[-1])
        raise RankDeficient(names[bad])
    return q, r, piv


def ols_fit(design: DesignMatrix) -> OLSFit:
    """Least-squares coefficients via pivoted QR.

    Raises
    ------
    TooFewObservations
        If ``n_obs <= k``.
    RankDeficient
        If a design column is collinear with earlier ones; the column is named.
    """
    X, y = design.X, design.y
    n, k = X.shape
    if n <= k:
        raise TooFewObservations(f"need n_obs > k, got n_obs={n}, k={k}")
    q, r, piv = _qr(X, design.names)
    beta_p = sla.solve_triangular(r, q.T @ y)
    coef = np.empty(k)
    coef[piv] = beta_p
    fitted = X @ coef
    return OLSFit(coef, y - fitted, fitted, q, r, piv)


def robust_covariance(design: DesignMatrix, residuals, variant: str = "hc1",
                      qr: Optional[tuple] = None) -> np.ndarray:
    """Sandwich covariance ``(X'X)^-1 X' diag(w e^2) X (X'X)^-1``.

    ``hc0`` uses raw squared residuals, ``hc1`` scales by n/(n-k) and
    ``hc3`` divides each residual by (1 - leverage). The bread is applied
    through the triangular QR factor.
    """
    variant = variant.lower()
    if variant not in VARIANTS:
        raise ValueError(f"unknown robust variant {variant!r}; choose from {VARIANTS}")
    X = design.X
    e = np.asarray(residuals, dtype=float)
    n, k = X.shape
    if e.shape != (n,):
        raise ValueError(f"residuals must have length {n}")
    try:
        q, r, piv = qr if qr is not None else _qr(X, design.names)
    except RankDeficient as exc:
        raise SingularMoment(str(exc)) from exc

    if variant == "hc3":
        h = np.einsum("ij,ij->i", q, q)
        if np.any(h >= 1 - 1e-12):
            raise SingularMoment("observation with leverage 1; hc3 undefined")
        e = e / (1 - h)
    scale = n / (n - k) if variant == "hc1" else 1.0

    rinv = sla.solve_triangular(r, np.eye(k))
    qe = q * e[:, None]
    meat = qe.T @ qe
    v_p = scale * rinv @ meat @ rinv.T
    cov = np.empty((k, k))
    cov[np.ix_(piv, piv)] = v_p
    return (cov + cov.T) / 2


def stars(p: float) -> str:
    if not np.isfinite(p):
        return ""
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""


@dataclass(frozen=True)
class Inference:
    t: np.ndarray
    p: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    stars: tuple


def inference(coef, se, dof: int, alpha: float = 0.05, strict: bool = True) -> Inference:
    """Student-t tests and confidence intervals with ``dof`` degrees of freedom.

    With ``strict=False`` a zero standard error yields ``t = p = nan`` and a
    degenerate interval at the coefficient instead of raising.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if dof <= 0:
        raise TooFewObservations(f"dof must be positive, got {dof}")
    coef = np.asarray(coef, dtype=float)
    se = np.asarray(se, dtype=float)
    zero = ~(se > 0)
    if strict and zero.any():
        raise ZeroStandardError(f"{int(zero.sum())} regressor(s) with zero standard error")
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(zero, np.nan, coef / np.where(zero, 1.0, se))
    p = 2 * stats.t.sf(np.abs(t), dof)
    half = stats.t.ppf(1 - alpha / 2, dof) * np.where(zero, 0.0, se)
    return Inference(t, p, coef - half, coef + half, tuple(stars(x) for x in p))


VAR_TOL = 1e-20


def _corr2(a, b, what, scale=(0.0, 0.0)):
    """Squared correlation; variance below ``VAR_TOL * scale`` counts as zero."""
    a = a - a.mean()
    b = b - b.mean()
    saa, sbb = a @ a, b @ b
    if not (saa > VAR_TOL * scale[0] and sbb > VAR_TOL * scale[1]):
        raise DegenerateVariance(f"zero variance in {what} component")
    return float((a @ b) / np.sqrt(saa * sbb)) ** 2


def panel_r2(fitted, actual, groups, strict: bool = True):
    """Overall, within and between R-squared as squared correlations.

    Returns ``(overall, within, between)``. Degenerate components raise
    :class:`DegenerateVariance`, or become ``nan`` when ``strict=False``.
    """
    f = np.asarray(fitted, dtype=float)
    y = np.asarray(actual, dtype=float)
    keys = [as_country(g) for g in groups]
    _, inv = np.unique([g.key for g in keys], return_inverse=True)
    counts = np.bincount(inv)
    fm = np.bincount(inv, weights=f) / counts
    ym = np.bincount(inv, weights=y) / counts

    scale = (f @ f, y @ y)
    out = []
    for a, b, what in ((f, y, "overall"), (f - fm[inv], y - ym[inv], "within"),
                       (fm, ym, "between")):
        try:
            out.append(_corr2(a, b, what, scale))
        except DegenerateVariance:
            if strict:
                raise
            out.append(float("nan"))
    return tuple(out)


def fit_climate_model(panel: Sequence, base_country=None, variant: str = "hc1",
                      alpha: float = 0.05) -> RegressionFit:
    """Fit the climate model on ``panel`` and attach robust inference and R-squared."""
    design = encode_design(panel, base_country)
    ols = ols_fit(design)
    cov = robust_covariance(design, ols.residuals, variant, qr=(ols.q, ols.r, ols.pivot))
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    inf = inference(ols.coef, se, design.n_obs - design.k, alpha, strict=False)
    r2 = panel_r2(ols.fitted, design.y, design.groups, strict=False)
    return RegressionFit(
        names=design.names, coef=ols.coef, robust_se=se, t_value=inf.t,
        p_value=inf.p, ci_low=inf.ci_low, ci_high=inf.ci_high,
        base_country=design.base_country, n_obs=design.n_obs,
        r2_overall=r2[0], r2_within=r2[1], r2_between=r2[2],
        mean_dep=float(design.y.mean()), sd_dep=float(design.y.std(ddof=1)),
        covariance=cov, residuals=ols.residuals, fitted=ols.fitted,
        variant=variant, alpha=alpha)


def fit_from_table(terms: Sequence[str], coef, se, base_country, n_obs: int,
                   alpha: float = 0.05, **stats_kw) -> RegressionFit:
    """Rebuild a :class:`RegressionFit` from published coefficients and SEs.

    t, p and interval bounds are recomputed from ``coef`` and ``se`` with
    ``n_obs - len(terms)`` degrees of freedom.
    """
    order = _canonical_order(terms)
    terms = [terms[i] for i in order]
    coef = np.asarray(coef, dtype=float)[order]
    se = np.asarray(se, dtype=float)[order]
    inf = inference(coef, se, n_obs - len(terms), alpha, strict=False)
    return RegressionFit(
        names=tuple(terms), coef=coef, robust_se=se, t_value=inf.t, p_value=inf.p,
        ci_low=inf.ci_low, ci_high=inf.ci_high, base_country=base_country,
        n_obs=n_obs, alpha=alpha, **stats_kw)


def _canonical_order(terms):
    lead = {CONST: 0, TEMP: 1, PREC: 2}
    return sorted(range(len(terms)),
                  key=lambda i: (lead.get(terms[i], 3), CountryId(terms[i]).key
                                 if terms[i] not in lead else ""))


def coefficient_rows(fit: RegressionFit) -> list:
    """Rows in the published table layout: slopes, countries (base blank), Constant."""
    rows = []

    def row(name):
        i = fit.names.index(name)
        return {"term": name, "coef": fit.coef[i], "robust_se": fit.robust_se[i],
                "t": fit.t_value[i], "p": fit.p_value[i], "ci_low": fit.ci_low[i],
                "ci_high": fit.ci_high[i], "sig": stars(fit.p_value[i])}

    for name in (TEMP, PREC):
        if name in fit.names:
            rows.append(row(name))
    countries = [n for n in fit.names if n not in (CONST, TEMP, PREC)]
    blank = dict.fromkeys(("coef", "robust_se", "t", "p", "ci_low", "ci_high"))
    body = [(fit.base_country.key, {"term": fit.base_country.name, **blank, "sig": ""})]
    body += [(CountryId(n).key, row(n)) for n in countries]
    rows += [r for _, r in sorted(body, key=lambda kv: kv[0])]
    rows.append(row(CONST))
    return rows
