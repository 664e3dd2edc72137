"""Exit criteria, one test each; the terminal summary prints a pass/fail line per criterion."""
import time

import numpy as np
import pytest

from gaci import ingest
from gaci.econometrics import encode_design, fit_climate_model, stars
from gaci.index_engine import compare, compute_gaci, disparity_stats, rank
from gaci.model import PREC, TEMP, CountryId, PillarMatrix
from gaci.pillars import build_pillar14, pillar14_table
from gaci.transform import minmax_normalize
from gaci.validation import item_analysis, pearson

from oracles import normal_equations, sandwich
from synth import make_panel

acceptance = pytest.mark.acceptance


def _worst(errors):
    """(country, error) with the largest error."""
    name = max(errors, key=errors.get)
    return name, errors[name]


@acceptance("AC1", "pillar-14 normalized scores match the published table")
def test_ac1_pillar14_golden(golden, record_property):
    t0 = time.perf_counter()
    fit = ingest.load_coefficients(ingest.fixture("climate_coefficients.csv"),
                                   ingest.fixture("climate_fit_stats.csv"))
    rows = build_pillar14(fit)
    table = pillar14_table(rows)
    elapsed = time.perf_counter() - t0

    err = {r["country"]: abs(r["d1_normalized"] - float(golden["pillar14"][r["country"]]["d1_normalized"]))
           for r in table}
    gap = max(abs(r["d1_normalized"] - r["d2_normalized"]) for r in table)
    worst = _worst(err)
    record_property("detail", f"{len(err)} rows, max err {worst[1]:.4f} ({worst[0]}), "
                              f"d1/d2 gap {gap:.1e}, {elapsed * 1000:.0f} ms")
    by = {r["country"]: r["d1_normalized"] for r in table}
    assert len(table) == 78
    assert by["Albania"] == pytest.approx(51.581, abs=0.01)
    assert by["Bahrain"] == pytest.approx(0.0, abs=0.01)
    assert by["Russian Federation"] == pytest.approx(100.0, abs=0.01)
    assert worst[1] <= 0.01
    assert gap <= 1e-9
    assert elapsed < 1.0


@acceptance("AC2", "pillar-14 signs: 48 negative, 30 positive; signed values match the pillar matrix")
def test_ac2_signs(table5_fit, pillars, record_property):
    rows = build_pillar14(table5_fit)
    neg = sum(r.signed_score < 0 or r.sign < 0 for r in rows)
    pos = len(rows) - neg
    err = {r.country.name: abs(r.signed_score - pillars.row(r.country)[13]) for r in rows}
    bad = {c: round(e, 4) for c, e in err.items() if e > 0.01}
    worst = _worst(err)
    record_property("detail", f"{neg} negative / {pos} positive, max err {worst[1]:.4f} "
                              f"({worst[0]}), over 0.01: {bad or 'none'}")
    assert (neg, pos) == (48, 30)
    assert not bad


@acceptance("AC3", "GACI scores and ranking match the published ranking table")
def test_ac3_gaci_golden(pillars, golden, record_property):
    board = rank(compute_gaci(pillars))
    err = {e.country.name: abs(e.gaci_score - float(golden["gaci"][e.country.name]["score"]))
           for e in board}
    rank_mismatch = [e.country.name for e in board
                     if e.gaci_rank != int(golden["gaci"][e.country.name]["rank"])]
    worst = _worst(err)
    first, last = board.entries[0], board.entries[-1]
    record_property("detail", f"max err {worst[1]:.4f} ({worst[0]}), rank mismatches "
                              f"{len(rank_mismatch)}, #1 {first.country} {first.gaci_score:.3f}, "
                              f"#78 {last.country} {last.gaci_score:.3f}")
    assert worst[1] <= 0.02
    assert rank_mismatch == []
    assert first.country == CountryId("United States")
    assert first.gaci_score == pytest.approx(80.676, abs=0.02)
    assert last.country == CountryId("Mozambique")
    assert last.gaci_score == pytest.approx(32.623, abs=0.02)


@acceptance("AC4", "GACI-GCI differences: 74 negative, 4 positive")
def test_ac4_differences(pillars, gci, golden, record_property):
    board = compare(compute_gaci(pillars), gci)
    err = {e.country.name: abs(e.diff - float(golden["diffs"][e.country.name]["diff"]))
           for e in board}
    stats = disparity_stats(board)
    positives = {e.country.name for e in board if e.diff > 0}
    worst = _worst(err)
    record_property("detail", f"max err {worst[1]:.4f} ({worst[0]}), {stats.n_negative} negative / "
                              f"{stats.n_positive} positive: {', '.join(sorted(positives))}")
    assert len(err) == 78
    assert worst[1] <= 0.02
    assert (stats.n_negative, stats.n_positive) == (74, 4)
    assert positives == {"Kazakhstan", "Lesotho", "Mongolia", "Russian Federation"}


@acceptance("AC5", "pillar-13 scores equal the mean of the three indicators")
def test_ac5_pillar13_aggregation(golden, record_property):
    rows = ingest.load_normalized_indicators(ingest.fixture("pillar13_indicators.csv"))
    err = {r.country.name: abs(r.score - float(golden["pillar13"][r.country.name]["pillar13"]))
           for r in rows}
    by = {r.country.name: r.score for r in rows}
    worst = _worst(err)
    record_property("detail", f"{len(rows)} rows, max err {worst[1]:.5f} ({worst[0]}), "
                              f"Albania {by['Albania']:.3f}, China {by['China']:.3f}")
    assert len(rows) == 78
    assert worst[1] <= 0.001
    assert by["Albania"] == pytest.approx(31.660, abs=0.001)
    assert by["China"] == pytest.approx(72.937, abs=0.001)


@acceptance("AC6", "item-analysis correlations match the published matrix")
def test_ac6_item_analysis(pillars, record_property):
    import csv

    cm = item_analysis(pillars, compute_gaci(pillars))
    with open(ingest.fixture("validity_matrix.csv"), newline="") as fh:
        published = [(r["row"], r["col"], float(r["r"])) for r in csv.DictReader(fh)]
    err = {f"{a}/{b}": abs(cm[a, b] - r) for a, b, r in published}
    col = cm.r[-1, :-1]
    worst = _worst(err)
    record_property("detail", f"{len(err)} cells, max err {worst[1]:.4f} ({worst[0]}), "
                              f"pillar-GACI r in [{col.min():.3f}, {col.max():.3f}]")
    assert len(err) == 105
    assert worst[1] <= 0.015
    assert col.min() >= 0.57 and col.max() <= 0.92


@acceptance("AC7", "regression oracle suite on 50 synthetic panels")
def test_ac7_regression_oracles(record_property):
    rng = np.random.default_rng(20240611)
    t0 = time.perf_counter()
    worst = {"ols": 0.0, "hc1": 0.0, "fwl": 0.0, "truth": 0.0}
    for _ in range(50):
        n_c, n_t = int(rng.integers(2, 21)), int(rng.integers(3, 11))
        panel, _ = make_panel(rng, n_c, n_t, noise=float(rng.uniform(0.5, 5)), hetero=True)
        d = encode_design(panel)
        fit = fit_climate_model(panel)

        ref = normal_equations(d.X, d.y)
        worst["ols"] = max(worst["ols"], np.max(np.abs(fit.coef - ref) / np.maximum(1, np.abs(ref))))

        V = sandwich(d.X, fit.residuals, "hc1")
        worst["hc1"] = max(worst["hc1"], np.max(np.abs(fit.covariance - V)) / np.max(np.abs(V)))

        Z = np.array([[o.agtfp, o.temp_c, o.prec_mm] for o in panel])
        g = np.array([o.country.key for o in panel])
        for key in np.unique(g):
            Z[g == key] -= Z[g == key].mean(axis=0)
        slopes = np.linalg.lstsq(Z[:, 1:], Z[:, 0], rcond=None)[0]
        got = np.array([fit[TEMP], fit[PREC]])
        worst["fwl"] = max(worst["fwl"], np.max(np.abs(got - slopes) / np.maximum(1, np.abs(slopes))))

        # intercept large enough that no noise-free AgTFP value is clipped
        beta = (float(rng.uniform(150, 200)), float(rng.uniform(-2, 2)), float(rng.uniform(-0.01, 0.01)))
        clean, effects = make_panel(rng, n_c, n_t, beta=beta, noise=0.0)
        cf = fit_climate_model(clean)
        eff = cf.country_effects()
        got = np.array([cf.intercept, cf[TEMP], cf[PREC]]
                       + [eff[c] for c in sorted(eff, key=lambda c: c.key)])
        truth = np.concatenate([beta, effects])
        worst["truth"] = max(worst["truth"], np.max(np.abs(got - truth) / np.maximum(1, np.abs(truth))))
    elapsed = time.perf_counter() - t0
    record_property("detail", f"ols {worst['ols']:.1e}, hc1 {worst['hc1']:.1e}, "
                              f"fwl {worst['fwl']:.1e}, zero-noise {worst['truth']:.1e}, "
                              f"{elapsed:.1f} s")
    assert worst["ols"] <= 1e-8
    assert worst["hc1"] <= 1e-10
    assert worst["fwl"] <= 1e-8
    assert worst["truth"] <= 1e-8
    assert elapsed < 30


@acceptance("AC8", "property suite, 1000 randomized cases per property")
def test_ac8_properties(tmp_path, record_property):
    rng = np.random.default_rng(8)
    failures = {"minmax": 0, "pearson": 0, "gaci_shift": 0, "csv": 0}
    for i in range(1000):
        n = int(rng.integers(2, 50))
        v = rng.uniform(-100, 100, n)
        scale, shift = 10 ** rng.uniform(-3, 3), rng.uniform(-1e3, 1e3)
        a, b = minmax_normalize(v), minmax_normalize(v * scale + shift)
        if not (np.allclose(a, b, rtol=0, atol=1e-8) and a.min() == 0 and a.max() == 100):
            failures["minmax"] += 1

        m = max(n, 3)
        x, y = rng.normal(size=m), rng.normal(size=m)
        k = 10 ** rng.uniform(-2, 2)
        r0 = pearson(x, y)[0]
        r1 = pearson(k * x + k * rng.uniform(-100, 100), y)[0]
        r2 = pearson(x, k * y + k * rng.uniform(-100, 100))[0]
        if abs(r1 - r0) > 1e-12 or abs(r2 - r0) > 1e-12:
            failures["pearson"] += 1

        vals = rng.uniform(0, 90, (n, 14))
        vals[:, 13] = rng.uniform(-90, 90, n)
        c = float(rng.uniform(0, 10))
        names = tuple(f"C{j:02d}" for j in range(n))
        g0 = compute_gaci(PillarMatrix(names, vals))
        g1 = compute_gaci(PillarMatrix(names, vals + c))
        same_order = [e.country for e in rank(g0)] == [e.country for e in rank(g1)]
        if not same_order or max(abs(g1[k_] - g0[k_] - c) for k_ in g0) > 1e-12:
            failures["gaci_shift"] += 1

        scores = {name: float(s) for name, s in zip(names, rng.uniform(-1e4, 1e4, n))}
        p1 = ingest.write_scores(scores, tmp_path / "a.csv")
        back = ingest.load_scores(p1)
        p2 = ingest.write_scores({str(c_): s for c_, s in back.items()}, tmp_path / "b.csv")
        ok = (list(back) == [CountryId(s) for s in scores]
              and all(abs(back[CountryId(k_)] - s) <= 5e-4 for k_, s in scores.items())
              and p1.read_bytes() == p2.read_bytes())
        if not ok:
            failures["csv"] += 1
    record_property("detail", "failures " + ", ".join(f"{k}={v}" for k, v in failures.items()))
    assert sum(failures.values()) == 0


@acceptance("AC9", "significance stars on the climate coefficient table")
def test_ac9_stars(table5_fit, record_property):
    star = {n: stars(p) for n, p in zip(table5_fit.names, table5_fit.p_value)}
    base = table5_fit.base_country.name
    countries = [n for n in star if n not in ("Constant", TEMP, PREC)] + [base]
    special = {"Botswana": "", "Lebanon": "", "Rwanda": "*"}
    # the base country's row is blank (no dummy); it is counted among the remaining rows
    remaining = [c for c in countries if c not in special]
    wrong = [c for c in remaining if c != base and star[c] != "***"]
    significant = sum(1 for c in countries if c == base or star[c] != "")
    record_property("detail", f"{len(countries)} country rows; Botswana '{star['Botswana']}', "
                              f"Lebanon '{star['Lebanon']}', Rwanda '{star['Rwanda']}'; "
                              f"{len(remaining)} remaining rows ({len(remaining) - 1} '***' plus "
                              f"blank base {base}); {significant}/78 significant at 10%")
    assert len(countries) == 78
    assert {c: star[c] for c in special} == special
    assert len(remaining) == 75
    assert wrong == []
    assert significant == 76
