"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 input schema error, 3 numeric or
model error. Flags may also come from a ``key=value`` config file given
with ``--config``; command-line flags win.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from . import errors as E
from . import index_engine as ix
from . import ingest
from .econometrics import VARIANTS, coefficient_rows, fit_climate_model
from .ingest import PILLAR_DP, REGRESSION_DP, SCORE_DP, fixture, write_table
from .pillars import (build_pillar13, build_pillar14, pillar13_table,
                      pillar14_table)
from .transform import NormalizationSpec
from .validation import item_analysis, long_rows, triangular_rows

log = logging.getLogger("gaci")

EXIT_OK, EXIT_USAGE, EXIT_SCHEMA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _alpha(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return v


def _formats(text):
    fmts = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in fmts if f not in ("csv", "md")]
    if bad or not fmts:
        raise argparse.ArgumentTypeError(f"formats must be csv and/or md, got {text!r}")
    return fmts


def _flag(text, key):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"config key {key} expects true or false, got {text!r}")


def _add_common(p):
    p.add_argument("--out-dir", type=Path, default=Path("gaci_out"),
                   help="directory for reports (default: ./gaci_out)")
    p.add_argument("--format", dest="formats", type=_formats, default="csv",
                   help="comma-separated report formats: csv, md (default: csv)")


def _add_norm(p):
    p.add_argument("--lo", type=float, default=0.0, help="normalized lower bound (default 0)")
    p.add_argument("--hi", type=float, default=100.0, help="normalized upper bound (default 100)")
    p.add_argument("--epsilon", type=float, default=1e-9,
                   help="floor applied before taking logs (default 1e-9)")


def _add_board_inputs(p):
    p.add_argument("--pillars", type=Path, help="pillar matrix CSV (default: bundled 2019 fixture)")
    p.add_argument("--gci", type=Path, help="GCI scores CSV (country,score)")
    p.add_argument("--regions", type=Path, help="region map CSV (country,region)")
    p.add_argument("--development", type=Path,
                   help="development tags CSV (country,status)")
    p.add_argument("--threshold", type=float, default=4.0,
                   help="decline size counted as large in disparity stats (default 4)")
    p.add_argument("--fixtures", action="store_true",
                   help="fill every unset input with the bundled fixture")


def build_parser() -> Parser:
    parser = Parser(prog="gaci", description="Global Agricultural Competitiveness Index")
    parser.add_argument("--config", type=Path, help="key=value file of default flags")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=Parser)
    sub.required = True

    p = sub.add_parser("pillar13", help="agricultural performance pillar from indicators")
    p.add_argument("--indicators", type=Path,
                   help="raw (country,agtfp,aoi,value_added,world_gdp) or normalized "
                        "(country,agtfp,aoi,agcs) indicator CSV; default: bundled fixture")
    _add_norm(p)
    _add_common(p)
    p.set_defaults(func=cmd_pillar13)

    p = sub.add_parser("pillar14", help="climate-impact pillar from a panel or coefficients")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--panel", type=Path, help="panel CSV (country,year,agtfp,temp_c,prec_mm)")
    src.add_argument("--coefficients", type=Path,
                     help="coefficient CSV (term,coef,robust_se,...); default: bundled fixture")
    p.add_argument("--fit-stats", type=Path, help="statistic,value sidecar for --coefficients")
    p.add_argument("--n-obs", type=int, help="observations behind --coefficients")
    p.add_argument("--base-country", help="omitted dummy (default: alphabetically first)")
    p.add_argument("--robust", choices=VARIANTS, default="hc1", help="robust covariance (default hc1)")
    p.add_argument("--alpha", type=_alpha, default=0.05, help="CI level is 1 - alpha (default 0.05)")
    _add_norm(p)
    _add_common(p)
    p.set_defaults(func=cmd_pillar14)

    p = sub.add_parser("compute", help="GACI scores, ranks, GCI comparison and validity")
    _add_board_inputs(p)
    _add_common(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("validate", help="Pearson item analysis of the pillars against GACI")
    p.add_argument("--pillars", type=Path, help="pillar matrix CSV (default: bundled fixture)")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("report", help="region report and plot-data tables")
    _add_board_inputs(p)
    _add_common(p)
    p.set_defaults(func=cmd_report)
    parser.commands = sub.choices
    return parser


def _config_defaults(sub, cfg: dict) -> dict:
    """Map config keys (flag names or destinations) onto parser defaults."""
    actions = {}
    for a in sub._actions:
        actions[a.dest] = a
        for opt in a.option_strings:
            if opt.startswith("--"):
                actions[opt[2:].replace("-", "_")] = a
    actions.pop("help", None)
    unknown = sorted(set(cfg) - set(actions))
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    out = {}
    for k, v in cfg.items():
        a = actions[k]
        out[a.dest] = _flag(v, k) if isinstance(a, argparse._StoreTrueAction) else v
    return out


def read_config(path: Path) -> dict:
    out = {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _spec(args) -> NormalizationSpec:
    try:
        return NormalizationSpec(args.lo, args.hi, args.epsilon)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(args, stem, rows, dp, columns=None, md=None, column_decimals=None):
    written = []
    if "csv" in args.formats:
        written.append(write_table(rows, args.out_dir / f"{stem}.csv", dp, columns,
                                   column_decimals))
    if "md" in args.formats:
        path = args.out_dir / f"{stem}.md"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(md if md is not None else _markdown(rows, dp, columns), encoding="utf-8")
        written.append(path)
    for w in written:
        log.info("wrote %s", w)
    return written


def _markdown(rows, dp, columns=None):
    columns = list(columns or rows[0].keys())
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for r in rows:
        lines.append("| " + " | ".join(ingest.format_cell(r.get(c), dp) for c in columns) + " |")
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------

def cmd_pillar13(args) -> int:
    spec = _spec(args)
    path = args.indicators or fixture("pillar13_indicators.csv")
    if ingest.indicator_kind(path) == "raw":
        rows = build_pillar13(ingest.load_indicators(path), spec)
    else:
        rows = ingest.load_normalized_indicators(path)
    _emit(args, "pillar13_scores", pillar13_table(rows), SCORE_DP)
    print(f"pillar 13: {len(rows)} countries")
    return EXIT_OK


def cmd_pillar14(args) -> int:
    spec = _spec(args)
    if args.panel:
        panel = ingest.load_panel(args.panel)
        fit = fit_climate_model(panel, args.base_country, args.robust, args.alpha)
        if not ingest.is_balanced(panel):
            log.warning("panel is unbalanced")
        summary = [{"statistic": k, "value": v} for k, v in (
            ("n_obs", fit.n_obs), ("k", fit.k), ("mean_dep", fit.mean_dep),
            ("sd_dep", fit.sd_dep), ("r2_overall", fit.r2_overall),
            ("r2_within", fit.r2_within), ("r2_between", fit.r2_between),
            ("robust", fit.variant), ("base_country", fit.base_country.name))]
        _emit(args, "regression_summary", summary, REGRESSION_DP)
    else:
        path = args.coefficients or fixture("climate_coefficients.csv")
        stats = args.fit_stats
        if stats is None and args.coefficients is None:
            stats = fixture("climate_fit_stats.csv")
        fit = ingest.load_coefficients(path, stats, args.base_country, args.n_obs, args.alpha)
    _emit(args, "climate_regression", coefficient_rows(fit), REGRESSION_DP)
    rows = build_pillar14(fit, spec)
    _emit(args, "pillar14_scores", pillar14_table(rows, spec), SCORE_DP)
    neg = sum(r.sign < 0 for r in rows)
    print(f"pillar 14: {len(rows)} countries, {neg} negative, {len(rows) - neg} positive")
    return EXIT_OK


def _board_inputs(args):
    use_fx = args.fixtures or args.pillars is None
    matrix = ingest.load_pillar_matrix(args.pillars or fixture("pillars_2019.csv"))

    def pick(value, name):
        if value is not None:
            return value
        return fixture(name) if use_fx else None

    gci_path = pick(args.gci, "gci_scores.csv")
    reg_path = pick(args.regions, "regions.csv")
    dev_path = pick(args.development, "development.csv")
    gci = ingest.load_scores(gci_path) if gci_path else None
    regions = ingest.load_labels(reg_path, "region") if reg_path else None
    dev = ingest.load_labels(dev_path, "status") if dev_path else None
    ingest.DatasetBundle(matrix, gci_scores=gci, regions=regions)
    return matrix, gci, regions, dev


def cmd_compute(args) -> int:
    matrix, gci, regions, dev = _board_inputs(args)
    gaci = ix.compute_gaci(matrix)
    board = ix.rank(gaci)
    _emit(args, "gaci_scores", ix.gaci_rows(board), SCORE_DP)
    if gci:
        board = ix.compare(gaci, gci, regions)
        _emit(args, "gci_ranking", ix.gci_rows(board), SCORE_DP)
        _emit(args, "gaci_gci_diff", ix.diff_rows(board), SCORE_DP)
        st = ix.disparity_stats(board, dev, args.threshold)
        rows = [{"statistic": "n_negative", "value": st.n_negative},
                {"statistic": "n_positive", "value": st.n_positive},
                {"statistic": "n_zero", "value": st.n_zero}]
        rows += [{"statistic": f"declines_over_{args.threshold:g}_{tag}", "value": n}
                 for tag, n in st.declines_by_group.items()]
        _emit(args, "disparity", rows, SCORE_DP)
        print(f"GACI-GCI: {st.n_negative} negative, {st.n_positive} positive")
    else:
        print("no GCI scores given; comparison skipped", file=sys.stderr)
    if regions:
        board = ix.with_regions(board, regions)
        _write_region_report(args, board, regions)
    _emit(args, "scoreboard", ix.board_rows(board), SCORE_DP)
    _write_validity(args, matrix, gaci)
    lo, hi = min(gaci.values()), max(gaci.values())
    print(f"{len(gaci)} countries, range {lo:.2f}–{hi:.2f}")
    return EXIT_OK


def _write_region_report(args, board, regions):
    report = ix.region_report(board, regions)
    if not report:
        log.info("no region overlaps the score board; region report skipped")
        return
    _emit(args, "region_report", ix.region_rows(report), SCORE_DP,
          columns=["region", "country", "gaci", "gci", "diff", "min_diff", "max_diff"],
          md=ix.region_markdown(report))


def _write_validity(args, matrix, gaci):
    cm = item_analysis(matrix, gaci)
    _emit(args, "validity_matrix", long_rows(cm), 3)
    tri = triangular_rows(cm)
    _emit(args, "validity_table", tri, 3)
    return cm


def cmd_validate(args) -> int:
    matrix = ingest.load_pillar_matrix(args.pillars or fixture("pillars_2019.csv"))
    cm = _write_validity(args, matrix, ix.compute_gaci(matrix))
    with_gaci = cm.r[-1, :-1]
    print(f"pillar-GACI correlations: {with_gaci.min():.3f} to {with_gaci.max():.3f}")
    return EXIT_OK


def cmd_report(args) -> int:
    matrix, gci, regions, dev = _board_inputs(args)
    gaci = ix.compute_gaci(matrix)
    if not gci:
        raise UsageError("report needs GCI scores (--gci or --fixtures)")
    board = ix.compare(gaci, gci, regions)
    if regions:
        _write_region_report(args, board, regions)
    for stem, rows in ix.plot_data(board, dev, regions).items():
        if rows:
            write_table(rows, args.out_dir / "plot_data" / f"{stem}.csv", SCORE_DP)
    print(f"report: {len(board)} countries written to {args.out_dir}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if args.config:
            cfg = read_config(args.config)
            sub = parser.commands[args.command]
            sub.set_defaults(**_config_defaults(sub, cfg))
            args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"gaci: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gaci: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except E.SchemaError as exc:
        print(f"gaci: input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except E.NumericError as exc:
        print(f"gaci: numeric error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except E.GaciError as exc:
        print(f"gaci: error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
