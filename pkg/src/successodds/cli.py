"""Command-line front end.

Exit status: 0 success, 2 usage error, 3 data error, 4 degenerate statistics.
Reports go to stdout, diagnostics to stderr, each error prefixed by its code
(E_USAGE, E_PARSE, E_SCALE, E_DEGENERATE).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import worked_examples
from .effects import binary_effects, effects
from .inference import (
    DEFAULT_REPS,
    DegenerateError,
    brunner_munzel,
    ci_lambda_so,
    ci_lambda_wr_bootstrap,
    ci_theta_logit,
)
from .multigroup import detect_cycles, mixture_reference_effects, pairwise_effects, stratified_summary
from .report import (
    FORMATS,
    Report,
    Table,
    binary_bars_svg,
    effects_table,
    render_report,
)
from .values import CsvConfig, DataError, Sample, parse_csv, parse_distribution_spec

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DEGENERATE = 0, 2, 3, 4
COMMANDS = ("effects", "test", "pairwise", "stratified", "binary", "paper")
PAPER_TABLES = ("1", "2", "4", "5", "6", "7", "8", "fig1", "dice", "strata", "all")


class UsageError(ValueError):
    code = "E_USAGE"


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    dist: str | None = None
    value_column: str = "value"
    group_column: str = "group"
    stratum_column: str | None = None
    scale: str = "numeric(0)"
    skip_blank_rows: bool = False
    groups: list[str] = field(default_factory=list)
    level: float = 0.95
    alternative: str = "two-sided"
    reps: int = DEFAULT_REPS
    seed: int = 0
    format: str = "text"
    digits: int = 3
    svg: str | None = None
    q_a: str | None = None
    q_b: str | None = None
    table: str = "all"
    criterion: str = "theta"
    weighting: str = "equal"

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not 0.0 < self.level < 1.0:
            raise UsageError("level must lie in (0, 1)")
        if self.reps < 100:
            raise UsageError("reps must be at least 100")
        if not 0 <= self.digits <= 9:
            raise UsageError("digits must be in 0..9")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")
        if self.svg and self.command != "binary":
            raise UsageError("--svg is only available for the binary command")


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def _dataset(cfg: RunConfig):
    if not cfg.input:
        raise UsageError(f"{cfg.command} needs --input")
    path = Path(cfg.input)
    if not path.exists():
        raise UsageError(f"input file not found: {path}")
    return parse_csv(
        path.read_bytes(),
        CsvConfig(cfg.value_column, cfg.group_column, cfg.stratum_column, cfg.scale, cfg.skip_blank_rows),
    )


def _groups(cfg: RunConfig, need: int | None = None) -> list:
    """Samples (from --input) or distributions (from --dist) selected by --groups."""
    if cfg.dist:
        path = Path(cfg.dist)
        if not path.exists():
            raise UsageError(f"distribution file not found: {path}")
        items = {d.label: d for d in parse_distribution_spec(path.read_bytes())}
    else:
        items = _dataset(cfg).samples()
    names = cfg.groups or list(items)
    if need is not None:
        if cfg.groups and len(cfg.groups) != need:
            raise UsageError(f"{cfg.command} needs exactly {need} group names")
        names = names[:need]
        if len(names) < need:
            raise DataError(f"input has {len(names)} group(s), {need} needed")
    missing = [n for n in names if n not in items]
    if missing:
        raise DataError(f"unknown group(s): {', '.join(missing)}")
    return [items[n] for n in names]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_effects(cfg: RunConfig) -> Report:
    a, b = _groups(cfg, 2)
    e = effects(a, b)
    label = f"{a.label}, {b.label}"
    return Report(
        "effects",
        {"groups": [a.label, b.label], "effects": e.to_json()},
        [effects_table("", [(label, e)])],
    )


def _cmd_test(cfg: RunConfig) -> tuple[Report, int]:
    a, b = _groups(cfg, 2)
    if not (isinstance(a, Sample) and isinstance(b, Sample)):
        raise UsageError("test needs sample data (--input), not distributions")
    e = effects(a, b)
    res = brunner_munzel(a, b, cfg.alternative)
    payload = {
        "groups": [a.label, b.label],
        "effects": e.to_json(),
        "test": res.to_json(),
        "intervals": {},
    }
    notes = []
    status = EXIT_OK
    rows = []
    for name, fn in (("theta", ci_theta_logit), ("lambda_so", ci_lambda_so)):
        try:
            ci = fn(a, b, cfg.level)
        except DegenerateError as exc:
            payload["intervals"][name] = {"degenerate": True, "reason": str(exc)}
            notes.append(f"{name}: {exc}")
            status = EXIT_DEGENERATE
        else:
            payload["intervals"][name] = ci.to_json()
            rows.append([name, ci.estimate, ci.lower, ci.upper, ci.method])
    try:
        ci = ci_lambda_wr_bootstrap(a, b, cfg.level, cfg.reps, cfg.seed)
    except DegenerateError as exc:
        payload["intervals"]["lambda_wr"] = {"degenerate": True, "reason": str(exc)}
        notes.append(f"lambda_wr: {exc}")
    else:
        payload["intervals"]["lambda_wr"] = ci.to_json()
        rows.append(["lambda_wr", ci.estimate, ci.lower, ci.upper, ci.method])
    if res.degenerate:
        status = EXIT_DEGENERATE
        notes.insert(0, f"test degenerate: {res.reason}")
    test_row = [res.theta_hat, res.statistic, res.df, res.p_value]
    tables = [
        effects_table("", [(f"{a.label}, {b.label}", e)]),
        Table(f"Brunner-Munzel test ({res.alternative})", ["θ̂", "T", "df", "p"],
              [[c if c is not None else "–" for c in test_row]]),
    ]
    if rows:
        tables.append(Table(f"{cfg.level:g} confidence intervals", ["parameter", "estimate", "lower", "upper", "method"], rows))
    return Report("test", payload, tables, notes), status


def _cmd_pairwise(cfg: RunConfig) -> Report:
    groups = _groups(cfg)
    m = pairwise_effects(groups)
    t = detect_cycles(m, cfg.criterion)
    mix = mixture_reference_effects(groups)
    rows = [(f"{m.labels[i]}, {m.labels[j]}", m.cells[i][j]) for i in range(m.k) for j in range(m.k) if i != j]
    theta_rows = [[m.labels[i], *[m.cells[i][j].theta for j in range(m.k)]] for i in range(m.k)]
    notes = [
        "cycles: " + ("none (transitive)" if t.transitive else "; ".join(" → ".join(c + (c[0],)) for c in t.cycles))
    ]
    return Report(
        "pairwise",
        {
            "matrix": m.to_json(),
            "tournament": t.to_json(),
            "mixture_reference": [{"group": lbl, **e.to_json()} for lbl, e in zip(m.labels, mix)],
        },
        [
            effects_table("Pairwise effects", rows),
            Table("θ matrix (row vs column)", ["", *m.labels], theta_rows),
            effects_table("Against the pooled mixture", list(zip(m.labels, mix)), "Group"),
        ],
        notes,
    )


def _cmd_stratified(cfg: RunConfig) -> Report:
    if not cfg.stratum_column:
        raise UsageError("stratified needs --stratum-col")
    ds = _dataset(cfg)
    names = cfg.groups or ds.group_labels()[:2]
    if len(names) != 2:
        raise UsageError("stratified needs exactly two groups")
    strata = [(s, ds.sample(names[0], s), ds.sample(names[1], s)) for s in ds.stratum_labels()]
    summ = stratified_summary(strata, cfg.weighting)
    rows = [[s.label, s.effects.theta, s.effects.lambda_so, s.effects.lambda_wr] for s in summ.per_stratum]
    rows.append(["mean", summ.mean_theta, summ.mean_lambda_so, summ.mean_lambda_wr])
    rows.append(["pooled", summ.pooled.theta, summ.pooled.lambda_so, summ.pooled.lambda_wr])
    return Report(
        "stratified",
        {"groups": names, "summary": summ.to_json()},
        [Table(f"{names[0]} vs {names[1]} by stratum", ["Stratum", "θ", "λ_SO", "λ_WR"], rows)],
        list(summ.flags),
    )


def _cmd_binary(cfg: RunConfig) -> Report:
    if cfg.q_a is None or cfg.q_b is None:
        raise UsageError("binary needs --qa and --qb")
    e = binary_effects(cfg.q_a, cfg.q_b)
    qa, qb = Fraction(cfg.q_a), Fraction(cfg.q_b)
    svg = binary_bars_svg(qa, qb, digits=cfg.digits) if cfg.svg else None
    return Report(
        "binary",
        {"q_a": float(qa), "q_b": float(qb), "effects": e.to_json()},
        [Table("", ["q_A", "q_B", "p0", "θ", "λ_SO", "λ_WR = OR"],
               [[qa, qb, e.p_zero, e.theta, e.lambda_so, e.lambda_wr]])],
        svg=svg,
    )


def paper_tables(which: str) -> tuple[list[Table], dict]:
    """Tables and JSON payload reproducing the built-in examples."""
    tables: list[Table] = []
    payload: dict = {}
    want = (lambda k: True) if which == "all" else (lambda k: k == which)

    if want("1"):
        d = worked_examples.treatments()
        tables.append(Table("Outcome probabilities", ["Treatment", "x = 1", "x = 2", "x = 3"],
                            [[k, *v.probs] for k, v in d.items()]))
        payload["table1"] = {k: [float(p) for p in v.probs] for k, v in d.items()}
    if want("2"):
        rows = worked_examples.treatment_comparisons()
        tables.append(effects_table("Pairwise comparisons", rows))
        payload["table2"] = [{"comparison": lbl, **e.to_json()} for lbl, e in rows]
    if want("4"):
        cases = worked_examples.coarsening_cases()
        tables.append(Table("Measurements", ["Case", "A", "B"],
                            [[str(i), " ".join(a.texts()), " ".join(b.texts())] for i, (a, b) in enumerate(cases, 1)]))
        payload["table4"] = [{"case": i, "A": a.texts(), "B": b.texts()} for i, (a, b) in enumerate(cases, 1)]
    if want("5"):
        rows = worked_examples.coarsening_effects()
        tables.append(Table("Coarsening", ["Case", "p0", "Diff.", "θ", "λ_SO", "λ_WR"],
                            [[str(i), e.p_zero, diff, e.theta, e.lambda_so, e.lambda_wr] for i, e, diff in rows]))
        payload["table5"] = [{"case": i, "difference": float(diff), **e.to_json()} for i, e, diff in rows]
    if want("6") or want("7"):
        for key, title, dists in (
            ("6", "Scores 1-6", worked_examples.scores()),
            ("7", "Categories 3, 4, 5 combined", worked_examples.merged_scores()),
        ):
            if not want(key):
                continue
            a, b = dists["A"], dists["B"]
            cats = list(a.scale.categories)
            e = effects(a, b)
            tables.append(Table(title, ["Treatment", *cats], [["A", *a.probs], ["B", *b.probs]]))
            tables.append(effects_table("", [("A, B", e)]))
            payload[f"table{key}"] = {
                "categories": cats,
                "A": [float(p) for p in a.probs],
                "B": [float(p) for p in b.probs],
                "effects": e.to_json(),
            }
    if want("8"):
        rows = worked_examples.binary_table()
        tables.append(Table("Binary outcomes", ["q_A", "q_B", "p0", "λ_WR = OR", "λ_SO"],
                            [[qa, qb, e.p_zero, e.lambda_wr, e.lambda_so] for qa, qb, e in rows]))
        payload["table8"] = [{"q_a": float(qa), "q_b": float(qb), **e.to_json()} for qa, qb, e in rows]
    if want("fig1"):
        rows = worked_examples.equal_odds_rates()
        tables.append(Table("Binary outcomes with equal odds ratios", ["q_A", "q_B", "p0", "λ_WR", "λ_SO"],
                            [[qa, qb, e.p_zero, e.lambda_wr, e.lambda_so] for qa, qb, e in rows]))
        payload["fig1"] = [{"q_a": float(qa), "q_b": float(qb), **e.to_json()} for qa, qb, e in rows]
    if want("dice"):
        m, t, mix = worked_examples.dice_analysis()
        pairs = [("D1", "D2"), ("D2", "D3"), ("D3", "D1")]
        tables.append(effects_table("Non-transitive dice", [(f"{x}/{y}", m[x, y]) for x, y in pairs]))
        tables.append(effects_table("Dice against the pooled die", list(zip(m.labels, mix)), "Die"))
        payload["dice"] = {
            "pairs": [{"comparison": f"{x}/{y}", **m[x, y].to_json()} for x, y in pairs],
            "tournament": t.to_json(),
            "mixture_reference": [{"group": lbl, **e.to_json()} for lbl, e in zip(m.labels, mix)],
        }
    if want("strata"):
        s = worked_examples.dice_strata()
        rows = [[st.label, st.effects.theta, st.effects.lambda_so, st.effects.lambda_wr] for st in s.per_stratum]
        rows.append(["Means", s.mean_theta, s.mean_lambda_so, s.mean_lambda_wr])
        rows.append(["Pooled", s.pooled.theta, s.pooled.lambda_so, s.pooled.lambda_wr])
        tables.append(Table("Stratified dice", ["Stratum", "θ", "λ_SO", "λ_WR"], rows))
        payload["strata"] = s.to_json()
    return tables, payload


def _cmd_paper(cfg: RunConfig) -> Report:
    if cfg.table not in PAPER_TABLES:
        raise UsageError(f"--table must be one of {', '.join(PAPER_TABLES)}")
    tables, payload = paper_tables(cfg.table)
    return Report("paper", {"table": cfg.table, **payload}, tables)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute ``cfg`` and write the rendered report; returns the exit status."""
    stdout = stdout if stdout is not None else sys.stdout.buffer
    stderr = stderr if stderr is not None else sys.stderr
    status = EXIT_OK
    try:
        cfg.validate()
        if cfg.command == "test":
            report, status = _cmd_test(cfg)
        else:
            report = {
                "effects": _cmd_effects,
                "pairwise": _cmd_pairwise,
                "stratified": _cmd_stratified,
                "binary": _cmd_binary,
                "paper": _cmd_paper,
            }[cfg.command](cfg)
    except UsageError as exc:
        print(f"E_USAGE: {exc}", file=stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"{exc.code}: {exc}", file=stderr)
        return EXIT_DATA
    except DegenerateError as exc:
        print(f"E_DEGENERATE: {exc}", file=stderr)
        return EXIT_DEGENERATE

    if report.svg is not None:
        try:
            Path(cfg.svg).write_text(report.svg, encoding="utf-8")
        except OSError as exc:
            print(f"E_USAGE: cannot write {cfg.svg}: {exc}", file=stderr)
            return EXIT_USAGE
    stdout.write(render_report(report, cfg.format, cfg.digits))
    if status == EXIT_DEGENERATE:
        for n in report.notes:
            print(f"E_DEGENERATE: {n}", file=stderr)
    return status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"E_USAGE: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--digits", type=int, default=3, help="display rounding (0-9)")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", help="CSV file with a header row")
    data.add_argument("--value-col", default="value")
    data.add_argument("--group-col", default="group")
    data.add_argument("--stratum-col")
    data.add_argument("--scale", default="numeric(0)", help='"numeric(D)" or "ordinal([c1,...,ck])"')
    data.add_argument("--skip-blank-rows", action="store_true")
    data.add_argument("--groups", nargs="+", default=[], metavar="LABEL")

    infer = argparse.ArgumentParser(add_help=False)
    infer.add_argument("--alpha", type=float, default=0.05, help="1 - confidence level")
    infer.add_argument("--reps", type=int, default=DEFAULT_REPS)
    infer.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="successodds", description="Relative effect, success odds and win ratio.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("effects", parents=[common, data], help="effects for two groups")
    e.add_argument("--dist", help="JSON distribution spec instead of --input")
    t = sub.add_parser("test", parents=[common, data, infer], help="Brunner-Munzel test and intervals")
    t.add_argument("--alternative", choices=("two-sided", "greater", "less"), default="two-sided")
    pw = sub.add_parser("pairwise", parents=[common, data], help="all pairwise effects and dominance cycles")
    pw.add_argument("--dist", help="JSON distribution spec instead of --input")
    pw.add_argument("--criterion", choices=("theta", "lambda_wr"), default="theta")
    st = sub.add_parser("stratified", parents=[common, data], help="per-stratum effects and averages")
    st.add_argument("--weighting", choices=("equal", "size"), default="equal")
    b = sub.add_parser("binary", parents=[common], help="effects for two success rates")
    b.add_argument("--qa", required=True)
    b.add_argument("--qb", required=True)
    b.add_argument("--svg", help="write a stacked-bar SVG here")
    pp = sub.add_parser("paper", parents=[common], help="reproduce the built-in example tables")
    pp.add_argument("--table", default="all", choices=PAPER_TABLES)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    get = lambda k, d=None: getattr(ns, k, d)  # noqa: E731
    alpha = get("alpha", 0.05)
    return RunConfig(
        command=ns.command,
        input=get("input"),
        dist=get("dist"),
        value_column=get("value_col", "value"),
        group_column=get("group_col", "group"),
        stratum_column=get("stratum_col"),
        scale=get("scale", "numeric(0)"),
        skip_blank_rows=get("skip_blank_rows", False),
        groups=get("groups", []) or [],
        level=1.0 - alpha,
        alternative=get("alternative", "two-sided"),
        reps=get("reps", DEFAULT_REPS),
        seed=get("seed", 0),
        format=ns.format,
        digits=ns.digits,
        svg=get("svg"),
        q_a=get("qa"),
        q_b=get("qb"),
        table=get("table", "all"),
        criterion=get("criterion", "theta"),
        weighting=get("weighting", "equal"),
    )


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    raise SystemExit(main())
