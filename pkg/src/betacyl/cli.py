"""Command-line front end: ``betacyl <subcommand> --beta <spec> ...``.

Delimited output (CSV or JSON) goes to stdout or ``--output``; figures are
written only when ``--figure`` is given.  Exit status is 0 on success, 1 on
a failed check or a domain error, 2 on a usage error.  Errors are reported
on stderr as a JSON object with ``schema_version``, ``error``, ``message``
and ``details``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .config import RunConfig, load_config
from .errors import BetaError, ConfigParseError, InvalidBetaSpec, NotAdmissible
from .expansion import (
    digits,
    expansion_of_one,
    format_word,
    parse_word,
    point_stream,
    zero_run_table,
)
from .irregular import (
    build_irregular,
    density_summary,
    density_trace,
    schedule,
    seed_distance_ok,
    spectrum_dim,
    verify_spike,
)
from .language import _matcher, cylinder, enumerate_words, is_admissible, partition_oracle
from .reals import Beta, bits_for, make_beta, parse_rational
from .report import SCHEMA_VERSION, csv_text, enclosure_pair, fmt_exact, json_text
from .verify import CHECKS, construction_budget, verify_suite

USAGE_ERRORS = (InvalidBetaSpec, ConfigParseError)
TRACE_COLUMNS = ("n", "d_lo", "d_hi", "k_star", "t_aux", "gamma", "full")


class _Output:
    """Collects the delimited result of a subcommand and writes it once."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    def emit(self, payload: dict, rows: list[dict], columns: Sequence[str]) -> None:
        text = json_text(payload) if self.cfg.format == "json" else csv_text(rows, columns)
        if self.cfg.output:
            path = Path(self.cfg.output)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)

    def figure_path(self, flag: str | None, command: str) -> Path | None:
        if flag is None:
            return None
        if flag:
            return Path(flag)
        if self.cfg.output:
            return Path(self.cfg.output).with_suffix(".png")
        return Path(f"{command}.png")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except InvalidBetaSpec as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _word(text: str):
    try:
        return parse_word(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


# --------------------------------------------------------------------------
# subcommands


def cmd_expand(args, beta: Beta, cfg: RunConfig, out: _Output) -> int:
    w = digits(beta, args.x, args.n, greedy=args.greedy)
    columns = [f"d{i}" for i in range(1, args.n + 1)]
    out.emit({"beta": beta.spec, "x": fmt_exact(args.x), "n": args.n, "greedy": args.greedy,
              "digits": list(w)}, [dict(zip(columns, w))], columns)
    return 0


def cmd_one(args, beta: Beta, cfg: RunConfig, out: _Output) -> int:
    w = expansion_of_one(beta, args.n)
    enc = beta.enclosure_bits(min(beta.budget, bits_for(cfg.eps)))
    rows = [{"n": i, "digit": d} for i, d in enumerate(w, start=1)]
    out.emit({"beta": beta.spec, "beta_enclosure": enclosure_pair(enc), "n": args.n,
              "digits": list(w)}, rows, ("n", "digit"))
    return 0


def cmd_zeroruns(args, beta: Beta, cfg: RunConfig, out: _Output) -> int:
    table = zero_run_table(beta, args.N, cfg.run_budget)
    rows = [{"n": n, "t": t, "gamma": g, "gamma_over_n": fmt_exact(ratio)}
            for (n, t, g), ratio in zip(table.records, table.gamma_ratio)]
    out.emit({"beta": beta.spec, "N": args.N, "lambda_hat": fmt_exact(table.lambda_hat),
              "lambda_hat_approx": float(table.lambda_hat), "lambda_hat_at": table.lambda_hat_at,
              "note": table.note, "records": rows}, rows, ("n", "t", "gamma", "gamma_over_n"))
    fig = out.figure_path(args.figure, "zeroruns")
    if fig is not None:
        from .plotting import plot_zero_runs

        plot_zero_runs(table, fig, beta.spec)
    return 0


def _first_bad_prefix(beta: Beta, w) -> int | None:
    m = _matcher(beta, len(w))
    state = 0
    for i, d in enumerate(w, start=1):
        state = m.step(state, d)
        if state is None:
            return i
    return None


def cmd_admissible(args, beta: Beta, cfg: RunConfig, out: _Output) -> int:
    w = args.word
    bad = _first_bad_prefix(beta, w) if all(0 <= d < beta.alphabet_size for d in w) else 0
    row = {"word": format_word(w), "admissible": bad is None,
           "first_bad_prefix": bad if bad else None}
    out.emit(row | {"beta": beta.spec}, [row], ("word", "admissible", "first_bad_prefix"))
    return 0


def cmd_enumerate(args, beta: Beta, cfg: RunConfig, out: _Output) -> int:
    words = enumerate_words(beta, args.n, cfg.enum_cap).words
    if args.oracle:
        oracle = {e.word: e.length for e in partition_oracle(beta, args.n, cfg.enum_cap)}
        rows = []
        for w in words:
            info = cylinder(beta, w)
            if beta.exact:
                agree = (info.length - oracle[w]).is_zero()
            else:
                agree = info.length.enclosure(80).intersects(oracle[w].enclosure(80))
            enc = oracle[w].enclosure(64)
            rows.append(info.row() | {"oracle_lo": enc.lo, "oracle_hi": enc.hi, "agree": agree})
        columns = ("word", "len_lo", "len_hi", "oracle_lo", "oracle_hi", "k_star", "agree")
    else:
        rows = [{"word": format_word(w)} for w in words]
        columns = ("word",)
    out.emit({"beta": beta.spec, "n": args.n, "count": len(words), "rows": rows}, rows, columns)
    return 0 if all(r.get("agree", True) for r in rows) else 1


def cmd_cylinder(args, beta: Beta, cfg: RunConfig, out: _Output) -> int:
    if not is_admissible(beta, args.word):
        raise NotAdmissible("word is not admissible", word=args.word)
    info = cylinder(beta, args.word)
    row = info.row()
    columns = ("word", "left_lo", "left_hi", "len_lo", "len_hi", "k_star", "full")
    enc = info.enclosures()
    out.emit({"beta": beta.spec, "word": row["word"], "left": enclosure_pair(enc["left"]),
              "right": enclosure_pair(enc["right"]), "length": enclosure_pair(enc["length"]),
              "k_star": info.k_star, "full": info.fullness.value}, [row], columns)
    return 0


def _construction(args, beta: Beta, cfg: RunConfig):
    if args.seed is not None:
        seed = args.seed
    elif args.seed_x is not None:
        # x = 0 seeds with the all-zero block; it is never expanded
        seed = (0,) * args.ell if args.seed_x == 0 else digits(beta, args.seed_x, args.ell)
    else:
        seed = (1,)
    sched = schedule(beta, seed, cfg.K, cfg.r, cfg.search_cap, cfg.growth, cfg.depth_cap,
                     run_budget=max(cfg.run_budget, 1 << 16))
    stream, value = build_irregular(beta, sched)
    trace = density_trace(beta, stream, sched.length,
                          run_budget=max(cfg.run_budget, 2 * sched.length))
    return sched, stream, value, trace


def cmd_trace(args, beta: Beta, cfg: RunConfig, out: _Output) -> int:
    sched = None
    if args.construct:
        sched, stream, _, trace = _construction(args, beta, cfg)
        if args.N and args.N < trace.N:
            trace.records = trace.records[:args.N]
    else:
        if args.x is None:
            raise argparse.ArgumentTypeError("trace needs --x or --construct")
        trace = density_trace(beta, point_stream(beta, args.x), args.N or 200, cfg.run_budget)
    tail = args.tail_start or max(1, trace.N // 2)
    summary = density_summary(trace, tail, cfg.gap_tol, beta=beta)
    rows = [r.row() for r in trace.records]
    payload = {"beta": beta.spec, "source": trace.source, "columns": list(TRACE_COLUMNS),
               "records": [{"n": r.n, "d": enclosure_pair(r.d), "k_star": r.k_star, "t_aux": r.t_aux,
                            "gamma": r.gamma, "full": r.full, "exact": r.exact} for r in trace.records],
               "summary": summary.as_dict()}
    if sched is not None:
        payload["schedule"] = sched.as_dict()
    out.emit(payload, rows, TRACE_COLUMNS)
    fig = out.figure_path(args.figure, "trace")
    if fig is not None:
        from .plotting import plot_trace

        plot_trace(trace, fig, sched, float(sched.lambda_hat) if sched else None)
    return 0


def cmd_construct(args, beta: Beta, cfg: RunConfig, out: _Output) -> int:
    sched, stream, value, trace = _construction(args, beta, cfg)
    report = verify_spike(beta, sched, trace, raise_on_failure=False)
    near = seed_distance_ok(beta, sched, value)
    rows = []
    for s in report.spikes:
        rec = trace.at(s["n"])
        rows.append({"k": s["k"], "h": sched.h[s["k"] - 1], "m": sched.m[s["k"] - 1], "t_m": s["t_m"],
                     "n": s["n"], "d_lo": rec.d_lo, "d_hi": rec.d_hi, "lower": s["lower"],
                     "upper": s["upper"], "ok": s["ok"]})
    payload = {"schedule": sched.as_dict(), "value": enclosure_pair(value),
               "digits_length": len(stream.word), "spike_report": report.as_dict(),
               "within_seed_radius": near}
    out.emit(payload, rows, ("k", "h", "m", "t_m", "n", "d_lo", "d_hi", "lower", "upper", "ok"))
    fig = out.figure_path(args.figure, "construct")
    if fig is not None:
        from .plotting import plot_trace

        plot_trace(trace, fig, sched, float(sched.lambda_hat))
    if report.skipped:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "warning": report.reason}), file=sys.stderr)
    return 0 if report.ok and near else 1


def cmd_spectrum(args, beta, cfg: RunConfig, out: _Output) -> int:
    dim = spectrum_dim(args.lam, args.delta)
    row = {"lambda": fmt_exact(args.lam), "delta": fmt_exact(args.delta), "dim": repr(float(dim)),
           "dim_exact": fmt_exact(dim)}
    out.emit(row, [row], ("lambda", "delta", "dim", "dim_exact"))
    return 0


def cmd_verify(args, beta, cfg: RunConfig, out: _Output) -> int:
    report = verify_suite(args.beta, cfg, fault=args.inject_fault, checks=args.check)
    rows = [r.as_dict(args.timings) for r in report.results]
    csv_rows = [r | {"counterexample": json.dumps(r["counterexample"], sort_keys=True)
                     if r["counterexample"] else ""} for r in rows]
    columns = ["check", "beta", "status", "detail", "counterexample"] + (["seconds"] if args.timings else [])
    settings = {k: v for k, v in cfg.as_dict().items() if k not in ("output", "format")}
    out.emit({"ok": report.ok, "counts": report.counts(), "config": settings, "results": rows},
             csv_rows, columns)
    return 0 if report.ok else 1


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, beta: bool = True) -> None:
    if beta:
        p.add_argument("--beta", required=True, help="dec:<d>, poly:<c0,..,cd>@[lo,hi] or dseq:<path>")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--eps", type=_rational, help="enclosure width for beta")
    p.add_argument("--budget", type=_positive, help="refinement budget in bits")
    p.add_argument("--run-budget", dest="run_budget", type=_positive, help="digits scanned per zero run")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--output", help="write the result here instead of stdout")


def _construction_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--seed", type=_word, help="admissible seed word, e.g. 1,0")
    g.add_argument("--seed-x", dest="seed_x", type=_rational,
                   help="seed from the first --ell digits of x (x = 0 gives 0^ell)")
    p.add_argument("--ell", type=_positive, default=1, help="seed length with --seed-x")
    _schedule_flags(p)


def _schedule_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-K", dest="K", type=_positive, help="number of blocks")
    p.add_argument("--ratio", dest="r", type=_positive, help="m_k >= ratio * h_k")
    p.add_argument("--search-cap", dest="search_cap", type=_positive)
    p.add_argument("--growth", type=_positive)
    p.add_argument("--depth-cap", dest="depth_cap", type=_positive)


def _figure_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--figure", nargs="?", const="", default=None,
                   help="also write a PNG (default path: next to --output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betacyl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="digits of x")
    _common(p)
    p.add_argument("--x", type=_rational, required=True, help="point in (0,1], as p/q or a decimal")
    p.add_argument("-n", type=_positive, default=20)
    p.add_argument("--greedy", action="store_true", help="greedy (floor) convention instead of T")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("one", help="expansion of 1")
    _common(p)
    p.add_argument("-n", type=_positive, default=30)
    p.set_defaults(func=cmd_one)

    p = sub.add_parser("zeroruns", help="t_n, Gamma_n and lambda_hat")
    _common(p)
    p.add_argument("-N", type=_positive, default=400)
    _figure_flag(p)
    p.set_defaults(func=cmd_zeroruns)

    p = sub.add_parser("admissible", help="check one word")
    _common(p)
    p.add_argument("--word", type=_word, required=True)
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("enumerate", help="admissible words of length n")
    _common(p)
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("--cap", dest="enum_cap", type=_positive, help="longest enumerable word")
    p.add_argument("--oracle", action="store_true", help="compare lengths with the partition oracle")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("cylinder", help="geometry of one cylinder")
    _common(p)
    p.add_argument("--word", type=_word, required=True)
    p.set_defaults(func=cmd_cylinder)

    p = sub.add_parser("trace", help="density trace of x or of a constructed point")
    _common(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--x", type=_rational)
    src.add_argument("--construct", action="store_true")
    p.add_argument("-N", type=_positive, help="trace length (default 200, or the construction length)")
    p.add_argument("--tail-start", dest="tail_start", type=_positive)
    p.add_argument("--gap-tol", dest="gap_tol", type=float)
    _construction_flags(p)
    _figure_flag(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("construct", help="schedule, build and verify an irregular point")
    _common(p)
    _construction_flags(p)
    _figure_flag(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("spectrum", help="(lambda + 1 - delta) / (delta * lambda)")
    p.add_argument("--lambda", dest="lam", type=_rational, required=True)
    p.add_argument("--delta", type=_rational, required=True)
    _common(p, beta=False)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="run the property suite")
    p.add_argument("--beta", action="append", required=True, help="repeat for several bases")
    _common(p, beta=False)
    p.add_argument("--check", action="append", choices=sorted(CHECKS), help="restrict to these checks")
    p.add_argument("--inject-fault", dest="inject_fault", choices=("kstar",),
                   help="negative control: shift k* by one in the partition check")
    p.add_argument("--timings", action="store_true", help="include per-check seconds")
    p.add_argument("--cap", dest="enum_cap", type=_positive)
    _schedule_flags(p)
    p.set_defaults(func=cmd_verify)
    return parser


_CONFIG_KEYS = ("eps", "budget", "run_budget", "enum_cap", "K", "r", "search_cap", "growth",
                "depth_cap", "gap_tol", "format", "output")


def _fail(exc: BaseException, code: str, details: dict | None = None) -> None:
    body = {"schema_version": SCHEMA_VERSION, "error": code, "message": str(exc), "details": details or {}}
    print(json.dumps(body, sort_keys=True), file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config, {k: getattr(args, k, None) for k in _CONFIG_KEYS})
        out = _Output(cfg)
        beta = None
        if args.command not in ("spectrum", "verify"):
            budget = cfg.budget
            if args.command == "construct" or (args.command == "trace" and args.construct):
                budget = construction_budget(cfg)
            beta = make_beta(args.beta, budget=budget)
        return args.func(args, beta, cfg, out)
    except USAGE_ERRORS as exc:
        _fail(exc, exc.code, exc.details())
        return 2
    except BetaError as exc:
        _fail(exc, exc.code, exc.details())
        return 1
    except (argparse.ArgumentTypeError, ValueError, FileNotFoundError) as exc:
        _fail(exc, "UsageError")
        return 2


if __name__ == "__main__":
    sys.exit(main())
