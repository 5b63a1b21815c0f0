"""``qdf`` command line.

Exit codes: 0 success, 1 oracle disagreement, 2 bad arguments, 3 input
that cannot be parsed, 4 a method that found no logical operator.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import emit_report, records_to_csv, render_svg, run_bench
from .codes import as_detector_model
from .dem import DemParseError, DetectorModel, filter_dem, format_dem
from .io import CodeFormatError, dump_code, load_code
from .methods import EXACT, METHODS, JobConfig, run_method
from .results import NoResultError
from .solvers import build_milp_model, build_sat_model, serialize_lp, serialize_wcnf

EXIT_OK, EXIT_DISAGREE, EXIT_USAGE, EXIT_PARSE, EXIT_NORESULT = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-time", type=float, default=None, help="seconds before partial results are returned")
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rep", type=int, choices=(2, 3, 4), default=None)
    p.add_argument("--basis", choices=("x", "z"), default="z")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdf", description="Minimum distance of classical and quantum codes")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("dist", help="one method on one code or detector error model")
    d.add_argument("input")
    d.add_argument("--method", choices=sorted(METHODS), default="bz")
    _common(d)

    b = sub.add_parser("bench", help="methods over a dataset directory, CSV out")
    b.add_argument("directory")
    b.add_argument("--method", required=True, help="comma-separated method names")
    b.add_argument("--out", default=None, help="records CSV path (stdout when omitted)")
    b.add_argument("--report", default=None, help="aggregate table CSV path")
    b.add_argument("--series", default=None, help="per-code plot series CSV path")
    b.add_argument("--svg", default=None, help="scatter plot path")
    b.add_argument("--workers", type=int, default=1)
    _common(b)

    e = sub.add_parser("export", help="write a solver model or convert the input")
    e.add_argument("input")
    kind = e.add_mutually_exclusive_group(required=True)
    kind.add_argument("--sat", action="store_true", help="MaxSAT model in WCNF")
    kind.add_argument("--milp", action="store_true", help="integer program in LP format")
    kind.add_argument("--format", choices=("json", "alist", "dem"))
    e.add_argument("--out", default=None)
    e.add_argument("--rep", type=int, choices=(2, 3, 4), default=3)
    e.add_argument("--basis", choices=("x", "z"), default="z")

    f = sub.add_parser("filter-dem", help="keep one basis of a two-basis detector error model")
    f.add_argument("input")
    f.add_argument("--basis", choices=("x", "z"), required=True)
    f.add_argument("--out", default=None)

    o = sub.add_parser("oracle", help="cross-check exact methods against exhaustive enumeration")
    o.add_argument("input")
    o.add_argument("--method", default=None, help="comma-separated exact methods (default: all)")
    _common(o)
    return parser


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cfg(args, method: str) -> JobConfig:
    return JobConfig(method, args.input, args.max_time, args.iters, args.seed, args.rep,
                     args.basis.upper(), args.threads)


def _dist(args) -> int:
    code = load_code(args.input)
    res = run_method(code, _cfg(args, args.method))
    print(res.summary())
    return EXIT_OK


def _bench(args) -> int:
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        print(f"qdf: unknown method(s): {', '.join(unknown)}", file=sys.stderr)
        return EXIT_USAGE
    if not Path(args.directory).is_dir():
        print(f"qdf: {args.directory} is not a directory", file=sys.stderr)
        return EXIT_USAGE
    records = run_bench(args.directory, methods, args.max_time, args.iters, args.seed, args.rep,
                        args.basis.upper(), args.threads, args.workers)
    _write(records_to_csv(records), args.out)
    report, series = emit_report(records)
    if args.report:
        Path(args.report).write_text(report)
    if args.series:
        Path(args.series).write_text(series)
    if args.svg:
        Path(args.svg).write_text(render_svg(records))
    return EXIT_OK


def _export(args) -> int:
    code = load_code(args.input)
    basis = args.basis.upper()
    if args.sat:
        text = serialize_wcnf(build_sat_model(code, basis, args.rep))
    elif args.milp:
        text = serialize_lp(build_milp_model(code, basis, args.rep))
    elif args.format == "dem":
        text = format_dem(as_detector_model(code, basis, args.rep))
    else:
        text = dump_code(code, args.format)
    _write(text, args.out)
    return EXIT_OK


def _filter(args) -> int:
    dem = load_code(args.input)
    if not isinstance(dem, DetectorModel):
        print("qdf: filter-dem needs a .dem input", file=sys.stderr)
        return EXIT_USAGE
    out = filter_dem(dem, args.basis.upper())
    _write(format_dem(out), args.out)
    print(f"kept {out.num_errors} of {dem.num_errors} errors and {out.num_detectors} of "
          f"{dem.num_detectors} detectors", file=sys.stderr)
    return EXIT_OK


def _oracle(args) -> int:
    code = load_code(args.input)
    if args.method:
        methods = [m.strip() for m in args.method.split(",")]
    else:
        methods = sorted(EXACT - {"exhaustive"})
    ref = run_method(code, _cfg(args, "exhaustive"))
    print(f"exhaustive: {ref.summary()}")
    agree = True
    for m in methods:
        if m not in METHODS:
            print(f"qdf: unknown method {m}", file=sys.stderr)
            return EXIT_USAGE
        try:
            res = run_method(code, _cfg(args, m))
        except (ValueError, NoResultError) as exc:
            print(f"{m}: skipped ({exc})")
            continue
        ok = res.d_upper == ref.d_upper if res.status.value == "Exact" else res.d_upper >= ref.d_upper
        agree &= ok
        print(f"{m}: {res.summary()} {'ok' if ok else 'MISMATCH'}")
    return EXIT_OK if agree else EXIT_DISAGREE


COMMANDS = {"dist": _dist, "bench": _bench, "export": _export, "filter-dem": _filter, "oracle": _oracle}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (CodeFormatError, DemParseError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        print(f"qdf: cannot parse input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoResultError as exc:
        print(f"qdf: no result: {exc}", file=sys.stderr)
        return EXIT_NORESULT
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"qdf: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"qdf: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
