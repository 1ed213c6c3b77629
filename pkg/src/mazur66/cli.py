"""Command-line interface.

Subcommands: build, eval, witness, scan, variation, verify. Relative output
paths are resolved against $MAZUR66_OUTPUT_DIR when it is set.

CSV outputs
  scan        x, y, inA, inB, inE          (one row per grid point)
  variation   y, n, var_x_fy               (fy_sections.csv)
              section, V1 / section, V2    (tonelli_v1.csv, tonelli_v2.csv)
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cantor import build_cantor
from .counterexample import assemble, eval_all, make_witness, mixed_quotient_probe, witness_ladder
from .errors import Mazur66Error, ParameterDomainError
from .instance_file import canonical, dumps, load, rat
from .kernels import get_profile, make_schedule
from .numdiff import control, control_names, instance_handle
from .scanner import ScanConfig, scan
from .variation import check_section_blowup, integrability_report, section_rows, tonelli_profile
from . import verify as verify_mod

OUTPUT_ENV = "MAZUR66_OUTPUT_DIR"


def _out(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _rule(text: str):
    """Rule name, or @file.json holding a list of 'p/q' strings."""
    if text.startswith("@"):
        try:
            return [Fraction(v) for v in json.loads(Path(text[1:]).read_text())]
        except (OSError, ValueError) as exc:
            raise ParameterDomainError(f"cannot read table {text[1:]}: {exc}") from exc
    return text


def _emit(doc, path: str | None) -> None:
    text = canonical(doc)
    if path:
        _out(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_build(args) -> int:
    c = build_cantor(args.depth, args.ratio)
    s = make_schedule(c, _rule(args.eps_rule), _rule(args.delta_rule))
    inst = assemble(c, get_profile(args.profile), s)
    _out(args.out).write_text(dumps(inst))
    t = inst.tail
    _emit({
        "intervals": inst.N,
        "out": str(args.out),
        "tail_certificate": {
            "d1_first": repr(t.d1[0]), "d1_last": repr(t.d1[-1]),
            "d2_first": repr(t.d2[0]), "d2_last": repr(t.d2[-1]),
            "nonincreasing": t.nonincreasing, "decays": t.decays,
        },
    }, None)
    return 0


def _point_token(inst, text: str) -> Fraction:
    m = re.fullmatch(r"([ab])(\d+)", text)
    if m:
        iv = inst.cantor[int(m.group(2))]
        return iv.a if m.group(1) == "a" else iv.b
    return _rational(text)


def cmd_eval(args) -> int:
    inst = load(args.instance)
    ev = eval_all(inst, _point_token(inst, args.x), _point_token(inst, args.y))
    _emit({
        "x": rat(ev.x), "y": rat(ev.y), "n": ev.n,
        "f": repr(ev.f), "fx": repr(ev.fx), "fy": repr(ev.fy),
        "fxx": repr(ev.fxx), "fyy": repr(ev.fyy),
        "err": {k: repr(v) for k, v in ev.err.items()},
    }, args.out)
    return 0


def cmd_witness(args) -> int:
    inst = load(args.instance)
    y0 = _point_token(inst, args.y0)
    if args.scales:
        ws = witness_ladder(inst, y0, args.m, args.delta, args.scales)
    else:
        ws = [make_witness(inst, y0, args.m, args.delta)]
    probe = mixed_quotient_probe(inst, ws)
    doc = {
        "witnesses": [w.to_json() for w in ws],
        "probe": [{"step": rat(r.step), "quotient": repr(r.quotient), "lower_bound": repr(r.lower_bound)}
                  for r in probe],
    }
    _emit(doc, args.out)
    return 0


def _rect(text: str | None, default):
    if text is None:
        return default
    parts = [Fraction(p) for p in text.split(",")]
    if len(parts) != 4:
        raise ParameterDomainError("--rect expects x0,x1,y0,y1")
    return ((parts[0], parts[1]), (parts[2], parts[3]))


def cmd_scan(args) -> int:
    if args.function == "instance":
        if not args.instance:
            raise ParameterDomainError("--function instance needs --instance FILE")
        f = instance_handle(load(args.instance))
        edge = Fraction(1, args.n_max)
        default = ((edge, 1 - edge), (edge, 1 - edge))
    else:
        f = control(args.function)
        default = ((Fraction(-1), Fraction(1)), (Fraction(-1), Fraction(1)))
    cfg = ScanConfig(_rect(args.rect, default), args.grid, args.grid, args.m_max, args.n_max, args.subsample)
    em = scan(f, cfg, workers=args.threads)
    if args.out:
        _out(args.out).write_text(em.to_csv())
    else:
        sys.stdout.write(em.to_csv())
    if args.summary:
        _out(args.summary).write_text(em.summary_json())
    return 0


def cmd_variation(args) -> int:
    inst = load(args.instance)
    out = Path(args.out_dir)
    cor = check_section_blowup(inst, args.sections)
    _out(str(out / "fy_sections.csv")).write_text(section_rows(cor.sections))
    v1, v2 = tonelli_profile(instance_handle(inst), grid_nx=args.grid, grid_ny=args.grid)
    _out(str(out / "tonelli_v1.csv")).write_text(v1.to_csv())
    _out(str(out / "tonelli_v2.csv")).write_text(v2.to_csv())
    rep = integrability_report(inst)
    summary = {
        "integrability": rep.summary(),
        "fy_sections": {
            "degrades": cor.degrades,
            "generation_max": {str(g): rat(v) for g, v in cor.generation_max.items()},
        },
        "tonelli_lower_bounds": {"int_V1": repr(v1.integral), "int_V2": repr(v2.integral)},
    }
    _out(str(out / "variation.json")).write_text(canonical(summary))
    return 0


def cmd_verify(args) -> int:
    only = {int(v) for v in args.only.split(",")} if args.only else None
    results = verify_mod.run_all(args.depth, args.seed, only)
    for r in results:
        print(r.line(), file=sys.stderr)
    doc = verify_mod.report(results, args.depth, args.seed, args.timings)
    _emit(doc, args.out)
    return 0 if doc["all_pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mazur66", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--json-errors", action="store_true", help="print errors as JSON on stdout")
    p.add_argument("--threads", type=int, default=1, help="worker cap for parallel scans")
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="construct an instance and write its JSON file")
    b.add_argument("--depth", type=int, default=5)
    b.add_argument("--ratio", type=_rational, default=Fraction(1))
    b.add_argument("--eps-rule", default="cube", help="rule name or @table.json")
    b.add_argument("--delta-rule", default="pair", help="rule name or @table.json")
    b.add_argument("--profile", default="poly3", choices=["poly3", "exp"])
    b.add_argument("--out", default="instance.json")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("eval", help="evaluate f and its partials at a point")
    e.add_argument("--instance", required=True)
    e.add_argument("--x", required=True, help="rational, or aN / bN for an interval endpoint")
    e.add_argument("--y", required=True, help="rational, or aN / bN for an interval endpoint")
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    w = sub.add_parser("witness", help="certify a discontinuity of f'_x in y")
    w.add_argument("--instance", required=True)
    w.add_argument("--y0", required=True, help="point of B: rational or aN / bN")
    w.add_argument("--m", type=int, default=3)
    w.add_argument("--delta", type=_rational, default=Fraction(1, 8))
    w.add_argument("--scales", type=int, help="emit a ladder of up to S witnesses")
    w.add_argument("--out")
    w.set_defaults(func=cmd_witness)

    s = sub.add_parser("scan", help="grid surrogate of the existence set of f'_x (CSV)")
    s.add_argument("--function", default="smooth", choices=control_names() + ["instance"])
    s.add_argument("--instance")
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("--m-max", type=int, default=8)
    s.add_argument("--n-max", type=int, default=64)
    s.add_argument("--subsample", type=int, default=4)
    s.add_argument("--rect", help="x0,x1,y0,y1 (rationals)")
    s.add_argument("--out", help="CSV path (stdout if omitted)")
    s.add_argument("--summary", help="JSON summary path")
    s.set_defaults(func=cmd_scan)

    v = sub.add_parser("variation", help="variation profiles and integrability report")
    v.add_argument("--instance", required=True)
    v.add_argument("--out-dir", default="variation")
    v.add_argument("--sections", type=int, default=64)
    v.add_argument("--grid", type=int, default=33)
    v.set_defaults(func=cmd_variation)

    r = sub.add_parser("verify", help="run the acceptance checks")
    r.add_argument("--depth", type=int, default=5)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--only", help="comma-separated check ids")
    r.add_argument("--timings", action="store_true", help="include runtimes (breaks byte determinism)")
    r.add_argument("--out")
    r.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Mazur66Error as exc:
        if args.json_errors:
            sys.stdout.write(canonical({"error": type(exc).__name__, "message": str(exc),
                                        "exit_code": exc.exit_code}))
        print(f"mazur66: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
