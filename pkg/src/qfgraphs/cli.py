"""Command-line front end: ``qfgraph classify|predict|verify|sweep|export``.

Exit codes: 0 success, 1 usage or parse error, 2 resource cap, 3 a
prediction disagreed with the brute-force oracle.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from contextlib import contextmanager

from . import __version__
from .errors import CapExceeded, QFGraphError
from .gf import FieldSpec, parse_field_spec, prime_powers
from .graph import GraphJob, RepresentationGraph, default_cap, export_graph
from .predict import (
    NOT_COVERED,
    predict_connected,
    predict_diameter,
    predict_four_cycles,
    predict_girth,
    predict_triangles,
)
from .qform import arf_value, canonical_model_string, classify, parse_element, parse_form

SCHEMA_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_MISMATCH = 0, 1, 2, 3


def _jsonable(x):
    """Infinity becomes the string "inf"; tuples become lists."""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


class _Timer:
    def __init__(self):
        self.phases = {}

    @contextmanager
    def phase(self, name):
        t = time.perf_counter()
        try:
            yield
        finally:
            self.phases[name] = round(time.perf_counter() - t, 6)


# --- report building ------------------------------------------------------

def form_block(F: FieldSpec, dsl: str, q) -> dict:
    t = classify(q)
    out = {
        "dsl": dsl,
        "dim": q.n,
        "type": t.label,
        "witt_index": t.witt_index,
        "anisotropic_kernel_dim": t.kernel_dim,
        "canonical_model": canonical_model_string(F, t),
    }
    if F.p == 2:
        out["arf"] = int(arf_value(q)) if q.n else 0
        out["arf_trivial"] = bool(t.disc)
    else:
        out["discriminant"] = t.disc.name.lower()
    return out


def prediction_block(q, a: int, cap: int) -> dict:
    conn = predict_connected(q, a)
    diam = predict_diameter(q, a)
    girth = predict_girth(q, a)
    tri = predict_triangles(q, a, cap)
    c4 = predict_four_cycles(q, a)
    if diam.kind == "interval":
        dval = {"lo": diam.lo, "hi": diam.hi}
    else:
        dval = diam.as_value()
    return {
        "connected": conn.value,
        "diameter": dval,
        "girth": girth.value,
        "triangles": {"c1": tri.c1, "c2": tri.c2, "total": tri.total, "route": tri.route,
                      "routes": dict(tri.routes)},
        "four_cycles": "not-covered" if c4.value is NOT_COVERED else c4.value,
        "clauses": {
            "connected": conn.clause,
            "diameter": diam.clause,
            "girth": girth.clause,
            "triangles": tri.clause,
            "four_cycles": c4.clause,
        },
    }


def bruteforce_block(q, a: int, cap: int, threads: int = 1) -> dict:
    g = RepresentationGraph(GraphJob(q, a, cap, threads))
    tri = g.triangle_census()
    c4 = g.four_cycle_census()
    spectrum = g.distance_spectrum(check=True)
    return {
        "connected": g.component_count() == 1,
        "components": g.component_count(),
        "diameter": spectrum.diameter,
        "girth": g.girth(),
        "triangles": {"c1": tri.c1, "c2": tri.c2, "total": tri.triangles_total,
                      "through_origin": tri.triangles_through_origin},
        "four_cycles": c4.four_cycles_total,
        "four_cycles_through_origin": c4.four_cycles_through_origin,
        "distance_by_value": {str(b): d for b, d in sorted(spectrum.per_value.items())},
    }


def match_block(pred: dict, brute: dict) -> dict:
    d = pred["diameter"]
    if isinstance(d, dict):
        dmatch = brute["diameter"] != math.inf and d["lo"] <= brute["diameter"] <= d["hi"]
    else:
        dmatch = d == brute["diameter"]
    pt, bt = pred["triangles"], brute["triangles"]
    return {
        "connected": pred["connected"] == brute["connected"],
        "diameter": dmatch,
        "girth": pred["girth"] == brute["girth"],
        "triangles": (pt["c1"], pt["c2"], pt["total"]) == (bt["c1"], bt["c2"], bt["total"]),
        # None marks an invariant without a closed form for this input
        "four_cycles": None if pred["four_cycles"] == "not-covered"
        else pred["four_cycles"] == brute["four_cycles"],
    }


def build_report(F, dsl, q, a, *, verify=False, cap=None, threads=1, timing=True) -> dict:
    cap = default_cap() if cap is None else cap
    timer = _Timer()
    report = {
        "schema": SCHEMA_VERSION,
        "field": F.spec_string(),
        "form": form_block(F, dsl, q),
        "a": a,
    }
    with timer.phase("predict"):
        report["predicted"] = prediction_block(q, a, cap)
    if verify:
        with timer.phase("bruteforce"):
            report["bruteforce"] = bruteforce_block(q, a, cap, threads)
        report["match"] = match_block(report["predicted"], report["bruteforce"])
    if timing:
        report["timing"] = timer.phases
    return _jsonable(report)


def all_match(report: dict) -> bool:
    return all(v is not False for v in report.get("match", {}).values())


# --- human-readable output ------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, dict) and set(v) == {"lo", "hi"}:
        return f"{v['lo']} or {v['hi']}"
    if isinstance(v, bool):
        return str(v).lower()
    return str(v)


def render_report(report: dict) -> str:
    lines = [f"field: {report['field']}", f"form: {report['form']['dsl']}  "
             f"({report['form']['type']}, {report['form']['canonical_model']})",
             f"a: {report['a']}"]
    pred, brute, match = report["predicted"], report.get("bruteforce"), report.get("match", {})
    rows = [
        ("connected", pred["connected"], brute and brute["connected"]),
        ("diameter", pred["diameter"], brute and brute["diameter"]),
        ("girth", pred["girth"], brute and brute["girth"]),
        ("triangles.c1", pred["triangles"]["c1"], brute and brute["triangles"]["c1"]),
        ("triangles.c2", pred["triangles"]["c2"], brute and brute["triangles"]["c2"]),
        ("triangles.total", pred["triangles"]["total"], brute and brute["triangles"]["total"]),
        ("four_cycles", pred["four_cycles"], brute and brute["four_cycles"]),
    ]
    for name, p, b in rows:
        line = f"{name:16} {_fmt(p):>14}"
        if brute is not None:
            key = name.split(".")[0]
            flag = match.get(key)
            line += f"  oracle {_fmt(b):>14}  " + {True: "ok", False: "MISMATCH", None: "-"}[flag]
        lines.append(line)
    if brute is not None:
        lines.append(f"components: {brute['components']}")
    lines.append(f"triangle route: {pred['triangles']['route']}")
    for k, v in pred["clauses"].items():
        lines.append(f"clause.{k}: {v}")
    for k, v in report.get("timing", {}).items():
        lines.append(f"time.{k}: {v:.3f}s")
    return "\n".join(lines)


# --- commands -------------------------------------------------------------

def _load(args):
    F = parse_field_spec(args.field)
    q = parse_form(F, args.form)
    return F, q


def cmd_classify(args, out) -> int:
    F, q = _load(args)
    block = form_block(F, args.form, q)
    if args.json:
        out.write(json.dumps({"schema": SCHEMA_VERSION, "field": F.spec_string(), "form": block},
                             indent=2) + "\n")
        return EXIT_OK
    out.write(f"{block['type']}, {block['canonical_model']}\n")
    out.write(f"dimension: {block['dim']}\n")
    out.write(f"witt index: {block['witt_index']}\n")
    out.write(f"anisotropic kernel: {block['anisotropic_kernel_dim']}\n")
    if "arf" in block:
        out.write(f"arf: {block['arf']} ({'trivial' if block['arf_trivial'] else 'nontrivial'})\n")
    else:
        out.write(f"discriminant: {block['discriminant']}\n")
    return EXIT_OK


def _emit(report, args, out):
    if args.json:
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        out.write(render_report(report) + "\n")


def cmd_predict(args, out) -> int:
    F, q = _load(args)
    a = parse_element(F, args.a)
    report = build_report(F, args.form, q, a, cap=args.max_vertices, timing=not args.no_timing)
    _emit(report, args, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    F, q = _load(args)
    a = parse_element(F, args.a)
    report = build_report(F, args.form, q, a, verify=True, cap=args.max_vertices,
                          threads=args.threads, timing=not args.no_timing)
    _emit(report, args, out)
    return EXIT_OK if all_match(report) else EXIT_MISMATCH


def parse_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")
    try:
        return prime_powers(int(lo), int(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad field range {text!r}") from None


def sweep_rows(template: str, fields, a_text: str, mode: str, all_a: bool, cap: int, threads: int = 1):
    """One row per (field, a); errors are recorded in the row and the sweep continues."""
    for f in fields:
        F = parse_field_spec(f"q={f}")
        try:
            q = parse_form(F, template)
            a_values = range(1, f) if all_a else [parse_element(F, a_text)]
        except QFGraphError as e:
            yield {"f": f, "error": type(e).__name__}
            continue
        for a in a_values:
            row = {"f": f, "a": a}
            try:
                pred = predict_diameter(q, a)
                row["predicted"] = ({"lo": pred.lo, "hi": pred.hi} if pred.kind == "interval"
                                    else pred.as_value())
                if mode == "all":
                    rep = build_report(F, template, q, a, verify=True, cap=cap, threads=threads,
                                       timing=False)
                    row["oracle"] = rep["bruteforce"]["diameter"]
                    row["match"] = all_match(rep)
                    row["detail"] = rep["match"]
                else:
                    d = RepresentationGraph(GraphJob(q, a, cap, threads)).diameter()
                    row["oracle"] = d
                    row["match"] = pred.contains(d)
                row["connected"] = row["oracle"] != math.inf
            except CapExceeded as e:
                row["error"] = f"CapExceeded({e.needed} > {e.cap})"
            yield _jsonable(row)


def cmd_sweep(args, out) -> int:
    fields = args.fields
    cap = args.max_vertices if args.max_vertices is not None else default_cap()
    mismatch = False
    rows = []
    if not args.json:
        out.write(f"{'f':>5} {'a':>4} {'predicted':>10} {'oracle':>7}  match\n")
    for row in sweep_rows(args.form, fields, args.a, args.mode, args.all_a, cap, args.threads):
        mismatch |= row.get("match") is False
        if args.json:
            rows.append(row)
            continue
        if "error" in row:
            out.write(f"{row['f']:>5} {row.get('a', '-'):>4} {'':>10} {'':>7}  {row['error']}\n")
            continue
        note = "" if row["connected"] else "  disconnected"
        out.write(f"{row['f']:>5} {row['a']:>4} {_fmt(row['predicted']):>10} {_fmt(row['oracle']):>7}"
                  f"  {'yes' if row['match'] else 'NO'}{note}\n")
        out.flush()
    if args.json:
        out.write(json.dumps({"schema": SCHEMA_VERSION, "form": args.form, "mode": args.mode,
                              "rows": rows}, indent=2) + "\n")
    return EXIT_MISMATCH if mismatch else EXIT_OK


def cmd_export(args, out) -> int:
    F, q = _load(args)
    a = parse_element(F, args.a)
    cap = args.max_vertices if args.max_vertices is not None else default_cap()
    job = GraphJob(q, a, cap, args.threads)
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            export_graph(job, args.format, fh)
    else:
        export_graph(job, args.format, out)
    return EXIT_OK


# --- argument parsing -----------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qfgraph", description="Quadratic forms over finite fields and their "
                                            "representation graphs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, with_a=True):
        sp.add_argument("-q", "--field", required=True, help='field spec, "q=9" or "p=3,m=2[,mod=...]"')
        sp.add_argument("-f", "--form", required=True, help='form DSL, e.g. "H + diag(1,-lambda)"')
        if with_a:
            sp.add_argument("-a", default="1", help="edge value a (integer encoding, lambda or wp)")

    def runtime(sp):
        sp.add_argument("--max-vertices", type=int, default=None, help="vertex cap (default from "
                        "QFGRAPHS_MAX_VERTICES or 2000000)")
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("classify", help="isometry class of a form")
    common(sp, with_a=False)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_classify)

    for name, func, doc in (("predict", cmd_predict, "closed-form invariants"),
                            ("verify", cmd_verify, "closed forms against brute force")):
        sp = sub.add_parser(name, help=doc)
        common(sp)
        runtime(sp)
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--no-timing", action="store_true", help="omit timings (deterministic output)")
        sp.set_defaults(func=func)

    sp = sub.add_parser("sweep", help="diameter (or all invariants) over a range of fields")
    sp.add_argument("-f", "--form", required=True, help="form DSL template, evaluated per field")
    sp.add_argument("--fields", type=parse_range, required=True, help="prime powers LO..HI")
    sp.add_argument("-a", default="1")
    sp.add_argument("--all-a", action="store_true", help="every nonzero a instead of one")
    sp.add_argument("--mode", choices=("diameter", "all"), default="diameter")
    sp.add_argument("--json", action="store_true")
    runtime(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("export", help="write the graph as an edge list or DOT")
    common(sp)
    runtime(sp)
    sp.add_argument("--format", choices=("edges", "dot"), default="edges")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_export)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    if getattr(args, "max_vertices", None) is None and args.command in ("predict", "verify"):
        args.max_vertices = default_cap()
    try:
        return args.func(args, out)
    except CapExceeded as e:
        print(f"error: CapExceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except QFGraphError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
