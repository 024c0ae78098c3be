"""Command-line front end.

Exit status: 0 when every requested check passes, 2 when some check fails
(or a batch is interrupted), 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import signal
import sys
import warnings
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import shapeio
from .asymmetry import FraenkelOptions, asymmetry_report
from .checks import Check
from .constants import ALT_FLOOR, ISODIAMETRIC, ConstantsTable, main_constant
from .corpus import FAMILIES, CorpusItem
from .harness import (
    SUITES,
    HarnessConfig,
    Job,
    clean,
    d_sweep,
    dumps,
    family_jobs,
    parse_eps_grid,
    prepared,
    report_document,
    reports_csv,
    run_batch,
)
from .measures import QuadratureOptions, diameter, summarize
from .shapes import ResourceError, ShapeError, normalize
from .symmetrization import SymmetrizationOptions, symmetrize_full

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
SLOPE_TOL = 0.05


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--n", type=int, default=2, help="dimension (default 2)")
    p.add_argument("--cf", type=float, help="Fraenkel constant C_F (required wherever constants are used)")
    p.add_argument("--seed", type=int, help="corpus seed (required with --family)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=0.0, help="extra absolute slack added to every check")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", help="write here instead of stdout")
    p.add_argument("--no-timestamp", action="store_true", help="omit timestamps and timings for byte-stable output")
    p.add_argument("--budget", type=int, default=2000, help="optimizer evaluation budget")
    p.add_argument("--grid", type=float, help="quadrature cell size h")
    p.add_argument("--raw", action="store_true", help="report in the input's own units")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = _Parser(prog="baryiso", description="Barycentric asymmetry and isoperimetric deficit toolkit.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("measure", parents=[common], help="volume, perimeter, barycenter, diameter")
    m.add_argument("paths", nargs="+")

    a = sub.add_parser("asymmetry", parents=[common], help="deficit and asymmetries")
    a.add_argument("paths", nargs="+")
    a.add_argument("--starts", type=int, default=3, help="optimizer restarts from the best grid points")
    a.add_argument("--search-grid", type=int, default=17, help="coarse search points per axis")

    s = sub.add_parser("symmetrize", parents=[common], help="reflection symmetrization trace")
    s.add_argument("path")
    s.add_argument("--final", help="also save the symmetrized shape here")

    c = sub.add_parser("constants", parents=[common], help="constants table")
    c.add_argument("--d", type=float, default=1.0, help="diameter bound D (clamped to the floor)")
    c.add_argument("--floor", choices=(ISODIAMETRIC, ALT_FLOOR), default=ISODIAMETRIC)

    v = sub.add_parser("verify", parents=[common], help="batch verification")
    v.add_argument("paths", nargs="*")
    v.add_argument("--family", choices=FAMILIES)
    v.add_argument("--count", type=int, default=10)
    v.add_argument("--suite", choices=SUITES, default="main")
    v.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="family parameter")

    w = sub.add_parser("sweep", parents=[common], help="diameter sweep over the two-mass family")
    w.add_argument("--eps", default="1e-1:1e-4:log:8", help="start:stop:log|lin:count")
    return ap


# ---------------------------------------------------------------- helpers


def _quad(args) -> QuadratureOptions:
    if args.grid is not None and not args.grid > 0:
        raise UsageError("--grid must be positive")
    return QuadratureOptions(h=args.grid)


def _fraenkel(args, **kw) -> FraenkelOptions:
    if args.budget < 1:
        raise UsageError("--budget must be positive")
    return FraenkelOptions(budget=args.budget, **kw)


def _need_cf(args) -> float:
    if args.cf is None:
        raise UsageError("--cf is required: no Fraenkel constant is built in")
    if not args.cf > 0:
        raise UsageError("--cf must be positive")
    return args.cf


def _timestamp(args) -> str | None:
    return None if args.no_timestamp else datetime.now(timezone.utc).isoformat(timespec="seconds")


def _stamp(doc: dict, args) -> dict:
    ts = _timestamp(args)
    if ts is not None:
        doc["timestamp"] = ts
    return clean(doc)


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _checks_csv(item_id: str, checks: list[Check]) -> list[list]:
    return [[item_id, c.name, c.anchor, repr(float(c.lhs)), repr(float(c.rhs)), repr(float(c.slack)), c.status]
            for c in checks]


def _flat(prefix: str, x, out: list):
    if isinstance(x, dict):
        for k in sorted(x):
            _flat(f"{prefix}.{k}" if prefix else str(k), x[k], out)
    elif isinstance(x, list):
        for i, v in enumerate(x):
            _flat(f"{prefix}[{i}]", v, out)
    else:
        out.append([prefix, x])


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    return shapeio.load(path)


# ---------------------------------------------------------------- commands


def cmd_measure(args) -> int:
    q = _quad(args)
    entries = []
    for p in args.paths:
        s = _load(p)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            entry = {"path": p, "summary": summarize(s, q).to_dict()}
            if not args.raw:
                nz = normalize(s)
                entry["normalized"] = summarize(nz.shape, q).to_dict()
                entry["normalization"] = {"scale": nz.scale, "shift": [float(x) for x in nz.shift]}
        entries.append(entry)
    doc = _stamp({"command": "measure", "shapes": entries}, args)
    if args.format == "csv":
        rows = []
        for e in entries:
            flat: list = []
            _flat("", {k: v for k, v in e.items() if k != "path"}, flat)
            rows += [[e["path"], k, v] for k, v in flat]
        _emit(args, _rows_csv(("path", "quantity", "value"), rows))
    else:
        _emit(args, dumps(doc))
    return EXIT_OK


def cmd_asymmetry(args) -> int:
    q = _quad(args)
    fo = _fraenkel(args, grid=args.search_grid, starts=args.starts)
    entries = []
    for p in args.paths:
        s = _load(p)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            nz = normalize(s)
            rep = asymmetry_report(nz.shape, fo, q).to_dict()
        if args.raw:
            c = np.asarray(rep["fraenkel_center"]) / nz.scale - nz.shift
            rep["fraenkel_center"] = [float(x) for x in c]
        entries.append({"path": p, "report": rep})
    doc = _stamp({"command": "asymmetry", "shapes": entries}, args)
    if args.format == "csv":
        rows = []
        for e in entries:
            flat: list = []
            _flat("", e["report"], flat)
            rows += [[e["path"], k, v] for k, v in flat]
        _emit(args, _rows_csv(("path", "quantity", "value"), rows))
    else:
        _emit(args, dumps(doc))
    return EXIT_OK


def cmd_symmetrize(args) -> int:
    cf = _need_cf(args)
    q = _quad(args)
    s = _load(args.path)
    opts = SymmetrizationOptions(fraenkel=_fraenkel(args), quadrature=q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        s0 = prepared(s, q)
        table = ConstantsTable.build(s0.dim, diameter(s0), cf)
        trace = symmetrize_full(s0, table, opts)
    checks = trace.checks
    if args.tolerance > 0:
        checks = [replace(c, tolerance=max(c.tolerance, args.tolerance)) for c in checks]
    failed = any(c.blocking_failure for c in checks)
    if args.final:
        shapeio.save(trace.final, args.final)
    if args.format == "csv":
        rows = []
        for st in trace.steps:
            rows += _checks_csv(f"axis{st.axis}", st.checks)
        _emit(args, _rows_csv(("step", "check", "anchor", "lhs", "rhs", "slack", "pass"), rows))
    else:
        doc = trace.to_dict()
        doc.update(command="symmetrize", path=args.path, passed=not failed)
        _emit(args, dumps(_stamp(doc, args)))
    return EXIT_FAIL if failed else EXIT_OK


def cmd_constants(args) -> int:
    cf = _need_cf(args)
    try:
        table = ConstantsTable.build(args.n, args.d, cf, args.floor)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = table.to_dict()
    doc.update(command="constants", d_requested=args.d, c0_direct=main_constant(args.n, args.d, cf, args.floor))
    doc = _stamp(doc, args)
    if args.format == "csv":
        flat: list = []
        _flat("", doc, flat)
        _emit(args, _rows_csv(("quantity", "value"), flat))
    else:
        _emit(args, dumps(doc))
    return EXIT_OK


def _parse_params(items: list[str]) -> dict:
    out = {}
    for it in items:
        key, sep, val = it.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects KEY=VALUE, got {it!r}")
        try:
            out[key] = json.loads(val)
        except json.JSONDecodeError:
            out[key] = val
    return out


def cmd_verify(args) -> int:
    cf = _need_cf(args)
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    config = HarnessConfig(cf=cf, quadrature=_quad(args), fraenkel=_fraenkel(args), tolerance=args.tolerance)
    jobs: list[Job] = []
    for p in args.paths:
        jobs.append(Job(args.suite, config, item=CorpusItem(p, "file", {"path": p}, 0, _load(p))))
    if args.family:
        if args.seed is None:
            raise UsageError("--seed is required with --family")
        if args.count < 1:
            raise UsageError("--count must be positive")
        jobs += family_jobs(args.suite, args.family, args.count, args.seed, args.n, config,
                            **_parse_params(args.param))
    if not jobs:
        raise UsageError("nothing to verify: give shape files or --family")
    run = {"command": "verify", "suite": args.suite, "family": args.family, "count": args.count if args.family else 0,
           "seed": args.seed, "n": args.n, "paths": list(args.paths), "config": config.to_dict()}
    reports = []
    partial = False
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            for rep in run_batch(jobs, args.workers):
                reports.append(rep)
        except KeyboardInterrupt:
            partial = True
    if args.format == "csv":
        text = reports_csv(reports)
        if partial:
            text += f"# partial: {len(reports)} of {len(jobs)} items\n"
        _emit(args, text)
    else:
        _emit(args, dumps(report_document(reports, run, _timestamp(args), partial)))
    if partial:
        print(f"interrupted after {len(reports)} of {len(jobs)} items; report marked partial", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_sweep(args) -> int:
    try:
        grid = parse_eps_grid(args.eps)
        result = d_sweep(args.n, grid, _quad(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ok = abs(result.slope - result.expected_slope) <= SLOPE_TOL + args.tolerance
    if args.format == "csv":
        rows = [[r.eps, r.D, r.lambda0, r.delta, r.ratio] for r in result.rows]
        text = _rows_csv(("eps", "D", "lambda0", "delta", "ratio"), rows)
        text += f"# slope {result.slope!r} expected {result.expected_slope!r}\n"
        _emit(args, text)
    else:
        doc = result.to_dict()
        doc.update(command="sweep", slope_tolerance=SLOPE_TOL, passed=ok)
        _emit(args, dumps(_stamp(doc, args)))
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "measure": cmd_measure,
    "asymmetry": cmd_asymmetry,
    "symmetrize": cmd_symmetrize,
    "constants": cmd_constants,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def _sigterm(signum, frame):
    raise KeyboardInterrupt


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.n < 2:
        print("baryiso: error: --n must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    previous = signal.signal(signal.SIGTERM, _sigterm)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"baryiso: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ShapeError, ResourceError, OSError) as exc:
        print(f"baryiso: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        signal.signal(signal.SIGTERM, previous)


if __name__ == "__main__":
    sys.exit(main())
