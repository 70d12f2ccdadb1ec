"""Command-line front end for invariant tables and golden presets, plus the verification suites."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from gmpy2 import mpq

from . import __version__
from .bps import bps_from_gw
from .hyper import CIGeometry, WeightedDegreeWarning
from .invariants import DimensionMismatch, InvariantQuery, InvariantSeries, gw_invariant
from .series import fmt_q
from .suites import BPS_TABLES, CUBIC, CUBIC_INVARIANTS, SUITES, bps_row, run_suite

PRESETS = ("table1", "table2", "table3", "table4", "cubic")
EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2
# alternative suite names accepted on the command line
SUITE_ALIASES = {"lemma2.3": "identities", "appendixB": "combinatorics", "theorem4": "projective"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    a: tuple = ()
    points: int | None = None
    degree: int | None = None
    K: int | None = None
    b: tuple | None = None
    c: tuple | None = None
    preset: str | None = None
    suite: str | None = None
    fmt: str = "json"
    out: str | None = None


def _int_list(text):
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser():
    p = _Parser(prog="mirrorgw", description="Genus-zero Gromov-Witten invariants of projective complete intersections.")
    p.add_argument("--n", type=int, help="number of homogeneous coordinates of the ambient projective space")
    p.add_argument("--a", type=_int_list, default=(), help="multidegree, comma separated (empty for projective space)")
    p.add_argument("--points", type=int, help="number of marked points")
    p.add_argument("--degree", type=int, help="degree bound D; results are produced for d = 0..D")
    p.add_argument("--K", type=int, help="series truncation order (defaults to D)")
    p.add_argument("--b", type=_int_list, help="psi-class powers, comma separated")
    p.add_argument("--c", type=_int_list, help="hyperplane powers, comma separated")
    p.add_argument("--preset", choices=PRESETS, help="pinned golden data set")
    p.add_argument("--suite", choices=sorted(SUITES) + sorted(SUITE_ALIASES), help="named verification suite")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output path (standard output if omitted)")
    return p


def parse_config(argv):
    ns = build_parser().parse_args(argv)
    modes = [x for x in (ns.preset, ns.suite) if x]
    if len(modes) > 1:
        raise UsageError("--preset and --suite are mutually exclusive")
    cfg = RunConfig(
        command="check" if ns.suite else ("preset" if ns.preset else "table"),
        n=ns.n,
        a=tuple(ns.a),
        points=ns.points,
        degree=ns.degree,
        K=ns.K,
        b=ns.b,
        c=ns.c,
        preset=ns.preset,
        suite=SUITE_ALIASES.get(ns.suite, ns.suite),
        fmt=ns.fmt,
        out=ns.out,
    )
    if cfg.degree is not None and cfg.degree < 0:
        raise UsageError("--degree must be nonnegative")
    if cfg.command == "table":
        _validate_table(cfg)
    return cfg


def _validate_table(cfg):
    if cfg.n is None or cfg.c is None:
        raise UsageError("--n and --c are required unless --preset or --suite is given")
    N = len(cfg.c)
    if cfg.points is not None and cfg.points != N:
        raise UsageError(f"--points {cfg.points} disagrees with {N} entries in --c")
    if cfg.b is None:
        cfg.b = (0,) * N
    if len(cfg.b) != N:
        raise UsageError("--b and --c must have the same length")
    if N < 1:
        raise UsageError("at least one marked point is required")
    if any(x < 0 for x in cfg.b + cfg.c):
        raise UsageError("--b and --c entries must be nonnegative")
    cfg.points = N
    if cfg.degree is None:
        cfg.degree = 1
    if cfg.K is None:
        cfg.K = cfg.degree
    if cfg.K < cfg.degree:
        raise UsageError("--K must be at least --degree")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WeightedDegreeWarning)
            geom = CIGeometry(cfg.n, cfg.a)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if any(x > geom.n - 1 - geom.l for x in cfg.c):
        raise UsageError("hyperplane powers must not exceed the dimension of the complete intersection")


# ---------------------------------------------------------------- computations


def _rat(x):
    return fmt_q(mpq(x))


def _doc(geom, rows, K, **extra):
    doc = {"geometry": {"n": geom.n, "a": list(geom.a)}, "results": rows, "meta": {"K": K, "version": __version__}}
    doc.update(extra)
    return doc


def _row(d, b, c, gw, bps, **extra):
    row = {"d": d, "N": len(c), "b": list(b), "c": list(c), "gw": _rat(gw), "bps": None if bps is None else _rat(bps)}
    row.update(extra)
    return row


def compute_table(cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeightedDegreeWarning)
        geom = CIGeometry(cfg.n, cfg.a)
    b, c, D = tuple(cfg.b), tuple(cfg.c), cfg.degree
    N = len(c)
    values = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DimensionMismatch)
        for d in range(D + 1):
            values.append(gw_invariant(geom, InvariantQuery(b, c, d), cfg.K))
    bps = [None] * (D + 1)
    if N >= 3 and geom.nu == 0 and not any(b):
        bps = bps_from_gw(InvariantSeries(geom, c, values), N).n_values
    rows = [_row(d, b, c, values[d], bps[d]) for d in range(D + 1)]
    return _doc(geom, rows, cfg.K), True


def _table_task(args):
    geom, cs, D, expected = args
    gw, bps = bps_row(geom, cs, D)
    rows = []
    ok = True
    for d in range(D + 1):
        exp = expected[d - 1] if 1 <= d <= len(expected) else None
        extra = {}
        if exp is not None:
            extra["expected"] = _rat(exp)
            extra["match"] = bps[d] == exp
            ok &= bps[d] == exp
        rows.append(_row(d, (0,) * len(cs), cs, gw[d], bps[d], **extra))
    return _doc(geom, rows, D), ok


def _workers():
    try:
        return max(1, int(os.environ.get("MIRRORGW_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, tasks):
    workers = min(_workers(), len(tasks))
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def compute_preset(cfg):
    if cfg.preset == "cubic":
        rows = []
        ok = True
        for cs, d, val in CUBIC_INVARIANTS:
            b = (0,) * len(cs)
            v = gw_invariant(CUBIC, InvariantQuery(b, cs, d), d)
            ok &= v == val
            rows.append(_row(d, b, cs, v, None, expected=_rat(val), match=v == val))
        return _doc(CUBIC, rows, 4, preset="cubic", ok=ok), ok
    D = cfg.degree if cfg.degree is not None else 3
    tasks = [(geom, cs, D, vals) for cs, rows in BPS_TABLES[cfg.preset] for geom, vals in rows]
    docs = _map(_table_task, tasks)
    ok = all(x[1] for x in docs)
    return {"preset": cfg.preset, "ok": ok, "documents": [x[0] for x in docs], "meta": {"K": D, "version": __version__}}, ok


def compute_suite(cfg):
    kwargs = {}
    if cfg.suite == "engines":
        if cfg.points is not None:
            kwargs["N_max"] = cfg.points
        if cfg.degree is not None:
            kwargs["D"] = cfg.degree
    rep, _ = run_suite(cfg.suite, **kwargs)
    doc = {
        "suite": cfg.suite,
        "ok": rep.ok,
        "checks": rep.checks,
        "failures": [{"label": str(f[0]), "got": str(f[1]), "expected": str(f[2])} for f in rep.failures[:50]],
        "meta": {"version": __version__},
    }
    return doc, rep.ok


# ---------------------------------------------------------------- output


CSV_FIELDS = ["n", "a", "d", "N", "b", "c", "gw", "bps"]


def _csv_rows(doc):
    if "documents" in doc:
        for sub in doc["documents"]:
            yield from _csv_rows(sub)
        return
    if "results" in doc:
        g = doc["geometry"]
        for r in doc["results"]:
            yield {
                "n": g["n"],
                "a": " ".join(map(str, g["a"])),
                "d": r["d"],
                "N": r["N"],
                "b": " ".join(map(str, r["b"])),
                "c": " ".join(map(str, r["c"])),
                "gw": r["gw"],
                "bps": "" if r["bps"] is None else r["bps"],
            }


def render(doc, fmt):
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    if "suite" in doc:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "ok", "checks", "failures"])
        w.writerow([doc["suite"], doc["ok"], doc["checks"], len(doc["failures"])])
        return buf.getvalue()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in _csv_rows(doc):
        w.writerow(row)
    return buf.getvalue()


def run_cli(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"mirrorgw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if cfg.command == "check":
        doc, ok = compute_suite(cfg)
    elif cfg.command == "preset":
        doc, ok = compute_preset(cfg)
    else:
        doc, ok = compute_table(cfg)
    text = render(doc, cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_VERIFY


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
