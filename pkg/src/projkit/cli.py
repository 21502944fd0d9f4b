"""Command-line entry point: ``projkit <command> <action> [options]``.

Commands
--------
``example run ID``
    Build one catalog entry and compare it with its claims.
``example list``
    List buildable entries and the ones that are not built.
``bounds verify``
    Closed-form join bounds against the numeric oracle, written as CSV.
``pairs table``
    Measured alpha pairs over a grid of ``(s, t)``.
``suite all``
    Every check above at default settings.

A JSON report is always written (``--json``, with a per-command default).
The exit status is 0 when every expectation holds, 1 when some fail and 2
for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, catalog
from .config import load_config
from .seqmodel import ModelError

__all__ = ["main", "build_parser", "run_suite", "SUITE_SCHEMA", "BOUNDS_SCHEMA", "PAIRS_SCHEMA"]

SUITE_SCHEMA = "projkit.suite/1"
BOUNDS_SCHEMA = "projkit.bounds/1"
PAIRS_SCHEMA = "projkit.pairs/1"
BOUNDS_TOL = 1e-4


class UsageError(Exception):
    pass


def _number(text: str):
    t = text.strip()
    if t.lower() in ("inf", "infinity", "+inf"):
        return float("inf")
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def _number_list(text: str) -> list:
    return [float(_number(x)) for x in text.split(",") if x.strip()]


def _parse_params(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = _number(value)
    return out


def parse_grid(spec: str) -> list[tuple[float, float, float]]:
    """``default`` or ``THETAS/THETA1S/THETA2S`` with comma-separated values."""
    if spec == "default":
        return bounds.default_grid()
    parts = spec.split("/")
    if len(parts) != 3:
        raise UsageError(f"grid must be 'default' or 'thetas/theta1s/theta2s', got {spec!r}")
    a, b, c = (_number_list(p) for p in parts)
    return [(t, t1, t2) for t in a for t1 in b for t2 in c]


def _write_json(path: str | Path, report: dict):
    text = json.dumps(catalog.jsonable(report), indent=2, sort_keys=True, ensure_ascii=False)
    Path(path).write_text(text + "\n")


def _apply_config(args, parser):
    """Fill options left at their defaults from a ``key = value`` config file.

    Keys mirror the long flags (``trunc``, ``seed``, ``json``, ...);
    ``param.NAME`` keys become ``--param NAME=value``.
    """
    if not getattr(args, "config", None):
        return
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    for key, value in cfg.items():
        if key.startswith("param."):
            if hasattr(args, "param"):
                existing = {p.split("=", 1)[0] for p in args.param}
                name = key[len("param."):]
                if name not in existing:
                    args.param.append(f"{name}={value}")
            continue
        attr = key.replace("-", "_")
        if not hasattr(args, attr) or attr in ("command", "action", "func", "config"):
            raise UsageError(f"config key {key!r} does not match an option of this command")
        default = parser.get_default(attr)
        if getattr(args, attr) != default:
            continue  # the command line wins
        if isinstance(default, bool):
            setattr(args, attr, value.lower() in ("1", "true", "yes"))
        elif isinstance(default, str):
            setattr(args, attr, value)
        else:
            setattr(args, attr, _number(value))


# commands --------------------------------------------------------------------------

def _example_report(eid: str, params: dict, trunc, fiber_dim) -> dict:
    try:
        entry = catalog.build_example(eid, params, trunc=trunc, fiber_dim=fiber_dim)
    except (ModelError, ValueError) as exc:
        return {"schema": catalog.REPORT_SCHEMA, "id": eid, "params": params, "error": str(exc), "pass": False}
    return catalog.entry_report(entry)


def cmd_example_run(args) -> int:
    if args.id in catalog.NOT_BUILT:
        report = {"schema": catalog.REPORT_SCHEMA, "id": args.id, "error": f"not built: {catalog.NOT_BUILT[args.id]}", "pass": False}
        _write_json(args.json, report)
        print(f"{args.id}: not built ({catalog.NOT_BUILT[args.id]})", file=sys.stderr)
        return 2
    if args.id not in catalog.CATALOG:
        _write_json(args.json, {"schema": catalog.REPORT_SCHEMA, "id": args.id, "error": "unknown id", "pass": False})
        raise UsageError(f"unknown example {args.id!r}; see 'projkit example list'")
    params = _parse_params(args.param)
    unknown = sorted(set(params) - set(catalog.PARAMS[args.id]))
    if unknown:
        _write_json(args.json, {"schema": catalog.REPORT_SCHEMA, "id": args.id, "error": f"unknown params {unknown}", "pass": False})
        raise UsageError(f"example {args.id} takes {list(catalog.PARAMS[args.id])}, got {unknown}")
    report = _example_report(args.id, params, args.trunc, args.fiber_dim)
    _write_json(args.json, report)
    if "error" in report:
        print(f"{args.id}: {report['error']}", file=sys.stderr)
        return 2
    for name, exp in report["expected"].items():
        status = "ok  " if exp["pass"] else "FAIL"
        print(f"{status} {args.id} {name}: measured {_short(report['measured'][name])} expected {exp['value']} ({exp['check']})")
    return 0 if report["pass"] else 1


def _short(m):
    if isinstance(m, dict) and "lower" in m:
        return f"[{m['lower']}, {m['upper']}]"
    return m


def cmd_example_list(args) -> int:
    rows = {eid: desc for eid, (_, desc) in catalog.CATALOG.items()}
    for eid, desc in rows.items():
        print(f"{eid:6s} {desc}  params: {', '.join(catalog.PARAMS[eid]) or '-'}")
    for eid, why in catalog.NOT_BUILT.items():
        print(f"{eid:6s} not built: {why}")
    _write_json(args.json, {"schema": catalog.REPORT_SCHEMA, "built": rows, "not_built": catalog.NOT_BUILT, "pass": True})
    return 0


def _bounds_rows(case: str, grid, resolution) -> list[dict]:
    rows = []
    for theta, t1, t2 in grid:
        rows.append(bounds.compare(case, theta, t1, t2, resolution).row())
    return rows


def cmd_bounds_verify(args) -> int:
    try:
        grid = parse_grid(args.grid)
        cases = ["I", "II"] if args.case == "both" else [args.case]
        rows = [r for case in cases for r in _bounds_rows(case, grid, args.resolution)]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    fields = ["case", "theta", "theta1", "theta2", "closed_form", "oracle_min", "gap", "branch"]
    with open(args.csv, "w", newline="") as fh:
        fh.write(f"# schema={BOUNDS_SCHEMA}\n")
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{r[k]:.12g}" if isinstance(r[k], float) else r[k]) for k in fields})
    worst = max(rows, key=lambda r: r["gap"])
    ok = worst["gap"] <= args.tol
    report = {"schema": BOUNDS_SCHEMA, "cases": cases, "grid": args.grid, "rows": rows, "max_gap": worst["gap"], "tol": args.tol, "pass": ok}
    if not ok:
        report["diagnostic"] = {"transcription_suspect": worst}
    _write_json(args.json, report)
    print(f"{'ok  ' if ok else 'FAIL'} bounds {'/'.join(cases)}: max gap {worst['gap']:.3g} over {len(rows)} rows (tol {args.tol:g})")
    return 0 if ok else 1


def cmd_pairs_table(args) -> int:
    s_grid = _number_list(args.s)
    t_grid = _number_list(args.t)
    if any(x < 1 for x in s_grid + t_grid):
        raise UsageError("s and t must be at least 1")
    rows = catalog.achievable_pairs_table(s_grid, t_grid, trunc=args.trunc, fiber_dim=args.fiber_dim)
    ok = all(r["pass"] for r in rows)
    _write_json(args.json, {"schema": PAIRS_SCHEMA, "rows": rows, "pass": ok})
    for r in rows:
        detail = r.get("error") or f"alpha(p) in {r['alpha_p']}, alpha(closure) in {r['alpha_closure']}"
        print(f"{'ok  ' if r['pass'] else 'FAIL'} ({r['s']:g}, {r['t']:g}) via {r['construction']}: {detail}")
    return 0 if ok else 1


def run_suite(seed: int = 0, quick: bool = False) -> dict:
    """Run every check at default settings; the report depends only on ``seed``."""
    sections = {}
    examples = {}
    for eid in catalog.CATALOG:
        params = {"seed": seed} if "seed" in catalog.PARAMS[eid] else {}
        examples[eid] = _example_report(eid, params, None, None)
    sections["examples"] = {"entries": examples, "not_built": catalog.NOT_BUILT, "pass": all(r["pass"] for r in examples.values())}

    grid = bounds.default_grid()
    bound_rows = {case: _bounds_rows(case, grid[::3] if quick else grid, None) for case in ("I", "II")}
    max_gap = {case: max(r["gap"] for r in rows) for case, rows in bound_rows.items()}
    sections["bounds"] = {"max_gap": max_gap, "tol": BOUNDS_TOL, "pass": all(g <= BOUNDS_TOL for g in max_gap.values())}

    pairs = catalog.achievable_pairs_table([1.0, 2.0, np.inf], [1.0, 2.0, 3.0, np.inf], trunc=16)
    sections["pairs"] = {"rows": pairs, "pass": all(r["pass"] for r in pairs)}

    rng = np.random.default_rng(seed)
    lemma37 = [catalog.lemma_3_7_check(float(rng.uniform(1.01, 5)), float(rng.uniform(0.01, 0.99))) for _ in range(50 if quick else 500)]
    sections["lemma_3_7"] = {"trials": len(lemma37), "failures": sum(not r["pass"] for r in lemma37), "pass": all(r["pass"] for r in lemma37)}
    sections["lemma_4_12"] = catalog.lemma_4_12_check(0.6, 4, trials=50 if quick else 200, seed=seed)
    sections["spectral"] = catalog.spectral_inequality_suite(trials=50 if quick else 500, seed=seed)

    us = [np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])]
    for _ in range(8 if quick else 48):
        u = rng.standard_normal(3)
        us.append(u / np.linalg.norm(u))
    maximin = [bounds.maximin_cap_distance(u) for u in us]
    worst = max(m["disagreement"] for m in maximin)
    sections["maximin"] = {"samples": len(us), "max_disagreement": worst, "pass": worst <= 1e-8}

    return {"schema": SUITE_SCHEMA, "seed": seed, "quick": quick, "sections": sections, "pass": all(s["pass"] for s in sections.values())}


def cmd_suite_all(args) -> int:
    report = run_suite(args.seed, args.quick)
    _write_json(args.json, report)
    for name, sec in report["sections"].items():
        print(f"{'ok  ' if sec['pass'] else 'FAIL'} {name}")
        if name == "examples":
            for eid, r in sec["entries"].items():
                if not r["pass"]:
                    bad = [k for k, v in r.get("expected", {}).items() if not v["pass"]] or [r.get("error")]
                    print(f"     {eid}: {', '.join(map(str, bad))}")
    return 0 if report["pass"] else 1


# parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="projkit", description="Measure alpha and distance quantities for projections in truncated sequence models.")
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("example", help="catalog examples").add_subparsers(dest="action", required=True)
    run = ex.add_parser("run", help="build one example and check its claims")
    run.add_argument("id")
    run.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    run.add_argument("--trunc", type=int, default=None, help="explicit fibers N (default 32)")
    run.add_argument("--fiber-dim", type=int, default=None, help="fiber dimension d (default N + 16)")
    run.add_argument("--json", default="example-report.json")
    run.add_argument("--config", default=None, help="key = value file mirroring these flags")
    run.set_defaults(func=cmd_example_run)
    lst = ex.add_parser("list", help="list catalog ids")
    lst.add_argument("--json", default="example-list.json")
    lst.set_defaults(func=cmd_example_list)

    bv = sub.add_parser("bounds", help="join bounds").add_subparsers(dest="action", required=True)
    ver = bv.add_parser("verify", help="closed forms against the oracle")
    ver.add_argument("--case", choices=["I", "II", "both"], default="both")
    ver.add_argument("--grid", default="default", help="'default' or THETAS/THETA1S/THETA2S")
    ver.add_argument("--csv", default="bounds.csv")
    ver.add_argument("--resolution", type=int, default=None)
    ver.add_argument("--tol", type=float, default=BOUNDS_TOL)
    ver.add_argument("--json", default="bounds-report.json")
    ver.add_argument("--config", default=None)
    ver.set_defaults(func=cmd_bounds_verify)

    pt = sub.add_parser("pairs", help="achievable alpha pairs").add_subparsers(dest="action", required=True)
    tab = pt.add_parser("table", help="measure (alpha(p), alpha(closure)) over a grid")
    tab.add_argument("--s", default="1,2,inf")
    tab.add_argument("--t", default="1,2,3,inf")
    tab.add_argument("--trunc", type=int, default=16)
    tab.add_argument("--fiber-dim", type=int, default=None)
    tab.add_argument("--json", default="pairs-report.json")
    tab.add_argument("--config", default=None)
    tab.set_defaults(func=cmd_pairs_table)

    su = sub.add_parser("suite", help="everything").add_subparsers(dest="action", required=True)
    al = su.add_parser("all", help="run the full suite")
    al.add_argument("--seed", type=int, default=0)
    al.add_argument("--quick", action="store_true", help="smaller samples and grids")
    al.add_argument("--json", default="suite-report.json")
    al.add_argument("--config", default=None)
    al.set_defaults(func=cmd_suite_all)
    return parser


def _leaf_parser(parser: argparse.ArgumentParser, args) -> argparse.ArgumentParser:
    """The subparser that produced ``args``, for reading its defaults."""
    node = parser
    for name in (args.command, args.action):
        action = next(a for a in node._actions if isinstance(a, argparse._SubParsersAction))
        node = action.choices[name]
    return node


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, _leaf_parser(parser, args))
        return args.func(args)
    except UsageError as exc:
        print(f"projkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
