"""``cbc`` command line: verify, survey, explore."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import corpus
from .checks import CHECK_NAMES, run_check
from .errors import CBCError
from .fileformat import parse_group_file
from .group import DEFAULT_NORMAL_CAP, build_group
from .report import certificate_dict, survey_csv
from .series import lower_central_ffunction
from .theorems import SurveyRow, class_breadth_check, conjecture_report


def _load(path: str):
    text = Path(path).read_text()
    return build_group(parse_group_file(text))


def cmd_verify(args) -> int:
    try:
        G = _load(args.input)
    except (CBCError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    names = []
    for item in args.checks.split(","):
        item = item.strip()
        if item == "all":
            names.extend(CHECK_NAMES)
        elif item in CHECK_NAMES:
            names.append(item)
        else:
            print(f"error: unknown check {item!r}", file=sys.stderr)
            return 2
    names = list(dict.fromkeys(names))
    print(f"group {G.label}: p = {G.prime}, order = {G.order}")
    results = [run_check(n, G, cap=args.max_normals) for n in names]
    width = max(len(n) for n in names)
    for r in results:
        print(f"  {r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  {r.detail}")
    if args.json:
        payload = {
            "group_label": G.label, "p": G.prime, "order": G.order,
            "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
            "certificates": {r.name: [certificate_dict(c, G) for c in r.certificates]
                             for r in results if r.certificates},
        }
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
    return 0 if all(r.passed for r in results) else 1


def _survey_one(spec) -> SurveyRow:
    try:
        G = build_group(spec)
        return class_breadth_check(G)
    except CBCError as exc:
        return SurveyRow(spec.label, spec.prime, corpus.spec_order(spec), error=f"{type(exc).__name__}: {exc}")


def cmd_survey(args) -> int:
    try:
        primes = [int(x) for x in args.p.split(",") if x.strip()]
        specs = []
        for p in primes:
            specs.extend(corpus.family_members(args.family, p, args.max_order))
    except (CBCError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.parallel > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            rows = list(pool.map(_survey_one, specs))
    else:
        rows = [_survey_one(s) for s in specs]
    print(f"{'label':<28} {'p':>2} {'order':>6} {'b':>3} {'cl':>3} {'cl<=b+1':>8} {'t2 idx':>6} {'t2 cl':>5}")
    for r in rows:
        if r.error:
            print(f"{r.label:<28} {r.p:>2} {r.order:>6}  flagged: {r.error}")
            continue
        print(f"{r.label:<28} {r.p:>2} {r.order:>6} {r.breadth:>3} {r.cls:>3} {str(r.status):>8} "
              f"{r.t2_index:>6} {r.t2_class:>5}")
    if args.csv:
        Path(args.csv).write_text(survey_csv(rows))
    bad = [r for r in rows if not r.error and not (r.status and r.t2_ok)]
    return 1 if bad else 0


def cmd_explore(args) -> int:
    try:
        G = _load(args.input)
    except (CBCError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    rep = conjecture_report(G, lower_central_ffunction(G), args.max_normals, args.subset_cap)
    for line in rep.lines():
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cbc", description="Class-breadth verification harness for p-groups, p > 2.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run checks on a group file")
    v.add_argument("--input", required=True)
    v.add_argument("--checks", default="all", help="comma list of " + ",".join(CHECK_NAMES) + ",all")
    v.add_argument("--json", help="write certificates and results as JSON")
    v.add_argument("--max-normals", type=int, default=DEFAULT_NORMAL_CAP)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("survey", help="class-breadth survey over a family")
    s.add_argument("--family", required=True, choices=[f for f in corpus.FAMILIES if f != "direct_product"])
    s.add_argument("--p", default="3", help="comma-separated odd primes")
    s.add_argument("--max-order", type=int, default=729)
    s.add_argument("--parallel", type=int, default=1)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_survey)

    e = sub.add_parser("explore", help="restricted Cl/K conjecture explorer")
    e.add_argument("--input", required=True)
    e.add_argument("--max-normals", type=int, default=DEFAULT_NORMAL_CAP)
    e.add_argument("--subset-cap", type=int, default=15)
    e.set_defaults(func=cmd_explore)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
