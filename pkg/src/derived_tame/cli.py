"""Command-line front end.

Each run produces one JSON report (``--out`` writes it to a file, ``--json``
prints it); the default stdout view is a plain-text rendering of the same
report.  Exit codes: 0 success, 1 invalid input, 2 refused as too large,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .algebra import AlgebraError, build_algebra, check_coassociativity
from .boxes import BoxError, box_presentation, build_sliced_box, wild_pattern_detect
from .complexes import (ComplexError, check_dsquared, complex_to_json, homology, iso_test, load_complex,
                        minimalize)
from .corpus import corpus_algebra, corpus_family
from .deformations import (DeformationError, default_grid, dim_scan, flat_limit, generic_dim, par_scan)
from .families import (FamilyError, HomSpace, InfeasibleError, parse_ranks, par_estimate,
                       radical_power_ideal, tame_heuristic)
from .fields import parse_field
from .groebner import GroebnerError
from .presentation import PresentationError, load_family, load_presentation

DEFAULT_SEED = 20240601

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 1, 2, 3


class InvariantViolation(RuntimeError):
    """An internal consistency check failed."""


# --- helpers -------------------------------------------------------------------------

def _digest(paths) -> dict:
    out = {}
    for p in paths:
        with open(p, "rb") as fh:
            out[os.path.basename(str(p))] = hashlib.sha256(fh.read()).hexdigest()
    return out


def _parse_window(text: str) -> tuple[int, int]:
    for sep in ("..", ":"):
        if sep in text:
            a, b = text.split(sep, 1)
            try:
                return int(a), int(b)
            except ValueError:
                break
    raise argparse.ArgumentTypeError(f"window must look like 0..2, got {text!r}")


def _parse_grid(text: str) -> list:
    text = text.strip()
    if ".." in text:
        a, b = (int(x) for x in text.split("..", 1))
        return list(range(a, b + 1))
    try:
        vals = [Fraction(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse grid {text!r}") from None
    return [int(v) if v.denominator == 1 else v for v in vals]


def _load_algebra(path: str, field_name: str | None):
    pres = load_presentation(path)
    if field_name:
        pres = pres.with_field(parse_field(field_name))
    return build_algebra(pres)


def _load_family(path: str, field_name: str | None):
    fam = load_family(path)
    if field_name:
        fam = fam.with_field(parse_field(field_name))
    return fam


def _ideal_fn(power: int):
    if power < 1:
        raise FamilyError("--ideal-power must be at least 1")
    return lambda alg: radical_power_ideal(alg, power)


def _require_invariants(alg) -> None:
    fails = alg.check_invariants() + check_coassociativity(alg)
    if fails:
        raise InvariantViolation("; ".join(fails))


# --- commands ------------------------------------------------------------------------

def cmd_algebra_inspect(args) -> dict:
    alg = _load_algebra(args.path, args.field)
    _require_invariants(alg)
    s = alg.num_vertices
    nu = {}
    for j in range(s):
        for i in range(s):
            table = alg.nu(j, i)
            if table:
                nu[f"{j + 1}<-{i + 1}"] = {a: [f"{c}*{b}(x){g}" for c, b, g in terms]
                                           for a, terms in table.items()}
    payload = alg.summary()
    payload["relations"] = alg.presentation.relation_strings()
    payload["invariants"] = "pass"
    payload["nu"] = nu
    return payload


def cmd_box_build(args) -> dict:
    alg = _load_algebra(args.path, args.field)
    low, top = args.window
    box = build_sliced_box(alg, low, top)
    payload = box.to_json(full=args.list)
    hit = wild_pattern_detect(box_presentation(box))
    payload["wild_pattern"] = hit
    return payload


def cmd_complex(args) -> dict:
    field = parse_field(args.field) if args.field else None
    c = load_complex(args.path, field)
    action = args.action
    if action == "check":
        rep = check_dsquared(c)
        if not rep.ok:
            raise ComplexError(f"d^2 != 0 at degree {rep.failing_degree}")
        return {"dsquared": "ok", "minimal": c.is_minimal(), "ranks": [list(r) for r in c.ranks],
                "low": c.low}
    if action == "homology":
        if not check_dsquared(c).ok:
            raise ComplexError("d^2 != 0")
        return {"homology": homology(c).to_json()}
    if action == "minimalize":
        m = minimalize(c)
        if homology(m) != homology(c):
            raise InvariantViolation("minimalization changed homology")
        return {"minimal": complex_to_json(m), "homology": homology(m).to_json()}
    if action == "iso":
        if not args.other:
            raise ComplexError("iso needs a second complex file")
        c2 = load_complex(args.other, alg=c.alg)
        verdict = iso_test(c, c2, seed=args.seed)
        out = verdict.to_json()
        out["seed"] = args.seed
        return out
    raise ComplexError(f"unknown action {action!r}")


def cmd_par_estimate(args) -> dict:
    alg = _load_algebra(args.path, args.field)
    vrank = parse_ranks(args.ranks, args.low)
    ideal_fn = _ideal_fn(args.ideal_power)
    H = HomSpace(alg, vrank, ideal_fn(alg))
    est = par_estimate(alg, vrank, mode=args.mode, ideal_fn=ideal_fn, seed=args.seed, cap=args.cap)
    return {"ranks": vrank.to_json(), "dim_H": H.dim, "group_dim": H.group_dim(),
            "ideal_power": args.ideal_power, "estimate": est.to_json(),
            "par": [est.lo, est.hi], "verdict": tame_heuristic(vrank, est), "mode": args.mode,
            "seed": args.seed}


def cmd_family(args) -> dict:
    fam = _load_family(args.path, args.field)
    grid = args.grid if args.grid is not None else default_grid(fam.field)
    if args.action == "dims":
        dims = dim_scan(fam, grid)
        g = generic_dim(fam)
        return {"generic_dim": g, "dims": {str(v): d for v, d in dims.items()},
                "flat": all(d == g for d in dims.values()), "relations": fam.relation_strings()}
    if args.action == "flatlimit":
        return {"flat_limit": flat_limit(fam).to_json()}
    if args.action == "parscan":
        if not args.ranks:
            raise FamilyError("parscan needs --ranks")
        vrank = parse_ranks(args.ranks, args.low)
        scan = par_scan(fam, vrank, grid, mode=args.mode, seed=args.seed,
                        ideal_fn=_ideal_fn(args.ideal_power))
        out = scan.to_json()
        out.update({"ranks": vrank.to_json(), "mode": args.mode, "seed": args.seed})
        return out
    raise FamilyError(f"unknown action {args.action!r}")


# ranks over A(0) and B for the demo table; vertex order 1..6
DEMO_RANKS = ["0,1,0,0,0,0;1,0,0,0,0,0", "0,0,1,0,0,0;0,1,0,0,0,0", "0,0,0,1,0,0;0,0,1,0,0,0;0,1,0,0,0,0"]


def cmd_brustle_demo(args) -> dict:
    fam = corpus_family("brustle")
    dims = dim_scan(fam, [0, 1])
    g = generic_dim(fam)
    limit = flat_limit(fam)
    F = parse_field(args.field) if args.field else parse_field("F2")
    table = []
    for name in ("brustle_A0", "brustle_B"):
        alg = corpus_algebra(name, F)
        for r in DEMO_RANKS:
            vrank = parse_ranks(r)
            est = par_estimate(alg, vrank, mode="exact", seed=args.seed)
            table.append({"algebra": name, "ranks": r, "dim_H": HomSpace(alg, vrank).dim,
                          "par": est.lo, "strata": {str(k): v for k, v in sorted(est.strata.items())}})
    return {"dims": {"0": dims[0], "1": dims[1], "generic": g},
            "flat": dims[0] == g and dims[1] == g,
            "flat_limit": limit.to_json(), "par_table": table, "field": F.name, "seed": args.seed}


COMMANDS = {
    ("algebra", "inspect"): cmd_algebra_inspect,
    ("box", "build"): cmd_box_build,
    ("par", "estimate"): cmd_par_estimate,
    ("brustle", "demo"): cmd_brustle_demo,
}


# --- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="derived-tame", description="Sliced boxes, minimal complexes and parameter numbers.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="group", required=True)

    def common(sp, seed=True):
        sp.add_argument("--field", help="override the coefficient field (Q, F2, F3, F4, ...)")
        sp.add_argument("--out", help="write the JSON report to this file")
        sp.add_argument("--json", action="store_true", help="print the JSON report instead of text")
        if seed:
            sp.add_argument("--seed", type=int, default=DEFAULT_SEED)

    alg = sub.add_parser("algebra", help="inspect an algebra file").add_subparsers(dest="action", required=True)
    sp = alg.add_parser("inspect", help="dimensions, Peirce and radical tables, nu")
    sp.add_argument("path")
    common(sp, seed=False)

    box = sub.add_parser("box", help="sliced boxes").add_subparsers(dest="action", required=True)
    sp = box.add_parser("build", help="sliced box over a degree window")
    sp.add_argument("path")
    sp.add_argument("--window", type=_parse_window, required=True, help="degrees, e.g. 0..2")
    sp.add_argument("--list", action="store_true", help="include objects, arrows and relations")
    common(sp, seed=False)

    cx = sub.add_parser("complex", help="check|homology|minimalize|iso")
    cx.add_argument("action", choices=["check", "homology", "minimalize", "iso"])
    cx.add_argument("path")
    cx.add_argument("other", nargs="?")
    common(cx)

    par = sub.add_parser("par", help="parameter numbers").add_subparsers(dest="action", required=True)
    sp = par.add_parser("estimate", help="parameter number of D(R, I)")
    sp.add_argument("path")
    sp.add_argument("--ranks", required=True, help="degrees separated by ';', vertices by ','")
    sp.add_argument("--low", type=int, default=0, help="lowest degree of the ranks")
    sp.add_argument("--mode", choices=["exact", "tangent", "sample"], default="exact")
    sp.add_argument("--ideal-power", type=int, default=1, help="use I = J^n")
    sp.add_argument("--cap", type=int, default=10**6, help="largest number of points to enumerate")
    common(sp)

    fam = sub.add_parser("family", help="dims|flatlimit|parscan")
    fam.add_argument("action", choices=["dims", "flatlimit", "parscan"])
    fam.add_argument("path")
    fam.add_argument("--grid", type=_parse_grid, help="parameter values, e.g. 0..10 or 0,1,1/2")
    fam.add_argument("--ranks")
    fam.add_argument("--low", type=int, default=0)
    fam.add_argument("--mode", choices=["exact", "tangent", "sample"], default="exact")
    fam.add_argument("--ideal-power", type=int, default=1)
    common(fam)

    demo = sub.add_parser("brustle", help="Bruestle family demo").add_subparsers(dest="action", required=True)
    sp = demo.add_parser("demo", help="dimensions, flat limit and a par table for the Bruestle family")
    common(sp)
    return p


def render_text(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.extend(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)) and not _flat_list(v):
                lines.append(f"{pad}-")
                lines.extend(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(f"{pad}{_scalar(value)}")
    return lines


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, dict) for x in v) and \
        all(not isinstance(x, list) or all(not isinstance(y, (dict, list)) for y in x) for x in v)


def _scalar(v) -> str:
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return "null" if v is None else str(v)


def _dump(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = f"{args.group} {getattr(args, 'action', '')}".strip()
    inputs = [x for x in (getattr(args, "path", None), getattr(args, "other", None)) if x]
    report = {"tool": "derived-tame", "version": __version__, "subcommand": sub}
    try:
        report["inputs"] = _digest(inputs)
        if args.group == "complex":
            payload = cmd_complex(args)
        elif args.group == "family":
            payload = cmd_family(args)
        else:
            payload = COMMANDS[(args.group, args.action)](args)
        report["payload"] = payload
        code = EXIT_OK
    except InfeasibleError as exc:
        report["error"] = {"kind": "infeasible", "message": str(exc)}
        code = EXIT_INFEASIBLE
    except InvariantViolation as exc:
        report["error"] = {"kind": "invariant", "message": str(exc)}
        code = EXIT_INVARIANT
    except PresentationError as exc:
        report["error"] = {"kind": "parse", "message": str(exc), "line": exc.line, "col": exc.col}
        code = EXIT_INVALID
    except (AlgebraError, BoxError, ComplexError, FamilyError, DeformationError, GroebnerError,
            OSError, ValueError, KeyError) as exc:
        report["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        code = EXIT_INVALID
    text = _dump(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if "error" in report:
        sys.stderr.write(text)
    elif args.json:
        sys.stdout.write(text)
    else:
        sys.stdout.write("\n".join(render_text(report)) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
