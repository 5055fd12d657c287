"""``cornerforge`` command line.

Every command prints (or writes to ``--out``) a JSON report with sorted keys
and exits 0 exactly when all of its verdicts pass; bad input exits 2.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import acceptance
from . import double_fold as df
from . import drill_algebraic as da
from . import drill_local as dl
from . import germs as gm
from . import surfaces as sf
from .poly import as_rat
from .system import VarietySystem


class InputError(Exception):
    pass


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from None


def _verdict(name: str, ok: bool, witness=None) -> dict:
    return {"name": name, "ok": bool(ok), "witness": witness}


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


# -- germ / desing --------------------------------------------------------------

def cmd_germ(args) -> tuple:
    g = gm.OrthantGerm.from_json(_load_json(args.germ))
    n = gm.normalize(g)
    if args.action == "e":
        e = gm.e_value(n)
        return {"e": e}, [_verdict("e is never 1", e != 1)]
    if args.action == "normalize":
        return {"germ": n.to_json()}, []
    corner = gm.is_corner_germ(n)
    return {"corner": corner, "disconnecting": list(gm.disconnecting_coords(n))}, []


def cmd_desing(args) -> tuple:
    g = gm.OrthantGerm.from_json(_load_json(args.germ))
    try:
        tree = dl.desingularize(g, max_depth=args.max_depth)
    except dl.DepthExceeded as exc:
        return {"tree": None}, [_verdict("terminates within max depth", False, str(exc))]
    leaves = tree.leaves()
    bad = [str(leaf) for leaf in leaves if gm.e_value(leaf) != 0]
    return {"tree": tree.to_json(), "depth": tree.depth(), "leaves": len(leaves)}, [
        _verdict("terminates within max depth", True),
        _verdict("every leaf is a corner germ", not bad, bad[:3] or None),
    ]


# -- drill ------------------------------------------------------------------------

def cmd_drill(args) -> tuple:
    if args.action == "emit":
        if not args.center:
            raise InputError("drill emit needs --center")
        center = da.CenterData.from_json(_load_json(args.center))
        system = da.emit_twisted_double(center, args.epsilon)
        return {"system": system.to_json()}, []
    if not args.system:
        raise InputError("drill verify needs --system")
    data = _load_json(args.system)
    # accept a bare system or an emit report that embeds one
    system = VarietySystem.from_json(data.get("system", data))
    if "center" not in system.meta:
        raise InputError("system has no recorded center (emit it with 'drill emit')")
    center = da.CenterData.from_json(system.meta["center"])
    rng = _rng(args.seed)
    eps = system.meta.get("epsilon", "both")
    bad = []
    for x in da.sample_off_center(center, rng, args.samples):
        signs = (1, -1) if eps == "both" else (eps,)
        for s in signs:
            p = da.lift_point(center, x, s)
            if not system.satisfies(p, args.tolerance):
                bad.append(list(p))
    theta = da.theta_check(center, samples=min(args.samples, 100), rng=rng, tol=args.tolerance)
    return {"samples": args.samples}, [
        _verdict("lifted samples satisfy the system", not bad, bad[:3] or None),
        _verdict("theta is two-to-one on samples", theta["ok"], theta["failures"] or None),
    ]


# -- double / fold ------------------------------------------------------------------

def cmd_double(args) -> tuple:
    spec = df.CornersSpec.from_json(_load_json(args.spec))
    system = df.emit_double(spec, None if args.copy == "both" else args.copy)
    return {"system": system.to_json()}, []


def cmd_fold(args) -> tuple:
    p = df.FoldParams(as_rat(args.a), args.k)
    if args.action == "eval":
        if args.t is None:
            raise InputError("fold eval needs --t")
        return {"value": df.fold_eval(p, float(as_rat(args.t)))}, []
    rep = df.fold_certify(p)
    return {"certificate": rep}, [_verdict(name, v["ok"], v["witness"]) for name, v in rep["verdicts"].items()]


# -- surface ---------------------------------------------------------------------------

def _surface_instance(args):
    if args.n is None or args.s is None:
        raise InputError("need --n and --s")
    return sf.lattice_polygon(args.n), sf.standard_partition(args.n, args.s)


def cmd_surface(args) -> tuple:
    if args.action == "table":
        return sf.table(args.n_max, args.s_max), []
    poly, part = _surface_instance(args)
    top = sf.quotient_complex(poly, part)
    V, E, F, chi = sf.euler_formula(args.n, args.s)
    topo = [
        _verdict("quotient chi equals formula", top.chi == chi, top.to_json()),
        _verdict("quotient is connected", top.connected),
        _verdict("genus matches formula", top.genus == sf.genus_formula(args.n, args.s), top.genus),
    ]
    result = {
        "polygon": [[str(c) for c in v] for v in poly.vertices],
        "partition": part.to_json(),
        "topology": top.to_json(),
        "formula": {"V": V, "E": E, "F": F, "chi": chi},
    }
    if args.action == "build":
        result["system"] = sf.emit_surface(poly, part).to_json()
        return result, topo
    reg = sf.verify_regularity(poly, part)
    result["regularity"] = reg
    return result, topo + [_verdict("Jacobian rank s at every stratum", reg["ok"], reg["witness"])]


# -- suite ----------------------------------------------------------------------------

def cmd_suite(args):
    lines, ok = [], True
    for number in acceptance.CRITERIA:
        res = acceptance.run_criterion(number, args.seed)
        ok &= res.ok
        print(res.line(), file=sys.stderr)
        row = res.to_json()
        row["seed"] = args.seed
        row["elapsed_ms"] = round(res.elapsed * 1000)
        lines.append(json.dumps(row, sort_keys=True, default=str))
    return "\n".join(lines), ok


# -- driver -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of standard output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--max-depth", type=int, default=8)

    parser = argparse.ArgumentParser(prog="cornerforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("germ", parents=[common], help="e-invariant and normal form of an orthant germ")
    p.add_argument("action", choices=("e", "normalize", "corner"))
    p.add_argument("--germ", required=True)

    p = sub.add_parser("desing", parents=[common], help="blow up a germ until every chart is a corner")
    p.add_argument("--germ", required=True)

    p = sub.add_parser("drill", parents=[common], help="twisted double of an algebraic drilling blow-up")
    p.add_argument("action", choices=("emit", "verify"))
    p.add_argument("--center")
    p.add_argument("--epsilon", choices=("+", "-", "both"), default="both")
    p.add_argument("--system")
    p.add_argument("--samples", type=int, default=1000)

    p = sub.add_parser("double", parents=[common], help="Nash double of a set with corners")
    p.add_argument("action", choices=("emit",))
    p.add_argument("--spec", required=True)
    p.add_argument("--copy", choices=("plus", "both"), default="both")

    p = sub.add_parser("fold", parents=[common], help="folding function checks")
    p.add_argument("action", choices=("certify", "eval"))
    p.add_argument("--a", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t")
    p.add_argument("--report", dest="out_alias")

    p = sub.add_parser("surface", parents=[common], help="the surfaces D_s(P_n)")
    p.add_argument("action", choices=("build", "table", "verify"))
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--n-max", type=int, default=7)
    p.add_argument("--s-max", type=int, default=7)

    sub.add_parser("suite", parents=[common], help="run every acceptance criterion")
    return parser


HANDLERS = {
    "germ": cmd_germ, "desing": cmd_desing, "drill": cmd_drill, "double": cmd_double,
    "fold": cmd_fold, "surface": cmd_surface,
}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = getattr(args, "out_alias", None) or args.out
    start = time.perf_counter()
    try:
        if args.command == "suite":
            text, ok = cmd_suite(args)
            _emit(text, out)
            return 0 if ok else 1
        result, verdicts = HANDLERS[args.command](args)
    except (InputError, ValueError, KeyError, TypeError, AttributeError) as exc:
        print(f"cornerforge: error: {exc}", file=sys.stderr)
        return 2
    if isinstance(result, str):
        _emit(result, out)
        return 0
    inputs = {k: v for k, v in vars(args).items() if k not in ("out", "out_alias") and v is not None}
    report = {
        "command": args.command,
        "inputs": inputs,
        "verdicts": verdicts,
        "seed": args.seed,
        "elapsed_ms": round((time.perf_counter() - start) * 1000),
        **result,
    }
    _emit(json.dumps(report, sort_keys=True, indent=2, default=str), out)
    return 0 if all(v["ok"] for v in verdicts) else 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
