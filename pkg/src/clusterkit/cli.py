"""Command-line front end: JSON in, JSON (or DOT) out.

Exit codes: 0 success/verified, 1 verification failure (witness in the
output), 2 input error.
"""

import argparse
import json
import sys

from . import glue, morphism, seed, surface

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: parse error at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc


def _load_seed(path):
    try:
        return seed.seed_from_json(_load_json(path))
    except (ValueError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_morphism(path):
    try:
        return morphism.morphism_from_json(_load_json(path))
    except (ValueError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(payload, args):
    if isinstance(payload, str):
        text = payload
    elif getattr(args, "pretty", False):
        text = json.dumps(payload, indent=2, sort_keys=True)
    else:
        text = json.dumps(payload, sort_keys=True)
    print(text)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")


def _seed_payload(s, pretty=False):
    render = (lambda e: e.render_fraction()) if pretty else (lambda e: e.render())
    return {
        "variables": list(s.labels),
        "exchangeable": [s.labels[i] for i in sorted(s.exchangeable)],
        "matrix": [list(r) for r in s.matrix.rows],
        "cluster": [render(e) for e in s.expansions],
        "history": [label for _, label in s.history],
    }


def cmd_mutate(args):
    s = _load_seed(args.seed_file)
    try:
        s = s.mutate_seq(args.at)
    except seed.NotAdmissible as exc:
        raise InputError(str(exc)) from exc
    _emit(_seed_payload(s, args.pretty), args)
    return OK


def cmd_explore(args):
    s = _load_seed(args.seed_file)
    result = seed.mutation_class(s, max_depth=args.depth,
                                 max_seeds=args.max_seeds)
    _emit({"status": result.status,
           "seeds": result.seeds_explored,
           "variables": len(result.variables),
           "depth_reached": result.depth_reached}, args)
    return OK


def cmd_variables(args):
    s = _load_seed(args.seed_file)
    vs = seed.cluster_variables(s, max_depth=args.depth)
    render = (lambda e: e.render_fraction()) if args.pretty else (lambda e: e.render())
    _emit({"count": len(vs), "variables": sorted(render(v) for v in vs)}, args)
    return OK


def cmd_verify(args):
    f = _load_morphism(args.morphism_file)
    report = morphism.verify_cm3(f, args.depth)
    _emit(report.to_json(), args)
    return OK if report.verified else FAILED


def cmd_compose(args):
    if len(args.morphism_file) != 2:
        raise InputError("compose needs exactly two --morphism-file arguments")
    f = _load_morphism(args.morphism_file[0])
    g_obj = _load_json(args.morphism_file[1])
    g_source = seed.seed_from_json(g_obj["source"])
    if (g_source.labels != f.target.labels
            or g_source.matrix != f.target.matrix
            or g_source.exchangeable != f.target.exchangeable):
        raise InputError("second morphism's source does not match the first's target")
    try:
        g = morphism.build_morphism(f.target,
                                    seed.seed_from_json(g_obj["target"]),
                                    dict(g_obj["map"]))
        composed = morphism.compose(g, f)
    except (ValueError, KeyError) as exc:
        raise InputError(str(exc)) from exc
    payload = morphism.morphism_to_json(composed)
    if args.depth:
        report = morphism.verify_cm3(composed, args.depth)
        payload["verification"] = report.to_json()
        _emit(payload, args)
        return OK if report.verified else FAILED
    _emit(payload, args)
    return OK


def cmd_glue(args):
    try:
        g = glue.gluespec_from_json(_load_json(args.glue_file))
        total = glue.amalgamated_sum(g)
    except glue.NotGlueable as exc:
        raise InputError(f"not glueable: {exc}") from exc
    _emit(seed.seed_to_json(total), args)
    return OK


def cmd_cut(args):
    s = _load_seed(args.seed_file)
    try:
        p = glue.separating_partition(s, args.delta)
        side1, side2 = glue.cut(p)
    except (glue.NotSeparating, seed.NoSuchVariable) as exc:
        raise InputError(str(exc)) from exc
    _emit({"side1": seed.seed_to_json(side1),
           "side2": seed.seed_to_json(side2)}, args)
    return OK


def cmd_specialise(args):
    s = _load_seed(args.seed_file)
    try:
        spec, pre = morphism.specialisation(s, args.var, args.value)
    except seed.NoSuchVariable as exc:
        raise InputError(f"no such variable: {exc}") from exc
    payload = morphism.morphism_to_json(spec)
    payload["pre_report"] = {"possible": pre.possible, "flags": list(pre.flags)}
    if not pre.possible:
        _emit(payload, args)
        return FAILED
    report = morphism.verify_cm3(spec, args.depth)
    payload["verification"] = report.to_json()
    _emit(payload, args)
    return OK if report.verified else FAILED


def cmd_restrict(args):
    s = _load_seed(args.seed_file)
    try:
        f = morphism.restriction(s, args.keep)
    except seed.NoSuchVariable as exc:
        raise InputError(f"no such variable: {exc}") from exc
    report = morphism.verify_cm3(f, args.depth)
    payload = morphism.morphism_to_json(f)
    payload["verification"] = report.to_json()
    _emit(payload, args)
    return OK if report.verified else FAILED


def _triangulation_from_args(args):
    if args.fan:
        return surface.fan_triangulation(args.fan)
    if args.triangulation_file:
        try:
            return surface.triangulation_from_json(
                _load_json(args.triangulation_file))
        except (ValueError, surface.InvalidTriangulation) as exc:
            raise InputError(str(exc)) from exc
    raise InputError("need --fan M or --triangulation-file PATH")


def cmd_polygon(args):
    t = _triangulation_from_args(args)
    s = surface.polygon_seed(t)
    if args.export_dot:
        _emit(seed.seed_to_dot(s, name=f"polygon{t.m}"), args)
    else:
        _emit(seed.seed_to_json(s), args)
    return OK


def cmd_plucker(args):
    t = _triangulation_from_args(args)
    results = surface.plucker_check(t)
    payload = {"m": t.m,
               "checks": [{"arc": list(arc), "ok": ok} for arc, ok in results],
               "all_ok": all(ok for _, ok in results)}
    _emit(payload, args)
    return OK if payload["all_ok"] else FAILED


def cmd_export_dot(args):
    s = _load_seed(args.seed_file)
    _emit(seed.seed_to_dot(s), args)
    return OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="clusterkit",
        description="Exact workbench for seeds, mutations and morphisms of "
                    "rooted cluster algebras.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--pretty", action="store_true",
                       help="indent JSON and render fraction-style polynomials")
        p.add_argument("--out", help="also write the output to this file")
        p.add_argument("--depth", type=int, default=4,
                       help="bound for all verifications (default 4)")

    p = sub.add_parser("mutate", help="apply a mutation sequence to a seed")
    p.add_argument("--seed-file", required=True)
    p.add_argument("--at", action="append", required=True,
                   help="variable to mutate at (repeatable, in order)")
    common(p)
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("explore", help="breadth-first mutation-class search")
    p.add_argument("--seed-file", required=True)
    p.add_argument("--max-seeds", type=int, default=20000)
    common(p)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("variables", help="cluster variables within a depth")
    p.add_argument("--seed-file", required=True)
    common(p)
    p.set_defaults(func=cmd_variables)

    p = sub.add_parser("verify", help="depth-bounded mutation-compatibility check")
    p.add_argument("--morphism-file", required=True)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compose", help="compose two morphisms (f then g)")
    p.add_argument("--morphism-file", action="append", required=True)
    common(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("glue", help="amalgamated sum from a glue file")
    p.add_argument("--glue-file", required=True)
    common(p)
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("cut", help="cut a seed along a separating frozen set")
    p.add_argument("--seed-file", required=True)
    p.add_argument("--delta", action="append", required=True)
    common(p)
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("specialise", help="specialise one variable to an integer")
    p.add_argument("--seed-file", required=True)
    p.add_argument("--var", required=True)
    p.add_argument("--value", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_specialise)

    p = sub.add_parser("restrict", help="restriction onto a full subseed")
    p.add_argument("--seed-file", required=True)
    p.add_argument("--keep", action="append", required=True)
    common(p)
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("polygon", help="seed of a polygon triangulation")
    p.add_argument("--fan", type=int)
    p.add_argument("--triangulation-file")
    p.add_argument("--export-dot", action="store_true")
    common(p)
    p.set_defaults(func=cmd_polygon)

    p = sub.add_parser("plucker", help="check exchange relations are Plücker")
    p.add_argument("--fan", type=int)
    p.add_argument("--triangulation-file")
    common(p)
    p.set_defaults(func=cmd_plucker)

    p = sub.add_parser("export-dot", help="valued quiver of a seed as DOT")
    p.add_argument("--seed-file", required=True)
    common(p)
    p.set_defaults(func=cmd_export_dot)

    return parser


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        return args.func(args)
    except InputError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return BAD_INPUT
    except (seed.NotSkewSymmetrisable, seed.DuplicateLabel,
            seed.DimensionMismatch, ValueError, KeyError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return BAD_INPUT


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
