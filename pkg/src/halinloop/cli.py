"""Command-line interface.

One binary, ``hll``, with subcommands mirroring the library API:
enumeration, map construction, conditioned sampling, bijection round
trips, Gromov-Hausdorff checks, looptree exports, scaling experiments
and DOT rendering.  Exit codes: 0 success, 2 usage error, 3 invariant
violation, 4 budget exceeded.  ``HLL_SEED`` provides the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import BudgetExceededError, InvariantError, UsageError
from .experiments import ScalingRunConfig, atomic_write, render, rows_to_csv
from .plane_tree import (
    MarkedTree,
    PlaneTree,
    format_marked,
    format_tree,
    parse_marked,
    parse_tree,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_BUDGET = 4


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        payload = args.func(args)
    except BudgetExceededError as e:
        _emit_error(args, "budget", e)
        return EXIT_BUDGET
    except InvariantError as e:
        _emit_error(args, "invariant", e)
        return EXIT_INVARIANT
    except UsageError as e:
        _emit_error(args, "usage", e)
        return EXIT_USAGE
    _emit(args, payload)
    return EXIT_OK


# -- output plumbing -----------------------------------------------------------


def _emit(args, payload: dict) -> None:
    fmt = getattr(args, "format", "text")
    if fmt == "json":
        text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        if "csv" not in payload:
            raise SystemExit("no CSV form for this command")
        text = payload["csv"]
    elif fmt == "dot":
        if "dot" not in payload:
            raise SystemExit("no DOT form for this command")
        text = payload["dot"]
    else:
        text = payload.get("text", json.dumps(_jsonable(payload), sort_keys=True)) + "\n"
    out = getattr(args, "out", None)
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _emit_error(args, kind: str, exc: Exception) -> None:
    if getattr(args, "format", "text") == "json":
        sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")
    else:
        sys.stderr.write("error (%s): %s\n" % (kind, exc))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    return x


def _default_seed() -> int:
    return int(os.environ.get("HLL_SEED", "0"))


def _resolved_config(args, keys: list[str]) -> dict:
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def _parse_tree_arg(text: str | None) -> PlaneTree:
    if not text:
        raise UsageError("missing --tree")
    try:
        return parse_tree(text)
    except (InvariantError, ValueError) as e:
        raise UsageError("invalid tree code: %s" % e) from e


def _parse_marked_arg(text: str | None) -> MarkedTree:
    if not text:
        raise UsageError("missing --marked")
    try:
        return parse_marked(text)
    except (InvariantError, ValueError) as e:
        raise UsageError("invalid marked tree: %s" % e) from e


def _mu(args):
    from .gw import mu_from_weights, stable_mu

    if getattr(args, "alpha", None) is not None:
        return stable_mu(args.alpha)
    return mu_from_weights(lambda k: 1.0)


# -- subcommands ---------------------------------------------------------------


def _cmd_enumerate(args) -> dict:
    from .halin import enumerate_halin, halin_count

    count = halin_count(args.n)
    payload = {"n": args.n, "count": count, "config": _resolved_config(args, ["n", "count_only"])}
    if args.count_only:
        payload["text"] = str(count)
        return payload
    maps = [format_tree(H.tree) for H in enumerate_halin(args.n, force=args.force)]
    payload["maps"] = maps
    payload["text"] = "\n".join([str(count)] + maps)
    return payload


def _cmd_build(args) -> dict:
    from .halin import build_halin

    H = build_halin(_parse_tree_arg(args.tree))
    H.validate()
    payload = {
        "tree": format_tree(H.tree),
        "map": H.map.to_json(),
        "dot": render(H),
        "config": _resolved_config(args, ["tree"]),
    }
    payload["text"] = json.dumps(payload["map"], sort_keys=True)
    return payload


def _cmd_sample(args) -> dict:
    from .bijection import phi_inverse
    from .gw import sample_conditioned

    mu = _mu(args)
    rng = np.random.default_rng(args.seed)
    trees = []
    for _ in range(args.samples):
        tree = sample_conditioned(mu, args.n, rng)
        if args.as_map:
            marks = tuple(int(rng.integers(0, k + 1)) for k in tree.code)
            H = phi_inverse(MarkedTree(tree, marks))
            H.validate()
            trees.append(format_marked(MarkedTree(tree, marks)))
        else:
            trees.append(format_tree(tree))
    return {
        "samples": trees,
        "config": _resolved_config(args, ["n", "samples", "seed", "alpha", "as_map"]),
        "text": "\n".join(trees),
    }


def _cmd_mu(args) -> dict:
    from .gw import b_n_of

    mu = _mu(args)
    table = [mu.pmf(k) for k in range(args.kmax + 1)]
    payload = {
        "name": mu.name,
        "mean": mu.mean,
        "alpha": mu.alpha,
        "tail_constant": mu.tail_constant,
        "pmf": table,
        "config": _resolved_config(args, ["alpha", "kmax"]),
    }
    if args.n:
        payload["b_n"] = b_n_of(mu, args.n)
    payload["text"] = "\n".join("mu(%d) = %.12g" % (k, p) for k, p in enumerate(table))
    return payload


def _cmd_bij(args) -> dict:
    from .bijection import phi, phi_inverse, pushforward_distribution
    from .halin import build_halin, enumerate_halin

    if args.action == "phi":
        H = build_halin(_parse_tree_arg(args.tree))
        t = phi(H)
        return {"marked": format_marked(t), "text": format_marked(t),
                "config": _resolved_config(args, ["action", "tree"])}
    if args.action == "inv":
        H = phi_inverse(_parse_marked_arg(args.marked))
        H.validate()
        return {"tree": format_tree(H.tree), "map": H.map.to_json(),
                "text": format_tree(H.tree),
                "config": _resolved_config(args, ["action", "marked"])}
    if args.action == "roundtrip":
        if not args.exhaustive:
            raise UsageError("roundtrip requires --exhaustive")
        total = ok = 0
        for H in enumerate_halin(args.n, force=args.force):
            total += 1
            H2 = phi_inverse(phi(H))
            ok += H2.tree.code == H.tree.code and H2.map == H.map
        text = "%d/%d OK" % (ok, total)
        return {"ok": ok, "total": total, "text": text,
                "config": _resolved_config(args, ["action", "n", "exhaustive"])}
    if args.action == "pushforward":
        rep = pushforward_distribution(args.n, lambda k: Fraction(1))
        text = "n=%d max discrepancy %s (%s)" % (
            rep["n"], rep["max_discrepancy"],
            "exact match" if rep["exact_match"] else "MISMATCH")
        return {**rep, "text": text, "config": _resolved_config(args, ["action", "n"])}
    raise UsageError("unknown bij action %r" % args.action)


def _cmd_gh(args) -> dict:
    from .gh_metric import FiniteMetricSpace, gh_exact, gh_lower_bound

    if args.action == "exact" or args.action == "bounds":
        x = _load_metric(args.a)
        y = _load_metric(args.b)
        if args.action == "exact":
            g = gh_exact(x, y, budget=args.budget)
            return {"gh": g, "text": "GH=%.6g" % g,
                    "config": _resolved_config(args, ["action", "a", "b", "budget"])}
        lb = gh_lower_bound(x, y, seed=args.seed)
        return {"lower": lb, "text": "GH>=%.6g" % lb,
                "config": _resolved_config(args, ["action", "a", "b", "seed"])}
    if args.action == "lemma":
        from .halin import enumerate_halin
        from .looptree import check_lemma_bound

        reports = []
        lines = []
        for H in enumerate_halin(args.n, force=args.force):
            r = check_lemma_bound(H)
            reports.append(r)
            if r["gh"] is not None:
                lines.append("GH=%.6g, bound=%.6g, %s"
                             % (r["gh"], r["bound"], "OK" if r["ok"] else "FAIL"))
            else:
                lines.append("GH<=%.6g, bound=%.6g, %s"
                             % (r["upper"], r["bound"], "OK" if r["ok"] else "FAIL"))
            if not args.exhaustive:
                break
        return {"reports": reports, "text": "\n".join(lines),
                "config": _resolved_config(args, ["action", "n", "exhaustive"])}
    raise UsageError("unknown gh action %r" % args.action)


def _load_metric(path: str):
    from .gh_metric import FiniteMetricSpace

    try:
        return FiniteMetricSpace(np.loadtxt(path, delimiter=",", ndmin=2))
    except OSError as e:
        raise UsageError(str(e)) from e


def _cmd_loop(args) -> dict:
    from .looptree import loop, loop_diameter

    tree = _parse_tree_arg(args.tree)
    g = loop(tree)
    payload = {
        "vertices": g.n,
        "edges": sorted(g.edges),
        "diameter": loop_diameter(tree),
        "dot": render(g),
        "config": _resolved_config(args, ["tree"]),
    }
    if args.distances:
        d = g.all_distances()
        payload["csv"] = "\n".join(",".join(str(int(x)) for x in row) for row in d) + "\n"
    payload["text"] = "vertices=%d edges=%d diameter=%d" % (
        g.n, len(g.edges), payload["diameter"])
    return payload


def _cmd_exp(args) -> dict:
    from .experiments import lukasiewicz_profile, scaling_run

    sizes = tuple(int(s) for s in args.sizes.split(","))
    cfg = ScalingRunConfig(
        sizes=sizes,
        samples_per_size=args.samples,
        seed=args.seed,
        alpha=args.alpha,
        out=args.out if args.action == "scaling" else None,
        map_diameter_max_n=args.map_diameter_max_n,
    )
    if args.action == "scaling":
        res = scaling_run(cfg)
        payload = {"config": res["config"], "summary": res["summary"],
                   "csv": rows_to_csv(res["rows"])}
        payload["text"] = json.dumps(_jsonable(payload["summary"]), indent=2, sort_keys=True)
        return payload
    if args.action == "lukasiewicz":
        res = lukasiewicz_profile(cfg)
        res["text"] = json.dumps(_jsonable(res["ks_consecutive"]), indent=2, sort_keys=True)
        return res
    raise UsageError("unknown exp action %r" % args.action)


def _cmd_render(args) -> dict:
    from .halin import build_halin
    from .looptree import loop

    tree = _parse_tree_arg(args.tree)
    if args.kind == "tree":
        dot = render(tree)
    elif args.kind == "looptree":
        dot = render(loop(tree))
    elif args.kind == "halin":
        dot = render(build_halin(tree))
    else:
        raise UsageError("unknown render kind %r" % args.kind)
    return {"dot": dot, "text": dot, "config": _resolved_config(args, ["kind", "tree"])}


# -- parser --------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hll",
        description="Halin maps, marked plane trees, looptrees and "
        "Gromov-Hausdorff tooling.",
    )
    p.add_argument("--version", action="version", version="hll %s" % __version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmts=("text", "json")):
        sp.add_argument("--format", choices=fmts, default="text")
        sp.add_argument("--out", default=None, help="write output atomically to a file")
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("enumerate", help="enumerate Halin maps with n bounded faces")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--count-only", action="store_true")
    sp.add_argument("--force", action="store_true", help="override the size guard")
    common(sp)
    sp.set_defaults(func=_cmd_enumerate)

    sp = sub.add_parser("build", help="build the map of a one-leaf-child tree")
    sp.add_argument("--tree", required=True, help='child counts, e.g. "2 0 1 0"')
    common(sp, ("text", "json", "dot"))
    sp.set_defaults(func=_cmd_build)

    sp = sub.add_parser("sample", help="sample size-conditioned trees or maps")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=1)
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--alpha", type=float, default=None,
                    help="stable tail exponent; omit for the uniform-weight law")
    sp.add_argument("--as-map", action="store_true",
                    help="also draw uniform marks and build the map")
    common(sp)
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("mu", help="inspect an offspring distribution")
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--kmax", type=int, default=10)
    sp.add_argument("-n", type=int, default=0, help="also report b_n")
    common(sp)
    sp.set_defaults(func=_cmd_mu)

    sp = sub.add_parser("bij", help="bijection between maps and marked trees")
    sp.add_argument("action", choices=["phi", "inv", "roundtrip", "pushforward"])
    sp.add_argument("-n", type=int, default=4)
    sp.add_argument("--tree", default=None)
    sp.add_argument("--marked", default=None)
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--force", action="store_true")
    common(sp)
    sp.set_defaults(func=_cmd_bij)

    sp = sub.add_parser("gh", help="Gromov-Hausdorff computations")
    sp.add_argument("action", choices=["exact", "bounds", "lemma"])
    sp.add_argument("--a", help="CSV distance matrix")
    sp.add_argument("--b", help="CSV distance matrix")
    sp.add_argument("--budget", type=int, default=10**9)
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("-n", type=int, default=1)
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--force", action="store_true")
    common(sp)
    sp.set_defaults(func=_cmd_gh)

    sp = sub.add_parser("loop", help="looptree of a plane tree")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--distances", action="store_true", help="include the distance matrix")
    common(sp, ("text", "json", "dot", "csv"))
    sp.set_defaults(func=_cmd_loop)

    sp = sub.add_parser("exp", help="scaling experiments")
    sp.add_argument("action", choices=["scaling", "lukasiewicz"])
    sp.add_argument("--alpha", type=float, default=1.5)
    sp.add_argument("--sizes", default="1024,4096,16384")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--map-diameter-max-n", type=int, default=10_000)
    common(sp, ("text", "json", "csv"))
    sp.set_defaults(func=_cmd_exp)

    sp = sub.add_parser("render", help="DOT rendering")
    sp.add_argument("kind", choices=["tree", "looptree", "halin"])
    sp.add_argument("--tree", required=True)
    common(sp, ("text", "json", "dot"))
    sp.set_defaults(func=_cmd_render)

    return p
