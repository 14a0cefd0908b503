"""Command line entry point.

Subcommands: orbit, absorb, cones, conjugacy, variant, report.

Every flag can also be given in a JSON config file (``--config``), keyed by
the flag's destination name (``--orbit-samples`` -> ``orbit_samples``); flags
on the command line win.  ``--dump-config`` writes the effective config and
exits.  Output goes to ``--out``, defaulting to ``$SUBTRACTIVE_OUT`` or the
working directory.

Exit codes: 0 success, 2 usage error, 3 resource limit, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cones import ResourceLimitError, complement_recursion, decay_bound, verify_tree
from .exact_core import InvariantViolation, MapParams, classify
from .orbit_lab import (
    DEFAULT_CAP,
    DEFAULT_EPS,
    absorption_experiment,
    brun_experiment,
    conjugacy_sweep,
    iterate,
    variant_experiment,
)
from .reports import decimal_str, exact_str, render_depth, write_csv, write_json
from .return_map import alpha_estimate

log = logging.getLogger("subtractive")

EXIT_USAGE, EXIT_RESOURCE, EXIT_INVARIANT = 2, 3, 4
OUT_ENV = "SUBTRACTIVE_OUT"
STOCHASTIC = {"absorb", "conjugacy", "variant", "report"}
SECTIONS = ("orbit", "absorb", "cones", "conjugacy", "variant", "brun")
# not part of an experiment's config
_META = {"command", "config", "out", "dump_config", "verbose"}


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}")


def _point(text: str) -> tuple:
    try:
        return tuple(Fraction(t) for t in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad point {text!r}: expected comma-separated rationals like 1,2/3,5")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subtractive", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, stochastic=False):
        sp.add_argument("--config", help="JSON file with default values for any flag")
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
        sp.add_argument("--precision", type=int, default=12, help="significant digits of decimal renderings")
        sp.add_argument("--dump-config", action="store_true", help="print the effective config as JSON and exit")
        sp.add_argument("-v", "--verbose", action="store_true")
        if stochastic:
            sp.add_argument("--seed", type=int, help="master seed (required)")

    def params(sp, variant=False):
        sp.add_argument("--a", type=int, default=1)
        sp.add_argument("--b", type=int, default=2)
        sp.add_argument("--i", type=int, default=None if not variant else 1, help="subtracted coordinate (default a)")

    sp = sub.add_parser("orbit", help="iterate one exact point")
    common(sp)
    params(sp)
    sp.add_argument("--point", help="comma-separated exact coordinates, e.g. 1,2,3 or 1/3,1/2,1")
    sp.add_argument("--eps", type=str, default=exact_str(DEFAULT_EPS))
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sp.add_argument("--stop-on", choices=["A", "D"], default=None)
    sp.add_argument("--trace", action="store_true", help="also write the step-by-step CSV trace")

    sp = sub.add_parser("absorb", help="Monte Carlo absorption into A and D")
    common(sp, stochastic=True)
    params(sp)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sp.add_argument("--region", choices=["cA", "all"], default="cA")
    sp.add_argument("--bits", type=int, default=64)
    sp.add_argument("--alpha-samples", type=int, default=10_000)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--limits", action="store_true", help="also write the per-sample limit table")

    sp = sub.add_parser("cones", help="complement tree of the three-dimensional example")
    common(sp)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--svg-depth", type=int, default=None, help="render SVGs up to this depth (default min(depth, 6))")

    sp = sub.add_parser("conjugacy", help="exact conjugacy sweep between T_{1,1} and S_{1,2}")
    common(sp, stochastic=True)
    sp.add_argument("--points", type=int, default=10_000)
    sp.add_argument("--steps", type=int, default=50)

    sp = sub.add_parser("variant", help="maps subtracting x_i with i < a")
    common(sp, stochastic=True)
    sp.add_argument("--a", type=int, default=2)
    sp.add_argument("--b", type=int, default=1)
    sp.add_argument("--i", type=int, default=1)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--orbit-samples", type=int, default=1000)
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sp.add_argument("--bits", type=int, default=64)

    sp = sub.add_parser("report", help="run several sections into one JSON document")
    common(sp, stochastic=True)
    sp.add_argument("--sections", nargs="*", choices=SECTIONS, default=[])
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--b", type=int, default=2)
    sp.add_argument("--variant-a", type=int, default=2)
    sp.add_argument("--variant-b", type=int, default=1)
    sp.add_argument("--variant-i", type=int, default=1)
    sp.add_argument("--point", help="point for the orbit section")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--points", type=int, default=1000)
    sp.add_argument("--steps", type=int, default=50)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        cfg.pop("command", None)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys for {args.command}: {sorted(unknown)}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def effective_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in _META}
    return {"command": args.command, **cfg}


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(OUT_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _params(a, b, i=None) -> MapParams:
    try:
        return MapParams(a, b, i)
    except ValueError as exc:
        raise UsageError(str(exc))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def run_orbit(args) -> dict:
    if not args.point:
        raise UsageError("orbit needs --point")
    p = _params(args.a, args.b, args.i)
    x = _point(args.point)
    if len(x) != p.n:
        raise UsageError(f"--point has {len(x)} coordinates, {p} needs {p.n}")
    if any(u > v for u, v in zip(x, x[1:])) or x[0] < 0:
        raise UsageError("--point must be nonnegative and nondecreasing")
    summary = iterate(x, p, eps=_fraction(args.eps), cap=args.cap, stop_on=args.stop_on, trace=True)
    flags = classify(x, p)
    out = summary.to_json()
    out["start_regions"] = flags._asdict()
    out["trace_length"] = len(summary.trace)
    return {"summary": out, "_trace": summary.trace}


def cmd_orbit(args) -> list[Path]:
    res = run_orbit(args)
    out = _out_dir(args)
    files = [write_json(out / "orbit.json", {"config": effective_config(args), "orbit": res["summary"]}, args.precision)]
    if args.trace:
        n = len(res["_trace"][0])
        header = ["k"] + [f"x{j + 1}" for j in range(n)] + [f"x{j + 1}_decimal" for j in range(n)]
        rows = (
            [k] + [exact_str(v) for v in pt] + [decimal_str(v, args.precision) for v in pt]
            for k, pt in enumerate(res["_trace"])
        )
        files.append(write_csv(out / "orbit_trace.csv", header, rows))
    return files


def run_absorb(args):
    p = _params(args.a, args.b)
    if p.b < 2:
        raise UsageError("absorb needs b >= 2: A and D are not absorbing sets for b = 1")
    report = absorption_experiment(
        p, args.region, args.samples, args.cap, args.seed, getattr(args, "bits", 64), getattr(args, "workers", 1)
    )
    alpha = alpha_estimate(p, max(1000, getattr(args, "alpha_samples", 10_000)), args.seed)
    return report, alpha


def cmd_absorb(args) -> list[Path]:
    report, alpha = run_absorb(args)
    out = _out_dir(args)
    files = [
        write_csv(out / "absorb_hist.csv", ["first_hit_A", "count"], report.histogram()),
        write_csv(out / "absorb_hist_D.csv", ["first_hit_D", "count"], report.d_histogram()),
        write_json(
            out / "absorb_summary.json",
            {"config": effective_config(args), "absorption": report.to_json(), "alpha": alpha.to_json()},
            args.precision,
        ),
    ]
    if args.limits:
        n = report.params.n
        header = ["sample_id"] + [f"x{j + 1}_limit" for j in range(n)]
        rows = (
            [sid] + [exact_str(v) for v in o.limit]
            for sid, o in enumerate(report.outcomes)
            if o.limit is not None
        )
        files.append(write_csv(out / "absorb_limits.csv", header, rows))
    return files


def run_cones(depth: int) -> tuple:
    tree = complement_recursion(depth)
    check = verify_tree(tree)
    return tree, check


def cmd_cones(args) -> list[Path]:
    tree, check = run_cones(args.depth)
    out = _out_dir(args)
    rows = [
        [
            lv.depth,
            len(lv.complements),
            exact_str(lv.complement_area),
            decimal_str(lv.complement_area, args.precision),
            exact_str(decay_bound(lv.depth)),
            decimal_str(decay_bound(lv.depth), args.precision),
        ]
        for lv in tree.levels
    ]
    files = [
        write_csv(
            out / "cones_areas.csv",
            ["depth", "n_cones", "complement_area", "complement_area_decimal", "decay_bound", "decay_bound_decimal"],
            rows,
        ),
        write_json(
            out / "cones_tree.json",
            {"config": effective_config(args), "checks": dict(check), "tree": tree.to_json()},
            args.precision,
        ),
    ]
    svg_depth = min(args.depth, 6) if args.svg_depth is None else min(args.svg_depth, args.depth)
    for k in range(svg_depth + 1):
        path = out / f"cones_depth{k}.svg"
        path.write_text(render_depth(tree, k))
        files.append(path)
    if not check.ok:
        raise InvariantViolation(f"cone tree checks failed: {dict(check)}")
    return files


def cmd_conjugacy(args) -> list[Path]:
    sweep = conjugacy_sweep(args.points, args.steps, args.seed)
    out = _out_dir(args)
    files = [write_json(out / "conjugacy.json", {"config": effective_config(args), "conjugacy": sweep.to_json()}, args.precision)]
    if not sweep.ok:
        raise InvariantViolation(f"conjugacy failed on {len(sweep.failures)} points")
    return files


def run_variant(args, a, b, i):
    p = _params(a, b, i)
    if not p.is_variant or p.a < 2:
        raise UsageError(f"variant needs a >= 2 and 1 <= i <= a-1, got a={a}, i={p.i}")
    return variant_experiment(p, args.samples, args.cap, args.seed, getattr(args, "bits", 64), getattr(args, "orbit_samples", 1000))


def cmd_variant(args) -> list[Path]:
    rep = run_variant(args, args.a, args.b, args.i)
    out = _out_dir(args)
    files = [write_json(out / "variant.json", {"config": effective_config(args), "variant": rep.to_json()}, args.precision)]
    if not rep.ok:
        raise InvariantViolation("invariance of A under the variant map failed")
    return files


def cmd_report(args) -> list[Path]:
    if not args.sections:
        raise UsageError("report needs at least one of --sections " + " ".join(SECTIONS))
    bundle = {"config": effective_config(args), "sections": {}}
    secs = bundle["sections"]
    for name in args.sections:
        log.info("report: running %s", name)
        if name == "orbit":
            if not args.point:
                raise UsageError("the orbit section needs --point")
            ns = argparse.Namespace(a=args.a, b=args.b, i=None, point=args.point, eps=exact_str(DEFAULT_EPS), cap=args.cap, stop_on=None)
            secs["orbit"] = run_orbit(ns)["summary"]
        elif name == "absorb":
            report, alpha = run_absorb(args)
            secs["absorb"] = {"absorption": report.to_json(), "alpha": alpha.to_json(), "histogram": report.histogram()}
        elif name == "cones":
            tree, check = run_cones(args.depth)
            secs["cones"] = {"checks": dict(check), "complement_areas": tree.areas()}
        elif name == "conjugacy":
            secs["conjugacy"] = conjugacy_sweep(args.points, args.steps, args.seed).to_json()
        elif name == "variant":
            secs["variant"] = run_variant(args, args.variant_a, args.variant_b, args.variant_i).to_json()
        elif name == "brun":
            secs["brun"] = brun_experiment(max(args.a, 1), min(args.samples, 10_000), seed=args.seed).to_json()
    out = _out_dir(args)
    return [write_json(out / "report.json", bundle, args.precision)]


COMMANDS = {
    "orbit": cmd_orbit,
    "absorb": cmd_absorb,
    "cones": cmd_cones,
    "conjugacy": cmd_conjugacy,
    "variant": cmd_variant,
    "report": cmd_report,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:  # argparse usage errors already printed
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"subtractive: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.dump_config:
        sys.stdout.write(json.dumps(effective_config(args), indent=2, sort_keys=True) + "\n")
        return 0
    try:
        if args.command in STOCHASTIC and args.seed is None:
            raise UsageError(f"{args.command} is stochastic and needs --seed")
        files = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"subtractive: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"subtractive: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvariantViolation as exc:
        print(f"subtractive: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"subtractive: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for f in files:
        log.info("wrote %s", f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
