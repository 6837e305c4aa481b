"""Command line entry point: ``hyperpath <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analysis, experiments, pipeline, treegrow
from .edge_sampler import RandomSubgraph, parse_seed
from .errors import HyperpathError
from .hypercube import Subcube, full_vertex, parse_vertex


def _coords(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()] if text else []


def _grid(text: str) -> list[float]:
    """``a,b,c`` or ``lo:hi:n`` (n evenly spaced points, both ends included)."""
    if ":" in text:
        lo, hi, n = text.split(":")
        return np.linspace(float(lo), float(hi), int(n)).tolist()
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_zeta(a):
    print(repr(analysis.survival_probability(a.alpha, a.tol)))


def cmd_delta(a):
    print(repr(analysis.subcritical_delta(a.alpha)))


def cmd_simulate(a):
    counts = a.d <= experiments.COUNT_DIM_CAP and not a.no_count
    rec = experiments.run_one(a.d, a.alpha, a.seed, ("classify", "counts") if counts else ("classify",))
    print(json.dumps(rec.to_json()))


def cmd_sweep(a):
    cfg = experiments.SweepConfig.from_file(a.config)
    if a.timing:
        cfg = experiments.SweepConfig.from_dict({**cfg.to_dict(), "timing": True})
    res = experiments.run_sweep(cfg, a.out, resume=not a.fresh, plots=not a.no_plots)
    if a.out is None:
        sys.stdout.write(res.csv_text())
    else:
        bad = sum(len(c["errors"]) for c in res.cells)
        print(f"{len(res.records)} runs in {len(res.cells)} cells -> {a.out} ({bad} errors)", file=sys.stderr)


def cmd_moments(a):
    sys.stdout.write(analysis.moment_table(a.d, a.alpha, a.allow_large).to_csv())


def cmd_treegrow(a):
    g = RandomSubgraph.from_alpha(a.d, a.alpha, parse_seed(a.seed))
    lo = parse_vertex(a.lo) if a.lo else 0
    hi = parse_vertex(a.hi) if a.hi else full_vertex(a.d)
    sub = Subcube(lo, hi)
    root = lo if a.root == "lo" else hi
    if a.trunc is not None:
        trunc = a.trunc
    else:
        trunc = root.bit_count() + (a.distance if root == lo else -a.distance)
    inp = treegrow.TreeGrowInput(sub, root, frozenset(_coords(a.avoid)), trunc, g, a.cap)
    tree, trace = treegrow.tree_construct(inp)
    out = treegrow.tree_to_json(tree)
    if a.verify:
        rep = treegrow.verify_proposition_22(tree, trace, inp)
        out["prop22"] = {"a": rep.a, "b": rep.b, "c": rep.c}
    print(json.dumps(out, indent=None if a.compact else 2))


def cmd_pipeline(a):
    params = pipeline.PipelineParams(
        h0=a.h0, h1=a.h1, leaf_target=a.leaf_target, half_split=a.half_split,
        subcube_budget=a.subcube_budget, ext0=a.ext0, ext1=a.ext1, descend=a.descend,
        group_size=a.group_size, seed_leaves=a.seed_leaves,
    )
    out = pipeline.build_witness(a.d, a.alpha, parse_seed(a.seed), params)
    js = out.to_json(a.d)
    js["alpha"] = a.alpha
    js["seed"] = a.seed
    print(json.dumps(js, indent=2))


def cmd_curve(a):
    grid = _grid(a.grid)
    if a.alpha_units:
        grid = [min(1.0, x / a.d) for x in grid]
    curve = experiments.coupled_transition_curve(a.d, a.seed, grid)
    print("p,alpha,length")
    for p, length in curve:
        print(f"{p!r},{p * a.d!r},{length}")
    if a.plot:
        from .report import plot_curve

        plot_curve(curve, a.d, a.plot)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperpath", description="Increasing paths in random hypercube subgraphs.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("zeta", help="survival probability of Poisson(alpha) branching")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(fn=cmd_zeta)

    p = sub.add_parser("delta", help="subcritical exponent delta*(alpha), alpha < e")
    p.add_argument("--alpha", type=float, required=True)
    p.set_defaults(fn=cmd_delta)

    p = sub.add_parser("simulate", help="one sample: longest path, class, antipodal count")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", required=True, help="decimal or 0x-hex")
    p.add_argument("--no-count", action="store_true", help="skip the antipodal path count")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="Monte Carlo sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (CSV to stdout if omitted)")
    p.add_argument("--fresh", action="store_true", help="ignore finished cells in --out")
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--timing", action="store_true", help="fill the ms column")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("moments", help="overlap profile and exact moments as CSV")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--allow-large", action="store_true", help="permit d up to 11")
    p.set_defaults(fn=cmd_moments)

    p = sub.add_parser("treegrow", help="run the tree construction and print the tree as JSON")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--lo", help="subcube bottom, bit string (default all zero)")
    p.add_argument("--hi", help="subcube top, bit string (default all one)")
    p.add_argument("--root", choices=("lo", "hi"), default="lo")
    p.add_argument("--avoid", default="", help="comma separated coordinates")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--trunc", type=int, help="truncation layer")
    grp.add_argument("--distance", type=int, default=4, help="truncation distance from the root")
    p.add_argument("--cap", type=int, help="child cap (default ceil(ln d))")
    p.add_argument("--verify", action="store_true", help="also check properties (a)-(c)")
    p.add_argument("--compact", action="store_true")
    p.set_defaults(fn=cmd_treegrow)

    p = sub.add_parser("pipeline", help="staged witness construction, JSON outcome")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", required=True)
    defaults = pipeline.PipelineParams()
    for name in ("h0", "h1", "leaf_target", "subcube_budget", "ext0", "ext1", "descend", "group_size"):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=int, default=getattr(defaults, name))
    p.add_argument("--half-split", type=int, default=None)
    p.add_argument("--seed-leaves", type=int, default=None)
    p.set_defaults(fn=cmd_pipeline)

    p = sub.add_parser("curve", help="longest path along p on one coupled sample")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--grid", required=True, help="'p1,p2,...' or 'lo:hi:n'")
    p.add_argument("--alpha-units", action="store_true", help="grid values are alpha = p*d")
    p.add_argument("--plot", help="write PATH.svg and PATH.dat")
    p.set_defaults(fn=cmd_curve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except HyperpathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
