"""Command line entry point: ``submodmax {solve,verify,bench,gen}``."""
from __future__ import annotations

import argparse
import os
import sys

from .instances import InstanceFile, gen_base_counterexample, gen_greedy_tight, gen_random
from .runner import ALGORITHMS, RunConfig, run_experiment

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CERT_FAILED = 3
SEED_ENV = "SUBMODMAX_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{SEED_ENV} must be an integer, got {raw!r}")


def _solver_flags(p: argparse.ArgumentParser, multi: bool = False):
    if multi:
        p.add_argument("--instance", nargs="+", required=True, metavar="PATH")
        p.add_argument("--algorithm", nargs="+", required=True, choices=sorted(ALGORITHMS))
        p.add_argument("--workers", type=int, default=1)
    else:
        p.add_argument("--instance", required=True, metavar="PATH")
        p.add_argument("--algorithm", required=True, choices=sorted(ALGORITHMS))
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--zeta", type=float, default=None)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--monotone", action="store_true", help="objective is monotone (partition algorithm)")
    p.add_argument("--certify", action="store_true")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("human", "records"), default="human")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="submodmax", description="Local-search submodular maximization.")
    sub = parser.add_subparsers(dest="verb", required=True)
    _solver_flags(sub.add_parser("solve", help="run one algorithm on one instance"))
    _solver_flags(sub.add_parser("verify", help="solve and check certificates against brute force"))
    _solver_flags(sub.add_parser("bench", help="run algorithms over many instances"), multi=True)
    g = sub.add_parser("gen", help="write a generated instance")
    g.add_argument("generator", choices=("greedy-tight", "base-counterexample", "random"))
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--p", type=int, default=2)
    g.add_argument("--n-side", type=int, default=3)
    g.add_argument("--t", type=int, default=5)
    g.add_argument("--kind", default="cut-undirected")
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--constraint", default="matroids")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", metavar="PATH")
    return parser


def _config(args, certify: bool) -> RunConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    return RunConfig(epsilon=args.epsilon, p=args.p, eta=args.eta, zeta=args.zeta, trials=args.trials,
                     seed=seed, certify=certify, monotone=args.monotone)


def _human(rec) -> str:
    lines = [f"algorithm   {rec.algorithm}",
             f"instance    {rec.fingerprint[:16]}",
             f"solution    {rec.solution}",
             f"value       {rec.value:.6g}",
             f"oracle      {rec.oracle_calls['distinct']} distinct / {rec.oracle_calls['requests']} requests",
             f"moves       {rec.meta.get('n_moves', 0)}",
             f"time        {rec.wall_time:.3f}s"]
    for c in rec.certificates:
        tag = "PASS" if c["passed"] else "FAIL"
        extra = "" if c.get("binding", True) else " (informational)"
        if c["name"] == "ratio":
            lines.append(f"ratio       {tag} {c['value']:.6g}/{c['opt']:.6g} vs {c['threshold']:.4f}{extra}")
        else:
            lines.append(f"certificate {tag} {c['name']} slack={c['worst_slack']}{extra}")
    return "\n".join(lines)


def _emit(records, args):
    if args.format == "records":
        text = "\n".join(r.to_json() for r in records)
    else:
        text = "\n\n".join(_human(r) for r in records)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _gen(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.generator == "greedy-tight":
        inst = gen_greedy_tight(args.k, args.p)
    elif args.generator == "base-counterexample":
        inst = gen_base_counterexample(args.n_side, args.t)
    else:
        inst = gen_random(args.kind, args.n, args.k, args.density, seed, args.constraint)
    if args.out:
        inst.save(args.out)
    else:
        print(inst.to_json())
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "gen":
            return _gen(args)
        paths = args.instance if isinstance(args.instance, list) else [args.instance]
        algs = args.algorithm if isinstance(args.algorithm, list) else [args.algorithm]
        instances = [InstanceFile.load(p) for p in paths]
        cfg = _config(args, certify=args.certify or args.verb == "verify")
        records = run_experiment(instances, algs, cfg, getattr(args, "workers", 1))
    except (ValueError, OSError) as exc:
        # SubmodError and JSON decoding errors are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(records, args)
    if cfg.certify and not all(r.certified for r in records):
        return EXIT_CERT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
