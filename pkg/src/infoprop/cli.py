"""Command-line entry point: ``infoprop {run,check,gen,fixtures}``.

Exit codes: 0 success, 1 a claimed property failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .errors import InfopropError
from .generators import FAMILIES, FIXTURE_NAMES, GraphFamily, gen_graph, paper_fixture
from .mechanisms import MECHANISMS, ORDERINGS, SPLIT_FUNCTIONS, MechanismConfig, run_mechanism
from .network import Network, dump_network, load_network, validate_network
from .properties import ENUMERATION_CAP, run_property_suite

EXIT_OK, EXIT_PROPERTY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _unit(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _widths(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(w) for w in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_mechanism_flags(p: argparse.ArgumentParser, multiple: bool = False) -> None:
    if multiple:
        p.add_argument("--mechanism", action="append", choices=MECHANISMS,
                       help="mechanism to certify; repeat for several (default: scheme)")
    else:
        p.add_argument("--mechanism", default="scheme", choices=MECHANISMS,
                       help="reward mechanism (default: %(default)s)")
    p.add_argument("--alpha", type=_unit, default=0.2, help="division factor in (0,1) (default: %(default)s)")
    p.add_argument("--beta", type=_unit, default=0.2, help="discount factor in (0,1) (default: %(default)s)")
    p.add_argument("--budget", type=_positive, default=1.0, help="sponsor budget > 0 (default: %(default)s)")
    p.add_argument("--f", default="shifted", choices=sorted(SPLIT_FUNCTIONS),
                   help="starter split function: identity n, shifted n+1, exp 2^n (default: %(default)s)")
    p.add_argument("--ordering", default="arrival", choices=ORDERINGS,
                   help="scheme event processing order (default: %(default)s)")
    p.add_argument("--reward", type=_positive, default=1.0,
                   help="per-agent payment of the fixed-reward baseline (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="seed for random ordering and sampling (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infoprop", description="Budgeted information-propagation rewards.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="compute a reward vector for one network")
    run.add_argument("--input", "-i", required=True, help="network JSON file ('-' for stdin)")
    run.add_argument("--output", "-o", default="-", help="reward JSON file (default: stdout)")
    run.add_argument("--trace", action="store_true", help="include the full transfer log")
    _add_mechanism_flags(run)

    check = sub.add_parser("check", help="certify mechanism properties, JSON lines out")
    check.add_argument("--input", "-i", action="append", default=[], help="network JSON file; repeatable")
    check.add_argument("--output", "-o", default="-", help="report file (default: stdout)")
    check.add_argument("--strict", action="store_true", help="require strict PIC gains for the scheme")
    check.add_argument("--perturbations", type=int, default=50,
                       help="random delays per network for time efficiency (default: %(default)s)")
    check.add_argument("--cap", type=int, default=ENUMERATION_CAP,
                       help="max out-edges per agent for exhaustive enumeration (default: %(default)s)")
    _add_mechanism_flags(check, multiple=True)

    gen = sub.add_parser("gen", help="write a fixture or generated network")
    src = gen.add_mutually_exclusive_group(required=True)
    src.add_argument("--fixture", choices=FIXTURE_NAMES)
    src.add_argument("--family", choices=FAMILIES)
    gen.add_argument("--output", "-o", default="-", help="network file (default: stdout)")
    gen.add_argument("--length", type=int, default=3, help="chain: nodes below the first layer head")
    gen.add_argument("--width", type=int, default=3, help="star / single-chain-tail: first-layer width")
    gen.add_argument("--tail", type=int, default=2, help="single-chain-tail: singleton layers below the funnel")
    gen.add_argument("--leaves", type=int, default=0, help="single-chain-tail: extra childless first-layer agents")
    gen.add_argument("--widths", type=_widths, default=(3, 2, 2), help="layered-random: layer widths, e.g. 3,2,2")
    gen.add_argument("--max-out-degree", type=int, default=4, help="layered-random: out-degree cap")
    gen.add_argument("--extra-edges", type=float, default=0.0, help="layered-random: extra edge probability")
    gen.add_argument("--seed", type=int, default=0)

    fixtures = sub.add_parser("fixtures", help="list fixtures or write them all to a directory")
    fixtures.add_argument("--output", "-o", default=None, help="directory to write <name>.json files into")
    return parser


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(path: str) -> Network:
    if path == "-":
        return load_network(sys.stdin)
    try:
        return load_network(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _config(args: argparse.Namespace, mechanism: str) -> MechanismConfig:
    return MechanismConfig(
        mechanism=mechanism, alpha=args.alpha, beta=args.beta, budget=args.budget, f=args.f,
        ordering=args.ordering, seed=args.seed, fixed_reward=args.reward,
    )


def cmd_run(args: argparse.Namespace) -> int:
    net = _load(args.input)
    cfg = _config(args, args.mechanism)
    report = validate_network(net, cfg)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    report.raise_for_errors()
    result = run_mechanism(net, cfg)
    _write(args.output, json.dumps(result.to_dict(trace=args.trace), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    mechanisms = args.mechanism or ["scheme"]
    nets = []
    for path in args.input:
        net = _load(path)
        for mech in mechanisms:
            validate_network(net, mech).raise_for_errors()
        nets.append((os.path.basename(path), net))
    suite = run_property_suite(
        nets, mechanisms, _config(args, mechanisms[0]), strict=args.strict,
        perturbations=args.perturbations, seed=args.seed, cap=args.cap,
    )
    _write(args.output, suite.to_jsonl())
    return EXIT_OK if suite.passed else EXIT_PROPERTY


def cmd_gen(args: argparse.Namespace) -> int:
    if args.fixture:
        net = paper_fixture(args.fixture)
    else:
        net = gen_graph(GraphFamily(
            args.family, length=args.length, width=args.width, tail=args.tail, leaves=args.leaves,
            widths=args.widths, max_out_degree=args.max_out_degree, extra_edges=args.extra_edges,
            seed=args.seed,
        ))
    _write(args.output, dump_network(net))
    return EXIT_OK


def cmd_fixtures(args: argparse.Namespace) -> int:
    if args.output is None:
        print("\n".join(FIXTURE_NAMES))
        return EXIT_OK
    os.makedirs(args.output, exist_ok=True)
    for name in FIXTURE_NAMES:
        _write(os.path.join(args.output, f"{name}.json"), dump_network(paper_fixture(name)))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "check": cmd_check, "gen": cmd_gen, "fixtures": cmd_fixtures}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InfopropError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
