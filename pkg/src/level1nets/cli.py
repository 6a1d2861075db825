"""Command-line interface.

Exit codes: 0 solved / true, 1 no solution / false, 2 search budget
exhausted, 3 bad input.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from typing import Sequence

from . import hardness, io
from .binets import solve_binets
from .decomposition import LeafPaths
from .network import Network, tinyfy
from .oracle import enumerate_networks
from .smallnets import classify_paths, extract_all
from .solver import SearchBudgetExceeded, SolverConfig, solve, solve_supernetwork, solve_tiny

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2, which means "unknown" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _one_network(path: str) -> Network:
    nets = io.parse_networks(_read(path))
    if len(nets) != 1:
        raise _InputError(f"{path}: expected exactly one network, found {len(nets)}")
    return nets[0]


def _config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(guess_budget=args.budget, deterministic_seed=args.seed)


def _emit(net: Network | None, args: argparse.Namespace) -> int:
    if net is None:
        print("no binary level-1 network displays the input", file=sys.stderr)
        return EXIT_NO
    _write(args.output, io.serialize_network(net) + "\n")
    if args.dot:
        _write(args.dot, io.to_dot(net))
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    ts = io.parse_smallnets(_read(args.input))
    if args.binets_only:
        return _emit(solve_binets(ts), args)
    if args.tiny_only:
        return _emit(solve_tiny(ts, _config(args)), args)
    return _emit(solve(ts, _config(args)), args)


def cmd_supernet(args: argparse.Namespace) -> int:
    nets = io.parse_networks(_read(args.networks))
    return _emit(solve_supernetwork(nets, _config(args)), args)


def cmd_check(args: argparse.Namespace) -> int:
    net = _one_network(args.network)
    ts = io.parse_smallnets(_read(args.input))
    missing = sorted(ts.taxa - net.taxa)
    if missing:
        raise _InputError(f"taxa missing from the network: {' '.join(missing)}")
    paths = LeafPaths(net.decomposition)
    failed = [sn for sn in ts if classify_paths(paths, sn.taxa) != sn]
    for sn in failed:
        print(f"not displayed: {sn}")
    return EXIT_NO if failed else EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    ts = extract_all(_one_network(args.network), binets_only=args.binets_only)
    _write(args.output, io.serialize_smallnets(ts))
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    taxa = [t for t in args.taxa.replace(",", " ").split() if t]
    if len(set(taxa)) != len(taxa):
        raise _InputError("repeated taxon")
    cat = enumerate_networks(taxa)
    _write(args.output, "".join(io.serialize_network(n) + "\n" for n in cat.networks))
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    inst = hardness.parse_instance(_read(args.instance))
    _write(args.output, io.serialize_smallnets(hardness.reduce(inst)))
    return EXIT_OK


def cmd_tinyfy(args: argparse.Namespace) -> int:
    net = tinyfy(_one_network(args.network))
    _write(args.output, io.serialize_network(net) + "\n")
    if args.dot:
        _write(args.dot, io.to_dot(net))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="level1nets", description="Binary level-1 phylogenetic networks from binets and trinets.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def out(sp: argparse.ArgumentParser, dot: bool = True) -> None:
        sp.add_argument("-o", "--output", help="output file (default: standard output)")
        if dot:
            sp.add_argument("--dot", metavar="FILE", help="also write the network as Graphviz DOT")

    def search(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--budget", type=int, default=SolverConfig.guess_budget, help="guesses per recursion node")
        sp.add_argument("--seed", type=int, default=0, help="0 keeps the canonical guess order")

    sp = sub.add_parser("solve", help="build a network displaying a small-net file")
    sp.add_argument("-i", "--input", required=True, help="small-net file, '-' for standard input")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--binets-only", action="store_true", help="use the polynomial binet algorithm")
    mode.add_argument("--tiny-only", action="store_true", help="polynomial path; rejects S1/S2 trinets")
    search(sp)
    out(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("supernet", help="build a network displaying every input network")
    sp.add_argument("-n", "--networks", required=True, help="extended Newick, one network per line")
    search(sp)
    out(sp)
    sp.set_defaults(func=cmd_supernet)

    sp = sub.add_parser("check", help="does a network display every small net of a file")
    sp.add_argument("-n", "--network", required=True)
    sp.add_argument("-i", "--input", required=True)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("extract", help="all binets and trinets displayed by a network")
    sp.add_argument("-n", "--network", required=True)
    sp.add_argument("--binets-only", action="store_true")
    out(sp, dot=False)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("enumerate", help="every network on a small taxa set")
    sp.add_argument("--taxa", required=True, help="comma-separated taxa (at most 6)")
    out(sp, dot=False)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("reduce", help="trinet set encoding a SetSplitting instance")
    sp.add_argument("-I", "--instance", required=True)
    out(sp, dot=False)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("tinyfy", help="replace every largish cycle by tiny ones")
    sp.add_argument("-n", "--network", required=True)
    out(sp)
    sp.set_defaults(func=cmd_tinyfy)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda message, *rest, **kw: print(f"warning: {message}", file=sys.stderr)
        try:
            return args.func(args)
        except SearchBudgetExceeded as exc:
            print(f"unknown: {exc}", file=sys.stderr)
            return EXIT_UNKNOWN
        except (_InputError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
