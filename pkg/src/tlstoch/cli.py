"""Command-line front end.

Every command prints JSON on stdout.  With ``--out DIR`` the outputs are
written as files next to a ``manifest.json`` recording the command, its
parameters, the package version and a sha256 digest per file.

Exit codes: 0 success, 1 usage error, 2 computation error, 3 conjecture
mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .combinatorics import SEQUENCES, sequence_table
from .fpl import EngineMismatch, verify_conjecture
from .gillespie import SimConfig, convergence_report
from .linkstates import BC, enumerate_sector
from .markov import KernelError, build_intensity_matrix, stationary_vector
from .spectra import scaled_gap_estimate

THREADS_ENV = "TLSTOCH_THREADS"

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bc(text: str) -> BC:
    try:
        return BC.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _half_integer(text: str) -> Fraction:
    try:
        s = Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if s < 0 or (2 * s).denominator != 1:
        raise argparse.ArgumentTypeError(f"sector must be a nonnegative half-integer, got {text}")
    return s


def parse_sizes(text: str) -> list[int]:
    """``"8..16"`` (step 2, same parity) or a comma list ``"8,10,12"``."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            return list(range(lo, hi + 1, 2))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tlstoch", description="Temperley-Lieb stochastic processes at weight 1.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--out", type=Path, help="write outputs and a manifest into this directory")
    p.add_argument("--threads", type=int, help=f"worker thread cap (default ${THREADS_ENV} or 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def sector_args(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("L", type=int)
        sp.add_argument("bc", type=_bc, metavar="{closed,dc,ic,podd}")

    sp = sub.add_parser("states", help="list a sector basis")
    sector_args(sp)
    sp.add_argument("--defects", type=int)
    sp.add_argument("--format", choices=["json", "text"], default="json")

    sp = sub.add_parser("stationary", help="exact stationary vector")
    sector_args(sp)
    sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = sub.add_parser("verify", help="compare the stationary vector with FPL counts")
    sector_args(sp)
    sp.add_argument("--engine", choices=["dp", "dfs", "both"], default="dp")

    sp = sub.add_parser("spectrum", help="scaled gaps and extrapolated conformal weight")
    sp.add_argument("--sector", type=_half_integer, required=True, help="s; the sector has 2s defects")
    sp.add_argument("--sizes", type=parse_sizes, required=True, help="e.g. 8..16 or 8,10,12")

    sp = sub.add_parser("simulate", help="Gillespie run against the exact state")
    sector_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    stop = sp.add_mutually_exclusive_group()
    stop.add_argument("--events", type=int)
    stop.add_argument("--time", type=float)
    sp.add_argument("--burn-in", type=float, default=0.1)

    sp = sub.add_parser("counts", help="counting sequences")
    sp.add_argument("--sequence", choices=sorted(SEQUENCES), required=True)
    sp.add_argument("--upto", type=int, required=True)
    return p


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer") from None


def run(args: argparse.Namespace) -> tuple[int, dict, dict[str, str]]:
    """Execute a parsed command; returns exit code, stdout payload and files."""
    cmd = args.command
    if cmd == "states":
        basis = enumerate_sector(args.L, args.bc, args.defects)
        names = [s.serialize() for s in basis.states]
        payload = {"L": basis.L, "bc": basis.bc.value, "defects": basis.defects, "count": len(names), "states": names}
        files = {"states.json": basis.to_json()}
        if args.format == "text":
            files["states.txt"] = "\n".join(s.serialize() for s in basis.states) + "\n"
        return EXIT_OK, payload, files
    if cmd == "stationary":
        vec = stationary_vector(build_intensity_matrix(enumerate_sector(args.L, args.bc)))
        files = {"stationary.json": vec.to_json()}
        if args.format == "csv":
            files["stationary.csv"] = vec.to_csv()
        return EXIT_OK, vec.to_dict(), files
    if cmd == "verify":
        report = verify_conjecture(args.L, args.bc, args.engine)
        payload = report.to_dict()
        files = {"verify.json": json.dumps(payload)}
        if report.tally is not None:
            files["fpl_tally.json"] = report.tally.to_json()
        return (EXIT_OK if report.match else EXIT_MISMATCH), payload, files
    if cmd == "spectrum":
        est = scaled_gap_estimate(args.sector, args.sizes, threads=_threads(args))
        return EXIT_OK, est.to_dict(), {"spectrum.csv": est.to_csv(), "estimate.json": est.to_json()}
    if cmd == "simulate":
        cfg = SimConfig(args.L, args.bc, seed=args.seed, max_events=args.events, max_time=args.time, burn_in=args.burn_in)
        exact = stationary_vector(build_intensity_matrix(enumerate_sector(args.L, args.bc)))
        report = convergence_report(cfg, exact)
        return EXIT_OK, report.to_dict(), {"simulation.json": report.to_json()}
    if cmd == "counts":
        rows = sequence_table(args.sequence, args.upto)
        payload = {"sequence": args.sequence, "terms": [{"m": m, "value": str(v)} for m, v in rows]}
        csv = "m,value\n" + "".join(f"{m},{v}\n" for m, v in rows)
        return EXIT_OK, payload, {"counts.json": json.dumps(payload), "counts.csv": csv}
    raise UsageError(f"unknown command {cmd}")


def _parameters(args: argparse.Namespace) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("out", "verbose"):
            continue
        if isinstance(v, BC):
            v = v.value
        elif isinstance(v, (Fraction, Path)):
            v = str(v)
        out[k] = v
    return out


def write_outputs(directory: Path, args: argparse.Namespace, files: dict[str, str]) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    digests = {}
    for name, text in sorted(files.items()):
        data = text.encode()
        (directory / name).write_bytes(data)
        digests[name] = hashlib.sha256(data).hexdigest()
    manifest = {
        "command": args.command,
        "parameters": _parameters(args),
        "versions": {"tlstoch": __version__, "python": sys.version.split()[0]},
        "files": digests,
    }
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        code, payload, files = run(args)
    except (UsageError, ValueError) as exc:
        print(f"tlstoch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KernelError, EngineMismatch, ArithmeticError, RuntimeError, KeyError, MemoryError) as exc:
        print(f"tlstoch: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    if args.out is not None:
        write_outputs(args.out, args, files)
    print(json.dumps(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
