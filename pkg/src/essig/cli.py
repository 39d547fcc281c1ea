"""Command-line front end: ``essig disk|interval|lattice|mc|sig|check``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import checks, disk, interval, lattice, mc
from .tensor import FLOAT64, RATIONAL, TruncatedTensor, index_to_word, tensor_to_dict, word_str
from .polyring import poly_to_json

SCALARS = (RATIONAL, FLOAT64)


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# ------------------------------------------------------------------ parsing


def _number(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _common(p: argparse.ArgumentParser, default_n: int | None = 4) -> None:
    p.add_argument("-N", "--truncation", type=int, default=default_n)
    p.add_argument("--scalar", choices=SCALARS, default=None)
    p.add_argument("-o", "--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="essig", description="Expected signatures of stopped Brownian motion and random walks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("disk", help="polynomial expected signature on the unit disk")
    _common(p)
    p.add_argument("--eval", nargs=2, type=_number, metavar=("Z1", "Z2"))
    p.add_argument("--center", nargs=2, type=_number, metavar=("C1", "C2"), default=None)
    p.add_argument("--radius", type=_number, default=None)

    p = sub.add_parser("interval", help="expected signature for exit from an interval")
    _common(p)
    p.add_argument("--eval", type=_number, metavar="X")
    p.add_argument("--interval", nargs=2, type=_number, metavar=("A", "B"), default=(Fraction(-1), Fraction(1)))

    p = sub.add_parser("lattice", help="expected signature of a random walk on a lattice domain")
    _common(p, default_n=None)
    p.add_argument("domain_file")
    p.add_argument("--method", choices=("exact", "gauss-seidel"), default=None)

    p = sub.add_parser("mc", help="Monte Carlo estimate on a disk")
    _common(p)
    p.add_argument("--z", nargs=2, type=float, metavar=("Z1", "Z2"), default=(0.0, 0.0))
    p.add_argument("--center", nargs=2, type=float, metavar=("C1", "C2"), default=(0.0, 0.0))
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--paths", type=int, default=10000)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--batch-size", type=int, default=5000)
    p.add_argument("--dump", default=None, help="write one sample path as 't x1 x2' lines")

    p = sub.add_parser("sig", help="signature of a piecewise-linear path file")
    _common(p)
    p.add_argument("path_file")

    p = sub.add_parser("check", help="run a named verification suite")
    _common(p, default_n=None)
    p.add_argument("suite", choices=sorted(checks.SUITES))
    p.add_argument("--paths", type=int, default=None)
    p.add_argument("--report", default=None, help="write a JSON report here ('-' for stdout)")
    return parser


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("ESSIG_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"ESSIG_SEED must be an integer, got {env!r}") from None


def validate(args) -> None:
    """Reject bad configurations before any work starts."""
    if args.truncation is not None and args.truncation < 0:
        raise ConfigError("truncation N must be >= 0")
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    args.seed = resolve_seed(args.seed)
    if args.seed < 0:
        raise ConfigError("seed must be non-negative")
    cmd = args.command
    if cmd == "disk":
        if args.radius is not None and args.radius <= 0:
            raise ConfigError("radius must be > 0")
        if (args.center is not None or args.radius is not None) and args.eval is None:
            raise ConfigError("--center/--radius need --eval")
        if args.eval is not None:
            c = args.center or (Fraction(0), Fraction(0))
            r = args.radius if args.radius is not None else Fraction(1)
            if (args.eval[0] - c[0]) ** 2 + (args.eval[1] - c[1]) ** 2 > r * r:
                raise ConfigError("evaluation point lies outside the disk")
    elif cmd == "interval":
        a, b = args.interval
        if not a < b:
            raise ConfigError("interval needs A < B")
        if args.eval is not None and not a <= args.eval <= b:
            raise ConfigError("evaluation point lies outside the interval")
    elif cmd == "lattice":
        if not os.path.isfile(args.domain_file):
            raise ConfigError(f"domain file not found: {args.domain_file}")
        with open(args.domain_file, encoding="utf-8") as fh:
            try:
                args.domain, args.file_truncation = lattice.parse_domain(fh.read())
            except ValueError as exc:
                raise ConfigError(f"bad domain file: {exc}") from None
        if args.scalar == FLOAT64 and args.method == "exact":
            raise ConfigError("exact elimination needs --scalar rational")
    elif cmd == "mc":
        if args.paths < 1:
            raise ConfigError("paths must be >= 1")
        if not args.dt > 0 or not math.isfinite(args.dt):
            raise ConfigError("dt must be > 0")
        if not args.radius > 0:
            raise ConfigError("radius must be > 0")
        if args.batch_size < 1:
            raise ConfigError("batch size must be >= 1")
        if math.dist(args.z, args.center) > args.radius:
            raise ConfigError("start point lies outside the disk")
        if args.scalar == RATIONAL:
            raise ConfigError("Monte Carlo output is float64 only")
    elif cmd == "sig":
        if not os.path.isfile(args.path_file):
            raise ConfigError(f"path file not found: {args.path_file}")
        with open(args.path_file, encoding="utf-8") as fh:
            text = fh.read()
        try:
            args.path = mc.parse_path_dump(text)
            rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
            args.exact_points = [[Fraction(x) for x in r[1:]] for r in rows]
        except ValueError as exc:
            raise ConfigError(f"bad path file: {exc}") from None
    elif cmd == "check":
        if args.paths is not None and args.paths < 1:
            raise ConfigError("paths must be >= 1")
        if args.format == "csv":
            raise ConfigError("check reports are JSON only")


# ------------------------------------------------------------------ output


def _value_str(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def _tensor_rows(t: TruncatedTensor, prefix=()):
    for word, value in t.items():
        if value != 0:
            yield (*prefix, len(word), word_str(word), _value_str(value))


def _emit(args, payload: dict, rows: list, header: list) -> None:
    if args.format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _as_scalar(x: Fraction, scalar: str):
    return x if scalar == RATIONAL else float(x)


# ----------------------------------------------------------------- commands


def cmd_disk(args) -> int:
    pt = disk.expected_signature_disk(args.truncation)
    payload = {"expected_signature": pt.to_dict()}
    rows = []
    for k, lev in enumerate(pt.levels):
        for idx, poly in enumerate(lev):
            word = word_str(index_to_word(idx, k, 2))
            for term in poly_to_json(poly):
                rows.append((k, word, term["e1"], term["e2"], term["c"]))
    header = ["level", "word", "e1", "e2", "coeff"]
    if args.eval is not None:
        scalar = args.scalar or RATIONAL
        z = tuple(_as_scalar(c, scalar) for c in args.eval)
        center = tuple(_as_scalar(c, scalar) for c in (args.center or (Fraction(0), Fraction(0))))
        radius = _as_scalar(args.radius if args.radius is not None else Fraction(1), scalar)
        value = disk.transport(pt, center, radius, z, scalar)
        payload["evaluation"] = {
            "point": [_value_str(c) for c in z],
            "center": [_value_str(c) for c in center],
            "radius": _value_str(radius),
            "value": tensor_to_dict(value),
        }
        if args.format == "csv":
            rows = list(_tensor_rows(value))
            header = ["level", "word", "value"]
    _emit(args, payload, rows, header)
    return 0


def cmd_interval(args) -> int:
    levels = interval.ode_recursion(args.truncation)
    payload = {"truncation": args.truncation, "levels": interval.levels_to_json(levels)}
    rows = [(n, k, f"{c.numerator}/{c.denominator}") for n, p in enumerate(levels) for k, c in enumerate(p.coeffs)]
    header = ["level", "power", "coeff"]
    if args.eval is not None:
        scalar = args.scalar or RATIONAL
        a, b = (_as_scalar(v, scalar) for v in args.interval)
        value = interval.evaluate_interval(levels, _as_scalar(args.eval, scalar), a, b, scalar)
        payload["evaluation"] = {"point": _value_str(_as_scalar(args.eval, scalar)), "value": tensor_to_dict(value)}
        if args.format == "csv":
            rows = list(_tensor_rows(value))
            header = ["level", "word", "value"]
    _emit(args, payload, rows, header)
    return 0


def cmd_lattice(args) -> int:
    domain = args.domain
    N = args.truncation if args.truncation is not None else args.file_truncation
    field_ = lattice.expected_signature_lattice(domain, N, args.scalar or RATIONAL, args.method)
    rows = []
    for p in domain.closure():
        rows.extend(_tensor_rows(field_[p], (lattice.point_key(p),)))
    _emit(args, field_.to_dict(), rows, ["point", "level", "word", "value"])
    return 0


def cmd_mc(args) -> int:
    est = mc.estimate_phi(
        tuple(args.z), tuple(args.center), args.radius, args.truncation, args.paths, args.dt, args.seed, args.batch_size
    )
    if args.dump:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(args.seed, spawn_key=(2**31,))))
        path = mc.sample_bm_exit(np.array(args.z), np.array(args.center), args.radius, args.dt, rng)
        with open(args.dump, "w", encoding="utf-8") as fh:
            fh.write(mc.format_path_dump(path))
    payload = {
        "z": list(args.z),
        "center": list(args.center),
        "radius": args.radius,
        "paths": est.count,
        "dt": est.dt,
        "seed": est.seed,
        "batch_size": est.batch_size,
        "mean": tensor_to_dict(est.mean),
        "stderr": tensor_to_dict(est.stderr),
    }
    rows = [
        (len(w), word_str(w), repr(float(m)), repr(float(s)))
        for (w, m), (_, s) in zip(est.mean.items(), est.stderr.items())
    ]
    _emit(args, payload, rows, ["level", "word", "mean", "stderr"])
    return 0


def cmd_sig(args) -> int:
    # rational mode reads the coordinates as exact decimals
    points = args.exact_points if args.scalar == RATIONAL else args.path.points
    sig = mc.signature_of_path(points, args.truncation, args.scalar or FLOAT64)
    _emit(args, tensor_to_dict(sig), list(_tensor_rows(sig)), ["level", "word", "value"])
    return 0


def cmd_check(args) -> int:
    suite = args.suite
    kwargs = {}
    if args.truncation is not None:
        if suite in ("residual", "boundary-factor", "chen", "rotation", "lattice-mc", "interval-oracle"):
            kwargs["N"] = args.truncation
    if suite in ("chen", "rotation", "lattice-mc"):
        kwargs["seed"] = args.seed
    if args.paths is not None:
        if suite == "chen":
            kwargs["paths"] = args.paths
        elif suite == "lattice-mc":
            kwargs["walks"] = args.paths
        elif suite == "rotation":
            kwargs["points"] = args.paths
    report = checks.SUITES[suite](**kwargs)
    for item in report.items:
        status = "PASS" if item.passed else "FAIL"
        line = f"{status} {suite}: {item.name}"
        print(line + (f" ({item.detail})" if item.detail else ""), file=sys.stderr)
    if args.report:
        text = json.dumps(report.to_dict(), indent=2) + "\n"
        if args.report == "-":
            sys.stdout.write(text)
        else:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(text)
    return 0 if report.passed else 1


COMMANDS = {
    "disk": cmd_disk,
    "interval": cmd_interval,
    "lattice": cmd_lattice,
    "mc": cmd_mc,
    "sig": cmd_sig,
    "check": cmd_check,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command in ("disk", "interval", "mc", "sig") and args.truncation is None:
            args.truncation = 4
        validate(args)
    except ConfigError as exc:
        print(f"essig: error: {exc}", file=sys.stderr)
        return 2
    try:
        # kernels are serial; --threads is validated but has nothing to drive
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"essig: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
