"""Command-line interface and the JSON file formats.

Exit codes: 0 success, 1 verification failure, 2 invalid certificate (pole
at eps = 0), 3 input error, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds, invariants, report
from .algebras import build_sl2_hab, structure_tensor
from .degeneration import (
    Certificate,
    ClaimMismatch,
    LimitNotUnit,
    best_certificate,
    build_mamu,
    family_algebra,
    family_tensor,
    verify_unit_certificate,
)
from .exactnum import EpsRational, PoleAtZero
from .tensor_core import ModeMap, Tensor

EXIT_OK, EXIT_VERIFY, EXIT_POLE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3, 4
SEED_ENV = "SUBRANK_SEED"
FAMILY_CHOICES = ("trd", "tri", "cw", "null", "mamu", "sl2", "sl")


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# JSON formats

def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _rat_from(num, den) -> Fraction:
    try:
        n, d = int(num), int(den)
    except (TypeError, ValueError):
        raise InputError(f"bad rational {num!r}/{den!r}") from None
    if d == 0:
        raise InputError("zero denominator")
    return Fraction(n, d)


def tensor_to_json(T: Tensor) -> dict:
    entries = []
    for idx, c in T.items():
        c = Fraction(c)
        entries.append({"idx": list(idx), "num": str(c.numerator), "den": str(c.denominator)})
    return {"shape": list(T.dims), "entries": entries}


def tensor_from_json(data: dict) -> Tensor:
    try:
        shape = [int(x) for x in data["shape"]]
        raw = data["entries"]
    except (KeyError, TypeError, ValueError):
        raise InputError("tensor file needs 'shape' and 'entries'") from None
    if not shape or any(d < 1 for d in shape):
        raise InputError(f"invalid shape {shape}")
    entries = {}
    for e in raw:
        try:
            idx = tuple(int(i) for i in e["idx"])
        except (KeyError, TypeError, ValueError):
            raise InputError(f"bad entry {e!r}") from None
        if len(idx) != len(shape) or any(not 0 <= i < d for i, d in zip(idx, shape)):
            raise InputError(f"index {list(idx)} out of range for shape {shape}")
        if idx in entries:
            raise InputError(f"duplicate index {list(idx)}")
        entries[idx] = _rat_from(e.get("num"), e.get("den"))
    return Tensor(tuple(shape), entries)


def _poly_to_json(coeffs):
    return [[deg, str(c.numerator), str(c.denominator)] for deg, c in enumerate(coeffs) if c]


def _poly_from_json(terms):
    out = {}
    for t in terms:
        try:
            deg, num, den = t
            deg = int(deg)
        except (TypeError, ValueError):
            raise InputError(f"bad polynomial term {t!r}") from None
        if deg < 0 or deg in out:
            raise InputError(f"bad degree {deg}")
        out[deg] = _rat_from(num, den)
    if not out:
        return ()
    return tuple(out.get(i, Fraction(0)) for i in range(max(out) + 1))


def eps_to_json(x: EpsRational) -> dict:
    return {"num_poly": _poly_to_json(x.num), "den_poly": _poly_to_json(x.den)}


def eps_from_json(d: dict) -> EpsRational:
    try:
        num = _poly_from_json(d["num_poly"])
        den = _poly_from_json(d["den_poly"])
    except (KeyError, TypeError):
        raise InputError("entry needs num_poly and den_poly") from None
    if not den:
        raise InputError("zero denominator polynomial")
    return EpsRational(num, den)


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "family_tag": cert.family_tag,
        "params": {k: v for k, v in cert.params.items()},
        "claimed_unit": cert.claimed_unit,
        "mode_maps": [[[eps_to_json(x) for x in row] for row in m.matrix] for m in cert.mode_maps],
    }


def certificate_from_json(data: dict) -> Certificate:
    try:
        maps = [ModeMap(i, [[eps_from_json(x) for x in row] for row in mat])
                for i, mat in enumerate(data["mode_maps"])]
        return Certificate(str(data["family_tag"]), dict(data["params"]), maps,
                           int(data["claimed_unit"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed certificate file: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _write(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# helpers

def _params(args) -> dict:
    fam = args.family
    need = {"trd": ["d"], "tri": ["n"], "cw": ["n"], "null": ["n"], "mamu": ["n"],
            "sl": ["n"], "sl2": []}[fam]
    params = {}
    for key in need:
        v = getattr(args, key, None)
        if v is None:
            raise InputError(f"family {fam} needs --{key}")
        if v < 1:
            raise InputError(f"--{key} must be positive")
        params[key] = v
    return params


def _k(args, default=None):
    k = args.k if args.k is not None else default
    if k is None:
        raise InputError("--k is required")
    if k < 1:
        raise InputError("--k must be positive")
    return k


def _emit(args, data: dict, lines):
    if args.format == "json":
        _write(dumps(data), args.out)
    else:
        _write("\n".join(lines) + "\n", args.out)


# ---------------------------------------------------------------------------
# commands

def cmd_build(args):
    if args.family == "mamu" and args.dims:
        try:
            dims = [int(x) for x in args.dims.split(",")]
        except ValueError:
            raise InputError("--dims must be comma-separated integers") from None
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise InputError("--dims needs at least two positive integers")
        T = build_mamu(dims)
    else:
        params = _params(args)
        k = _k(args)
        if args.family == "sl" and params["n"] == 2:
            T = structure_tensor(build_sl2_hab(), k)
        else:
            T = family_tensor(args.family, params, k)
    _write(dumps(tensor_to_json(T)), args.out)
    return EXIT_OK


def cmd_verify(args):
    if args.cert:
        cert = certificate_from_json(_read_json(args.cert))
        if not args.tensor:
            raise InputError("--cert needs --tensor")
        T = tensor_from_json(_read_json(args.tensor))
    elif args.family:
        params = _params(args)
        k = _k(args)
        T = family_tensor(args.family, params, k)
        try:
            cert = best_certificate(args.family, params, k)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        if args.emit_cert:
            Path(args.emit_cert).write_text(dumps(certificate_to_json(cert)), encoding="utf-8")
        if args.emit_tensor:
            Path(args.emit_tensor).write_text(dumps(tensor_to_json(T)), encoding="utf-8")
    else:
        raise InputError("verify needs --cert/--tensor or --family")
    try:
        r = verify_unit_certificate(T, cert)
    except PoleAtZero as exc:
        print(f"invalid certificate: {exc}", file=sys.stderr)
        return EXIT_POLE
    except LimitNotUnit as exc:
        idx = list(exc.index) if exc.index is not None else None
        print(f"verification failed: {exc}", file=sys.stderr)
        _emit(args, {"ok": False, "index": idx}, [f"FAIL index = {idx}"])
        return EXIT_VERIFY
    except ClaimMismatch as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        _emit(args, {"ok": False, "found": exc.found, "claimed": exc.claimed},
              [f"FAIL found {exc.found}, claimed {exc.claimed}"])
        return EXIT_VERIFY
    except ValueError as exc:      # shape mismatches between certificate and tensor
        raise InputError(str(exc)) from None
    _emit(args, {"ok": True, "r": r}, [f"r = {r}"])
    return EXIT_OK


def cmd_bounds(args):
    params = _params(args)
    k = _k(args)
    try:
        row = report.compute_row((args.family, k, params), args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    d = row.as_dict()

    def upper(key):
        return "n/a" if d[key] == "-" else f"<= {d[key]}"

    lines = [f"{args.family} k={k} {row.params_text()}".rstrip(),
             f"  lower bound (certificate): {row.lower}",
             f"  GR: {d['gr']}",
             f"  floor G-stable: {upper('gstable_floor')}",
             f"  instability: {upper('instability')}",
             f"  invariant separation: {upper('separator')}",
             f"  value: {row.value} ({row.status})"]
    _emit(args, d, lines)
    return EXIT_OK


INVARIANTS = {
    "f6_333": invariants.f6_333,
    "f12_333": invariants.f12_333,
    "f2_2222": invariants.f2_2222,
    "f4_2222": invariants.f4_2222,
    "f4p_2222": invariants.f4p_2222,
    "f6_2222": invariants.f6_2222,
    "cayley_222": invariants.cayley_222,
    "hyperdet_2222": invariants.hyperdet_2222,
}


def cmd_invariant(args):
    T = tensor_from_json(_read_json(args.tensor))
    try:
        value = Fraction(INVARIANTS[args.name](T))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(args, {"name": args.name, "value": str(value)}, [f"{args.name} = {value}"])
    return EXIT_OK


def cmd_oracle(args):
    params = _params(args)
    k = _k(args)
    try:
        primes = [int(p) for p in args.primes.split(",")]
    except ValueError:
        raise InputError("--primes must be comma-separated integers") from None
    A = build_sl2_hab() if args.family == "sl2" else family_algebra(args.family, params)
    try:
        est = bounds.ff_dimension_oracle(A, k, primes, budget=args.budget)
    except bounds.BadPrime as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    data = {"dim": est.dim, "ambient": est.ambient, "gr": est.gr, "consistent": est.consistent,
            "counts": {str(p): str(c) for p, c in est.counts.items()}}
    lines = [f"dim Z = {est.dim} (ambient {est.ambient})", f"GR = {est.gr}",
             f"consistent = {est.consistent}"]
    lines += [f"  #Z(F_{p}) = {c}" for p, c in est.counts.items()]
    _emit(args, data, lines)
    return EXIT_OK


def cmd_report(args):
    fams = None if args.families == "all" else [f.strip() for f in args.families.split(",")]
    try:
        rows = report.generate(fams, seed=args.seed, jobs=args.jobs)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    md = report.render_md(rows, args.seed)
    csv_text = report.render_csv(rows, args.seed)
    if args.out and args.format is None:
        base = Path(args.out)
        if base.suffix in (".md", ".csv"):
            base = base.with_suffix("")
        base.with_suffix(".md").write_text(md, encoding="utf-8")
        base.with_suffix(".csv").write_text(csv_text, encoding="utf-8")
    else:
        fmt = args.format or "md"
        text = {"md": md, "csv": csv_text,
                "json": dumps({"seed": args.seed, "rows": [r.as_dict() for r in rows]})}[fmt]
        _write(text, args.out)
    bad = [r for r in rows if r.status not in report.STATUSES]
    return EXIT_VERIFY if bad else EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None,
                        help=f"64-bit seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("md", "csv", "json"), default=None)

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--k", type=int)
    fam.add_argument("--d", type=int)
    fam.add_argument("--n", type=int)

    p = argparse.ArgumentParser(prog="subrank", description="Border subrank certificates and bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common, fam], help="write a structure tensor file")
    b.add_argument("family", choices=FAMILY_CHOICES)
    b.add_argument("--dims", help="matrix multiplication dimensions, e.g. 2,2,2")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", parents=[common, fam], help="verify a degeneration certificate")
    v.add_argument("--cert")
    v.add_argument("--tensor")
    v.add_argument("--family", choices=FAMILY_CHOICES)
    v.add_argument("--emit-cert", help="also write the library certificate used")
    v.add_argument("--emit-tensor", help="also write the tensor used")
    v.set_defaults(func=cmd_verify)

    bo = sub.add_parser("bounds", parents=[common, fam], help="lower and upper bounds for one tensor")
    bo.add_argument("family", choices=FAMILY_CHOICES)
    bo.set_defaults(func=cmd_bounds)

    inv = sub.add_parser("invariant", parents=[common], help="evaluate a named invariant")
    inv.add_argument("name", choices=sorted(INVARIANTS))
    inv.add_argument("--tensor", required=True)
    inv.set_defaults(func=cmd_invariant)

    o = sub.add_parser("oracle", parents=[common, fam], help="finite-field dimension estimate")
    o.add_argument("family", choices=FAMILY_CHOICES)
    o.add_argument("--primes", default="5,7")
    o.add_argument("--budget", type=int, default=10 ** 7)
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("report", parents=[common], help="regenerate the bound tables")
    r.add_argument("--families", default="all")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            args.seed = _seed(env) if env else 0
        except argparse.ArgumentTypeError as exc:
            print(f"error: ${SEED_ENV}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    if args.jobs < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (bounds.BudgetExceeded, invariants.BudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
