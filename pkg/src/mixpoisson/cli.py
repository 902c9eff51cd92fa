"""Command-line interface.

Subcommands: ``validate``, ``pmf``, ``pgf``, ``sample``, ``oracle`` and
``figure``. Data goes to standard output (or ``--output``), diagnostics to
standard error. Exit codes: 0 success, 1 invalid mixing law, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import families as fam
from . import oracle, pmf, validity
from .errors import InsufficientMassError, MixPoissonError, UnsupportedFamilyError

FAMILY_FLAGS = {
    "two-point": (fam.TwoPoint, ("a", "b", "p")),
    "asym-laplace": (fam.AsymLaplace, ("lambda1", "lambda2", "p")),
    "gaussian": (fam.GaussianMix, ("mu", "sigma2")),
    "extreme-stable": (fam.ExtremeStable, ("alpha", "sigma", "delta")),
}

FIGURES = {
    1: (fam.TwoPoint(a=2.0, b=2.0, p=0.009), 15),
    2: (fam.AsymLaplace(lambda1=2.3, lambda2=0.3, p=0.058), 30),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x):
    """Shortest round-trip scientific representation of a float."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    mantissa, exponent = np.format_float_scientific(x, unique=True, trim="-").split("e")
    return f"{mantissa}e{int(exponent)}"


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def _dump_json(obj):
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _family_dict(spec):
    for name, (cls, fields) in FAMILY_FLAGS.items():
        if isinstance(spec, cls):
            return {"family": name, **{f: getattr(spec, f) for f in fields}}
    raise TypeError(spec)


def _build_parser():
    common = _Parser(add_help=False)
    g = common.add_argument_group("mixing family")
    g.add_argument("--family", choices=sorted(FAMILY_FLAGS), required=True)
    for flag in ("a", "b", "p", "lambda1", "lambda2", "mu", "sigma2", "alpha", "sigma", "delta"):
        g.add_argument(f"--{flag}", type=float)
    common.add_argument("--output", type=Path, help="write data here instead of stdout")

    table = _Parser(add_help=False)
    table.add_argument("--epsilon", type=float, default=pmf.DEFAULT_EPSILON)
    table.add_argument("--ncap", type=int, default=pmf.DEFAULT_CAP)

    parser = _Parser(prog="mixpoisson", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check existence of the mixed law")
    p.add_argument("--odd-max", type=int, help="also run the numeric odd-moment check to this n")
    p.add_argument("--format", choices=["json"], default="json")

    p = sub.add_parser("pmf", parents=[common, table], help="probability mass function")
    p.add_argument("--nmax", type=int, help="emit exactly n = 0..NMAX")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("pgf", parents=[common], help="probability generating function")
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="json")

    p = sub.add_parser("sample", parents=[common, table], help="draw counts")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = sub.add_parser("oracle", parents=[common], help="Monte Carlo check of f(n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["json"], default="json")

    p = sub.add_parser("figure", help="data behind the two-point and asymmetric Laplace figures")
    p.add_argument("--which", type=int, choices=sorted(FIGURES), required=True)
    p.add_argument("--out", type=Path, required=True)
    return parser


def _spec_from_args(args):
    cls, fields = FAMILY_FLAGS[args.family]
    values = {f: getattr(args, f) for f in fields}
    if args.family == "extreme-stable" and values["delta"] is None:
        values["delta"] = 0.0
    missing = [f"--{f}" for f, v in values.items() if v is None]
    if missing:
        raise UsageError(f"family {args.family} requires {', '.join(missing)}")
    try:
        return cls(**values)
    except MixPoissonError as exc:
        raise UsageError(str(exc)) from None


def _require_valid(spec):
    report = validity.check_family(spec)
    if not report.ok:
        raise _Invalid(report)


class _Invalid(Exception):
    def __init__(self, report):
        super().__init__(report.detail)
        self.report = report


def _csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _exact_probs(spec, n_max):
    if isinstance(spec, (fam.TwoPoint, fam.AsymLaplace)):
        return [pmf.pmf_closed(spec, n) for n in range(n_max + 1)]
    return pmf.pgf_coeffs(spec, n_max).p.tolist()


def _cmd_validate(args, spec):
    report = validity.check_family(spec)
    out = {"family": _family_dict(spec), **report.to_dict()}
    out["necessary"] = validity.check_necessary(fam.tail_descriptor(spec)).to_dict()
    if args.odd_max is not None:
        try:
            out["numeric"] = validity.check_sufficient_numeric(spec, args.odd_max).to_dict()
        except UnsupportedFamilyError as exc:
            out["numeric"] = {"unsupported": str(exc)}
    return _dump_json(out), 0 if report.ok else 1


def _cmd_pmf(args, spec):
    _require_valid(spec)
    meta = {}
    if args.nmax is not None:
        if args.nmax < 0:
            raise UsageError("--nmax must be >= 0")
        probs = _exact_probs(spec, args.nmax)
    else:
        table = pmf.pmf_table(spec, args.epsilon, args.ncap)
        probs = table.probs.tolist()
        meta = {"accumulated": table.accumulated, "tail_gap": table.tail_gap,
                "truncation": table.truncation}
    if args.format == "csv":
        return _csv(("n", "pmf"), enumerate(probs)), 0
    out = {"family": _family_dict(spec), "n": list(range(len(probs))), "pmf": probs, **meta}
    return _dump_json(out), 0


def _cmd_pgf(args, spec):
    _require_valid(spec)
    value = pmf.pgf_eval(spec, args.z)
    if args.format == "csv":
        return _csv(("z", "value"), [(args.z, value)]), 0
    return _dump_json({"z": args.z, "value": value}), 0


def _cmd_sample(args, spec):
    _require_valid(spec)
    table = pmf.pmf_table(spec, args.epsilon, args.ncap)
    counts = pmf.sample_count(table, args.seed, args.count)
    return "".join(f"{c}\n" for c in counts.tolist()), 0


def _cmd_oracle(args, spec):
    est = oracle.mc_estimate(spec, args.n, args.samples, args.seed, workers=max(1, args.workers))
    out = {
        "family": _family_dict(spec),
        "value": est.value,
        "stderr": est.stderr,
        "samples": est.samples,
        "seed": est.seed,
        "n": est.n,
        "exact": None,
        "ratio": None,
    }
    if validity.check_family(spec).ok:
        exact = _exact_probs(spec, args.n)[args.n]
        out["exact"] = exact
        out["ratio"] = abs(est.value - exact) / est.stderr if est.stderr > 0 else None
    return _dump_json(out), 0


def _mixing_rows(spec):
    if isinstance(spec, fam.TwoPoint):
        return ("x", "mass"), [(-spec.a, spec.p), (spec.b, 1.0 - spec.p)]
    l1, l2, p = spec.lambda1, spec.lambda2, spec.p
    xs = np.linspace(-4.0, 12.0, 400)
    dens = np.where(xs < 0.0, p * l1 * np.exp(l1 * np.minimum(xs, 0.0)),
                    (1.0 - p) * l2 * np.exp(-l2 * np.maximum(xs, 0.0)))
    return ("x", "density"), list(zip(xs.tolist(), dens.tolist()))


def _cmd_figure(args):
    spec, n_max = FIGURES[args.which]
    args.out.mkdir(parents=True, exist_ok=True)
    header, rows = _mixing_rows(spec)
    mixing = args.out / f"figure{args.which}_mixing.csv"
    mixing.write_text(_csv(header, rows))
    probs = args.out / f"figure{args.which}_pmf.csv"
    probs.write_text(_csv(("n", "pmf"), enumerate(_exact_probs(spec, n_max))))
    return f"{mixing}\n{probs}\n", 0


COMMANDS = {
    "validate": _cmd_validate,
    "pmf": _cmd_pmf,
    "pgf": _cmd_pgf,
    "sample": _cmd_sample,
    "oracle": _cmd_oracle,
}


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = _build_parser().parse_args(argv)
        if args.command == "figure":
            text, code = _cmd_figure(args)
            output = None
        else:
            spec = _spec_from_args(args)
            text, code = COMMANDS[args.command](args, spec)
            output = args.output
    except UsageError as exc:
        print(f"mixpoisson: error: {exc}", file=stderr)
        return 2
    except _Invalid as exc:
        print(f"mixpoisson: invalid mixing law: {exc}", file=stderr)
        return 1
    except InsufficientMassError as exc:
        print(f"mixpoisson: {exc}", file=stderr)
        return 1
    except MixPoissonError as exc:
        print(f"mixpoisson: error: {exc}", file=stderr)
        return 2

    if output is not None:
        output.write_text(text)
    else:
        stdout.write(text)
    return code


def main():
    sys.exit(run())
