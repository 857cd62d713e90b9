"""``posconv`` command line: analyze, simulate, divisibility, gallery.

Exit codes: 0 for a determinate conclusion (or a successful utility
command), 3 when the analysis reaches no verdict, 1 on any error.
"""

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from . import __version__
from .analysis import NO_UNIMODULAR, verdict_engine
from .exceptions import PosconvError, SchemaError, VerdictContradiction
from .gallery import gallery_dict, gallery_names
from .groups import group_from_json, is_divisible, quotient_hom
from .io import dumps, dumps_report, load_model
from .jdlg import ergodic_projection
from .lattice import norm

EXIT_OK, EXIT_ERROR, EXIT_NO_VERDICT = 0, 1, 3


def decimal_string(t):
    """Exact decimal for terminating fractions, shortest round-trip text for
    floats; never scientific notation."""
    if isinstance(t, Fraction):
        with localcontext() as ctx:
            ctx.prec = 40
            d = Decimal(t.numerator) / Decimal(t.denominator)
    else:
        d = Decimal(repr(float(t)))
    s = format(d.normalize(), "f")
    return s


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _apply_flags(options, args, names=("tol", "horizon", "depth", "epsilon")):
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            setattr(options, name, value)
    return options


# analyze ---------------------------------------------------------------------

def summary_text(report, name=""):
    lines = [f"model: {name}" if name else "model: <unnamed>",
             f"conclusion: {report.conclusion}",
             f"convergence: {report.convergence}",
             f"spectral: {report.spectral}",
             "hypotheses:"]
    width = max(len(h.name) for h in report.hypotheses)
    for h in report.hypotheses:
        lines.append(f"  {h.name:<{width}}  {h.status}")
    applicable = report.applicable
    lines.append("applicable verdicts: " + (", ".join(applicable) if applicable else "none"))
    div = report.hypothesis("divisible-index-group")
    if div.status != "holds" and "witness_prime" in div.witness:
        lines.append(f"divisibility witness: q={div.witness['witness_prime']}")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args):
    model = load_model(args.model)
    options = _apply_flags(model.options, args)
    report = verdict_engine(model.rep, options)
    text = dumps_report(report, model.name)
    if args.output:
        _write(text, args.output)
    if args.format == "json" and not args.output:
        _write(text, None)
    else:
        sys.stdout.write(summary_text(report, model.name))
    return EXIT_OK if report.determinate else EXIT_NO_VERDICT


# simulate --------------------------------------------------------------------

def _probes(space, which):
    n = space.n
    if which in (None, "all"):
        return [(space.atoms[i], np.eye(n)[i]) for i in range(n)]
    if which == "zero":
        return [("zero", np.zeros(n))]
    if which == "ones":
        return [("ones", np.ones(n))]
    key = int(which) if which.isdigit() else which
    if isinstance(key, str) and key.startswith("e") and key[1:].isdigit() and key not in space.atoms:
        key = int(key[1:])
    i = space.index(key)
    return [(space.atoms[i], np.eye(n)[i])]


def simulation_rows(model, probe="all", horizon=None):
    """``(t, probe, residual)`` rows; the residual is ``||T_t x - P x||``
    when a limit projection is known, else the step change
    ``||T_{t+dt} x - T_t x||``."""
    rep, opt = model.rep, model.options
    horizon = opt.horizon if horizon is None else horizon
    report = verdict_engine(rep, opt)
    P = report.limit_projection
    if P is None and report.spectral == NO_UNIMODULAR:
        P = ergodic_projection(rep, opt.tol)
    rows = []
    for label, x in _probes(rep.space, probe):
        if rep.kind == "continuous":
            times, states = rep.trajectory(x, horizon + (0 if P is not None else model.dt),
                                           model.dt)
        else:
            times, states = rep.trajectory(x, horizon + (0 if P is not None else 1))
        for k, t in enumerate(times):
            if P is not None:
                r = norm(rep.space, states[k] - P @ x)
            elif k + 1 < len(states):
                r = norm(rep.space, states[k + 1] - states[k])
            else:
                break
            rows.append((decimal_string(t), label, float(r)))
    return rows


def cmd_simulate(args):
    model = load_model(args.model)
    # --horizon only sets the trajectory length; the analysis keeps its own
    model.options = _apply_flags(model.options, args, ("tol", "depth", "epsilon"))
    if args.dt is not None:
        model.dt = args.dt
    rows = simulation_rows(model, args.probe, args.horizon)
    out = open(args.csv, "w", newline="", encoding="utf-8") if args.csv else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "probe", "residual"])
        for t, label, r in rows:
            w.writerow([t, label, format(r, ".17g")])
    finally:
        if args.csv:
            out.close()
    return EXIT_OK


# divisibility ----------------------------------------------------------------

def divisibility_result(group_obj):
    G = group_from_json(group_obj)
    divisible, q = is_divisible(G)
    out = {"group": G.to_json(), "divisible": divisible}
    if divisible:
        return out, "divisible"
    out["witness"] = q
    phi = quotient_hom(G, q)
    elems = list(G.generators) if hasattr(G, "generators") else (
        [Fraction(1)] + [Fraction(1, p) for p in sorted(G.primes)])
    table = [(str(g), int(phi(g))) for g in elems]
    out["quotient"] = {"modulus": q, "table": [{"element": g, "image": v} for g, v in table]}
    maps = ", ".join(f"{g}↦{v}" for g, v in table)
    parts = ["not divisible"]
    if hasattr(G, "cyclic_generator"):
        out["cyclic_generator"] = str(G.cyclic_generator)
        parts.append(f"cyclic generator {G.cyclic_generator}")
    parts.append(f"witness {q}")
    parts.append(f"φ: {maps} (mod {q})")
    return out, "; ".join(parts)


def _read_group(arg):
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            arg = fh.read()
    try:
        return json.loads(arg)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def cmd_divisibility(args):
    out, text = divisibility_result(_read_group(args.group))
    if args.format == "json":
        _write(dumps(out), args.output)
    else:
        _write(text + "\n", args.output)
    return EXIT_OK


# gallery ---------------------------------------------------------------------

def _gallery_text(name):
    return dumps(gallery_dict(name))


def cmd_gallery(args):
    if args.all:
        target = args.output or "."
        os.makedirs(target, exist_ok=True)
        names = gallery_names()

        def write(name):
            path = os.path.join(target, f"{name}.json")
            _write(_gallery_text(name), path)
            return path

        with ThreadPoolExecutor() as pool:
            for path in pool.map(write, names):
                print(path)
        return EXIT_OK
    if not args.name:
        raise SchemaError("gallery needs a model name or --all")
    _write(_gallery_text(args.name), args.output)
    return EXIT_OK


# entry point -----------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="posconv",
                                     description="Convergence analysis of positive operator "
                                                 "semigroups on finite lattices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-8)")
        p.add_argument("--horizon", type=int, default=None,
                       help="chain steps or time units (default 64)")
        p.add_argument("--depth", type=int, default=None,
                       help="domination search depth (default 8)")
        p.add_argument("--epsilon", type=float, default=None)

    p = sub.add_parser("analyze", help="run the verdict engine on a model file")
    p.add_argument("model")
    common(p)
    p.add_argument("--output", "-o", default=None, help="report file")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="write residual trajectories as CSV")
    p.add_argument("model")
    common(p)
    p.add_argument("--probe", default="all",
                   help="atom label or index, 'zero', 'ones' or 'all'")
    p.add_argument("--csv", default=None, help="output file (default stdout)")
    p.add_argument("--dt", type=float, default=None, help="time step for continuous models")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("divisibility", help="decide divisibility of an index group")
    p.add_argument("group", help="group JSON text or a file containing it")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_divisibility)

    p = sub.add_parser("gallery", help="write a ready-made model file")
    p.add_argument("name", nargs="?", help=f"one of {', '.join(gallery_names())}")
    p.add_argument("--all", action="store_true", help="write every model into --output")
    p.add_argument("--output", "-o", default=None, help="file (or directory with --all)")
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerdictContradiction as exc:
        print(f"error: verdict contradicted by simulation: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (PosconvError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
