"""Command-line front end: declarative scans with CSV/JSON emission.

Every command is a thin, deterministic wrapper over library calls: fixed
grids, fixed tolerances, rows ordered by scan index. Output is CSV
(17 significant digits, LF line endings) or JSON ({meta, columns, rows});
infinities serialize as the strings "inf"/"-inf" in both formats.

Exit codes: 0 success, 1 validation failure (a machine-readable error
object is printed to stderr), 2 numerical non-convergence.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, bounds, collective, spectral, strategies
from .util import ConvergenceError

_FMT = "{:.17g}"


class ValidationError(ValueError):
    """Bad configuration or physical-parameter input."""


def parse_range(spec):
    """Parse ``start:stop:lin|log:count`` into a numpy grid."""
    parts = str(spec).split(":")
    if len(parts) != 4:
        raise ValidationError(
            f"range {spec!r} must have the form start:stop:lin|log:count"
        )
    start, stop, kind, count = parts
    try:
        start, stop, count = float(start), float(stop), int(count)
    except ValueError as exc:
        raise ValidationError(f"range {spec!r}: {exc}") from None
    if count < 1:
        raise ValidationError(f"range {spec!r}: count must be >= 1")
    if kind == "lin":
        return np.linspace(start, stop, count)
    if kind == "log":
        if start <= 0 or stop <= 0:
            raise ValidationError(f"range {spec!r}: log grids need positive ends")
        return np.geomspace(start, stop, count)
    raise ValidationError(f"range {spec!r}: kind must be 'lin' or 'log'")


def _cell(x):
    """Serialize one value: floats at 17 significant digits; inf by name."""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return _FMT.format(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def emit(rows, columns, fmt, path, meta=None):
    """Write rows to ``path`` (or stdout when None) as CSV or JSON."""
    if fmt not in ("csv", "json"):
        raise ValidationError(f"format must be csv or json, got {fmt!r}")
    if fmt == "csv":
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(_cell(x) for x in row))
        text = "\n".join(lines) + "\n"
    else:
        doc = {
            "meta": {"tool": "thermoq", "version": __version__,
                     "config": meta or {}},
            "columns": list(columns),
            "rows": [[_cell(x) if isinstance(x, float)
                      and (math.isinf(x) or math.isnan(x)) else x
                      for x in row] for row in rows],
        }
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _worker_count():
    raw = os.environ.get("THERMOQ_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"THERMOQ_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise ValidationError(f"THERMOQ_THREADS must be a positive integer, got {raw!r}")
    return n


def _map_ordered(fn, items):
    """Apply fn over items, possibly threaded, preserving input order."""
    workers = _worker_count()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _density(args):
    try:
        return spectral.OhmicDensity(g=args.g, alpha=args.alpha, cutoff=args.omega)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


# --- commands ---------------------------------------------------------------


def cmd_bath_table(args):
    density = _density(args)
    ts = parse_range(args.T_range)

    def row(T):
        resp = spectral.bath_response(args.w, T, density)
        return [args.w, T, resp.gamma_plus, resp.gamma_minus, resp.dgamma_dT,
                resp.delta, resp.delta_T, resp.ddeltaT_dT]

    rows = _map_ordered(row, [float(t) for t in ts])
    cols = ["w", "T", "gamma_plus", "gamma_minus", "dgamma_dT",
            "delta", "delta_T", "ddeltaT_dT"]
    return rows, cols


def cmd_bound_qubit(args):
    density = _density(args)
    ts = parse_range(args.T_range)

    def row(T):
        explicit = bounds.qubit_explicit_bound(args.w, T, density)
        gp, gm, dg = spectral.jump_rates(args.w, T, density)
        operator = dg * dg / gm if gm > 0 else math.inf
        return [args.w, T, explicit, operator]

    rows = _map_ordered(row, [float(t) for t in ts])
    return rows, ["w", "T", "bound_explicit", "bound_operator"]


def cmd_bound_lamb(args):
    density = _density(args)
    ts = parse_range(args.T_range)

    def row(T):
        resp = spectral.bath_response(args.w, T, density)
        total = bounds.qubit_bound_opt_gauge(
            resp.gamma_plus, resp.gamma_minus, resp.dgamma_dT, resp.s_dot)
        rates_only = bounds.qubit_bound_opt_gauge(
            resp.gamma_plus, resp.gamma_minus, resp.dgamma_dT, 0.0)
        lamb_only = bounds.qubit_bound_opt_gauge(
            resp.gamma_plus, resp.gamma_minus, 0.0, resp.s_dot)
        return [T, total.rate, rates_only.rate, lamb_only.rate]

    rows = _map_ordered(row, [float(t) for t in ts])
    return rows, ["T", "bound_total", "bound_rates_only", "bound_lamb_only"]


def cmd_strategy_table(args):
    rows = []
    for kind in ("ramsey", "ancilla", "fast"):
        res = strategies.optimize_strategy(kind)
        rows.append([kind, res.r_coefficient, res.a_opt, res.t_opt])
    return rows, ["strategy", "r", "a_opt", "t_opt"]


def cmd_collective_scan(args):
    dts = parse_range(args.gdt_range)
    try:
        n_list = [int(s) for s in str(args.N).split(",")]
    except ValueError:
        raise ValidationError(f"--N must be a comma-separated integer list, got {args.N!r}")
    if any(n < 1 for n in n_list):
        raise ValidationError("qubit counts must be >= 1")
    em, ab, dg = collective.sample_rates(args.w, args.T, g=args.g, alpha=args.alpha)

    def row(task):
        n, dt = task
        rate = collective.ladder_fi_rate(n, dt / args.g, em, ab, dg, n // 2)
        return [n, dt, rate]

    tasks = [(n, float(dt)) for n in n_list for dt in dts]
    rows = _map_ordered(row, tasks)
    return rows, ["N", "g_dt", "fi_rate"]


def cmd_autonomous_scan(args):
    density = _density(args)
    bs = parse_range(args.b_range)

    def row(b):
        rate = collective.autonomous_fi_rate(args.N, args.w, b, args.T, density)
        return [args.N, b, collective.interacting_ground_index(args.N, args.w, b), rate]

    rows = _map_ordered(row, [float(b) for b in bs])
    return rows, ["N", "b", "ground_index", "fi_rate"]


def cmd_ohmicity_bound(args):
    density = _density(args)
    ws = parse_range(args.w_range)

    def row(w):
        rep = bounds.ohmicity_bound(w, args.T, density)
        return [w, args.T, rep.rate, rep.attaining_omega,
                rep.emission_value, rep.absorption_value]

    rows = _map_ordered(row, [float(w) for w in ws])
    return rows, ["w", "T", "rate", "attaining_omega",
                  "emission_value", "absorption_value"]


def cmd_check_diffusive(args):
    from .lindblad import qubit_probe_model

    density = _density(args)
    model = qubit_probe_model(args.w, args.T, density)
    simple, general, residuals = bounds.check_diffusive(model)
    rows = [[args.w, args.T, int(simple), int(general),
             residuals["simple"], residuals["general"]]]
    return rows, ["w", "T", "simple", "general",
                  "residual_simple", "residual_general"]


_COMMANDS = {
    "bath-table": cmd_bath_table,
    "bound-qubit": cmd_bound_qubit,
    "bound-lamb": cmd_bound_lamb,
    "strategy-table": cmd_strategy_table,
    "collective-scan": cmd_collective_scan,
    "autonomous-scan": cmd_autonomous_scan,
    "ohmicity-bound": cmd_ohmicity_bound,
    "check-diffusive": cmd_check_diffusive,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise ValidationError(message)


def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_bath_params(p, cutoff_default=5.0):
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=cutoff_default,
                   help="spectral cutoff frequency")


def build_parser():
    parser = _Parser(prog="thermoq",
                     description="finite-time thermometry bounds and strategies")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bath-table", parents=[], help="rates and shift integrals")
    _add_common(p); _add_bath_params(p)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--T-range", dest="T_range", default="0.1:2:lin:20")

    p = sub.add_parser("bound-qubit", help="two-level probe rate bound vs T")
    _add_common(p); _add_bath_params(p)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--T-range", dest="T_range", default="0.1:2:lin:20")

    p = sub.add_parser("bound-lamb", help="gauge-optimized bound decomposition vs T")
    _add_common(p); _add_bath_params(p)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--T-range", dest="T_range", default="0.01:2:log:100")

    p = sub.add_parser("strategy-table", help="optimized low-T strategy table")
    _add_common(p)

    p = sub.add_parser("collective-scan", help="ladder Fisher rate vs g*dt")
    _add_common(p)
    p.add_argument("--N", default="1,5,10,20")
    p.add_argument("--gdt-range", dest="gdt_range", default="1e-4:1:log:60")
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)

    p = sub.add_parser("autonomous-scan", help="autonomous-scheme rate vs b")
    _add_common(p); _add_bath_params(p)
    p.add_argument("--N", type=int, default=50)
    p.add_argument("--b-range", dest="b_range", default="0.005:0.1:lin:96")
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--T", type=float, default=1.0)

    p = sub.add_parser("ohmicity-bound", help="spectral-exponent bound vs w")
    _add_common(p); _add_bath_params(p)
    p.add_argument("--w-range", dest="w_range", default="0.2:3:lin:30")
    p.add_argument("--T", type=float, default=1.0)

    p = sub.add_parser("check-diffusive", help="span conditions of the qubit model")
    _add_common(p); _add_bath_params(p)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--T", type=float, default=1.0)

    return parser


def _apply_config_file(args):
    """Fill argparse defaults from a JSON config; explicit flags win."""
    if not getattr(args, "config", None):
        return args
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"config file {args.config}: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    params = data.get("params", data)
    for key, value in params.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValidationError(f"config key {key!r} is not a parameter of "
                                  f"command {args.command!r}")
        if attr not in args._explicit:
            setattr(args, attr, value)
    return args


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        # record which destinations were given explicitly, for config override
        explicit = set()
        for token in argv:
            if token.startswith("--"):
                explicit.add(token[2:].split("=")[0].replace("-", "_"))
        args._explicit = explicit
        args = _apply_config_file(args)
        _worker_count()  # validate THERMOQ_THREADS up front
        rows, cols = _COMMANDS[args.command](args)
        meta = {k: v for k, v in vars(args).items()
                if not k.startswith("_") and k not in ("config", "out", "format")}
        emit(rows, cols, args.format, args.out, meta=meta)
        return 0
    except (ValidationError, ValueError, KeyError) as exc:
        sys.stderr.write(json.dumps(
            {"error": {"type": "validation", "message": str(exc)}}) + "\n")
        return 1
    except ConvergenceError as exc:
        sys.stderr.write(json.dumps(
            {"error": {"type": "non-convergence", "message": str(exc)}}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
