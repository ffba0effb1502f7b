"""Command-line surface: simulate, eigen, check-condition, b0, find-initial,
compare.

Every command reads a graph document and/or a reaction spec, runs the
corresponding library operation and emits a one-object JSON summary (stdout
and a file under --out).  Summaries render floats at 17 significant digits
and sort keys, so identical invocations with the same --seed are
byte-identical.  Input files are never modified.

Exit codes: 0 for scientific results (including blow-up and a negative
search), 2 for configuration/schema errors, 3 for an eigensolver that missed
its tolerance (best candidate still written), 4 for step underflow.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .boundary import BoundaryCondition, close_boundary
from .eigen import RayleighConfig, first_eigenpair
from .errors import (
    ConfigError,
    ConvergenceFailure,
    InvalidParams,
    NotFound,
    PlapnetError,
    SchemaError,
    ValidationError,
)
from .functionals import functional_b
from .integrate import IntegratorConfig, compare, simulate
from .network import load_network_file
from .nonlinearity import (
    ConditionParams,
    check_offset_condition,
    check_plain_condition,
    check_weighted_condition,
    default_grid,
    find_initial,
    parse_nonlinearity,
)

__all__ = ["main"]


def _fmt_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{k}": {_fmt_json(obj[k], indent + 1)}' for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_fmt_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    raise TypeError(f"cannot serialize {type(obj)}")


def _emit(summary: dict, out_dir: Path, name: str) -> None:
    text = _fmt_json(summary) + "\n"
    sys.stdout.write(text)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text)


def _write_vertex_csv(path: Path, names, values) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "value"])
        for name, v in zip(names, values):
            writer.writerow([name, format(float(v), ".17g")])


def _read_vertex_csv(path: Path, net) -> np.ndarray:
    u = np.zeros(net.n)
    seen = set()
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or (row[0].strip().lower() == "name"):
                continue
            name, value = row[0].strip(), float(row[1])
            u[net.index(name)] = value
            seen.add(name)
    missing = [net.names[i] for i in net.interior if net.names[i] not in seen]
    if missing:
        raise ConfigError(f"u0 file {path} is missing interior vertices: {missing}")
    return u


def _initial_state(arg: str, net, bc, p: float) -> np.ndarray:
    if arg.startswith("const:"):
        try:
            c = float(arg.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad constant initial data {arg!r}") from None
        u = np.zeros(net.n)
        u[net.interior] = c
    else:
        u = _read_vertex_csv(Path(arg), net)
    return close_boundary(net, bc, u, p)


def _maybe_params(args, lam0: float | None = None) -> ConditionParams | None:
    if args.alpha is None:
        return None
    lam0 = args.lambda0 if lam0 is None else lam0
    return ConditionParams(
        alpha=args.alpha, beta=args.beta, gamma=args.gamma, p=args.p, lambda0=lam0
    )


def _integrator_cfg(args) -> IntegratorConfig:
    return IntegratorConfig(
        dt_init=args.dt0,
        dt_min=args.dtmin,
        t_max=args.tmax,
        blow_threshold=args.blow_threshold,
        stride=args.stride,
        method=args.method,
    )


def _cmd_eigen(args) -> int:
    net = load_network_file(args.graph)
    bc = BoundaryCondition.from_network(net)
    cfg = RayleighConfig(restarts=args.restarts, tolerance=args.tol, seed=args.seed)
    out = Path(args.out)
    code = 0
    try:
        pair = first_eigenpair(net, bc, args.p, cfg)
    except ConvergenceFailure as exc:
        pair = exc.best
        code = 3
    summary = {
        "lambda": pair.lam,
        "residual": pair.residual,
        "rayleigh": pair.rayleigh,
        "restarts_used": pair.restarts_used,
        "converged": code == 0,
        "seed": args.seed,
    }
    _emit(summary, out, "eigen_summary.json")
    _write_vertex_csv(out / "phi.csv", net.names, pair.phi)
    return code


def _cmd_simulate(args) -> int:
    net = load_network_file(args.graph)
    bc = BoundaryCondition.from_network(net)
    spec = parse_nonlinearity(args.f)
    u0 = _initial_state(args.u0, net, bc, args.p)
    params = _maybe_params(args)
    report = simulate(net, bc, spec, u0, args.p, _integrator_cfg(args), params)
    out = Path(args.out)
    summary = report.summary()
    summary["seed"] = args.seed
    _emit(summary, out, "simulate_summary.json")
    report.write_csv(out / "timeseries.csv")
    return 4 if report.verdict == "dt-underflow" else 0


def _cmd_check_condition(args) -> int:
    spec = parse_nonlinearity(args.f)
    lam0 = args.lambda0
    if args.graph is not None:
        net = load_network_file(args.graph)
        bc = BoundaryCondition.from_network(net)
        lam0 = first_eigenpair(net, bc, args.p, RayleighConfig(seed=args.seed)).lam
    params = ConditionParams(
        alpha=args.alpha, beta=args.beta, gamma=args.gamma, p=args.p, lambda0=lam0
    )
    grid = default_grid(args.grid_lo, args.grid_hi, args.grid_n)
    weighted = check_weighted_condition(spec, params, grid)
    summary = {
        "plain": check_plain_condition(spec, params, grid).as_dict(),
        "offset": check_offset_condition(spec, params, grid).as_dict(),
        "weighted": weighted.as_dict(),
        "holds": weighted.holds,
        "worst_margin": weighted.worst_margin,
        "lambda0": lam0,
        "seed": args.seed,
    }
    _emit(summary, Path(args.out), "check_condition_summary.json")
    return 0


def _cmd_b0(args) -> int:
    net = load_network_file(args.graph)
    bc = BoundaryCondition.from_network(net)
    spec = parse_nonlinearity(args.f)
    u0 = _initial_state(args.u0, net, bc, args.p)
    b0 = functional_b(net, bc, spec, args.gamma, u0, args.p)
    summary = {"b0": b0, "b0_positive": bool(b0 > 0), "gamma": args.gamma, "seed": args.seed}
    _emit(summary, Path(args.out), "b0_summary.json")
    return 0


def _cmd_find_initial(args) -> int:
    net = load_network_file(args.graph)
    bc = BoundaryCondition.from_network(net)
    spec = parse_nonlinearity(args.f)
    out = Path(args.out)
    try:
        data = find_initial(net, bc, spec, args.gamma1, args.p)
    except NotFound as exc:
        summary = {
            "found": False,
            "best_margin": exc.best_margin,
            "message": str(exc),
            "seed": args.seed,
        }
        _emit(summary, out, "find_initial_summary.json")
        return 0
    summary = {
        "found": True,
        "v_star": data.v_star,
        "interval": list(data.interval),
        "b0": data.b0,
        "seed": args.seed,
    }
    _emit(summary, out, "find_initial_summary.json")
    _write_vertex_csv(out / "u0.csv", net.names, data.u0)
    return 0


def _cmd_compare(args) -> int:
    net = load_network_file(args.graph)
    bc = BoundaryCondition.from_network(net)
    spec = parse_nonlinearity(args.f)
    u_high = _initial_state(args.u0_high, net, bc, args.p)
    u_low = _initial_state(args.u0_low, net, bc, args.p)
    report = compare(net, bc, spec, u_high, u_low, args.p, _integrator_cfg(args))
    summary = {
        "min_gap": report.min_gap,
        "ordering_ok": report.ordering_ok,
        "strict_min": report.strict_min,
        "first_sample_t": report.first_sample_t,
        "samples": len(report.sample_times),
        "seed": args.seed,
    }
    _emit(summary, Path(args.out), "compare_summary.json")
    return 0


def _add_common(sub, *, graph_required=True):
    sub.add_argument("--graph", required=graph_required, help="graph document (JSON)")
    sub.add_argument("--p", type=float, required=True, help="operator exponent, > 1")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default=".", help="output directory for summaries")


def _add_integrator(sub):
    sub.add_argument("--dt0", type=float, default=None, help="initial step (default: data scale)")
    sub.add_argument("--dtmin", type=float, default=1e-30)
    sub.add_argument("--tmax", type=float, default=1.0)
    sub.add_argument("--blow-threshold", dest="blow_threshold", type=float, default=1e8)
    sub.add_argument("--stride", type=int, default=1, help="record every k-th step")
    sub.add_argument("--method", choices=["euler", "rk4"], default="euler")


def _add_condition(sub, required=False):
    sub.add_argument("--alpha", type=float, required=required, default=None)
    sub.add_argument("--beta", type=float, default=0.0)
    sub.add_argument("--gamma", type=float, default=None if required else 0.0)
    sub.add_argument("--lambda0", type=float, default=0.0, help="first eigenvalue, if known")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plapnet",
        description="Reaction-diffusion driven by the graph p-Laplacian: "
        "simulation, first eigenvalue, blow-up criteria.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("eigen", help="first eigenvalue and eigenfunction")
    _add_common(sub)
    sub.add_argument("--restarts", type=int, default=8)
    sub.add_argument("--tol", type=float, default=1e-9)
    sub.set_defaults(run=_cmd_eigen)

    sub = subs.add_parser("simulate", help="integrate the evolution equation")
    _add_common(sub)
    sub.add_argument("--f", required=True, help="reaction spec, e.g. power:lambda=1,q=3")
    sub.add_argument("--u0", required=True, help="vertex CSV path or const:VALUE")
    _add_integrator(sub)
    _add_condition(sub)
    sub.set_defaults(run=_cmd_simulate)

    sub = subs.add_parser("check-condition", help="growth-condition checks on a grid")
    _add_common(sub, graph_required=False)
    sub.add_argument("--f", required=True)
    _add_condition(sub, required=True)
    sub.add_argument("--grid-lo", type=float, default=1e-6)
    sub.add_argument("--grid-hi", type=float, default=1e6)
    sub.add_argument("--grid-n", type=int, default=2000)
    sub.set_defaults(run=_cmd_check_condition)

    sub = subs.add_parser("b0", help="initial energy functional of given data")
    _add_common(sub)
    sub.add_argument("--f", required=True)
    sub.add_argument("--u0", required=True)
    sub.add_argument("--gamma", type=float, required=True)
    sub.set_defaults(run=_cmd_b0)

    sub = subs.add_parser("find-initial", help="initial data with positive functional")
    _add_common(sub)
    sub.add_argument("--f", required=True)
    sub.add_argument("--gamma1", type=float, required=True)
    sub.set_defaults(run=_cmd_find_initial)

    sub = subs.add_parser("compare", help="ordering of two trajectories")
    _add_common(sub)
    sub.add_argument("--f", required=True)
    sub.add_argument("--u0-high", dest="u0_high", required=True)
    sub.add_argument("--u0-low", dest="u0_low", required=True)
    _add_integrator(sub)
    sub.set_defaults(run=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "gamma", None) is None and args.command == "check-condition":
        parser.error("check-condition requires --gamma")
    try:
        return args.run(args)
    except (SchemaError, ValidationError, ConfigError, InvalidParams) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PlapnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
