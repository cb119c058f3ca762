"""Command-line front end.

Exit codes
----------
0  success
2  unreadable or malformed input (also argparse usage errors)
3  empty DFS
4  dimension mismatch between files
5  strategy labels outside the DFS
6  unidentifiable signals / singular QFIM
7  phase wrap in the simulator
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import math
import sys

import numpy as np

from . import errors
from .dfs import enumerate_vertices
from .improve import certify_vertex_sequential, improve_pipeline, is_extremal_trace
from .io import FormatError, load_network, load_strategy, load_weights, strategy_to_dict, write_json
from .model import PureStrategy, SequentialStrategy, sequential_strategy
from .optimize import optimal_rates_orthogonal, optimize_rates
from .qfim import dephase, k_matrix_mixed, k_matrix_pure, k_matrix_sequential, qfim_from_k
from .simulate import NoiseModel, estimate_parameters

log = logging.getLogger("dfsense")

EXIT_PARSE = 2
EXIT_EMPTY_DFS = 3
EXIT_DIMENSION = 4
EXIT_NOT_IN_DFS = 5
EXIT_UNIDENTIFIABLE = 6
EXIT_PHASE_WRAP = 7

VERTEX_WARN_N = 14


def _mat(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def cmd_dfs(args) -> dict:
    net = load_network(args.network)
    if net.n_sensors > VERTEX_WARN_N:
        log.warning("vertex enumeration over %d sensors may be slow", net.n_sensors)
    poly = enumerate_vertices(net, args.rank_tol)
    return {
        "dimension": poly.dimension,
        "kernel_basis": _mat(poly.kernel_basis),
        "vertices": _mat(poly.vertices),
        "n_vertices": len(poly.vertices),
    }


def cmd_qfim(args) -> dict:
    net = load_network(args.network)
    strat = load_strategy(args.strategy, args.tol)
    if strat.n_sensors != net.n_sensors:
        raise errors.DimensionMismatch("strategy and network disagree on the number of sensors")
    if isinstance(strat, SequentialStrategy):
        K = k_matrix_sequential(strat)
        route = "sequential"
    elif args.dephase:
        K = k_matrix_mixed(dephase(strat, net, args.tol))
        route = "mixed"
    else:
        K = k_matrix_pure(strat)
        route = "pure"
    F = qfim_from_k(net, K)
    out = {"route": route, "k_matrix": _mat(K), "qfim": _mat(F), "trace_k": float(np.trace(K))}
    try:
        poly = enumerate_vertices(net)
    except errors.EmptyDfs:
        poly = None
    out["in_dfs"] = bool(np.all(np.abs(np.asarray(strat.labels) @ net.noise.T) <= args.tol))
    out["trace_extremal"] = is_extremal_trace(K, net.n_sensors, args.tol, poly)
    out["vertex_certificate"] = (
        certify_vertex_sequential(strat, poly, args.tol)
        if poly is not None and isinstance(strat, SequentialStrategy) else False
    )
    return out


def cmd_improve(args) -> dict:
    net = load_network(args.network)
    strat = load_strategy(args.strategy, args.tol)
    if not isinstance(strat, PureStrategy):
        raise FormatError("improve expects a pure strategy")
    if strat.n_sensors != net.n_sensors:
        raise errors.DimensionMismatch("strategy and network disagree on the number of sensors")
    trace = improve_pipeline(strat, net, args.tol)
    stages = [{"stage": label, "strategy": strategy_to_dict(s), "k_matrix": _mat(K),
               "trace_k": float(np.trace(K))} for label, s, K in trace.stages]
    for stage, order, gain in zip(stages[1:], trace.orders, trace.min_gain_eigenvalues):
        stage["order_vs_previous"] = order.value
        stage["min_gain_eigenvalue"] = gain
    final = trace.final
    if args.emit:
        write_json(args.emit, strategy_to_dict(final))
    return {"stages": stages, "monotone": trace.monotone, "final": strategy_to_dict(final)}


def cmd_optimize(args) -> dict:
    net = load_network(args.network)
    W = load_weights(args.weights) if args.weights else np.eye(net.n_signals)
    if W.shape != (net.n_signals, net.n_signals):
        raise errors.DimensionMismatch("weight matrix does not match the number of signals")
    poly = enumerate_vertices(net)
    try:
        sol = optimal_rates_orthogonal(poly, net, W, args.tol)
    except (errors.NonOrthogonalVertices, errors.SingularRestrictedSignal) as exc:
        log.info("closed form not applicable (%s); using the convex solver", exc)
        sol = optimize_rates(poly, net, W)
    reps = poly.representatives
    strat = sequential_strategy(
        [(reps[i // 2], r) for i, r in zip(sol.vertex_indices, sol.rates) if r > 0], normalize=True)
    if args.emit:
        write_json(args.emit, strategy_to_dict(strat))
    return {
        "method": sol.method,
        "vertices": _mat(reps),
        "rates": _mat(sol.rates),
        "objective": sol.objective,
        "trace_objective": sol.trace_objective,
        "iterations": sol.iterations,
        "converged": sol.converged,
        "strategy": strategy_to_dict(strat),
    }


def cmd_simulate(args) -> dict:
    net = load_network(args.network)
    strat = load_strategy(args.strategy, args.tol)
    if not isinstance(strat, SequentialStrategy):
        raise FormatError("simulate expects a sequential strategy")
    if strat.n_sensors != net.n_sensors:
        raise errors.DimensionMismatch("strategy and network disagree on the number of sensors")
    if args.alpha is None:
        raise FormatError("simulate needs --alpha")
    sigma = args.sigma if args.sigma is not None else [0.0] * net.n_noise
    if len(sigma) == 1 and net.n_noise > 1:
        sigma = sigma * net.n_noise
    if len(sigma) != net.n_noise:
        raise errors.DimensionMismatch(f"{len(sigma)} noise sigmas for {net.n_noise} noise fields")
    noise = NoiseModel(tuple(sigma), args.noise_mode)
    rep = estimate_parameters(net, strat, args.alpha, noise, args.shots, args.seed,
                              args.repetitions, args.tol)
    rows = []
    for i in range(net.n_signals):
        var = float(rep.covariance[i, i])
        bound = float(rep.crb[i, i])
        rows.append({"parameter": i, "true": float(args.alpha[i]), "estimate": float(rep.estimates[i]),
                     "variance": var, "crb": bound, "ratio": var / bound if bound else math.nan})
    return {
        "estimates": _mat(rep.estimates),
        "covariance": _mat(rep.covariance),
        "crb": _mat(rep.crb),
        "shots_per_repetition": [int(x) for x in rep.shots],
        "repetitions": rep.repetitions,
        "shots_used": rep.shots_used,
        "table": rows,
    }


# CSV columns per command
CSV_COLUMNS = {
    "dfs": ("vertex", "entries"),
    "qfim": ("row", "qfim"),
    "improve": ("stage", "trace_k", "order_vs_previous", "min_gain_eigenvalue"),
    "optimize": ("vertex", "rate"),
    "simulate": ("parameter", "true", "estimate", "variance", "crb", "ratio"),
}


def _csv_rows(command: str, result: dict):
    if command == "dfs":
        return [(i, " ".join(repr(x) for x in v)) for i, v in enumerate(result["vertices"])]
    if command == "qfim":
        return [(i, " ".join(repr(x) for x in row)) for i, row in enumerate(result["qfim"])]
    if command == "improve":
        return [(s["stage"], s["trace_k"], s.get("order_vs_previous", ""),
                 s.get("min_gain_eigenvalue", "")) for s in result["stages"]]
    if command == "optimize":
        return [(" ".join(repr(x) for x in v), r) for v, r in zip(result["vertices"], result["rates"])]
    return [tuple(r[c] for c in CSV_COLUMNS["simulate"]) for r in result["table"]]


def _render(command: str, result: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result, indent=2)
    if fmt == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf)
        w.writerow(CSV_COLUMNS[command])
        w.writerows(_csv_rows(command, result))
        return buf.getvalue().rstrip("\n")
    lines = []
    for key, val in result.items():
        if isinstance(val, list) and val and isinstance(val[0], (list, dict)):
            lines.append(f"{key}:")
            lines.extend(f"  {json.dumps(v)}" for v in val)
        else:
            lines.append(f"{key}: {json.dumps(val)}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dfsense", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, strategy=False, weights=False):
        sp.add_argument("--network", required=True, metavar="PATH")
        if strategy:
            sp.add_argument("--strategy", required=True, metavar="PATH")
        if weights:
            sp.add_argument("--weights", metavar="PATH")
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--output", choices=("json", "csv", "text"), default="json")
        sp.add_argument("-v", "--verbose", action="store_true")

    sp = sub.add_parser("dfs", help="kernel basis and vertices of the DFS")
    common(sp)
    sp.add_argument("--rank-tol", type=float, default=1e-10)

    sp = sub.add_parser("qfim", help="K matrix, QFIM and extremality certificates")
    common(sp, strategy=True)
    sp.add_argument("--dephase", action="store_true",
                    help="apply infinitely strong noise to a pure strategy first")

    sp = sub.add_parser("improve", help="symmetrize, sequentialize and lift to vertices")
    common(sp, strategy=True)
    sp.add_argument("--emit", metavar="PATH", help="write the final strategy here")

    sp = sub.add_parser("optimize", help="optimal vertex rates for tr(W F^-1)")
    common(sp, weights=True)
    sp.add_argument("--emit", metavar="PATH", help="write the optimal strategy here")

    sp = sub.add_parser("simulate", help="shot-level estimation and CRB comparison")
    common(sp, strategy=True)
    sp.add_argument("--alpha", type=float, nargs="+")
    sp.add_argument("--shots", type=int, default=10_000, help="shots per direction per repetition")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--repetitions", type=int, default=100)
    sp.add_argument("--sigma", type=float, nargs="+")
    sp.add_argument("--noise-mode", choices=("off", "gaussian", "infinite"), default="gaussian")
    return p


COMMANDS = {
    "dfs": cmd_dfs,
    "qfim": cmd_qfim,
    "improve": cmd_improve,
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        result = COMMANDS[args.command](args)
    except (FormatError, errors.InvalidStrategy, errors.InvalidMatrix, errors.NonFinite,
            errors.NonPositiveTime) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except errors.EmptyDfs as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY_DFS
    except errors.DimensionMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except errors.NotInDfs as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_IN_DFS
    except errors.SingularQfim as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNIDENTIFIABLE
    except errors.PhaseWrap as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHASE_WRAP
    print(_render(args.command, result, args.output))
    return 0


if __name__ == "__main__":
    sys.exit(main())
