"""Command-line entry point: ``vlsidec <subcommand> ...``.

Every tabular result is CSV with a leading ``# invocation:`` comment that
replays the run (the effective seed is always spelled out), then a header
row.  Exit status is 0 on success, 1 on a domain error (one line on stderr)
and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import math
import os
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from vlsidec import bec_sim, bisection, bounds, plotting, tanner_layout, textio
from vlsidec import grid_circuit as gc

SEED_ENV = "VLSIDEC_SEED"
SWEEP_VARS = {"n": int, "eps": float, "eta": float, "r": int, "j": int}
BOUND_NAMES = (
    "limit", "pigeonhole", "convex", "atau2", "edec", "pe_block",
    "theorem1", "theorem2", "theorem3", "capacity_gap",
)


class UsageError(Exception):
    pass


# -- small helpers -------------------------------------------------------------------


def parse_grid(text: str, cast=float) -> list:
    """``a:b:xF`` (geometric), ``a:b:+S`` (arithmetic) or ``v1,v2,...``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or not parts[2] or parts[2][0] not in "x+":
            raise UsageError(f"bad grid {text!r}: expected start:stop:xFACTOR or start:stop:+STEP")
        start, stop, step = float(parts[0]), float(parts[1]), float(parts[2][1:])
        values = []
        i = 0
        while True:
            v = start * step**i if parts[2][0] == "x" else start + i * step
            if v > stop * (1 + 1e-12):
                break
            values.append(round(v, 12))
            i += 1
            if (parts[2][0] == "x" and step <= 1) or (parts[2][0] == "+" and step <= 0) or i > 10**6:
                raise UsageError(f"bad grid {text!r}: step does not advance")
    else:
        values = [float(t) for t in text.split(",") if t.strip()]
    if cast is int:
        if any(v != int(v) for v in values):
            raise UsageError(f"grid {text!r} must be integral")
        values = [int(v) for v in values]
    if not values:
        raise UsageError(f"grid {text!r} is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError(f"grid {text!r} is not strictly increasing")
    return values


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    try:
        import numpy as np

        if isinstance(v, np.integer):
            return str(int(v))
        if isinstance(v, np.floating):
            return repr(float(v))
    except ImportError:  # pragma: no cover
        pass
    return str(v)


def render_csv(invocation: list[str], seed: int, header: list[str], rows: list[dict], trailer: list[str] = ()) -> str:
    buf = io.StringIO()
    buf.write(f"# invocation: {shlex.join(invocation)}\n")
    buf.write(f"# seed: {seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(row.get(h)) for h in header])
    for line in trailer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def emit(args, text: str) -> None:
    if args.out:
        textio.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def tech_of(args) -> gc.TechParams:
    return gc.TechParams(xi=args.xi, lam=args.lam)


def load_code(args, n: int | None = None) -> tanner_layout.TannerGraph:
    if getattr(args, "graph", None):
        graph = tanner_layout.loads(Path(args.graph).read_text())
    else:
        n = args.n if n is None else n
        if n is None:
            raise UsageError("need --graph or --n")
        code_seed = args.seed if args.code_seed is None else args.code_seed
        graph = bec_sim.sample_regular_code(n, args.dv, args.dc, code_seed)
    copies = getattr(args, "copies", 1) or 1
    return bec_sim.replicate_code(graph, copies) if copies > 1 else graph


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + m.replace("_", "-") for m in missing))


# -- bound evaluation ----------------------------------------------------------------


def _decoder(args) -> bounds.DecoderParams:
    _need(args, "n")
    if args.k is None and args.rate is None:
        raise UsageError("need --k or --rate")
    if args.n != int(args.n):
        raise ValueError(f"n must be an integer, got {args.n}")
    n = int(args.n)
    k = args.k if args.k is not None else max(1, round(n * args.rate))
    return bounds.DecoderParams(n=n, k=k, j=args.j, p=args.p, area_bar=args.area, beta=args.beta)


def _channel(args) -> bounds.ChannelParams:
    if args.eps is None and args.bsc is None:
        raise UsageError("need --eps or --bsc")
    return bounds.ChannelParams(epsilon=args.eps, bsc_crossover=args.bsc)


def evaluate_bound(name: str, args) -> bounds.BoundReport:
    tech = tech_of(args)
    if name == "limit":
        _need(args, "c", "c_prime", "n")
        log_v = bounds.log_limit_term(args.c, args.c_prime, args.n)
        v = math.exp(log_v)
        return bounds.BoundReport("limit", v, v, "probability",
                                  inputs={"c": args.c, "c_prime": args.c_prime, "n": args.n}, extra={"log_value": log_v})
    if name == "pigeonhole":
        _need(args, "x_size", "y_size")
        v = bounds.pigeonhole_bound(args.x_size, args.y_size)
        return bounds.BoundReport("pigeonhole", v, v, "probability", inputs={"x_size": args.x_size, "y_size": args.y_size})
    if name == "convex":
        _need(args, "eps", "n", "m")
        v = bounds.convex_partition_bound(args.eps, args.n, args.m)
        extra = {}
        if args.parts:
            parts = [float(t) for t in args.parts.split(",")]
            if sum(parts) > args.n:
                raise ValueError("parts sum exceeds n")
            extra["product"] = bounds.partition_product(args.eps, parts)
        return bounds.BoundReport("convex", v, v, "probability",
                                  inputs={"epsilon": args.eps, "n": args.n, "m": args.m}, extra=extra)
    if name == "atau2":
        _need(args, "B_r", "r")
        v = bounds.atau2_lower(args.B_r, args.r, args.lam)
        return bounds.BoundReport("atau2", v, v, "area*cycles^2", inputs={"B_r": args.B_r, "r": args.r, "lambda": args.lam})
    if name == "edec":
        _need(args, "B_r", "r", "beta")
        v = bounds.edec_lower(args.B_r, args.r, args.beta, tech)
        return bounds.BoundReport("edec", v, v, "energy", inputs={"B_r": args.B_r, "r": args.r, "beta": args.beta,
                                                                   "xi": args.xi, "lambda": args.lam})
    if name == "pe_block":
        _need(args, "n", "r")
        return bounds.pe_block_lower(_channel(args).epsilon, args.n, args.r)
    if name == "theorem1":
        return bounds.theorem1_bound(_decoder(args), _channel(args), tech, base=args.log_base, K=args.K)
    if name == "theorem2":
        return bounds.theorem2_bound(_decoder(args), _channel(args), tech)
    if name == "theorem3":
        return bounds.theorem3_case(_decoder(args), _channel(args), tech, area_regime=args.area_regime)
    if name == "capacity_gap":
        _need(args, "eta")
        ch = _channel(args)
        params = None
        if args.rate is not None:
            scale = 10**6
            params = bounds.DecoderParams(n=scale, k=max(1, round(args.rate * scale)), j=args.j)
        g = bounds.capacity_gap(args.eta, args.c_channel, args.mode, ch, params, tech)
        return bounds.BoundReport(
            "capacity_gap", g.per_bit, g.per_bit, "energy/bit", branch=args.mode,
            inputs={"eta": args.eta, "c_channel": args.c_channel, "epsilon": ch.epsilon},
            extra={"n_eta": g.n, "scale_sqrt_log": g.scalings[0], "scale_log": g.scalings[1],
                   "scale_fifth_root_log": g.scalings[2]},
        )
    raise UsageError(f"unknown bound {name!r}")


def _scalar_extras(rep: bounds.BoundReport) -> dict:
    return {k: v for k, v in rep.extra.items() if isinstance(v, (int, float))}


def bound_row(rep: bounds.BoundReport) -> tuple[list[str], dict]:
    extra = _scalar_extras(rep)
    header = ["bound", *rep.inputs, "value", "raw", "clamped", "branch", "vacuous", *extra, "violations"]
    row = {"bound": rep.name, **rep.inputs, "value": rep.value, "raw": rep.raw, "clamped": rep.clamped,
           "branch": rep.branch, "vacuous": rep.vacuous, **extra, "violations": "; ".join(rep.violations)}
    return header, row


# -- subcommands ---------------------------------------------------------------------


def cmd_validate(args) -> int:
    text = Path(args.circuit).read_text()
    circuit, _ = gc.loads(text)
    report = gc.validate(circuit)
    if report.valid:
        print("valid")
        return 0
    for v in report.violations:
        print(f"{v.kind} ({v.x},{v.y}) {v.message}")
    raise ValueError(f"invalid circuit: {len(report)} violation(s), first: {report.violations[0].kind}")


def cmd_layout(args) -> int:
    graph = load_code(args)
    tech = tech_of(args)
    circuit = tanner_layout.layout(graph)
    valid = None
    if not args.no_validate:
        report = gc.validate(circuit)
        valid = report.valid
        if not valid:
            raise ValueError(f"layout failed validation: {report.violations[0]}")
    ar = tanner_layout.area_report(circuit, graph, tech)
    bound = tanner_layout.area_bound(graph, tech)
    if args.circuit:
        textio.write_atomic(args.circuit, gc.dumps(circuit, tech.lam))
    header = ["n", "checks", "edges", "width", "height", "wire_area", "node_area", "total", "wire_bound", "total_bound", "valid"]
    row = {"n": graph.n_var, "checks": graph.n_chk, "edges": graph.n_edges, "width": circuit.width,
           "height": circuit.height, "wire_area": ar.wire_area, "node_area": ar.node_area, "total": ar.total,
           "wire_bound": bound.wire_area, "total_bound": bound.total, "valid": valid}
    emit(args, render_csv(args.invocation, args.seed, header, [row]))
    return 0


def _bisect_graph(args) -> bisection.CircuitGraph:
    if args.graph:
        text = Path(args.graph).read_text()
        if textio.parse(text).get("format") == "grid_circuit":
            return bisection.CircuitGraph.from_circuit(gc.loads(text)[0])
        return bisection.loads_graph(text)
    return bisection.CircuitGraph.from_tanner(load_code(args))


def cmd_bisect(args) -> int:
    g = _bisect_graph(args)
    tree = bisection.nested_bisect(g, args.r, args.tau, mode=args.mode, seed=args.seed, restarts=args.restarts)
    if args.tree:
        textio.write_atomic(args.tree, bisection.dumps_tree(tree, args.mode))
    header = ["leaf", "f", "n_i", "k_i", "b", "vertices"]
    rows = [{"leaf": i, "f": leaf.f, "n_i": leaf.n_inputs, "k_i": leaf.k_outputs, "b": tree.b(i),
             "vertices": len(leaf.vertices)} for i, leaf in enumerate(tree.leaves)]
    s = bisection.bits_summary(tree)
    cuts = sum(m for _, _, m, _ in tree.cut_edges)
    trailer = [f"B_r = {s.B_r!r}", f"cut_edges = {cuts}", f"min_b = {s.min_b!r}"]
    emit(args, render_csv(args.invocation, args.seed, header, rows, trailer))
    return 0


def cmd_bound(args) -> int:
    header, row = bound_row(evaluate_bound(args.name, args))
    emit(args, render_csv(args.invocation, args.seed, header, [row]))
    return 0


SIM_HEADER = ["n", "dv", "dc", "eps", "trials", "pe_hat", "ci_lo", "ci_hi", "mean_iters", "tau", "area", "energy"]


def _area_and_energy(args, graph, tau: float):
    tech = tech_of(args)
    if args.area_model == "measured":
        circuit = tanner_layout.layout(graph)
        return gc.area(circuit, tech), gc.energy(circuit, tau, tech), circuit
    if args.area_model == "analytic":
        a = tanner_layout.area_bound(graph, tech).total
        return a, tech.xi * a * tau, None
    return None, None, None


def cmd_simulate(args) -> int:
    _need(args, "eps")
    graph = load_code(args)
    est = bec_sim.estimate_pe(graph, args.eps, args.trials, args.seed, args.max_iter)
    tau = 2.0 * est.mean_iters
    header = list(SIM_HEADER)
    row = {"n": graph.n_var, "dv": graph.d_v, "dc": graph.d_c, "eps": args.eps, "trials": args.trials,
           "pe_hat": est.pe_hat, "ci_lo": est.ci_lo, "ci_hi": est.ci_hi, "mean_iters": est.mean_iters}
    if args.serial:
        k = max(graph.k, 1)
        p = args.pins_in or 1
        j = args.pins_out or 1
        area_bar = args.area_bar
        if area_bar is None:
            area_bar = tanner_layout.layout(graph).occupied_count
        sched = bec_sim.ScheduleModel("serial", p, j, int(area_bar))
        tau = float(max(sched.min_cycles(graph.n_var, k), math.ceil(tau)))
        trace = bec_sim.serial_trace(sched, bec_sim.ErasurePattern.sample(graph.n_var, args.eps, args.seed, 0), k, int(tau))
        header += ["p", "j", "area_bar", "epochs", "starved_epochs", "insufficient_epochs"]
        row.update(p=p, j=j, area_bar=int(area_bar), epochs=len(trace.epochs), starved_epochs=trace.starvation_events,
                   insufficient_epochs=sum(e.insufficient for e in trace.epochs))
    area, energy, _ = _area_and_energy(args, graph, tau)
    row.update(tau=tau, area=area, energy=energy)
    emit(args, render_csv(args.invocation, args.seed, header, [row]))
    return 0


def sweep_point(args, x) -> tuple[list[str], dict]:
    """One sweep row; top level so worker processes can run it."""
    ns = copy.copy(args)
    setattr(ns, args.var, x)
    tech = tech_of(ns)
    if args.bound:
        header, row = bound_row(evaluate_bound(args.bound, ns))
        header = [args.var, "value"] + [h for h in header if h not in (args.var, "value", "bound")]
        row[args.var] = x
        return header, row
    if args.measure == "pe":
        graph = load_code(ns)
        est = bec_sim.estimate_pe(graph, ns.eps, ns.trials, ns.seed)
        return ([args.var, "value", "ci_lo", "ci_hi", "mean_iters", "trials"],
                {args.var: x, "value": est.pe_hat, "ci_lo": est.ci_lo, "ci_hi": est.ci_hi,
                 "mean_iters": est.mean_iters, "trials": ns.trials})
    if args.var != "n":
        raise UsageError(f"--measure {args.measure} sweeps only over n")
    graph = load_code(ns)
    circuit = tanner_layout.layout(graph)
    if args.measure == "area":
        ar = tanner_layout.area_report(circuit, graph, tech)
        bound = tanner_layout.area_bound(graph, tech)
        valid = gc.validate(circuit).valid if args.validate else None
        return (["n", "value", "wire_area", "node_area", "edges", "wire_bound", "valid"],
                {"n": x, "value": ar.total, "wire_area": ar.wire_area, "node_area": ar.node_area,
                 "edges": graph.n_edges, "wire_bound": bound.wire_area, "valid": valid})
    # energy with the doubly-logarithmic iteration schedule
    iters = tanner_layout.loglog_iterations(x)
    e = gc.energy(circuit, 2 * iters, tech)
    return (["n", "value", "area", "iterations", "tau", "energy_bound"],
            {"n": x, "value": e, "area": gc.area(circuit, tech), "iterations": iters, "tau": 2 * iters,
             "energy_bound": tanner_layout.energy_upper(graph, iters, tech)})


def cmd_sweep(args) -> int:
    if bool(args.bound) == bool(args.measure):
        raise UsageError("give exactly one of --bound or --measure")
    grid = parse_grid(args.grid, SWEEP_VARS[args.var])
    if args.jobs > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(sweep_point, [args] * len(grid), grid))
    else:
        results = [sweep_point(args, x) for x in grid]
    header = results[0][0]
    rows = [r for _, r in results]
    xs = [r[args.var] for r in rows]
    ys = [r["value"] for r in rows]
    try:
        slope, intercept = plotting.loglog_slope(xs, ys)
        trailer = [f"slope = {slope!r}", f"intercept = {intercept!r}"]
    except ValueError as exc:
        trailer = [f"slope = nan ({exc})"]
    text = render_csv(args.invocation, args.seed, header, rows, trailer)
    emit(args, text)
    if args.plot:
        plotting.emit_plot_data(text, f"{args.plot}.dat", f"{args.plot}.{args.chart_format}", x=args.var, y="value")
    return 0


def cmd_compare(args) -> int:
    graph = load_code(args)
    tech = tech_of(args)
    circuit = tanner_layout.layout(graph)
    header = ["n", "k", "eps", "r", "B_r", "pe_hat", "half_width", "pe_lower", "pe_lower_raw",
              "E_measured", "E_lower", "disjunct", "claim"]
    rows = []
    for eps in parse_grid(args.eps, float):
        row = bec_sim.empirical_vs_bound(graph, circuit, eps, args.r, args.trials, tech, args.seed, args.mode)
        d = dict(row.__dict__)
        d["eps"] = d.pop("epsilon")
        d["claim"] = "no_claim" if row.claim_holds is None else ("holds" if row.claim_holds else "fails")
        rows.append(d)
    emit(args, render_csv(args.invocation, args.seed, header, rows))
    return 0


# -- parser --------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
    p.add_argument("--config", help="key = value defaults file; flags override it")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")


def _tech(p):
    p.add_argument("--xi", type=float, default=1.0, help="energy per unit area per cycle")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="grid pitch")


def _code(p, with_n=True):
    p.add_argument("--graph", help="Tanner graph file instead of a sampled code")
    if with_n:
        p.add_argument("--n", type=int, help="block length")
    p.add_argument("--dv", type=int, default=3, help="variable degree")
    p.add_argument("--dc", type=int, default=4, help="check degree")
    p.add_argument("--code-seed", type=int, default=None, help="seed for the code ensemble (default --seed)")
    p.add_argument("--copies", type=int, default=1, help="use a disjoint union of this many code copies")


def _bound_params(p):
    p.add_argument("--k", type=int)
    p.add_argument("--rate", type=float)
    p.add_argument("--eps", type=float, help="erasure probability")
    p.add_argument("--bsc", type=float, help="BSC crossover p; sets eps = 2p")
    p.add_argument("--j", type=int, default=1, help="output pins")
    p.add_argument("--p", type=int, default=1, help="input pins")
    p.add_argument("--area", type=float, help="normalised area A/lambda^2")
    p.add_argument("--area-regime", choices=("sublinear", "linear"), default="sublinear")
    p.add_argument("--beta", type=float, help="lower bound on node count")
    p.add_argument("--B-r", dest="B_r", type=float, help="bits across the nested bisection")
    p.add_argument("--r", type=int, help="bisection stages")
    p.add_argument("--c", type=float)
    p.add_argument("--c-prime", type=float)
    p.add_argument("--x-size", type=float)
    p.add_argument("--y-size", type=float)
    p.add_argument("--m", type=float, help="number of parts")
    p.add_argument("--parts", help="comma-separated part sizes")
    p.add_argument("--eta", type=float, help="fraction of capacity")
    p.add_argument("--c-channel", type=float, default=1.0)
    p.add_argument("--mode", choices=("parallel", "serial", "general"), default="parallel")
    p.add_argument("--log-base", type=float, default=2.0)
    p.add_argument("--K", type=float, default=bounds.DEFAULT_K, help="stage-count constant, 0 < K < 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vlsidec", description="VLSI energy model for LDPC decoders")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a grid circuit file")
    _common(p)
    p.add_argument("circuit")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("layout", help="lay out a Tanner graph and report its area")
    _common(p)
    _code(p)
    _tech(p)
    p.add_argument("--circuit", help="write the circuit file here")
    p.add_argument("--no-validate", action="store_true")
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("bisect", help="r-stage nested minimum bisection")
    _common(p)
    _code(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--tau", type=float, default=1.0, help="clock cycles charged per cut edge")
    p.add_argument("--mode", choices=("exact", "heuristic"), default="heuristic")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--tree", help="write the bisection tree here")
    p.set_defaults(func=cmd_bisect)

    p = sub.add_parser("bound", help="evaluate one lower bound")
    _common(p)
    p.add_argument("name", choices=BOUND_NAMES)
    p.add_argument("--n", type=float)
    _bound_params(p)
    _tech(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="Monte-Carlo peeling decoding on the erasure channel")
    _common(p)
    _code(p)
    _tech(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--serial", action="store_true")
    p.add_argument("--pins-in", type=int)
    p.add_argument("--pins-out", type=int)
    p.add_argument("--area-bar", type=float)
    p.add_argument("--area-model", choices=("measured", "analytic", "none"), default="measured")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="sweep one parameter over a grid")
    _common(p)
    p.add_argument("--var", choices=tuple(SWEEP_VARS), required=True)
    p.add_argument("--grid", required=True, help="start:stop:xF, start:stop:+S or v1,v2,...")
    p.add_argument("--bound", choices=BOUND_NAMES)
    p.add_argument("--measure", choices=("area", "energy", "pe"))
    p.add_argument("--n", type=int, help="block length (when not swept)")
    _code(p, with_n=False)
    _bound_params(p)
    _tech(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--validate", action="store_true", help="validate each layout in area sweeps")
    p.add_argument("--plot", help="write PREFIX.dat and a chart beside the CSV")
    p.add_argument("--chart-format", default="png")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="measured error and energy against the bisection bounds")
    _common(p)
    _code(p)
    _tech(p)
    p.add_argument("--eps", required=True, help="erasure probabilities, comma list or grid")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--mode", choices=("exact", "heuristic"), default="heuristic")
    p.set_defaults(func=cmd_compare)
    parser.commands = sub.choices
    return parser


def _apply_config(parser: argparse.ArgumentParser, command: str, path: str) -> None:
    doc = textio.read(path)
    subparser = parser.commands[command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, value in doc.header.items():
        dest = key.replace("-", "_")
        if dest == "lambda":
            dest = "lam"
        if dest not in actions or dest in ("config", "func", "help"):
            raise UsageError(f"config key {key!r} is not an option of {command}")
        action = actions[dest]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[dest] = value.lower() in ("1", "true", "yes", "on")
        else:
            defaults[dest] = action.type(value) if action.type else value
    subparser.set_defaults(**defaults)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
            if args.config:
                _apply_config(parser, args.command, args.config)
                args = parser.parse_args(argv)
            if args.seed is None:
                args.seed = _default_seed()
        except UsageError as exc:
            parser.print_usage(sys.stderr)
            print(f"vlsidec: error: {exc}", file=sys.stderr)
            return 2
        args.invocation = ["vlsidec", *argv] + ([] if any(a == "--seed" or a.startswith("--seed=") for a in argv) else ["--seed", str(args.seed)])
        try:
            return args.func(args)
        except UsageError as exc:
            parser.print_usage(sys.stderr)
            print(f"vlsidec: error: {exc}", file=sys.stderr)
            return 2
        except (ValueError, OSError, KeyError) as exc:
            msg = " ".join(str(exc).split())
            print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
            return 1
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
