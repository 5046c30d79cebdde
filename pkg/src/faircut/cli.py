"""Command-line entry point ``faircut``.

Every command writes its outputs under ``--out`` and embeds a run manifest in
each file: JSON outputs carry a ``"manifest"`` key, CSV outputs start with a
``# manifest {...}`` comment line. Manifests hold no timestamps or timings, so
the same arguments produce byte-identical files, and ``faircut rerun FILE``
replays the arguments stored in any output.

Randomness: every random choice derives from ``--seed``. Multi-run commands
hand child ``i`` of ``numpy.random.SeedSequence(seed)`` to run ``i`` (rows,
instances, training seeds), so results do not depend on ``--jobs``.

Exit codes: 0 success, 2 input error, 3 solver error, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    approximation_ratio,
    empirical_fair_value,
    fit_target_distribution,
    hoeffding_eps,
    kn_separation_sweep,
    shot_budget,
    triangle_target,
    variance_study,
)
from .cuts import CutDistribution, load_distribution, save_distribution
from .errors import BudgetError, FaircutError, ParameterError
from .exact import solve_exact
from .graphs import GraphFamily, build_named, generate_er_filtered, load_graph, max_clique
from .qsim import build_dqaoa_spec, build_spec, edge_probabilities, marginal_probabilities, run_circuit
from .qsim import sample_bitstrings
from .rounding import round_hyperplane
from .sdp import clique_bounds, solve_sdp
from .trainer import Objective, TrainConfig, grid_optimize_k1_std, seed_streams, train, train_multi

log = logging.getLogger("faircut")

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_BUDGET = 0, 2, 3, 4
TABLE1_GRAPHS = ("petersen", "clebsch", "paley:13", "paley:17", "shrikhande")


class InputError(Exception):
    """Unreadable or malformed user input (exit code 2)."""


# ---------------------------------------------------------------------------
# Output plumbing


def make_manifest(args, argv, outputs, graph=None, solver=None):
    return {
        "tool": "faircut",
        "version": __version__,
        "command": args.command if not getattr(args, "study", None) else f"studies {args.study}",
        "argv": list(argv),
        "graph": graph,
        "solver": solver or {},
        "seed": args.seed,
        "outputs": [str(p) for p in outputs],
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        x = float(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def write_json(path, payload, manifest):
    data = dict(_jsonable(payload))
    data["manifest"] = manifest
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def write_csv(path, rows, columns, manifest):
    buf = io.StringIO()
    buf.write("# manifest " + json.dumps(manifest, sort_keys=True) + "\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: _fmt(row.get(k)) for k in columns})
    path.write_text(buf.getvalue())


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x)) if math.isfinite(x) else ""
    return str(x)


def read_manifest(path):
    """Manifest stored in a JSON output, a CSV output, or a bare manifest file."""
    text = Path(path).read_text()
    if text.startswith("# manifest "):
        return json.loads(text.splitlines()[0][len("# manifest "):])
    data = json.loads(text)
    return data.get("manifest", data)


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _map(fn, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _pair(text):
    parts = [float(t) for t in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}")
    return tuple(parts)


# ---------------------------------------------------------------------------
# Shared argument groups


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--jobs", type=int, default=1, help="parallel rows or instances (default 1)")
    p.add_argument("--out", default=".", help="output directory (default .)")


def _add_training(p, default_seeds=10):
    g = p.add_argument_group("training")
    d = TrainConfig()
    g.add_argument("--step-size", type=float, default=d.step_size)
    g.add_argument("--beta1", type=float, default=d.beta1)
    g.add_argument("--beta2", type=float, default=d.beta2)
    g.add_argument("--eps-adam", type=float, default=d.eps_adam)
    g.add_argument("--max-iters", type=int, default=d.max_iters)
    g.add_argument("--patience", type=int, default=d.patience)
    g.add_argument("--improvement-floor", type=float, default=d.improvement_floor)
    g.add_argument("--init-range", type=_pair, default=d.init_range, metavar="LO,HI")
    g.add_argument("--seeds", type=int, default=default_seeds, help="independent training runs")
    g.add_argument("--objective", choices=("lse", "min"), default="lse")
    g.add_argument("--tau", type=float, default=0.05, help="LSE temperature")
    g.add_argument("--anneal", action="store_true", help="halve tau every 200 iterations down to 1e-3")


def _train_config(args):
    cfg = TrainConfig(
        step_size=args.step_size,
        beta1=args.beta1,
        beta2=args.beta2,
        eps_adam=args.eps_adam,
        max_iters=args.max_iters,
        patience=args.patience,
        improvement_floor=args.improvement_floor,
        init_range=tuple(args.init_range),
        n_seeds=args.seeds,
    )
    obj = Objective(args.objective, args.tau, anneal=args.anneal)
    return cfg, obj


def _config_dict(cfg, obj):
    return {
        "step_size": cfg.step_size,
        "beta1": cfg.beta1,
        "beta2": cfg.beta2,
        "eps_adam": cfg.eps_adam,
        "max_iters": cfg.max_iters,
        "patience": cfg.patience,
        "improvement_floor": cfg.improvement_floor,
        "init_range": list(cfg.init_range),
        "n_seeds": cfg.n_seeds,
        "objective": obj.kind,
        "tau": obj.tau,
        "anneal": obj.anneal,
    }


def _load_input_graph(args):
    if args.family and args.graph_file:
        raise InputError("give either a graph file or --family, not both")
    if args.family:
        return build_named(GraphFamily.parse(args.family)), args.family
    if not args.graph_file:
        raise InputError("a graph file or --family is required")
    try:
        return load_graph(args.graph_file), str(args.graph_file)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read graph {args.graph_file}: {exc}") from exc


def _rational(x, max_den=1000):
    f = Fraction(x).limit_denominator(max_den)
    return f"{f.numerator}/{f.denominator}" if abs(float(f) - x) <= 1e-9 else None


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args, argv):
    g, source = _load_input_graph(args)
    out = _outdir(args)
    report_path, summary_path = out / "solve.json", out / "solve.txt"
    outputs = [report_path, summary_path]
    dist_path = out / "distribution.json" if args.write_distribution else None
    if dist_path is not None:
        outputs.append(dist_path)
    payload = {"graph": {"source": source, "n": g.n, "n_edges": g.n_edges}, "method": args.method}
    distribution = None

    if args.method == "exact":
        rep = solve_exact(g, args.lp_method)
        payload.update(rep.to_dict())
        payload["rational"] = _rational(rep.value)
        solver = {"lp_method": args.lp_method}
        lines = [f"eta_bar = {rep.value:.10f}" + (f" ({payload['rational']})" if payload["rational"] else "")]
        distribution = rep.witness
    elif args.method == "sdp":
        rep = solve_sdp(g, rank=args.rank, seed=args.seed, restarts=args.restarts)
        payload.update(rep.to_dict())
        payload["restart_values"] = rep.restart_values
        upper, lower = clique_bounds(g, rep.hr_value)
        payload["clique_bounds"] = {"upper": upper, "lower": lower}
        solver = {"rank": args.rank, "restarts": args.restarts}
        lines = [f"SDP objective t = {rep.t_star:.10f}", f"SDP_HR = {rep.hr_value:.10f}"]
        if args.rounding_samples:
            run = round_hyperplane(rep.embedding, args.rounding_samples, args.seed, g)
            payload["rounding"] = {"T": args.rounding_samples, "empirical_min": float(run.empirical_probs.min()),
                                   "edge_probs": run.empirical_probs}
            lines.append(f"rounded empirical min over {args.rounding_samples} samples = "
                         f"{run.empirical_probs.min():.6f}")
            distribution = run.empirical
    else:
        cfg, obj = _train_config(args)
        spec = build_dqaoa_spec(g, args.k, args.mode) if args.dqaoa else build_spec(g, args.k, args.mode)
        solver = {"k": args.k, "mode": spec.mode, "dqaoa": bool(args.dqaoa), "grid": args.grid}
        if args.grid:
            best = grid_optimize_k1_std(g, resolution=args.grid, spec=spec)
            results = [best]
        else:
            solver.update(_config_dict(cfg, obj))
            best, results = train_multi(spec, g, obj, cfg, seed=args.seed, jobs=args.jobs)
        probs = edge_probabilities(spec, best.best_params)
        payload.update({
            "value": best.best_value,
            "edge_probs": probs,
            "circuit": spec.to_dict(),
            "best": best.to_dict(),
            "runs": [{"seed": r.seed, "best_value": r.best_value, "converged_reason": r.converged_reason,
                      "iterations": len(r.trajectory) - 1} for r in results],
        })
        lines = [f"Q_{args.k} ({spec.mode}{', D-QAOA' if args.dqaoa else ''}) = {best.best_value:.10f}"]
        psi = run_circuit(spec, best.best_params)
        if args.shots:
            samples = sample_bitstrings(psi, args.shots, args.seed, n_keep=g.n)
            emp = empirical_fair_value(samples, g)
            payload["shots"] = {"T": args.shots, "empirical_min": emp,
                                "hoeffding_eps_99": hoeffding_eps(args.shots, 0.01, g.n_edges)}
            lines.append(f"shot-sampled min over {args.shots} shots = {emp:.6f}")
        marg = marginal_probabilities(psi, g.n)
        keep = np.flatnonzero(marg > 1e-15)
        distribution = CutDistribution.from_arrays(g.n, keep, marg[keep])

    manifest = make_manifest(args, argv, outputs, source, solver)
    write_json(report_path, payload, manifest)
    header = f"faircut solve: {source} (n={g.n}, |E|={g.n_edges}), method {args.method}"
    text = "\n".join([header] + ["  " + s for s in lines]) + "\n"
    summary_path.write_text(text)
    if dist_path is not None:
        if distribution is None:
            raise InputError("--write-distribution needs a method that produces a distribution")
        save_distribution(distribution, dist_path)
    sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# table1


def _table1_row(family, k_max, cfg, obj, resolution, seed):
    row = {"graph": family}
    try:
        g = build_named(GraphFamily.parse(family))
        row.update(n=g.n, n_edges=g.n_edges)
        prev_spec = build_spec(g, 1)
        row["eta_bar"] = solve_exact(g).value
        row["eta_bar_src"] = "exact"
        s_sdp, s_train = seed_streams(seed, 2)
        row["sdp_hr"] = solve_sdp(g, seed=s_sdp).hr_value
        row["sdp_hr_src"] = "numerical-sdp"
        grid = grid_optimize_k1_std(g, resolution=resolution)
        row["q1"], row["q1_src"] = grid.best_value, f"grid-{resolution}"
        prev = grid
        for k, s in zip(range(2, k_max + 1), seed_streams(s_train, k_max)):
            spec = build_spec(g, k)
            best, _ = train_multi(spec, g, obj, cfg, seed=s)
            warm = train(spec, g, obj, cfg, s, init_params=prev_spec.pad(prev.best_params, k))
            if warm.best_value > best.best_value:
                best = warm
            row[f"q{k}"], row[f"q{k}_src"] = best.best_value, "trained-lower-bound"
            prev_spec, prev = spec, best
        row["status"] = "ok"
    except BudgetError as exc:
        row["status"] = f"skipped: {exc}"
        log.warning("table1 row %s skipped: %s", family, exc)
    return row


def cmd_table1(args, argv):
    cfg, obj = _train_config(args)
    graphs = [t for t in args.graphs.split(",") if t]
    for fam in graphs:
        GraphFamily.parse(fam)
    out = _outdir(args)
    path = out / "table1.csv"
    seeds = seed_streams(args.seed, len(graphs))
    rows = _map(lambda a: _table1_row(a[0], args.k_max, cfg, obj, args.resolution, a[1]),
                list(zip(graphs, seeds)), args.jobs)
    cols = ["graph", "n", "n_edges", "eta_bar", "eta_bar_src", "sdp_hr", "sdp_hr_src"]
    for k in range(1, args.k_max + 1):
        cols += [f"q{k}", f"q{k}_src"]
    cols.append("status")
    solver = dict(_config_dict(cfg, obj), k_max=args.k_max, resolution=args.resolution)
    write_csv(path, rows, cols, make_manifest(args, argv, [path], ",".join(graphs), solver))
    for r in rows:
        vals = " ".join(f"{r[c]:.4f}" if isinstance(r.get(c), float) else "-"
                        for c in cols if c in ("eta_bar", "sdp_hr") or (c.startswith("q") and "_" not in c))
        sys.stdout.write(f"{r['graph']:<12} {vals}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# benchmark


BENCH_COLUMNS = ["instance", "n", "n_edges", "omega", "seed", "eta_bar", "q_exact", "ratio_exact", "q_shots",
                 "ratio_shots", "hoeffding_eps", "bound", "beat", "status"]


def _bench_instance(item, args, cfg, obj):
    idx, n, seed = item
    row = {"instance": idx, "n": n, "seed": seed}
    s_gen, s_train, s_shots = seed_streams(seed, 3)
    try:
        g = generate_er_filtered(n, args.p, args.clique, s_gen)
    except FaircutError as exc:
        log.warning("instance %d: generation failed: %s", idx, exc)
        row["status"] = f"generation-failed: {exc}"
        return row
    try:
        row.update(n_edges=g.n_edges, omega=max_clique(g))
        spec = build_dqaoa_spec(g, args.k, args.mode)
        eta = solve_exact(g).value
        best, _ = train_multi(spec, g, obj, cfg, seed=s_train)
        q = best.best_value
        row.update(eta_bar=eta, q_exact=q, ratio_exact=approximation_ratio(q, g, eta))
        if args.shots:
            psi = run_circuit(spec, best.best_params)
            qs = empirical_fair_value(sample_bitstrings(psi, args.shots, s_shots, n_keep=g.n), g)
            row.update(q_shots=qs, ratio_shots=qs / eta, hoeffding_eps=hoeffding_eps(args.shots, 0.01, g.n_edges))
        row["bound"] = float(np.arccos(1.0 / (1.0 - row["omega"])) / np.pi) / eta
        row["beat"] = bool(row["ratio_exact"] > row["bound"])
        row["status"] = "ok"
    except BudgetError as exc:
        row["status"] = f"skipped: {exc}"
    return row


def cmd_benchmark(args, argv):
    cfg, obj = _train_config(args)
    lo, hi = args.n_range if len(args.n_range) == 2 else (args.n_range[0], args.n_range[0])
    if lo < 3 or hi < lo:
        raise ParameterError(f"bad --n-range {lo},{hi}")
    sizes = list(range(lo, hi + 1))
    seeds = seed_streams(args.seed, args.instances) if args.instances else []
    items = [(i, sizes[i % len(sizes)], s) for i, s in enumerate(seeds)]
    rows = _map(lambda it: _bench_instance(it, args, cfg, obj), items, args.jobs)
    out = _outdir(args)
    path = out / "benchmark.csv"
    solver = dict(_config_dict(cfg, obj), k=args.k, mode=args.mode, shots=args.shots, p=args.p, clique=args.clique)
    write_csv(path, rows, BENCH_COLUMNS, make_manifest(args, argv, [path], f"erdos_renyi n={lo}..{hi}", solver))
    beats = sum(1 for r in rows if r.get("beat"))
    sys.stdout.write(f"{len(rows)} instances, {beats} beat the clique bound\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# studies


VARIANCE_COLUMNS = ["size", "n_edges", "var_lse", "se_lse", "bound_lse", "var_min", "se_min", "bound_min",
                    "consistent"]
KN_COLUMNS = ["n", "eta_bar", "sdp_hr", "q1", "separation", "gamma", "beta"]
FIT_COLUMNS = ["run", "seed", "tv", "passed"]
SHOT_COLUMNS = ["eps", "delta", "n_edges", "p_min", "T_hoeffding", "T_chernoff"]


def _study_variance(args):
    st = variance_study(args.sizes, args.layers, args.instances, args.points, args.seed, args.tau)
    ok = st.consistent()
    rows = [dict(r, consistent=c) for r, c in zip(st.rows(), ok)]
    summary = {"coordinate": st.coordinate, "layers": st.layers, "all_consistent": all(ok)}
    return rows, VARIANCE_COLUMNS, summary, {"sizes": args.sizes, "layers": args.layers,
                                              "instances": args.instances, "points": args.points, "tau": args.tau}


def _study_kn(args):
    rows = kn_separation_sweep(args.n_max, args.n_min, args.points)
    summary = {"rows": len(rows), "min_separation_n_ge_4": min((r["separation"] for r in rows if r["n"] >= 4),
                                                               default=None)}
    return rows, KN_COLUMNS, summary, {"n_max": args.n_max, "n_min": args.n_min, "points": args.points}


def _study_fit(args):
    g = build_named(GraphFamily.parse(args.graph))
    if args.target == "triangle":
        target = triangle_target()
    else:
        try:
            target = load_distribution(args.target)
        except (OSError, ValueError, KeyError) as exc:
            raise InputError(f"cannot read distribution {args.target}: {exc}") from exc
    seeds = seed_streams(args.seed, args.runs)
    tvs = _map(lambda s: fit_target_distribution(g, target, args.k, seed=s)[0], seeds, args.jobs)
    rows = [{"run": i, "seed": s, "tv": tv, "passed": tv <= args.threshold} for i, (s, tv) in enumerate(zip(seeds, tvs))]
    summary = {"passed": sum(r["passed"] for r in rows), "runs": args.runs, "threshold": args.threshold}
    return rows, FIT_COLUMNS, summary, {"graph": args.graph, "target": args.target, "k": args.k, "runs": args.runs}


def _study_shots(args):
    b = shot_budget(args.eps, args.delta, args.edges, args.p_min)
    row = {"eps": b.eps, "delta": b.delta, "n_edges": b.n_edges, "p_min": b.p_min,
           "T_hoeffding": b.T_hoeffding, "T_chernoff": b.T_chernoff}
    return [row], SHOT_COLUMNS, dict(row), {"eps": args.eps, "delta": args.delta, "edges": args.edges,
                                           "p_min": args.p_min}


STUDIES = {"variance": _study_variance, "kn-separation": _study_kn, "fit-universality": _study_fit,
           "shot-budget": _study_shots}


def cmd_studies(args, argv):
    rows, cols, summary, solver = STUDIES[args.study](args)
    out = _outdir(args)
    stem = args.study.replace("-", "_")
    csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
    manifest = make_manifest(args, argv, [csv_path, json_path], None, solver)
    write_csv(csv_path, rows, cols, manifest)
    write_json(json_path, {"summary": summary, "rows": rows}, manifest)
    if args.study == "shot-budget":
        sys.stdout.write(f"{rows[0]['T_hoeffding']}\n")
    else:
        sys.stdout.write(json.dumps(_jsonable(summary), sort_keys=True) + "\n")
    return EXIT_OK


def cmd_rerun(args, argv):
    try:
        manifest = read_manifest(args.file)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read manifest from {args.file}: {exc}") from exc
    stored = manifest.get("argv")
    if not isinstance(stored, list) or not stored or stored[0] == "rerun":
        raise InputError(f"{args.file} holds no replayable arguments")
    return main(stored)


# ---------------------------------------------------------------------------
# Parser


def build_parser():
    p = argparse.ArgumentParser(prog="faircut", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"faircut {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one graph exactly, by SDP, or by QAOA training",
                       description="Writes solve.json (report plus manifest) and solve.txt (summary).")
    s.add_argument("graph_file", nargs="?", help="JSON {n, edges} or 'u v [w]' edge list")
    s.add_argument("--family", help="named family, e.g. petersen, complete:4, paley:13, kneser:5,2")
    s.add_argument("--method", choices=("exact", "sdp", "qaoa"), required=True)
    s.add_argument("--lp-method", choices=("auto", "primal", "dual"), default="auto")
    s.add_argument("--restarts", type=int, default=8, help="SDP random restarts")
    s.add_argument("--rank", type=int, default=None, help="SDP embedding rank (default n)")
    s.add_argument("--rounding-samples", type=int, default=0, help="hyperplane samples to draw from the SDP")
    s.add_argument("--k", type=int, default=1, help="circuit layers")
    s.add_argument("--mode", choices=("standard", "multi"), default="standard")
    s.add_argument("--dqaoa", action="store_true", help="use the ancilla-augmented circuit")
    s.add_argument("--grid", type=int, default=0, metavar="R", help="depth-one grid resolution instead of Adam")
    s.add_argument("--shots", type=int, default=0, help="also report a shot-sampled value")
    s.add_argument("--write-distribution", action="store_true", help="save the cut distribution found")
    _add_training(s)
    _add_common(s)
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("table1", help="fair value, SDP_HR and Q_1..Q_k for named graphs",
                       description="Columns: graph, n, n_edges, eta_bar, sdp_hr, q1..qK, each with a *_src "
                                   "provenance column (exact, numerical-sdp, grid-R, trained-lower-bound), "
                                   "and status (ok or skipped: reason).")
    t.add_argument("--graphs", default=",".join(TABLE1_GRAPHS))
    t.add_argument("--k-max", type=int, default=3)
    t.add_argument("--resolution", type=int, default=400, help="depth-one grid resolution")
    _add_training(t)
    _add_common(t)
    t.set_defaults(func=cmd_table1)

    b = sub.add_parser("benchmark", help="trained D-QAOA against the clique bound on random graphs",
                       description="Columns: " + ", ".join(BENCH_COLUMNS) + ". bound is "
                                   "arccos(1/(1-omega))/pi divided by eta_bar; beat compares it to ratio_exact.")
    b.add_argument("--clique", type=int, choices=(4, 5), required=True)
    b.add_argument("--n-range", type=_int_list, default=[10, 10], metavar="LO,HI")
    b.add_argument("--instances", type=int, default=10)
    b.add_argument("--p", type=float, default=0.3, help="edge probability")
    b.add_argument("--k", type=int, default=1)
    b.add_argument("--mode", choices=("standard", "multi"), default="multi")
    b.add_argument("--shots", type=int, default=10_000, help="0 for exact expectations only")
    _add_training(b, default_seeds=3)
    _add_common(b)
    b.set_defaults(func=cmd_benchmark)

    st = sub.add_parser("studies", help="numerical studies (CSV plus JSON summary)")
    ss = st.add_subparsers(dest="study", required=True)
    v = ss.add_parser("variance", help="gradient variance against its analytic bound",
                      description="Columns: " + ", ".join(VARIANCE_COLUMNS) + ".")
    v.add_argument("--sizes", type=_int_list, default=[2, 3, 4, 5])
    v.add_argument("--layers", type=int, default=100)
    v.add_argument("--instances", type=int, default=20, help="random graphs per size")
    v.add_argument("--points", type=int, default=100, help="parameter points per graph")
    v.add_argument("--tau", type=float, default=0.05)
    kn = ss.add_parser("kn-separation", help="depth-one closed form against SDP_HR on K_n",
                       description="Columns: " + ", ".join(KN_COLUMNS) + ".")
    kn.add_argument("--n-max", type=int, required=True)
    kn.add_argument("--n-min", type=int, default=3)
    kn.add_argument("--points", type=int, default=100_000, help="gamma grid points")
    f = ss.add_parser("fit-universality", help="fit a circuit to a target cut distribution",
                      description="Columns: " + ", ".join(FIT_COLUMNS) + ".")
    f.add_argument("--graph", default="complete:3")
    f.add_argument("--target", default="triangle", help="'triangle' or a distribution JSON file")
    f.add_argument("--k", type=int, default=8)
    f.add_argument("--runs", type=int, default=10)
    f.add_argument("--threshold", type=float, default=0.05)
    sb = ss.add_parser("shot-budget", help="samples needed for a given accuracy",
                       description="Columns: " + ", ".join(SHOT_COLUMNS) + ".")
    sb.add_argument("--eps", type=float, required=True)
    sb.add_argument("--delta", type=float, required=True)
    sb.add_argument("--edges", type=int, required=True)
    sb.add_argument("--p-min", type=float, default=None, help="also give the relative-error budget")
    for q in (v, kn, f, sb):
        _add_common(q)
    st.set_defaults(func=cmd_studies)

    r = sub.add_parser("rerun", help="replay the arguments stored in an output's manifest")
    r.add_argument("file")
    r.set_defaults(func=cmd_rerun, seed=None)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args, argv)
    except InputError as exc:
        log.error("input error: %s", exc)
        return EXIT_INPUT
    except BudgetError as exc:
        log.error("budget exceeded: %s", exc)
        return EXIT_BUDGET
    except ParameterError as exc:
        log.error("input error: %s", exc)
        return EXIT_INPUT
    except FaircutError as exc:
        log.error("solver error: %s", exc)
        return EXIT_SOLVER
    except OSError as exc:
        log.error("input error: %s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
