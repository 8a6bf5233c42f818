"""Experiment orchestration: JSON configs in, reproducible CSV/JSON artifacts
out.

Subcommands: ``solve`` (equilibrium computation), ``converge`` (finite-game
mean-field convergence experiment), ``sample`` (draw one hypergraph),
``exploitability`` (evaluate a stored policy), ``plotdata`` (re-export solver
artifacts in plot-ready long format).  All numeric CSV output uses
shortest-round-trip decimal formatting so repeated runs with identical
config and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import game, kernels, meanfield, simulate
from .hypergraphs import sample as sample_hypergraph

PROBLEM_BUILDERS = {"rumor": game.rumor_problem, "sis": game.sis_problem}


class ConfigError(Exception):
    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path


def _schema() -> dict:
    with resources.files("hmfg").joinpath("config_schema.json").open() as fh:
        return json.load(fh)


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", path=str(path))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}", path=str(path))
    if isinstance(doc, dict) and "config" in doc and "version" not in doc:
        doc = doc["config"]  # a run_meta.json re-ingested as config
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}",
                          path="/" + "/".join(str(p) for p in exc.absolute_path))
    return doc


def build_problem(config) -> game.MfgProblem:
    cards = tuple(kernels.builtin(l["name"], l.get("params")).k for l in config["layers"])
    params = dict(config["problem"].get("params", {}))
    params.setdefault("layer_cards", cards)
    try:
        return PROBLEM_BUILDERS[config["problem"]["name"]](**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid problem parameters: {exc}", path="/problem/params")


def build_layers(config) -> kernels.MultiLayerHypergraphon:
    try:
        layers = tuple(kernels.builtin(l["name"], l.get("params")) for l in config["layers"])
    except ValueError as exc:
        raise ConfigError(str(exc), path="/layers")
    return kernels.MultiLayerHypergraphon(layers)


def build_grids(config):
    W = build_layers(config)
    M = config["grid_resolution"]
    return [kernels.discretize(layer, M, seed=config["seed"]) for layer in W.layers]


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def write_mean_field_csv(path, problem, mf):
    rows = []
    Tp1, M, n = mf.shape
    for i in range(M):
        for t in range(Tp1):
            for x in range(n):
                rows.append([i, t, str(problem.states[x]), _fmt(mf[t, i, x])])
    _write_csv(path, ["alpha_index", "t", "state", "probability"], rows)


def write_policy_csv(path, problem, policy):
    rows = []
    T, M, n, u = policy.shape
    for i in range(M):
        for t in range(T):
            for x in range(n):
                for a in range(u):
                    rows.append([i, t, str(problem.states[x]), str(problem.actions[a]),
                                 _fmt(policy[t, i, x, a])])
    _write_csv(path, ["alpha_index", "t", "state", "action", "probability"], rows)


def read_policy_csv(path, problem, M):
    state_idx = {str(s): i for i, s in enumerate(problem.states)}
    action_idx = {str(a): i for i, a in enumerate(problem.actions)}
    policy = np.zeros((problem.T, M, problem.n_states, problem.n_actions))
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            policy[int(row["t"]), int(row["alpha_index"]),
                   state_idx[row["state"]], action_idx[row["action"]]] = float(row["probability"])
    return policy


def write_diagnostics_csv(path, diagnostics):
    rows = [[d["iteration"], _fmt(d["exploitability"]), _fmt(d["mf_distance_to_previous"])]
            for d in diagnostics]
    _write_csv(path, ["iteration", "exploitability", "mf_distance_to_previous"], rows)


def write_run_meta(path, config, extra):
    meta = {"config": config, "seed": config["seed"]}
    meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _solve(config, out: Path):
    problem = build_problem(config)
    grids = build_grids(config)
    solver = config["solver"]
    info = {"grid_resolution": config["grid_resolution"], "solver": solver["method"]}
    if solver["method"] == "fixed_point":
        policy, mf, diagnostics = meanfield.fixed_point_iteration(
            problem, grids,
            n_iters=solver.get("max_iterations", 200),
            damping=solver.get("damping", 0.0),
            tol=solver.get("tolerance", None),
        )
        info["iterations_run"] = len(diagnostics)
        info["final_exploitability"] = diagnostics[-1]["exploitability"]
    else:
        policy, mf, trace = meanfield.omd_iteration(
            problem, grids,
            n_iters=solver.get("max_iterations", 100),
            learning_rate=solver.get("learning_rate", 1.0),
            init_temperature=solver.get("init_temperature", 1.0),
        )
        diagnostics = [{"iteration": i, "exploitability": e,
                        "mf_distance_to_previous": float("nan")}
                       for i, e in enumerate(trace)]
        info["iterations_run"] = len(trace)
        info["final_exploitability"] = trace[-1]
    return problem, grids, policy, mf, diagnostics, info


def cmd_solve(config, out: Path, args):
    problem, grids, policy, mf, diagnostics, info = _solve(config, out)
    write_mean_field_csv(out / "mean_field.csv", problem, mf)
    write_policy_csv(out / "policy.csv", problem, policy)
    write_diagnostics_csv(out / "diagnostics.csv", diagnostics)
    write_run_meta(out / "run_meta.json", config, {"solver_info": info,
                                                   "tie_break": "lowest action index",
                                                   "grid_representative": "midpoint"})
    return 0


def cmd_converge(config, out: Path, args):
    sim = config.get("simulation", {})
    if "N_list" not in sim or "realizations" not in sim:
        raise ConfigError("converge requires simulation.N_list and simulation.realizations",
                          path="/simulation")
    problem, grids, policy, mf, diagnostics, info = _solve(config, out)
    W = build_layers(config)
    rows, summary = simulate.delta_mu_experiment(
        problem, W, policy, mf, sim["N_list"], sim["realizations"],
        seed=sim.get("seed", config["seed"]))
    _write_csv(out / "convergence.csv", ["N", "realization", "delta_mu"],
               [[N, r, _fmt(v)] for N, r, v in rows])
    _write_csv(out / "convergence_summary.csv",
               ["N", "mean", "stderr", "ci95_low", "ci95_high"],
               [[N] + [_fmt(v) for v in rest] for N, *rest in summary])
    write_run_meta(out / "run_meta.json", config, {"solver_info": info})
    return 0


def cmd_sample(config, out: Path, args):
    sim = config.get("simulation", {})
    if "N" not in sim:
        raise ConfigError("sample requires simulation.N", path="/simulation")
    W = build_layers(config)
    H = sample_hypergraph(W, sim["N"], seed=sim.get("seed", config["seed"]),
                          alpha_mode=sim.get("alpha_mode", "uniform"))
    H.save(out / "hypergraph.json")
    write_run_meta(out / "run_meta.json", config, {"artifact": "hypergraph.json"})
    return 0


def cmd_exploitability(config, out: Path, args):
    problem = build_problem(config)
    grids = build_grids(config)
    policy_path = out / "policy.csv"
    if not policy_path.exists():
        raise ConfigError(f"no stored policy at {policy_path}", path=str(policy_path))
    policy = read_policy_csv(policy_path, problem, config["grid_resolution"])
    value = meanfield.exploitability(problem, grids, policy)
    with open(out / "exploitability.json", "w") as fh:
        json.dump({"exploitability": value}, fh, indent=2)
        fh.write("\n")
    print(_fmt(value))
    return 0


def cmd_plotdata(config, out: Path, args):
    # kernel grids, for Fig-2 style visualizations
    M = config["grid_resolution"]
    for d, grid in enumerate(build_grids(config)):
        rows = []
        for idx in np.ndindex(grid.values.shape):
            rows.append(list(idx) + [_fmt(grid.values[idx])])
        _write_csv(out / f"kernel_layer{d}.csv",
                   [f"i{j}" for j in range(grid.k)] + ["value"], rows)
    # long-format re-exports of solver artifacts, alpha as midpoint coordinate
    for name, value_col in (("mean_field", "probability"), ("policy", "probability")):
        src = out / f"{name}.csv"
        if not src.exists():
            continue
        with open(src, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = []
            for row in reader:
                alpha = (int(row["alpha_index"]) + 0.5) / M
                series = row["state"] + (":" + row["action"] if "action" in row else "")
                rows.append([row["t"], _fmt(alpha), series, row[value_col]])
        _write_csv(out / f"plot_{name}.csv", ["t", "alpha", "series", "value"], rows)
    src = out / "diagnostics.csv"
    if src.exists():
        with open(src, newline="") as fh:
            rows = [[row["iteration"], row["exploitability"]] for row in csv.DictReader(fh)]
        _write_csv(out / "plot_exploitability.csv", ["iteration", "value"], rows)
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "converge": cmd_converge,
    "sample": cmd_sample,
    "exploitability": cmd_exploitability,
    "plotdata": cmd_plotdata,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hmfg",
                                     description="Mean field games on multi-layer hypergraphons")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=".")
        p.add_argument("--threads", type=int, default=0,
                       help="worker parallelism bound (output is independent of it)")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](config, out, args)
    except ConfigError as exc:
        json.dump({"error": str(exc), "path": exc.path}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
