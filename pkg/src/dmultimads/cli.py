"""Command-line front end: ``solve``, ``bench`` and ``reference``.

Exit codes: 0 success, 2 configuration error, 3 blackbox I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .core import BlackboxIOError, ConfigurationError, ProblemSpec
from .indicators import (ReferenceData, emit_convergence_profile, emit_data_profile,
                         first_solved_evaluation, normalized_hv, write_csv)
from .problems import REGISTRY, ExternalBlackbox, get_problem
from .problems.reference import front_of, load_reference
from .solver import VARIANTS, RunResult, SolverConfig, solve, write_history_csv

FORMAT_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3

_CONFIG_KEYS = {f.name for f in fields(SolverConfig)}


@dataclass
class RunManifest:
    problem: str | None = None
    external_cmd: str | None = None
    n: int | None = None
    m: int | None = None
    j: int = 0
    lower: list | None = None
    upper: list | None = None
    variant: str = "pb"
    config: dict = field(default_factory=dict)  # SolverConfig overrides
    starts: list | None = None
    out: str = "out"
    seeds: list = field(default_factory=lambda: [1])
    timeout: float = 60.0

    @property
    def replications(self) -> int:
        return len(self.seeds)

    def build_problem(self):
        if self.external_cmd:
            if self.n is None or self.m is None or self.lower is None or self.upper is None:
                raise ConfigurationError("an external blackbox needs --n, --m, --lower and --upper")
            spec = ProblemSpec(self.n, self.m, self.j, _broadcast(self.lower, self.n),
                               _broadcast(self.upper, self.n))
            return ExternalBlackbox(self.external_cmd, spec, self.timeout)
        if not self.problem:
            raise ConfigurationError("give --problem or --external-cmd")
        return get_problem(self.problem)

    def solver_config(self, seed: int) -> SolverConfig:
        unknown = set(self.config) - _CONFIG_KEYS
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values = dict(self.config, variant=self.variant, rng_seed=seed)
        return SolverConfig(**values)


def _broadcast(values, n: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 1:
        return np.full(n, arr[0])
    if arr.size != n:
        raise ConfigurationError(f"bound vector has {arr.size} entries, expected {n}")
    return arr


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def read_starts(path) -> list[list[float]]:
    """One point per line, decimals separated by spaces or commas; ``#`` starts a comment."""
    starts = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read starts file: {exc}") from None
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                starts.append([float(t) for t in line.replace(",", " ").split()])
            except ValueError:
                raise ConfigurationError(f"malformed start point line: {line!r}") from None
    if not starts:
        raise ConfigurationError("starts file holds no point")
    return starts


def _builtin_reference(problem) -> ReferenceData | None:
    name = getattr(problem, "name", None)
    if name not in REGISTRY:
        return None
    try:
        return ReferenceData.from_front(load_reference(name))
    except FileNotFoundError:
        return None


def _front_rows(evals, with_h: bool = False):
    for e in evals:
        yield [*e.x, *e.f, e.h] if with_h else [*e.x, *e.f]


def write_run_outputs(directory: Path, problem, result: RunResult, config: SolverConfig,
                      ref: ReferenceData | None, extra: dict | None = None) -> dict:
    spec = problem.spec
    directory.mkdir(parents=True, exist_ok=True)
    xs = [f"x_{i + 1}" for i in range(spec.n)]
    fs = [f"f_{i + 1}" for i in range(spec.m)]
    write_csv(directory / "front.csv", xs + fs, _front_rows(result.pareto_approx))
    write_csv(directory / "infeasible_front.csv", xs + fs + ["h"], _front_rows(result.infeasible_front, True))
    write_history_csv(directory / "history.csv", result, spec)
    summary = {
        "format_version": FORMAT_VERSION,
        "problem": getattr(problem, "name", "external"),
        "eval_count": result.eval_count,
        "stop_reason": result.stop_reason,
        "front_size": len(result.pareto_approx),
        "phase1_evals": result.phase1_evals,
        "config": asdict(config),
    }
    if ref is not None:
        emit_convergence_profile(result.history, ref, path=directory / "convergence_profile.csv")
        summary["normalized_hv"] = normalized_hv(result.front, ref) if result.pareto_approx else 0.0
    if extra:
        summary.update(extra)
    with open(directory / "run.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def cmd_solve(manifest: RunManifest) -> int:
    problem = manifest.build_problem()
    ref = _builtin_reference(problem)
    starts = manifest.starts
    if starts is None and not hasattr(problem, "default_starts"):
        raise ConfigurationError("an external blackbox needs --starts-file")
    out = Path(manifest.out)
    for seed in manifest.seeds:
        config = manifest.solver_config(seed)
        result = solve(problem, config, starts)
        directory = out if manifest.replications == 1 else out / f"seed_{seed}"
        summary = write_run_outputs(directory, problem, result, config, ref)
        hv = summary.get("normalized_hv")
        hv_text = "" if hv is None else f" normalized_hv={hv:.4f}"
        print(f"{summary['problem']} {config.variant} seed={seed} evals={result.eval_count} "
              f"stop={result.stop_reason} front={len(result.pareto_approx)}{hv_text}")
    return EXIT_OK


def _eps_label(eps: float) -> str:
    return format(eps, "g")


def run_bench(problems: list[str], variants: list[str], seeds: list[int], budget: int,
              eps_taus: list[float], out: Path, config: dict | None = None) -> dict:
    """Cross product of problems, variants and seeds; returns the results index."""
    if not problems:
        raise ConfigurationError("empty problem list")
    if not variants:
        raise ConfigurationError("empty variant list")
    for v in variants:
        if v not in VARIANTS:
            raise ConfigurationError(f"unknown variant {v!r}")
    for eps in eps_taus:
        if not 0 < eps < 1:
            raise ConfigurationError("eps_tau values must lie in (0, 1)")
    config = dict(config or {})
    out = Path(out)
    instances = [get_problem(p) for p in problems]
    cells = []
    runs = {}
    for problem in instances:
        for variant in variants:
            for seed in seeds:
                cell = {"problem": problem.name, "variant": variant, "seed": seed}
                try:
                    cfg = SolverConfig(**dict(config, variant=variant, budget=budget, rng_seed=seed))
                    result = solve(problem, cfg)
                except (ConfigurationError, BlackboxIOError) as exc:
                    cell["error"] = str(exc)
                else:
                    runs[(problem.name, variant, seed)] = (cfg, result)
                    cell.update(eval_count=result.eval_count, stop_reason=result.stop_reason,
                                front_size=len(result.pareto_approx))
                cells.append(cell)

    references = {}
    for problem in instances:
        parts = []
        try:
            parts.append(load_reference(problem.name).points)
        except FileNotFoundError:
            pass
        for (name, _, _), (_, result) in runs.items():
            if name == problem.name and result.pareto_approx:
                parts.append(result.front.points)
        if parts:
            references[problem.name] = ReferenceData.from_front(front_of(np.vstack(parts)))

    n_per_problem = {p.name: p.spec.n for p in instances}
    k_max = max(math.ceil(budget / (n + 1)) for n in n_per_problem.values())
    for cell in cells:
        key = (cell["problem"], cell["variant"], cell["seed"])
        if key not in runs:
            continue
        cfg, result = runs[key]
        ref = references.get(cell["problem"])
        directory = out / "runs" / cell["problem"] / cell["variant"] / f"seed_{cell['seed']}"
        write_run_outputs(directory, get_problem(cell["problem"]), result, cfg, ref)
        if ref is not None:
            cell["normalized_hv"] = normalized_hv(result.front, ref) if result.pareto_approx else 0.0
            cell["solved_at"] = {_eps_label(e): first_solved_evaluation(result.history, ref, e)
                                 for e in eps_taus}

    profiles = {}
    for variant in variants:
        for eps in eps_taus:
            label = _eps_label(eps)
            solved = {}
            for cell in cells:
                if cell["variant"] == variant:
                    solved[(cell["problem"], cell["seed"])] = cell.get("solved_at", {}).get(label)
            rows = emit_data_profile(solved, n_per_problem, k_max,
                                     out / f"data_profile_{variant}_{label}.csv")
            profiles[f"{variant}@{label}"] = rows[-1][1] if rows else 0.0

    index = {
        "format_version": FORMAT_VERSION,
        "problems": problems,
        "variants": variants,
        "seeds": seeds,
        "budget": budget,
        "eps_tau": eps_taus,
        "terminal_fraction": profiles,
        "cells": cells,
    }
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "results.json", "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return index


def cmd_bench(args) -> int:
    problems = _name_list(args.problems) if args.problems is not None else sorted(REGISTRY)
    variants = _name_list(args.variants)
    seeds = list(range(args.seed, args.seed + args.replications))
    index = run_bench(problems, variants, seeds, args.budget, args.eps_tau, Path(args.out),
                      _config_overrides(args))
    failures = sum(1 for c in index["cells"] if "error" in c)
    fractions = " ".join(f"{k}={v:.3f}" for k, v in index["terminal_fraction"].items())
    print(f"bench: {len(index['cells'])} runs, {failures} failed, terminal fractions {fractions}")
    return EXIT_OK


def cmd_reference(args) -> int:
    from .problems.reference import fixture_path, reference_front, write_front_csv
    names = args.problems or sorted(REGISTRY)
    for name in names:
        front = reference_front(get_problem(name), args.grid, args.samples)
        write_front_csv(front.points, fixture_path(name))
        print(f"{name}: {len(front)} points")
    return EXIT_OK


def _name_list(text: str) -> list[str]:
    return [t.strip().lower() for t in text.split(",") if t.strip()]


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config file: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError("config file must hold a JSON object")
    return data


_FLAG_TO_KEY = {
    "budget": "budget", "tau": "tau", "wplus": "w_plus", "rho": "rho", "delta0": "delta0",
    "mesh_tol": "mesh_tol", "eps_penalty": "eps_penalty",
}


def _config_overrides(args) -> dict:
    file_values = _load_config_file(getattr(args, "config", None))
    values = {k: v for k, v in file_values.items() if k in _CONFIG_KEYS}
    for flag, key in _FLAG_TO_KEY.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[key] = value
    values.pop("variant", None)
    values.pop("rng_seed", None)
    return values


def manifest_from_args(args) -> RunManifest:
    file_values = _load_config_file(args.config)

    def pick(flag, key=None, default=None):
        value = getattr(args, flag)
        if value is not None:
            return value
        return file_values.get(key or flag, default)

    config = {k: v for k, v in file_values.items() if k in _CONFIG_KEYS}
    config.update(_config_overrides(args))
    seed = pick("seed", "rng_seed", 1)
    replications = pick("replications", default=1)
    if replications < 1:
        raise ConfigurationError("replications must be at least 1")
    starts_file = pick("starts_file")
    return RunManifest(
        problem=pick("problem"),
        external_cmd=pick("external_cmd"),
        n=pick("n"), m=pick("m"), j=pick("j", default=0),
        lower=pick("lower"), upper=pick("upper"),
        variant=str(pick("variant", default="pb")).lower(),
        config=config,
        starts=read_starts(starts_file) if starts_file else file_values.get("starts"),
        out=pick("out", default="out"),
        seeds=list(range(seed, seed + replications)),
        timeout=pick("timeout", default=60.0),
    )


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--wplus", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--delta0", type=float)
    p.add_argument("--mesh-tol", type=float)
    p.add_argument("--eps-penalty", type=float)
    p.add_argument("--config", help="JSON file with SolverConfig keys; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dmultimads", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run one variant on one problem")
    s.add_argument("--problem", help=f"builtin problem: {', '.join(sorted(REGISTRY))}")
    s.add_argument("--external-cmd", help="blackbox command, called as `cmd <point-file>`")
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--j", type=int)
    s.add_argument("--lower", type=_float_list)
    s.add_argument("--upper", type=_float_list)
    s.add_argument("--timeout", type=float, help="seconds per external evaluation")
    s.add_argument("--variant", choices=VARIANTS)
    s.add_argument("--seed", type=int)
    s.add_argument("--replications", type=int)
    s.add_argument("--starts-file")
    s.add_argument("--out")
    s.add_argument("--eps-tau", type=float, help="accepted for symmetry with bench; unused by solve")
    _add_solver_flags(s)

    b = sub.add_parser("bench", help="run the problem x variant x seed cross product")
    b.add_argument("--problems", help="comma-separated builtin names (default: all)")
    b.add_argument("--variants", "--variant", dest="variants", default="pb,teb,penalty")
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--replications", type=int, default=3)
    b.add_argument("--eps-tau", type=_float_list, default=[0.1])
    b.add_argument("--out", default="bench_out")
    _add_solver_flags(b)
    b.set_defaults(budget=None)

    r = sub.add_parser("reference", help="regenerate the reference-front fixtures")
    r.add_argument("problems", nargs="*")
    r.add_argument("--grid", type=int, default=1000)
    r.add_argument("--samples", type=int, default=1_000_000)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(manifest_from_args(args))
        if args.command == "bench":
            if args.budget is None:
                args.budget = int(_load_config_file(args.config).get("budget", 5000))
            if args.replications < 1:
                raise ConfigurationError("replications must be at least 1")
            return cmd_bench(args)
        return cmd_reference(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlackboxIOError as exc:
        print(f"blackbox I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
