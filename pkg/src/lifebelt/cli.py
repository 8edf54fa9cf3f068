"""Command-line entry point.

Five subcommands cover the full workflow: ``simulate`` writes a synthetic
dataset plus its ground-truth latent path, ``filter`` runs one filter pass,
``grid`` profiles the likelihood over a simplex slice, ``pmcmc`` runs the
GIMH chain, and ``compare`` runs matched lifebelt and alive-filter chains
and reports cost/quality diagnostics.

Every command reads a flat ``section.key = value`` config file, merges the
``--seed/--out/--threads`` overrides, writes the effective configuration to
``<run-id>.config`` beside its outputs, and stamps the same echo into every
artifact.  Exit codes: 0 success (a collapsed filter is a result, not a
failure), 2 configuration error, 3 I/O or data-format error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import artifacts
from .artifacts import DataFormatError
from .config import (
    ConfigError,
    load_config,
    parse_grid_values,
    render_config,
    resolve,
)
from .filters import FilterConfig, FilterInvariantError, run_filter
from .model import OutcomeProbs, epidemic_pulse, simulate
from .pmcmc import ChainTrace, longest_rejection_run, run_pmcmc
from .smc import ParticleCollapseError

__all__ = ["main"]

_PROB_COMPONENTS = ("p_h", "p_d", "p_r")


def _effective_config(command: str, args) -> dict[str, Any]:
    raw = load_config(args.config)
    if args.seed is not None:
        raw["run.seed"] = str(args.seed)
    if args.out is not None:
        raw["run.out"] = args.out
    if args.threads is not None:
        raw["run.threads"] = str(args.threads)
    cfg = resolve(command, raw)
    if cfg["run.id"] is None:
        cfg["run.id"] = command
    if cfg["run.seed"] is None:
        cfg["run.seed"] = int(np.random.SeedSequence().entropy % (2**62))
    if cfg["run.threads"] < 1:
        raise ConfigError("run.threads must be at least 1")
    return cfg


def _prepare_out(cfg: dict[str, Any]) -> Path:
    out = Path(cfg["run.out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _model_probs(cfg: dict[str, Any]) -> OutcomeProbs:
    try:
        return OutcomeProbs(cfg["model.p_h"], cfg["model.p_d"], cfg["model.p_r"])
    except ValueError as exc:
        raise ConfigError(f"model probabilities: {exc}") from None


def _init_probs(cfg: dict[str, Any], section: str) -> Optional[OutcomeProbs]:
    keys = [f"{section}.init_{name}" for name in _PROB_COMPONENTS]
    values = [cfg[k] for k in keys]
    given = [v for v in values if v is not None]
    if not given:
        return None
    if len(given) != 3:
        raise ConfigError(f"set all three of {', '.join(keys)} or none")
    try:
        return OutcomeProbs(*values)
    except ValueError as exc:
        raise ConfigError(f"chain start point: {exc}") from None


def _load_dataset(cfg: dict[str, Any]):
    dataset, _ = artifacts.read_dataset_csv(cfg["data.path"], cfg["model.x0_rate"])
    return dataset


def _filter_config(cfg: dict[str, Any], seed: Optional[int], record: bool = False) -> FilterConfig:
    return FilterConfig(
        variant=cfg["filter.variant"],
        n_particles=cfg["filter.n_particles"],
        apf_cap=cfg["filter.apf_cap"],
        exact_t0_weights=cfg["filter.exact_t0_weights"],
        record_trajectories=record,
        seed=seed,
    )


def cmd_simulate(cfg: dict[str, Any], out: Path) -> None:
    probs = _model_probs(cfg)
    pulse_keys = ("data.T", "data.peak", "data.center", "data.width")
    pulse_given = [k for k in pulse_keys if cfg[k] is not None]
    if cfg["data.h"] is not None:
        if pulse_given:
            raise ConfigError(
                "give either data.h or the pulse keys "
                f"({', '.join(pulse_keys)}), not both"
            )
        h = np.asarray(cfg["data.h"], dtype=np.int64)
        if h.size == 0:
            raise ConfigError("data.h must contain at least one interval")
        if (h < 0).any():
            raise ConfigError("data.h entries must be non-negative")
    elif len(pulse_given) == 4:
        h = None
    else:
        raise ConfigError(
            "admissions need either data.h or all of "
            f"{', '.join(pulse_keys)}"
        )

    pulse_ss, sim_ss = np.random.SeedSequence(cfg["run.seed"]).spawn(2)
    if h is None:
        h = epidemic_pulse(
            cfg["data.T"],
            cfg["data.peak"],
            cfg["data.center"],
            cfg["data.width"],
            seed=np.random.default_rng(pulse_ss),
        )
    dataset, latent = simulate(
        probs, h, x0_rate=cfg["model.x0_rate"], seed=np.random.default_rng(sim_ss)
    )

    rid = cfg["run.id"]
    artifacts.write_dataset_csv(out / f"{rid}.dataset.csv", dataset, cfg)
    artifacts.write_latent_csv(out / f"{rid}.latent.csv", latent, cfg)
    print(f"wrote {rid}.dataset.csv and {rid}.latent.csv in {out}")
    print(
        f"T = {dataset.T}, admissions = {int(dataset.h.sum())}, "
        f"deaths = {int(dataset.y.sum())}, x0 = {int(latent.x[0])}, "
        f"final occupancy = {int(latent.x[-1])}"
    )


def cmd_filter(cfg: dict[str, Any], out: Path) -> None:
    dataset = _load_dataset(cfg)
    probs = _model_probs(cfg)
    fconfig = _filter_config(cfg, cfg["run.seed"], record=cfg["filter.record_trajectories"])
    result = run_filter(dataset, probs, fconfig)

    rid = cfg["run.id"]
    payload = result.to_json_dict()
    payload["config"] = dict(cfg)
    artifacts.write_json(out / f"{rid}.result.json", payload)
    if result.trajectories is not None:
        traj = result.trajectories
        rows = zip(traj.t, traj.particle, traj.x, traj.norm_w, traj.group, traj.resampled_from)
        artifacts.write_csv(
            out / f"{rid}.trajectories.csv", artifacts.TRAJECTORY_COLUMNS, rows, cfg
        )
    print(f"wrote {rid}.result.json in {out}")
    if result.collapsed:
        print(f"{fconfig.variant}: collapsed at t = {result.collapsed_at}, loglik = -inf")
    else:
        print(
            f"{fconfig.variant}: loglik = {result.loglik:.6f}, "
            f"final ESS = {result.final_ess:.1f}"
        )


def _grid_worker(task):
    dataset, probs, fconfig = task
    result = run_filter(dataset, probs, fconfig)
    return result.loglik, result.collapsed_at, result.final_ess, result.total_attempts


def cmd_grid(cfg: dict[str, Any], out: Path) -> None:
    dataset = _load_dataset(cfg)
    pd_values = parse_grid_values(cfg["grid.p_d"], "grid.p_d")
    if cfg["grid.p_r"] is not None:
        if cfg["model.p_r"] is not None:
            raise ConfigError("give grid.p_r or model.p_r, not both")
        pr_values = parse_grid_values(cfg["grid.p_r"], "grid.p_r")
    elif cfg["model.p_r"] is not None:
        pr_values = [cfg["model.p_r"]]
    else:
        raise ConfigError("grid needs model.p_r (fixed) or grid.p_r (second axis)")

    points = []
    for p_d in pd_values:
        for p_r in pr_values:
            p_h = 1.0 - p_d - p_r
            if min(p_h, p_d, p_r) <= 0.0 or max(p_h, p_d, p_r) >= 1.0:
                raise ConfigError(
                    f"grid point p_d={p_d}, p_r={p_r} is on or outside the "
                    "simplex boundary; grid points must be interior"
                )
            points.append(OutcomeProbs(p_h, p_d, p_r))

    replicates = cfg["grid.replicates"]
    if replicates < 1:
        raise ConfigError("grid.replicates must be at least 1")

    base_seed = cfg["run.seed"]
    tasks = []
    seeds = []
    for p_idx, probs in enumerate(points):
        for rep in range(replicates):
            seed = base_seed + p_idx * replicates + rep
            seeds.append(seed)
            tasks.append((dataset, probs, _filter_config(cfg, seed)))

    if cfg["run.threads"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["run.threads"]) as pool:
            results = list(pool.map(_grid_worker, tasks))
    else:
        results = [_grid_worker(task) for task in tasks]

    rows = []
    for task_idx, (loglik, collapsed_at, final_ess, total_attempts) in enumerate(results):
        p_idx, rep = divmod(task_idx, replicates)
        probs = points[p_idx]
        rows.append(
            (
                p_idx,
                rep,
                probs.p_h,
                probs.p_d,
                probs.p_r,
                seeds[task_idx],
                loglik,
                collapsed_at,
                final_ess,
                total_attempts,
            )
        )

    rid = cfg["run.id"]
    artifacts.write_csv(out / f"{rid}.grid.csv", artifacts.GRID_COLUMNS, rows, cfg)
    n_collapsed = sum(1 for row in rows if row[7] is not None)
    print(f"wrote {rid}.grid.csv in {out}")
    print(
        f"{len(points)} grid points x {replicates} replicates = {len(tasks)} runs "
        f"({n_collapsed} collapsed)"
    )


def _trace_rows(trace: ChainTrace):
    for i in range(trace.gamma.shape[0]):
        yield (
            i,
            trace.gamma[i, 0],
            trace.gamma[i, 1],
            trace.probs[i, 0],
            trace.probs[i, 1],
            trace.probs[i, 2],
            trace.loglik[i],
            bool(trace.accepted[i]),
        )


def _run_chain(dataset, iterations, fconfig, scale, seed, init, max_tries) -> ChainTrace:
    try:
        return run_pmcmc(
            dataset,
            iterations,
            fconfig,
            scale=scale,
            seed=seed,
            init_probs=init,
            max_init_tries=max_tries,
        )
    except (FilterInvariantError, ParticleCollapseError):
        raise
    except RuntimeError as exc:
        raise ConfigError(str(exc)) from exc


def _posterior_summary(trace: ChainTrace, kept: np.ndarray) -> dict[str, Any]:
    posterior: dict[str, Any] = {}
    for j, name in enumerate(_PROB_COMPONENTS):
        samples = trace.probs[kept, j]
        q025, q05, q50, q95, q975 = np.quantile(samples, [0.025, 0.05, 0.5, 0.95, 0.975])
        posterior[name] = {
            "mean": float(samples.mean()),
            "q025": float(q025),
            "q05": float(q05),
            "q50": float(q50),
            "q95": float(q95),
            "q975": float(q975),
        }
    return posterior


def cmd_pmcmc(cfg: dict[str, Any], out: Path) -> None:
    dataset = _load_dataset(cfg)
    fconfig = _filter_config(cfg, seed=None)
    init = _init_probs(cfg, "pmcmc")
    trace = _run_chain(
        dataset,
        cfg["pmcmc.iterations"],
        fconfig,
        cfg["pmcmc.scale"],
        cfg["run.seed"],
        init,
        cfg["pmcmc.max_init_tries"],
    )

    rid = cfg["run.id"]
    artifacts.write_csv(
        out / f"{rid}.trace.csv", artifacts.TRACE_COLUMNS, _trace_rows(trace), cfg
    )

    kept = trace.kept_rows(cfg["pmcmc.burn_in_fraction"], cfg["pmcmc.thin"])
    evaluated = trace.evaluated[1:].astype(bool)
    payload = {
        "variant": trace.variant,
        "n_iterations": trace.n_iterations,
        "acceptance_rate": trace.acceptance_rate,
        "longest_rejection_run": longest_rejection_run(trace.accepted[1:]),
        "n_evaluated": int(evaluated.sum()),
        "burn_in_fraction": cfg["pmcmc.burn_in_fraction"],
        "thin": cfg["pmcmc.thin"],
        "kept_samples": int(kept.size),
        "posterior": _posterior_summary(trace, kept),
        "mean_loglik_kept": float(trace.loglik[kept].mean()),
        "seed": cfg["run.seed"],
        "config": dict(cfg),
    }
    artifacts.write_json(out / f"{rid}.summary.json", payload)
    print(f"wrote {rid}.trace.csv and {rid}.summary.json in {out}")
    means = ", ".join(
        f"{name} = {payload['posterior'][name]['mean']:.4f}" for name in _PROB_COMPONENTS
    )
    print(
        f"acceptance rate = {trace.acceptance_rate:.3f} over "
        f"{trace.n_iterations} iterations; posterior means: {means}"
    )


def _attempt_bins(attempts, collapsed, saturated, floor: int) -> dict[str, int]:
    """Classify evaluated proposals by how the filter spent its budget.

    ``minimal_cost`` runs never retried a proposal (total attempts exactly at
    the floor), ``early_terminated`` runs collapsed at some step and stopped
    with a zero likelihood estimate, ``cap_saturated`` runs hit the per-step
    proposal cap at least once yet finished, and the rest retried some
    proposals but stayed under the cap.
    """
    early = collapsed
    saturated_only = saturated & ~collapsed
    minimal = ~collapsed & ~saturated & (attempts == floor)
    intermediate = ~(early | saturated_only | minimal)
    return {
        "minimal_cost": int(minimal.sum()),
        "intermediate": int(intermediate.sum()),
        "early_terminated": int(early.sum()),
        "cap_saturated": int(saturated_only.sum()),
    }


def _chain_report(
    trace: ChainTrace, floor: int, ess_threshold: float, elapsed: float
) -> dict[str, Any]:
    ev = trace.evaluated[1:].astype(bool)
    attempts = trace.prop_attempts[1:][ev]
    collapsed = trace.prop_collapsed[1:][ev]
    saturated = trace.prop_saturated[1:][ev]
    final_ess = trace.prop_final_ess[1:][ev]
    mean_ess = trace.prop_mean_ess[1:][ev]
    report: dict[str, Any] = {
        "variant": trace.variant,
        "acceptance_rate": trace.acceptance_rate,
        "n_evaluated": int(ev.sum()),
        "collapse_fraction": float(collapsed.mean()) if ev.any() else 0.0,
        "attempt_bins": _attempt_bins(attempts, collapsed, saturated, floor),
        "total_proposals": int(attempts.sum()),
        "proposals_per_iteration": {
            "min": int(attempts.min()) if ev.any() else 0,
            "median": float(np.median(attempts)) if ev.any() else 0.0,
            "max": int(attempts.max()) if ev.any() else 0,
        },
        "proposals_ge_floor_every_iteration": bool((attempts >= floor).all()),
        "final_ess_below_threshold_fraction": float((final_ess < ess_threshold).mean())
        if ev.any()
        else 0.0,
        "mean_ess_median": float(np.median(mean_ess)) if ev.any() else 0.0,
        "elapsed_seconds": elapsed,
    }
    return report


def cmd_compare(cfg: dict[str, Any], out: Path) -> None:
    dataset = _load_dataset(cfg)
    n_particles = cfg["compare.n_particles"]
    iterations = cfg["compare.iterations"]
    init = _init_probs(cfg, "compare")
    floor = n_particles * dataset.T

    configs = {
        "lbpf": FilterConfig(variant="lbpf", n_particles=n_particles),
        "apf": FilterConfig(
            variant="apf", n_particles=n_particles, apf_cap=cfg["compare.apf_cap"]
        ),
    }
    traces: dict[str, ChainTrace] = {}
    elapsed: dict[str, float] = {}
    for variant, fconfig in configs.items():
        start = time.perf_counter()
        traces[variant] = _run_chain(
            dataset,
            iterations,
            fconfig,
            cfg["compare.scale"],
            cfg["run.seed"],
            init,
            cfg["compare.max_init_tries"],
        )
        elapsed[variant] = time.perf_counter() - start

    rows = []
    for variant in ("lbpf", "apf"):
        tr = traces[variant]
        for i in range(1, tr.gamma.shape[0]):
            rows.append(
                (
                    i,
                    variant,
                    bool(tr.accepted[i]),
                    bool(tr.evaluated[i]),
                    tr.loglik[i],
                    tr.prop_loglik[i],
                    tr.prop_mean_ess[i],
                    tr.prop_final_ess[i],
                    int(tr.prop_attempts[i]),
                    bool(tr.prop_collapsed[i]),
                    bool(tr.prop_saturated[i]),
                )
            )

    rid = cfg["run.id"]
    artifacts.write_csv(
        out / f"{rid}.iterations.csv", artifacts.ITERATION_COLUMNS, rows, cfg
    )

    threshold = cfg["compare.ess_threshold"]
    payload = {
        "iterations": iterations,
        "n_particles": n_particles,
        "apf_cap": cfg["compare.apf_cap"],
        "proposal_floor": floor,
        "ess_threshold": threshold,
        "lbpf": _chain_report(traces["lbpf"], floor, threshold, elapsed["lbpf"]),
        "apf": _chain_report(traces["apf"], floor, threshold, elapsed["apf"]),
        "seed": cfg["run.seed"],
        "config": dict(cfg),
    }
    artifacts.write_json(out / f"{rid}.compare.json", payload)
    print(f"wrote {rid}.iterations.csv and {rid}.compare.json in {out}")
    for variant in ("lbpf", "apf"):
        rep = payload[variant]
        bins = rep["attempt_bins"]
        print(
            f"{variant}: acceptance = {rep['acceptance_rate']:.3f}, "
            f"total proposals = {rep['total_proposals']}, "
            f"collapse fraction = {rep['collapse_fraction']:.4f}, "
            f"ESS<{threshold:g} fraction = {rep['final_ess_below_threshold_fraction']:.4f}"
        )
        print(
            f"  attempts: minimal = {bins['minimal_cost']}, "
            f"intermediate = {bins['intermediate']}, "
            f"early-terminated = {bins['early_terminated']}, "
            f"cap-saturated = {bins['cap_saturated']}"
        )


COMMANDS = {
    "simulate": cmd_simulate,
    "filter": cmd_filter,
    "grid": cmd_grid,
    "pmcmc": cmd_pmcmc,
    "compare": cmd_compare,
}

_HELP = {
    "simulate": "draw a synthetic dataset and its latent path",
    "filter": "run one particle filter pass over a dataset",
    "grid": "profile the likelihood over a grid of outcome probabilities",
    "pmcmc": "run a particle-marginal MCMC chain",
    "compare": "run matched lifebelt and alive-filter chains and compare cost",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lifebelt",
        description="particle filtering toolkit for low-count hospital outcome chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", required=True, help="path to a section.key = value config file")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument("--out", default=None, help="override run.out output directory")
        p.add_argument("--threads", type=int, default=None, help="override run.threads")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _effective_config(args.command, args)
        out = _prepare_out(cfg)
        (out / f"{cfg['run.id']}.config").write_text(
            render_config(cfg), encoding="utf-8"
        )
        COMMANDS[args.command](cfg, out)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except (FilterInvariantError, ParticleCollapseError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
