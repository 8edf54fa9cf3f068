"""Reproduce the full study from scratch into one output directory.

Steps, in order: simulate the reference dataset, run the 10,000-iteration
recovery chain, run the matched lifebelt/alive-filter comparison, sweep the
hostile regime where the bootstrap filter collapses, and check estimator
unbiasedness against the exact forward sum on a short series.  Everything is
seeded, so two runs of this script produce identical artifacts.

Usage:
    python scripts/reproduce_study.py --out runs/study [--quick]
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from lifebelt import cli
from lifebelt.filters import FilterConfig, run_filter
from lifebelt.model import OutcomeProbs, epidemic_pulse, exact_loglik, simulate
from lifebelt.pmcmc import run_pmcmc

TRUE_PROBS = OutcomeProbs(0.3, 0.5, 0.2)
REFERENCE_H = [18, 14, 0, 0, 16, 0, 0, 14, 0, 0, 12, 0, 0, 10, 5]
REFERENCE_SIM_SEED = 257
N_PARTICLES = 500
CHAIN_SEED = 5
SCALE = 0.6


def write_cfg(path: Path, mapping: dict) -> Path:
    path.write_text("".join(f"{k} = {v}\n" for k, v in mapping.items()))
    return path


def run(command: str, cfg: Path) -> None:
    rc = cli.main([command, "--config", str(cfg)])
    if rc != 0:
        raise SystemExit(f"{command} failed with exit code {rc}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="runs/study", help="output directory")
    parser.add_argument(
        "--quick",
        action="store_true",
        help="shorter chains and fewer replicates (minutes instead of ~15)",
    )
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    iterations = 1000 if args.quick else 10_000
    n_replicates = 4 if args.quick else 20
    rep_iters = 600 if args.quick else 2500
    started = time.time()

    # 1. Reference dataset.
    sim_cfg = write_cfg(out / "simulate.cfg", {
        "model.p_h": TRUE_PROBS.p_h,
        "model.p_d": TRUE_PROBS.p_d,
        "model.p_r": TRUE_PROBS.p_r,
        "data.h": ",".join(str(v) for v in REFERENCE_H),
        "run.seed": REFERENCE_SIM_SEED,
        "run.id": "reference",
        "run.out": out,
    })
    run("simulate", sim_cfg)
    data_path = out / "reference.dataset.csv"

    # 2. Recovery chain.
    chain_cfg = write_cfg(out / "chain.cfg", {
        "data.path": data_path,
        "filter.variant": "lbpf",
        "filter.n_particles": N_PARTICLES,
        "pmcmc.iterations": iterations,
        "pmcmc.scale": SCALE,
        "pmcmc.burn_in_fraction": 0.2,
        "run.seed": CHAIN_SEED,
        "run.id": "recovery",
        "run.out": out,
    })
    run("pmcmc", chain_cfg)
    summary = json.loads((out / "recovery.summary.json").read_text())
    print("\nrecovery posterior (true values 0.3 / 0.5 / 0.2):")
    for name in ("p_h", "p_d", "p_r"):
        q = summary["posterior"][name]
        print(f"  {name}: mean {q['mean']:.3f}, 95% CI ({q['q025']:.3f}, {q['q975']:.3f})")

    # 3. Matched-cost comparison.
    dataset_T = len(REFERENCE_H)
    compare_cfg = write_cfg(out / "compare.cfg", {
        "data.path": data_path,
        "compare.iterations": iterations,
        "compare.scale": SCALE,
        "compare.n_particles": N_PARTICLES,
        "compare.apf_cap": N_PARTICLES * dataset_T,
        "run.seed": CHAIN_SEED,
        "run.id": "duel",
        "run.out": out,
    })
    run("compare", compare_cfg)

    # 4. Hostile-regime collapse sweep (library level, summary only).
    h = epidemic_pulse(20, peak=30, center=8.0, width=3.0, seed=13)
    tail_data, _ = simulate(OutcomeProbs(0.1, 0.8, 0.1), h, x0_rate=1.5, seed=17)
    eval_probs = OutcomeProbs(0.01, 0.6, 0.39)
    n_seeds = 50 if args.quick else 200
    bpf_dead = sum(
        run_filter(tail_data, eval_probs, FilterConfig("bpf", N_PARTICLES, seed=2000 + r)).collapsed
        for r in range(n_seeds)
    )
    lbpf_dead = sum(
        run_filter(tail_data, eval_probs, FilterConfig("lbpf", N_PARTICLES, seed=2000 + r)).collapsed
        for r in range(n_seeds)
    )
    print(f"\nhostile regime: bootstrap collapsed {bpf_dead}/{n_seeds} runs, "
          f"lifebelt {lbpf_dead}/{n_seeds}")

    # 5. Unbiasedness spot check on a short series with a cheap exact answer.
    short_h = epidemic_pulse(10, peak=6, center=3.5, width=2.0, seed=7)
    short_data, _ = simulate(TRUE_PROBS, short_h, x0_rate=1.5, seed=5)
    truth = np.exp(exact_loglik(short_data, TRUE_PROBS))
    n_rep = 50 if args.quick else 200
    print(f"\nexact likelihood {truth:.3e}; estimator means over {n_rep} runs:")
    for variant, exact_t0 in (("bpf", False), ("lbpf", False), ("lbpf_fleet", True)):
        vals = np.array([
            0.0 if (res := run_filter(
                short_data, TRUE_PROBS,
                FilterConfig(variant, N_PARTICLES, exact_t0_weights=exact_t0, seed=1000 + r),
            )).collapsed else np.exp(res.loglik)
            for r in range(n_rep)
        ])
        se = vals.std(ddof=1) / np.sqrt(n_rep)
        print(f"  {variant:10s} {vals.mean():.3e} +- {se:.1e} "
              f"({abs(vals.mean() - truth) / se:.2f} SE from exact)")

    # 6. Replicate-dataset coverage of the death probability.
    hits = 0
    for k in range(n_replicates):
        rep_data, _ = simulate(TRUE_PROBS, REFERENCE_H, x0_rate=1.5, seed=1001 + k)
        trace = run_pmcmc(rep_data, rep_iters, FilterConfig("lbpf", N_PARTICLES),
                          scale=SCALE, seed=CHAIN_SEED + k)
        kept = trace.kept_rows(0.2)
        lo, hi = np.quantile(trace.probs[kept, 1], [0.025, 0.975])
        hits += bool(lo <= TRUE_PROBS.p_d <= hi)
    print(f"\nreplicate datasets: p_d 95% CI covered the truth in "
          f"{hits}/{n_replicates} chains")

    print(f"\nartifacts in {out}; total {time.time() - started:.0f}s")


if __name__ == "__main__":
    main()
