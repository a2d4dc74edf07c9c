"""
Replications - Независимые прогоны с разными seed
=================================================

Seed каждой репликации выводится из SeedSequence(config.seed).spawn(N),
результаты сливаются по индексу репликации.
"""

import multiprocessing
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np

from app.core.logger import logger
from app.simulation.engine import run_simulation
from app.simulation.reports import ReportGenerator
from app.simulation.run_config import RunConfig

_MP_CTX = multiprocessing.get_context("fork")


def replication_seeds(seed: int, count: int) -> List[int]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def replication_configs(config: RunConfig) -> List[RunConfig]:
    return [
        config.model_copy(update={"seed": seed, "replications": 1})
        for seed in replication_seeds(config.seed, config.replications)
    ]


def _replication_worker(task: Tuple[int, RunConfig, str]) -> Dict[str, Any]:
    index, config, out_dir = task
    result = run_simulation(config)
    reports = ReportGenerator(Path(out_dir))
    name = f"replication_{index:03d}.{config.format}"
    reports.write_trajectory(
        result.record,
        config.format,
        Path(out_dir) / name,
        summary=result.summary,
        allow_empty=not result.ok,
    )
    return {"replication": index, "file": name, **result.summary}


def run_replications(config: RunConfig, out_dir: Path, workers: int = 1) -> Dict[str, Any]:
    """
    Запустить config.replications прогонов и собрать сводку

    Returns:
        {"replications": N, "failed": K, "runs": [...по индексу...]}
    """
    tasks = [(i, cfg, str(out_dir)) for i, cfg in enumerate(replication_configs(config))]
    workers = max(1, min(workers, len(tasks)))
    logger.info(f"🔁 {len(tasks)} replications on {workers} worker(s)")

    if workers == 1:
        runs = [_replication_worker(task) for task in tasks]
    else:
        with _MP_CTX.Pool(workers) as pool:
            runs = pool.map(_replication_worker, tasks)

    runs.sort(key=lambda r: r["replication"])
    failed = sum(1 for r in runs if r.get("truncated"))
    merged: Dict[str, Any] = {
        "scenario": config.scenario,
        "seed": config.seed,
        "replications": len(runs),
        "failed": failed,
        "runs": runs,
    }
    fractions = [r["regret"]["fraction_within_bound"] for r in runs if "regret" in r]
    if fractions:
        merged["mean_fraction_within_bound"] = float(np.nanmean(fractions))
    return merged
