"""
Benchmark harness: scenes x variants x seeded runs.

Every cell is planned in a worker process; the parent collects results in
completion order, writes the CSV and stores the records in the results
database. A failing run is recorded, never aborts the sweep.

Usage:
    python main.py bench --scenes cube stack --variants sr uniform --runs 5
"""

from __future__ import annotations

import asyncio
import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np

from config import PlannerConfig
from db.database import connect, init_db
from db.repositories import finish_run, insert_record, insert_run
from errors import PlacerError
from planner.placement import PlacementResult, plan_placement, revalidate
from scene.generators import generate_scene
from scene.loader import assemble, build_object
from utils.logger import log_debug, log_error, log_info

CSV_SCHEMA_VERSION = 1
CSV_FIELDS = [
    "schema_version",
    "scene",
    "variant",
    "seed",
    "success",
    "iterations",
    "wall_ms",
    "min_sr",
    "volume",
    "sound",
    "reason",
    "histogram",
]


@dataclass
class MetricsRecord:
    scene: str
    variant: str
    seed: int
    success: bool
    iterations: int
    wall_ms: float
    min_sr: float = math.nan
    volume: float = math.nan
    sound: bool = True
    reason: str = ""
    histogram: Dict[str, int] = field(default_factory=dict)

    def to_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row["schema_version"] = CSV_SCHEMA_VERSION
        row["success"] = int(self.success)
        row["sound"] = int(self.sound)
        row["histogram"] = json.dumps(self.histogram, sort_keys=True)
        return row

    @classmethod
    def from_row(cls, row: Dict[str, str]) -> "MetricsRecord":
        version = int(row.get("schema_version", CSV_SCHEMA_VERSION))
        if version != CSV_SCHEMA_VERSION:
            raise ValueError(f"unsupported metrics schema {version}")
        return cls(
            scene=row["scene"],
            variant=row["variant"],
            seed=int(row["seed"]),
            success=row["success"] == "1",
            iterations=int(row["iterations"]),
            wall_ms=float(row["wall_ms"]),
            min_sr=float(row["min_sr"]),
            volume=float(row["volume"]),
            sound=row.get("sound", "1") == "1",
            reason=row.get("reason", ""),
            histogram=json.loads(row.get("histogram") or "{}"),
        )


def run_cell(scene_name: str, variant: str, seed: int, config: PlannerConfig) -> MetricsRecord:
    """Plan the first queued object of a scene once. Runs in a worker process."""
    started = time.perf_counter()
    try:
        scene = generate_scene(scene_name)
        assembly = assemble(scene, contact_tol=config.tolerances.contact)
        obj = build_object(scene.queue[0])
        cfg = replace(config, variant=variant, seed=seed)
        result = plan_placement(assembly, obj, cfg)
    except PlacerError as exc:
        return MetricsRecord(scene_name, variant, seed, False, 0, (time.perf_counter() - started) * 1000.0, reason=str(exc))
    if isinstance(result, PlacementResult):
        return MetricsRecord(
            scene_name,
            variant,
            seed,
            True,
            result.iterations,
            result.wall_ms,
            result.min_sr,
            result.volume,
            sound=revalidate(result, assembly, cfg),
            histogram=result.histogram,
        )
    return MetricsRecord(
        scene_name, variant, seed, False, result.iterations, result.wall_ms, reason=result.reason, histogram=result.histogram
    )


def _jobs(scenes: Sequence[str], variants: Sequence[str], runs: int, base_seed: int) -> List[tuple]:
    return [(s, v, base_seed + k) for s in scenes for v in variants for k in range(runs)]


def write_csv(records: Iterable[MetricsRecord], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for record in records:
            writer.writerow(record.to_row())
    return path


def read_csv(path) -> List[MetricsRecord]:
    with Path(path).open(newline="", encoding="utf-8") as f:
        return [MetricsRecord.from_row(row) for row in csv.DictReader(f)]


async def store_records(database_url: str, config: Dict[str, Any], records: Sequence[MetricsRecord]) -> int:
    conn = await connect(database_url)
    try:
        await init_db(conn)
        run_id = await insert_run(conn, config)
        for record in records:
            await insert_record(conn, run_id, record)
        await finish_run(conn, run_id)
        return run_id
    finally:
        await conn.close()


def run_benchmark(
    scenes: Sequence[str],
    variants: Sequence[str],
    runs_per_cell: int,
    config: PlannerConfig,
    csv_path=None,
    workers: int = 1,
    database_url: str | None = None,
) -> List[MetricsRecord]:
    jobs = _jobs(scenes, variants, runs_per_cell, config.seed)
    log_info("[bench] sweep", cells=len(scenes) * len(variants), runs=len(jobs), workers=workers)
    records: List[MetricsRecord] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_cell, s, v, seed, config) for s, v, seed in jobs]
            for future in as_completed(futures):
                records.append(_collect(future.result()))
    else:
        for s, v, seed in jobs:
            records.append(_collect(run_cell(s, v, seed, config)))
    records.sort(key=lambda r: (r.scene, r.variant, r.seed))

    if csv_path is not None:
        write_csv(records, csv_path)
    if database_url:
        try:
            run_id = asyncio.run(store_records(database_url, _config_dict(config, scenes, variants, runs_per_cell), records))
            log_info("[bench] stored", run_id=run_id, records=len(records))
        except Exception as exc:
            log_error("[bench] could not store records", exc)
    return records


def _collect(record: MetricsRecord) -> MetricsRecord:
    log_debug("[bench] cell done", scene=record.scene, variant=record.variant, seed=record.seed, ok=record.success, it=record.iterations)
    if record.success and not record.sound:
        log_error("[bench] accepted pose failed revalidation", scene=record.scene, variant=record.variant, seed=record.seed)
    return record


def _config_dict(config: PlannerConfig, scenes, variants, runs: int) -> Dict[str, Any]:
    data = asdict(config)
    data.update(scenes=list(scenes), variants=list(variants), runs=runs)
    return data


def summarize(records: Sequence[MetricsRecord]) -> List[Dict[str, Any]]:
    """Table rows per (scene, variant): success rate and means over successful runs."""
    cells: Dict[tuple, List[MetricsRecord]] = {}
    for record in records:
        cells.setdefault((record.scene, record.variant), []).append(record)
    rows = []
    for (scene, variant), group in sorted(cells.items()):
        ok = [r for r in group if r.success]
        finite_sr = [r.min_sr for r in ok if math.isfinite(r.min_sr)]
        rows.append(
            {
                "scene": scene,
                "variant": variant,
                "runs": len(group),
                "success_rate": len(ok) / len(group),
                "mean_ms": float(np.mean([r.wall_ms for r in ok])) if ok else math.nan,
                "median_iterations": float(np.median([r.iterations for r in ok])) if ok else math.nan,
                "mean_min_sr": float(np.mean(finite_sr)) if finite_sr else math.nan,
                "mean_volume": float(np.mean([r.volume for r in ok])) if ok else math.nan,
                "unsound": sum(1 for r in ok if not r.sound),
            }
        )
    return rows
