from __future__ import annotations

import asyncio
import math

import pytest

from config import PlannerConfig
from db.database import connect
from db.repositories import list_records
from tools.bench import CSV_FIELDS, MetricsRecord, read_csv, run_benchmark, run_cell, summarize, write_csv
from tools.complexity import fit_exponent, sweep_exponents

CONFIG = PlannerConfig(max_iterations=60, density=20.0, seed=0)


def test_run_cell_on_the_cube_scene():
    record = run_cell("cube", "sr", 0, CONFIG)
    assert record.scene == "cube" and record.variant == "sr" and record.seed == 0
    assert record.success and record.sound
    assert record.iterations >= 1


def test_run_cell_reports_unknown_scene_as_failure():
    record = run_cell("castle", "sr", 0, CONFIG)
    assert not record.success
    assert "castle" in record.reason


def test_csv_round_trip(tmp_path):
    records = [
        MetricsRecord("cube", "sr", 0, True, 3, 12.5, 4.9, 0.008, histogram={"NoContact": 1}),
        MetricsRecord("stack", "uniform", 7, False, 60, 80.0, reason="iteration limit reached"),
        MetricsRecord("cube", "sr", 1, True, 2, 9.0, math.inf, 0.008, sound=False),
    ]
    path = write_csv(records, tmp_path / "out" / "bench.csv")
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header.split(",") == CSV_FIELDS
    back = read_csv(path)
    assert back[0] == records[0]
    assert back[1].reason == records[1].reason and math.isnan(back[1].min_sr)
    assert back[2].min_sr == math.inf and not back[2].sound


def test_csv_schema_version_is_checked():
    row = MetricsRecord("cube", "sr", 0, True, 1, 1.0).to_row()
    row = {k: str(v) for k, v in row.items()}
    row["schema_version"] = "2"
    with pytest.raises(ValueError):
        MetricsRecord.from_row(row)


def test_summary_per_cell():
    records = [
        MetricsRecord("cube", "sr", 0, True, 2, 10.0, 4.0, 1.0),
        MetricsRecord("cube", "sr", 1, True, 4, 30.0, math.inf, 3.0, sound=False),
        MetricsRecord("cube", "sr", 2, False, 60, 99.0),
        MetricsRecord("cube", "chance", 0, False, 60, 5.0),
    ]
    rows = {(r["scene"], r["variant"]): r for r in summarize(records)}
    sr = rows[("cube", "sr")]
    assert sr["runs"] == 3
    assert sr["success_rate"] == pytest.approx(2 / 3)
    assert sr["mean_ms"] == pytest.approx(20.0)
    assert sr["median_iterations"] == pytest.approx(3.0)
    assert sr["mean_min_sr"] == pytest.approx(4.0)
    assert sr["unsound"] == 1
    chance = rows[("cube", "chance")]
    assert chance["success_rate"] == 0.0 and math.isnan(chance["mean_ms"])


def test_benchmark_writes_csv_and_database(tmp_path):
    url = f"sqlite:///{tmp_path / 'bench.db'}"
    records = run_benchmark(["cube"], ["sr", "chance"], 2, CONFIG, csv_path=tmp_path / "bench.csv", database_url=url)
    assert [(r.variant, r.seed) for r in records] == [("chance", 0), ("chance", 1), ("sr", 0), ("sr", 1)]
    assert len(read_csv(tmp_path / "bench.csv")) == 4

    async def stored():
        conn = await connect(url)
        try:
            return await list_records(conn, 1)
        finally:
            await conn.close()

    assert len(asyncio.run(stored())) == 4


def test_fit_exponent():
    xs = [50, 150, 500, 1500]
    assert fit_exponent(xs, [3.0 * x**1.5 for x in xs]) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        fit_exponent([10], [1.0])
    rows = [{"vertices": x, "srmap_ms": float(x), "plan_ms": 2.0} for x in xs]
    slopes = sweep_exponents(rows)
    assert slopes["srmap"] == pytest.approx(1.0)
    assert slopes["plan"] == pytest.approx(0.0, abs=1e-9)
