import datetime
import json
import math
from typing import TYPE_CHECKING, Any, Dict, List

import aiosqlite

from utils.rows import record_from_row, rows_to_dicts, run_from_row

if TYPE_CHECKING:
    from tools.bench import MetricsRecord


def utc_now_str() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _real(value: float) -> float | None:
    # non-finite SR (nothing movable left to push) is stored as NULL
    return None if value is None or not math.isfinite(value) else float(value)


async def insert_run(conn: aiosqlite.Connection, config: Dict[str, Any], started_at: str | None = None) -> int:
    cursor = await conn.execute(
        "INSERT INTO runs (started_at, config_json) VALUES (?, ?)",
        (started_at or utc_now_str(), json.dumps(config, sort_keys=True)),
    )
    await conn.commit()
    return cursor.lastrowid


async def finish_run(conn: aiosqlite.Connection, run_id: int) -> None:
    await conn.execute("UPDATE runs SET finished_at = ? WHERE id = ?", (utc_now_str(), run_id))
    await conn.commit()


async def insert_record(conn: aiosqlite.Connection, run_id: int, record: "MetricsRecord") -> int:
    cursor = await conn.execute(
        """
        INSERT INTO records
        (run_id, scene, variant, seed, success, iterations, wall_ms, min_sr, volume, reason, histogram_json)
        VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
        """,
        (
            run_id,
            record.scene,
            record.variant,
            record.seed,
            int(record.success),
            record.iterations,
            record.wall_ms,
            _real(record.min_sr),
            _real(record.volume),
            record.reason,
            json.dumps(record.histogram, sort_keys=True),
        ),
    )
    await conn.commit()
    return cursor.lastrowid


async def list_records(conn: aiosqlite.Connection, run_id: int) -> List[Dict[str, Any]]:
    cursor = await conn.execute("SELECT * FROM records WHERE run_id = ? ORDER BY id", (run_id,))
    return [record_from_row(row) for row in await cursor.fetchall()]


async def get_run(conn: aiosqlite.Connection, run_id: int) -> Dict[str, Any]:
    cursor = await conn.execute("SELECT * FROM runs WHERE id = ?", (run_id,))
    return run_from_row(await cursor.fetchone())


async def summarize_run(conn: aiosqlite.Connection, run_id: int) -> List[Dict[str, Any]]:
    """Per (scene, variant): run count, success rate and means over successful runs."""
    cursor = await conn.execute(
        """
        SELECT scene, variant,
               COUNT(*) AS runs,
               AVG(success) AS success_rate,
               AVG(CASE WHEN success = 1 THEN wall_ms END) AS mean_ms,
               AVG(CASE WHEN success = 1 THEN iterations END) AS mean_iterations,
               AVG(CASE WHEN success = 1 THEN min_sr END) AS mean_min_sr,
               AVG(CASE WHEN success = 1 THEN volume END) AS mean_volume
        FROM records
        WHERE run_id = ?
        GROUP BY scene, variant
        ORDER BY scene, variant
        """,
        (run_id,),
    )
    return rows_to_dicts(await cursor.fetchall())
