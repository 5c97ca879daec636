import os

import aiosqlite


def _sqlite_path(database_url: str) -> str:
    """Extract SQLite file path from URL-like string."""
    if database_url.startswith("sqlite:///"):
        return database_url.replace("sqlite:///", "", 1)
    return database_url


async def connect(database_url: str) -> aiosqlite.Connection:
    """Open SQLite connection with row factory."""
    path = _sqlite_path(database_url)
    if path != ":memory:" and os.path.dirname(path):
        os.makedirs(os.path.dirname(path), exist_ok=True)
    conn = await aiosqlite.connect(path)
    conn.row_factory = aiosqlite.Row
    await conn.execute("PRAGMA foreign_keys=ON;")
    return conn


async def init_db(conn: aiosqlite.Connection) -> None:
    """Create benchmark tables."""
    await conn.executescript(
        """
        CREATE TABLE IF NOT EXISTS runs (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            started_at TEXT NOT NULL,
            config_json TEXT NOT NULL DEFAULT '{}',
            finished_at TEXT
        );

        CREATE TABLE IF NOT EXISTS records (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            run_id INTEGER NOT NULL,
            scene TEXT NOT NULL,
            variant TEXT NOT NULL,
            seed INTEGER NOT NULL,
            success INTEGER NOT NULL,
            iterations INTEGER NOT NULL,
            wall_ms REAL NOT NULL,
            min_sr REAL,
            volume REAL,
            reason TEXT DEFAULT '',
            histogram_json TEXT DEFAULT '{}',
            FOREIGN KEY (run_id) REFERENCES runs(id) ON DELETE CASCADE
        );

        CREATE INDEX IF NOT EXISTS idx_records_run ON records(run_id, scene, variant);
        """
    )
    await conn.commit()
