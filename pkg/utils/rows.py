"""Typed views of results-store rows.

SQLite gives back flat rows: flags as 0/1, JSON columns as text, NULL where a
real was infinite or undefined. ``run_from_row`` and ``record_from_row`` turn
them back into the values the bench and the CLI work with.
"""

import json
import math
from typing import Any, Dict, Iterable, List

import aiosqlite

# column -> key of the decoded value
JSON_COLUMNS = {"config_json": "config", "histogram_json": "histogram"}


def row_to_dict(row: aiosqlite.Row | Dict[str, Any] | None) -> Dict[str, Any]:
    return {} if row is None else dict(row)


def rows_to_dicts(rows: Iterable[aiosqlite.Row] | None) -> List[Dict[str, Any]]:
    return [row_to_dict(row) for row in rows or []]


def _decode_json(out: Dict[str, Any]) -> Dict[str, Any]:
    for column, key in JSON_COLUMNS.items():
        if column in out:
            out[key] = json.loads(out.pop(column) or "{}")
    return out


def run_from_row(row) -> Dict[str, Any]:
    return _decode_json(row_to_dict(row))


def record_from_row(row) -> Dict[str, Any]:
    """A stored benchmark record with ``success`` as bool and reals restored.

    A NULL min SR on a successful run means nothing movable was left to push
    (infinite); on a failed run it is undefined (nan).
    """
    out = _decode_json(row_to_dict(row))
    if not out:
        return out
    out["success"] = bool(out["success"])
    out["min_sr"] = (math.inf if out["success"] else math.nan) if out["min_sr"] is None else float(out["min_sr"])
    out["volume"] = math.nan if out["volume"] is None else float(out["volume"])
    return out
