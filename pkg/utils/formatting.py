import math
from typing import Any, Dict, List, Sequence


def format_force(value: float) -> str:
    """Force in newtons; infinity prints as ``inf``."""
    try:
        value = float(value)
    except (TypeError, ValueError):
        return "-"
    if math.isnan(value):
        return "-"
    if math.isinf(value):
        return "inf"
    return f"{value:.3f}"


def format_ms(value: float) -> str:
    try:
        value = float(value)
    except (TypeError, ValueError):
        return "-"
    if value >= 1000:
        return f"{value / 1000:.2f} s"
    return f"{value:.1f} ms"


def format_rate(value: float) -> str:
    try:
        return f"{100.0 * float(value):.0f}%"
    except (TypeError, ValueError):
        return "-"


def format_cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return format_force(value)
    return str(value)


def format_table(rows: Sequence[Dict[str, Any]], columns: List[str]) -> str:
    """Plain left-aligned text table."""
    cells = [[format_cell(row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in cells]
    return "\n".join(lines)
