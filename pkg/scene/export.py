"""SR map export as an ASCII PLY point cloud.

Finite values go through a warm colormap over [0, 99th percentile]; values
above the cap saturate and infinite ones are black.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib import colormaps

from robustness.srmap import SRMap

COLORMAP = "YlOrRd"
CAP_PERCENTILE = 99.0


def sr_colors(values, cap: float | None = None) -> tuple[np.ndarray, float]:
    """(N, 3) uint8 colours and the upper colormap bound used."""
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    if cap is None:
        cap = float(np.percentile(values[finite], CAP_PERCENTILE)) if finite.any() else 0.0
    colors = np.zeros((len(values), 3), dtype=np.uint8)
    if finite.any():
        scaled = np.clip(values[finite] / cap, 0.0, 1.0) if cap > 0 else np.zeros(int(finite.sum()))
        rgba = colormaps[COLORMAP](scaled)
        colors[finite] = np.round(rgba[:, :3] * 255).astype(np.uint8)
    return colors, cap


def export_sr_map(srmap: SRMap, path) -> Path:
    path = Path(path)
    colors, cap = sr_colors(srmap.values)
    n = len(srmap)
    header = [
        "ply",
        "format ascii 1.0",
        f"comment colormap {COLORMAP}",
        "comment sr_min 0",
        f"comment sr_max {cap:.9g}",
        f"comment sr_infinite {int(np.sum(~srmap.finite))}",
        f"element vertex {n}",
        "property float x",
        "property float y",
        "property float z",
        "property float nx",
        "property float ny",
        "property float nz",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        "property float sr",
        "end_header",
    ]
    lines = []
    for p, nrm, c, v in zip(srmap.positions, srmap.normals, colors, srmap.values):
        value = "inf" if not np.isfinite(v) else f"{v:.9g}"
        lines.append(
            f"{p[0]:.9g} {p[1]:.9g} {p[2]:.9g} {nrm[0]:.6g} {nrm[1]:.6g} {nrm[2]:.6g} {c[0]} {c[1]} {c[2]} {value}"
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(header + lines) + "\n", encoding="ascii")
    return path
