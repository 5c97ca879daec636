"""Bowl vertex sweep: SR map and planning time against mesh resolution."""

from __future__ import annotations

import time
from dataclasses import replace
from typing import Dict, List, Sequence

import numpy as np

from config import PlannerConfig
from planner.placement import plan_placement
from robustness.srmap import compute_sr_map
from scene.generators import bowl_scene
from scene.loader import assemble, build_object
from utils.logger import log_info

DEFAULT_VERTICES = (50, 150, 500, 1500)


def fit_exponent(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Slope of the least-squares line through (log x, log y)."""
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.maximum(np.asarray(ys, dtype=float), 1e-9))
    if len(x) < 2:
        raise ValueError("need at least two points to fit an exponent")
    return float(np.polyfit(x, y, 1)[0])


def run_sweep(vertices: Sequence[int], config: PlannerConfig) -> List[Dict[str, float]]:
    rows = []
    for budget in vertices:
        scene = bowl_scene(budget)
        assembly = assemble(scene, contact_tol=config.tolerances.contact)
        bowl_mesh = assembly.placed[-1].world
        started = time.perf_counter()
        srmap = compute_sr_map(assembly, config.density)
        sr_ms = (time.perf_counter() - started) * 1000.0
        result = plan_placement(assembly, build_object(scene.queue[0]), replace(config, variant="sr"), srmap=srmap)
        row = {
            "budget": budget,
            "vertices": len(bowl_mesh.vertices),
            "samples": len(srmap),
            "srmap_ms": sr_ms,
            "plan_ms": result.wall_ms,
            "success": result.success,
            "iterations": result.iterations,
        }
        log_info("[complexity] bowl", **row)
        rows.append(row)
    return rows


def sweep_exponents(rows: Sequence[Dict[str, float]]) -> Dict[str, float]:
    v = [r["vertices"] for r in rows]
    return {
        "srmap": fit_exponent(v, [r["srmap_ms"] for r in rows]),
        "plan": fit_exponent(v, [r["plan_ms"] for r in rows]),
    }
