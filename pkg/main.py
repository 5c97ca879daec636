import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List

from config import VARIANTS, get_settings, planner_config
from errors import PlacerError, SceneError
from planner.placement import Failure, PlacementResult, plan_best, plan_sequence
from robustness.srmap import compute_sr_map, robustness_summary
from scene.export import export_sr_map
from scene.generators import generate_scene, list_scenes
from scene.loader import ObjectSpec, SceneFile, assemble, build_object, read_scene, save_scene
from tools.bench import run_benchmark, summarize
from tools.complexity import DEFAULT_VERTICES, run_sweep, sweep_exponents
from utils.formatting import format_force, format_ms, format_rate, format_table
from utils.logger import log_error, log_info

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_PLACED = 2


def _scene(ref: str) -> tuple[SceneFile, Path | None]:
    """A scene file path or the name of a built-in scene."""
    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        return read_scene(path), path.parent
    return generate_scene(ref), None


def _json_number(value: float) -> Any:
    return value if math.isfinite(value) else str(value)


def _record(result: PlacementResult | Failure) -> Dict[str, Any]:
    record: Dict[str, Any] = {
        "object": result.object_name,
        "success": result.success,
        "variant": result.variant,
        "seed": result.seed,
        "iterations": result.iterations,
        "wall_ms": round(result.wall_ms, 3),
        "histogram": result.histogram,
        "timings": {k: round(v, 3) for k, v in result.timings.items()},
    }
    if isinstance(result, PlacementResult):
        record.update(
            min_sr=_json_number(result.min_sr),
            median_sr=_json_number(result.median_sr),
            volume=result.volume,
            pair_kind=result.pair_kind,
            quaternion=[float(x) for x in result.pose.quaternion()],
            translation=[float(x) for x in result.pose.translation],
        )
    else:
        record["reason"] = result.reason
    return record


def _placed_spec(spec: ObjectSpec, result: PlacementResult) -> ObjectSpec:
    return replace(
        spec,
        quaternion=[float(x) for x in result.pose.quaternion()],
        translation=[float(x) for x in result.pose.translation],
    )


def cmd_plan(args, settings) -> int:
    scene, base = _scene(args.scene)
    config = planner_config(
        settings,
        variant=args.variant,
        seed=args.seed,
        max_iterations=args.max_iters,
        tension_threshold=args.tension_thresh,
        density=args.density,
        restarts=args.restarts,
        selection=args.selection,
        allow_fixed_support=args.allow_fixed or None,
    )
    assembly = assemble(scene, base, config.tolerances.contact)
    if not scene.queue:
        raise SceneError("scene has no queued object to place")
    specs = scene.queue if args.all else [scene.queued(args.object) if args.object else scene.queue[0]]

    if len(specs) == 1:
        results: List[PlacementResult | Failure] = [plan_best(assembly, build_object(specs[0], base), config)]
    else:
        results = plan_sequence(assembly, [build_object(s, base) for s in specs], config, order=args.order)

    for result in results:
        print(json.dumps(_record(result), sort_keys=True))

    if args.out:
        by_name = {s.name: s for s in specs}
        placed = [_placed_spec(by_name[r.object_name], r) for r in results if isinstance(r, PlacementResult)]
        out_scene = replace(
            scene,
            objects=scene.objects + placed,
            queue=[s for s in scene.queue if s.name not in {p.name for p in placed}],
        )
        save_scene(out_scene, args.out)
        log_info(f"scene with placements saved to {args.out}")
    return EXIT_OK if all(r.success for r in results) else EXIT_NOT_PLACED


def cmd_srmap(args, settings) -> int:
    scene, base = _scene(args.scene)
    density = args.density or settings.density
    assembly = assemble(scene, base)
    srmap = compute_sr_map(assembly, density)
    summary = robustness_summary(srmap.subset(~srmap.fixed))
    log_info(
        "[srmap] summary",
        samples=summary["samples"],
        min=format_force(summary["min"]),
        median=format_force(summary["median"]),
        infinite=summary["infinite"],
    )
    if args.out:
        export_sr_map(srmap, args.out)
        log_info(f"SR map written to {args.out}")
    return EXIT_OK


def cmd_bench(args, settings) -> int:
    config = planner_config(settings, seed=args.seed, max_iterations=args.max_iters, density=args.density)
    records = run_benchmark(
        args.scenes,
        args.variants,
        args.runs,
        config,
        csv_path=args.csv,
        workers=args.workers or settings.workers,
        database_url=None if args.no_db else settings.results_db_url,
    )
    rows = summarize(records)
    for row in rows:
        row["success_rate"] = format_rate(row["success_rate"])
        row["mean_ms"] = format_ms(row["mean_ms"])
    print(
        format_table(
            rows,
            ["scene", "variant", "runs", "success_rate", "mean_ms", "median_iterations", "mean_min_sr", "mean_volume", "unsound"],
        )
    )
    return EXIT_OK


def cmd_complexity(args, settings) -> int:
    config = planner_config(settings, seed=args.seed, density=args.density)
    rows = run_sweep(args.vertices, config)
    print(format_table(rows, ["budget", "vertices", "samples", "srmap_ms", "plan_ms", "success", "iterations"]))
    slopes = sweep_exponents(rows)
    log_info(f"log-log exponent: srmap={slopes['srmap']:.3f} plan={slopes['plan']:.3f}")
    return EXIT_OK


def cmd_gen(args, settings) -> int:
    save_scene(generate_scene(args.name), args.out)
    log_info(f"scene {args.name} saved to {args.out}")
    return EXIT_OK


def cmd_scenes(args, settings) -> int:
    for name in list_scenes():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="placer", description="Stable object placement from static robustness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a placement for a queued object")
    p.add_argument("scene", help="scene JSON file or built-in scene name")
    p.add_argument("object", nargs="?", help="queued object name (default: first in queue)")
    p.add_argument("--all", action="store_true", help="place every queued object in sequence")
    p.add_argument("--order", choices=["given", "mass"], default="given")
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--tension-thresh", type=float)
    p.add_argument("--density", type=float)
    p.add_argument("--restarts", type=int)
    p.add_argument("--selection", choices=["median_sr", "volume"])
    p.add_argument("--allow-fixed", action="store_true", help="sample points on fixed supports too")
    p.add_argument("--out", help="save the scene with placed objects")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("srmap", help="compute and export the static robustness map")
    p.add_argument("scene")
    p.add_argument("--density", type=float)
    p.add_argument("--out", help="PLY output path")
    p.set_defaults(func=cmd_srmap)

    p = sub.add_parser("bench", help="run the benchmark sweep")
    p.add_argument("--scenes", nargs="+", default=["cube", "stack", "table"])
    p.add_argument("--variants", nargs="+", choices=VARIANTS, default=list(VARIANTS))
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--density", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--csv", default="bench.csv")
    p.add_argument("--no-db", action="store_true", help="do not store records in the results database")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("complexity", help="bowl vertex sweep")
    p.add_argument("--vertices", nargs="+", type=int, default=list(DEFAULT_VERTICES))
    p.add_argument("--seed", type=int)
    p.add_argument("--density", type=float)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("gen", help="write a built-in scene to a file")
    p.add_argument("name")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("scenes", help="list built-in scenes")
    p.set_defaults(func=cmd_scenes)
    return parser


def main(argv: List[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
        return args.func(args, settings)
    except (PlacerError, ValueError) as exc:
        log_error(f"{type(exc).__name__}: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
