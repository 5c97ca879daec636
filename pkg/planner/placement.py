"""Contact-first placement loop and its variants.

    while attempts remain:
        sample two scene points from the robustness map
        pick an object feature pair able to touch both
        build the pose that puts the pair on the points
        keep the pose if it is penetration-free and statically stable

``sr`` weights samples by robustness, ``uniform`` samples them uniformly and
``chance`` skips the contact reasoning altogether and tries random poses.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Dict, List, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from config import PlannerConfig
from errors import MatchingError, NoCandidates
from geometry.primitives import Pose
from planner.matching import SceneContactSample, enumerate_feature_pairs, match_pair, pick_pair
from planner.pose import candidate_poses
from planner.sampling import SamplerState, init_Q0, sample_pair
from planner.validation import Accepted, Rejected, validate_pose
from robustness.srmap import SRMap, compute_sr_map, robustness_summary
from scene.assembly import Assembly, PolyObject
from statics.equilibrium import check_equilibrium
from utils.logger import log_debug, log_info
from utils.rng import make_rng, split_seeds
from utils.timing import lap

NO_FEATURES = "NoFeatures"
NO_MATCH = "NoMatch"


@dataclass(frozen=True)
class PlacementResult:
    object_name: str
    pose: Pose
    accepted: Accepted
    iterations: int
    wall_ms: float
    min_sr: float
    median_sr: float
    volume: float
    srmap: SRMap
    variant: str
    seed: int
    histogram: Dict[str, int] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    pair_kind: str = ""

    @property
    def assembly(self) -> Assembly:
        return self.accepted.assembly

    @property
    def success(self) -> bool:
        return True


@dataclass(frozen=True)
class Failure:
    object_name: str
    iterations: int
    wall_ms: float
    reason: str
    variant: str
    seed: int
    histogram: Dict[str, int] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return False


def _sample(srmap: SRMap, index: int) -> SceneContactSample:
    return SceneContactSample(
        srmap.positions[index], srmap.normals[index], int(srmap.owners[index]), int(srmap.faces[index])
    )


def _finish(
    obj: PolyObject,
    accepted: Accepted,
    iterations: int,
    started: float,
    config: PlannerConfig,
    histogram: Counter,
    timings: Dict[str, float],
    pair_kind: str = "",
) -> PlacementResult:
    with lap(timings, "srmap_refresh"):
        srmap = compute_sr_map(accepted.assembly, config.density)
    summary = robustness_summary(srmap.subset(~srmap.fixed))
    return PlacementResult(
        object_name=obj.name,
        pose=accepted.pose,
        accepted=accepted,
        iterations=iterations,
        wall_ms=(time.perf_counter() - started) * 1000.0,
        min_sr=summary["min"],
        median_sr=summary["median"],
        volume=accepted.assembly.volume(),
        srmap=srmap,
        variant=config.variant,
        seed=config.seed,
        histogram=dict(histogram),
        timings=dict(timings),
        pair_kind=pair_kind,
    )


def plan_placement(
    assembly: Assembly,
    obj: PolyObject,
    config: PlannerConfig,
    rng: np.random.Generator | None = None,
    srmap: SRMap | None = None,
) -> PlacementResult | Failure:
    """Search for a stable, penetration-free pose of ``obj`` on ``assembly``."""
    rng = rng if rng is not None else make_rng(config.seed)
    started = time.perf_counter()
    histogram: Counter = Counter()
    timings: Dict[str, float] = {}

    if config.variant == "chance":
        return _plan_chance(assembly, obj, config, rng, started, histogram, timings)

    if srmap is None:
        with lap(timings, "srmap"):
            srmap = compute_sr_map(assembly, config.density)
    scale, centroid = assembly.scale_and_centroid()
    state = SamplerState(
        Q0=init_Q0(srmap, config.target_prob),
        decay=config.decay,
        fixed_decay=config.fixed_decay,
        scene_scale=scale,
        scene_centroid=centroid,
        allow_fixed_support=config.allow_fixed_support or not assembly.non_fixed_ids(),
        uniform=config.variant == "uniform",
    )

    for iteration in range(1, config.max_iterations + 1):
        with lap(timings, "sampling"):
            try:
                ia, ib = sample_pair(srmap, state, rng)
            except NoCandidates as exc:
                return Failure(obj.name, iteration - 1, _ms(started), str(exc), config.variant, config.seed, dict(histogram), timings)
        Q = state.Q
        state.step()
        a, b = _sample(srmap, ia), _sample(srmap, ib)
        L = float(np.linalg.norm(a.position - b.position))

        with lap(timings, "matching"):
            pairs = enumerate_feature_pairs(obj.mesh, a, b, L, config.tolerances.afford_deg)
            if not pairs:
                histogram[NO_FEATURES] += 1
                continue
            try:
                pair = match_pair(obj.mesh, obj.com, pick_pair(pairs, rng))
            except MatchingError:
                histogram[NO_MATCH] += 1
                continue

        with lap(timings, "pose"):
            candidates = candidate_poses(obj.mesh, a, b, pair)
        log_debug("[planner] candidates", it=iteration, Q=Q, L=L, kind=pair.kind, candidates=len(candidates))
        for candidate in candidates:
            outcome = validate_pose(obj, candidate.pose, assembly, config, timings)
            if isinstance(outcome, Accepted):
                return _finish(obj, outcome, iteration, started, config, histogram, timings, pair.kind)
            histogram[outcome.stage] += 1

    return Failure(
        obj.name, config.max_iterations, _ms(started), "iteration limit reached", config.variant, config.seed, dict(histogram), timings
    )


def _ms(started: float) -> float:
    return (time.perf_counter() - started) * 1000.0


def _plan_chance(
    assembly: Assembly,
    obj: PolyObject,
    config: PlannerConfig,
    rng: np.random.Generator,
    started: float,
    histogram: Counter,
    timings: Dict[str, float],
) -> PlacementResult | Failure:
    """Uniform random poses around the scene objects."""
    lo, hi = assembly.bounds(movable_only=True)
    radius = obj.radius
    lo, hi = lo - radius, hi + radius
    for iteration in range(1, config.max_iterations + 1):
        with lap(timings, "pose"):
            R = Rotation.random(random_state=rng).as_matrix()
            centre = rng.uniform(lo, hi)
            pose = Pose(R, centre - R @ obj.com)
        outcome = validate_pose(obj, pose, assembly, config, timings)
        if isinstance(outcome, Accepted):
            return _finish(obj, outcome, iteration, started, config, histogram, timings)
        histogram[outcome.stage] += 1
    return Failure(
        obj.name, config.max_iterations, _ms(started), "iteration limit reached", config.variant, config.seed, dict(histogram), timings
    )


def run_variant(variant: str, assembly: Assembly, obj: PolyObject, config: PlannerConfig) -> PlacementResult | Failure:
    return plan_placement(assembly, obj, replace(config, variant=variant))


def _better(candidate: PlacementResult, best: PlacementResult, selection: str) -> bool:
    if candidate.min_sr != best.min_sr:
        return candidate.min_sr > best.min_sr
    if selection == "volume":
        return candidate.volume < best.volume
    return candidate.median_sr > best.median_sr


def plan_best(assembly: Assembly, obj: PolyObject, config: PlannerConfig) -> PlacementResult | Failure:
    """Best of ``config.restarts`` independent searches (largest min SR, then the selection rule)."""
    best: PlacementResult | None = None
    last_failure: Failure | None = None
    srmap = None if config.variant == "chance" else compute_sr_map(assembly, config.density)
    for child in split_seeds(config.seed, config.restarts):
        result = plan_placement(assembly, obj, config, make_rng(child), srmap)
        if isinstance(result, Failure):
            last_failure = result
            continue
        if best is None or _better(result, best, config.selection):
            best = result
    if best is not None:
        return best
    return last_failure


def plan_sequence(
    assembly: Assembly,
    objects: Sequence[PolyObject],
    config: PlannerConfig,
    order: str = "given",
) -> List[PlacementResult | Failure]:
    """Place objects one after another; a failed object is skipped.

    ``order="mass"`` draws the next object with odds proportional to its mass.
    """
    rng = make_rng(config.seed)
    remaining = list(objects)
    results: List[PlacementResult | Failure] = []
    current = assembly
    while remaining:
        if order == "mass":
            masses = np.array([o.mass for o in remaining], dtype=float)
            pick = int(rng.choice(len(remaining), p=masses / masses.sum()))
        else:
            pick = 0
        obj = remaining.pop(pick)
        result = plan_placement(current, obj, config, rng)
        results.append(result)
        if isinstance(result, PlacementResult):
            current = result.assembly
            log_info("[planner] placed", object=obj.name, iterations=result.iterations)
        else:
            log_info("[planner] not placed", object=obj.name, reason=result.reason)
    return results


def revalidate(result: PlacementResult, assembly: Assembly, config: PlannerConfig) -> bool:
    """Re-run every check on an accepted pose against the assembly it was planned on."""
    obj = result.accepted.assembly.placed[-1].obj
    outcome = validate_pose(obj, result.pose, assembly, config)
    if isinstance(outcome, Rejected):
        log_debug("[planner] revalidation failed", stage=outcome.stage, detail=outcome.detail)
        return False
    return check_equilibrium(outcome.forces, config.tolerances.equilibrium)
