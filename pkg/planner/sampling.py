"""Robustness-weighted choice of scene contact points.

Weights are min(r, Q_k) with a saturation Q_k = Q0 * lambda**k that decays
every iteration, so strong points dominate early and the map flattens to
uniform later. Fixed-support samples (infinite robustness by definition) are
weighted by a Gaussian around the assembly centroid whose width grows with k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.optimize import bisect

from errors import NoCandidates
from robustness.srmap import SRMap
from utils.logger import log_debug

TOP_SET_RTOL = 1e-3


@dataclass
class SamplerState:
    Q0: float
    decay: float = 0.99
    fixed_decay: float = 0.5
    k: int = 0
    scene_scale: float = 1.0
    scene_centroid: np.ndarray | None = None
    allow_fixed_support: bool = False
    uniform: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay must be in (0, 1)")
        if not 0.0 < self.fixed_decay <= 1.0:
            raise ValueError("fixed_decay must be in (0, 1]")
        if self.Q0 <= 0:
            raise ValueError("Q0 must be positive")
        if self.scene_centroid is None:
            self.scene_centroid = np.zeros(3)

    @property
    def Q(self) -> float:
        return self.Q0 * self.decay ** self.k

    def step(self) -> None:
        self.k += 1


def _candidates(srmap: SRMap, state: SamplerState) -> np.ndarray:
    return np.ones(len(srmap), dtype=bool) if state.allow_fixed_support else ~srmap.fixed


def point_probabilities(srmap: SRMap, state: SamplerState) -> np.ndarray:
    if len(srmap) == 0:
        raise NoCandidates("robustness map is empty")
    use = _candidates(srmap, state)
    weights = np.zeros(len(srmap))
    movable = use & ~srmap.fixed
    if state.uniform:
        weights[use] = 1.0
    else:
        weights[movable] = np.minimum(srmap.values[movable], state.Q)
        fixed = use & srmap.fixed
        if fixed.any():
            top = weights[movable].max() / weights[movable].sum() if weights[movable].sum() > 0 else 1.0
            d2 = np.sum((srmap.positions[fixed] - state.scene_centroid) ** 2, axis=1)
            spread = state.fixed_decay ** state.k / state.scene_scale ** 2
            weights[fixed] = top * np.exp(-spread * d2)
            # the movable weights become probabilities before the fixed ones join
            if weights[movable].sum() > 0:
                weights[movable] = weights[movable] / weights[movable].sum()
    total = weights.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise NoCandidates("all sampling weights are zero")
    return weights / total


def init_Q0(srmap: SRMap, target_prob: float = 0.10) -> float:
    """Saturation at which the most robust finite point set gets ``target_prob``.

    The set is every movable sample within ``TOP_SET_RTOL`` of r_max, so a
    whole face of equally strong points shares the target instead of each of
    its samples. Its probability grows with Q up to r_max and, when infinite
    samples exist, falls again past r_max. The falling branch is searched
    first, then the rising one; Q0 = r_max when neither reaches the target.
    """
    movable = ~srmap.fixed
    values = srmap.values[movable]
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return 1.0
    r_max = float(finite.max())
    if r_max <= 0.0:
        return 1.0
    top_count = int(np.count_nonzero(np.isfinite(values) & (values >= r_max * (1.0 - TOP_SET_RTOL))))

    def prob(Q: float) -> float:
        w = np.minimum(values, Q)
        return float(top_count * min(r_max, Q) / w.sum())

    def gap(Q: float) -> float:
        return prob(Q) - target_prob

    if np.isinf(values).any():
        hi = r_max
        while gap(hi) > 0 and hi < r_max * 1e12:
            hi *= 2.0
        if gap(r_max) > 0 > gap(hi):
            return float(bisect(gap, r_max, hi, xtol=1e-12 * hi))
    lo = r_max * 1e-12
    if gap(lo) < 0 < gap(r_max):
        return float(bisect(gap, lo, r_max, xtol=1e-12 * r_max))
    if abs(gap(r_max)) <= 1e-12:
        return r_max
    log_debug("[sampling] target unreachable", target=target_prob, p_rmax=prob(r_max), r_max=r_max, top=top_count)
    return r_max


def sample_pair(srmap: SRMap, state: SamplerState, rng: np.random.Generator) -> Tuple[int, int]:
    """Two distinct sample indices drawn without replacement."""
    p = point_probabilities(srmap, state)
    if np.count_nonzero(p) < 2:
        raise NoCandidates("need two samples with positive probability")
    a, b = rng.choice(len(p), size=2, replace=False, p=p)
    return int(a), int(b)
