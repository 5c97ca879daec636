from __future__ import annotations

import math

import numpy as np
import pytest

from errors import NoCandidates
from planner.sampling import SamplerState, init_Q0, point_probabilities, sample_pair
from robustness.srmap import SRMap, compute_sr_map
from scene.generators import generate_scene
from scene.loader import assemble


def make_map(values, fixed=None, positions=None) -> SRMap:
    values = np.asarray(values, dtype=float)
    n = len(values)
    fixed = np.zeros(n, bool) if fixed is None else np.asarray(fixed, bool)
    if positions is None:
        positions = np.column_stack([np.arange(n, dtype=float), np.zeros(n), np.zeros(n)])
    normals = np.tile([0.0, 0.0, 1.0], (n, 1))
    return SRMap(np.asarray(positions, float), normals, np.ones(n, int), np.zeros(n, int), values, fixed, 10.0)


@pytest.mark.parametrize(
    "values, target, expected",
    [
        ([1, 1, 1, 9], 0.1, 9.0),
        ([1, 9], 0.9, 9.0),
        ([1, 2, math.inf], 0.1, 17.0),
    ],
)
def test_init_q0(values, target, expected):
    assert init_Q0(make_map(values), target) == pytest.approx(expected, rel=1e-9)


def test_init_q0_reaches_target_on_rising_branch():
    srmap = make_map([1.0, 2.0, 3.0, 4.0, 10.0])
    Q0 = init_Q0(srmap, 0.4)
    p = point_probabilities(srmap, SamplerState(Q0=Q0))
    assert p[-1] == pytest.approx(0.4, abs=1e-9)


def test_init_q0_without_finite_values():
    assert init_Q0(make_map([math.inf, math.inf])) == 1.0


def test_probabilities_saturate_at_q():
    srmap = make_map([1.0, 4.0, math.inf])
    p = point_probabilities(srmap, SamplerState(Q0=2.0))
    assert np.allclose(p, [1 / 5, 2 / 5, 2 / 5])


def test_uniform_variant_ignores_values():
    srmap = make_map([1.0, 4.0, math.inf])
    p = point_probabilities(srmap, SamplerState(Q0=2.0, uniform=True))
    assert np.allclose(p, 1 / 3)


def test_fixed_samples_are_excluded_by_default():
    srmap = make_map([1.0, 2.0, math.inf, math.inf], fixed=[False, False, True, True])
    p = point_probabilities(srmap, SamplerState(Q0=5.0))
    assert np.all(p[2:] == 0.0)
    assert p.sum() == pytest.approx(1.0)


def test_fixed_support_weights_fall_off_with_distance():
    positions = [[0, 0, 0], [0.1, 0, 0], [0.2, 0, 0], [3.0, 0, 0]]
    srmap = make_map([1.0, 2.0, math.inf, math.inf], fixed=[False, False, True, True], positions=positions)
    state = SamplerState(Q0=5.0, allow_fixed_support=True)
    p = point_probabilities(srmap, state)
    assert p.sum() == pytest.approx(1.0)
    assert p[2] > p[3] > 0.0
    # the Gaussian widens as the iterations go by
    for _ in range(10):
        state.step()
    later = point_probabilities(srmap, state)
    assert later[3] / later[2] > p[3] / p[2]


def test_only_fixed_samples_without_permission():
    srmap = make_map([math.inf, math.inf], fixed=[True, True])
    with pytest.raises(NoCandidates):
        point_probabilities(srmap, SamplerState(Q0=1.0))


def test_saturation_decays():
    state = SamplerState(Q0=10.0, decay=0.9)
    for _ in range(3):
        state.step()
    assert state.Q == pytest.approx(10.0 * 0.9**3)


@pytest.mark.parametrize("kwargs", [{"Q0": 0.0}, {"Q0": 1.0, "decay": 1.0}, {"Q0": 1.0, "fixed_decay": 0.0}])
def test_sampler_state_validation(kwargs):
    with pytest.raises(ValueError):
        SamplerState(**kwargs)


def test_sample_pair_is_distinct_and_seeded():
    srmap = make_map([1.0, 2.0, 3.0, 4.0, 5.0])
    state = SamplerState(Q0=3.0)
    pairs = [sample_pair(srmap, state, np.random.default_rng(7)) for _ in range(3)]
    assert pairs[0] == pairs[1] == pairs[2]
    rng = np.random.default_rng(0)
    for _ in range(50):
        a, b = sample_pair(srmap, state, rng)
        assert a != b


def test_sample_pair_needs_two_candidates():
    srmap = make_map([3.0, math.inf], fixed=[False, True])
    with pytest.raises(NoCandidates):
        sample_pair(srmap, SamplerState(Q0=1.0), np.random.default_rng(0))


def test_strong_points_are_drawn_more_often():
    srmap = make_map([1.0] * 9 + [9.0])
    state = SamplerState(Q0=9.0)
    rng = np.random.default_rng(3)
    hits = sum(9 in sample_pair(srmap, state, rng) for _ in range(400))
    # p(strong) = 0.5 per draw, so it lands in most pairs
    assert hits > 250


def test_init_q0_targets_the_whole_strongest_set():
    srmap = make_map([1.0, 1.0, 5.0, 5.0, math.inf, math.inf])
    # 10 / (2 + 10 + 2 Q0) = 0.1
    Q0 = init_Q0(srmap, 0.1)
    assert Q0 == pytest.approx(44.0, rel=1e-9)
    p = point_probabilities(srmap, SamplerState(Q0=Q0))
    assert p[2] + p[3] == pytest.approx(0.1, abs=1e-9)


def test_init_q0_with_zero_robustness_only():
    assert init_Q0(make_map([0.0, 0.0])) == 1.0


def test_stack_weight_goes_to_upward_faces():
    srmap = compute_sr_map(assemble(generate_scene("stack")), density=50.0)
    p = point_probabilities(srmap, SamplerState(Q0=init_Q0(srmap, 0.1)))
    upward = srmap.normals[:, 2] > 0.5
    assert p[upward].sum() > 0.5
