import numpy as np
import pytest

from tacpress import tactile
from tacpress.errors import NonpositiveThreshold
from tacpress.tactile import (
    ContactPatch,
    Finger,
    cloud_from_record,
    cloud_to_record,
    center_of_pressure,
    compute_displacements,
    interaction_force,
    pad_grid_pitch,
    pad_rest_grid,
    press_mask,
    simulate_deformation,
    summarize,
    undeformed_cloud,
)


def random_cloud(rng, max_indent=0.8):
    rest = pad_rest_grid()
    current = rest.copy()
    current[:, :2] += rng.uniform(-0.05, 0.05, size=(tactile.POINT_COUNT, 2))
    current[:, 2] -= rng.uniform(0.0, max_indent, size=tactile.POINT_COUNT)
    return tactile.TactileCloud(finger=Finger.INDEX, rest=rest, current=current)


def test_pad_grid_shape_and_symmetry():
    grid = pad_rest_grid()
    assert grid.shape == (415, 3)
    assert np.all(grid[:, 2] == 0.0)
    # inside the ellipse
    assert np.all((grid[:, 0] / 8.0) ** 2 + (grid[:, 1] / 5.0) ** 2 <= 1.0 + 1e-12)
    # symmetric under 180 degree rotation, so the centroid is the origin
    pts = {tuple(np.round(p, 9)) for p in grid[:, :2]}
    assert pts == {tuple(np.round(-p, 9)) for p in grid[:, :2]}
    assert np.allclose(grid[:, :2].mean(axis=0), 0.0, atol=1e-12)


def test_displacements_identity_case():
    cloud = undeformed_cloud(Finger.THUMB)
    assert np.all(compute_displacements(cloud) == 0.0)


def test_displacements_single_point():
    cloud = undeformed_cloud(Finger.THUMB)
    cloud.current[7, 2] -= 0.3
    disp = compute_displacements(cloud)
    assert np.allclose(disp[7], [0.0, 0.0, -0.3])
    assert np.count_nonzero(disp) == 1


def test_displacements_match_subtraction_oracle():
    rng = np.random.default_rng(42)
    cloud = random_cloud(rng)
    disp = compute_displacements(cloud)
    # element-wise oracle
    for i in range(0, 415, 17):
        for a in range(3):
            assert disp[i, a] == cloud.current[i, a] - cloud.rest[i, a]


def test_press_mask_zero_and_boundary():
    disp = np.zeros((415, 3))
    assert press_mask(disp, 0.05).pressed_count == 0
    disp[3] = [0.0, 0.0, -0.05]  # magnitude exactly delta -> not pressed
    mask = press_mask(disp, 0.05)
    assert not mask.flags[3]
    disp[3, 2] = -0.0500001
    assert press_mask(disp, 0.05).flags[3]


def test_press_mask_matches_per_point_oracle():
    rng = np.random.default_rng(1)
    disp = rng.normal(scale=0.05, size=(415, 3))
    mask = press_mask(disp, 0.05)
    for i in range(415):
        assert mask.flags[i] == (np.sqrt(np.sum(disp[i] ** 2)) > 0.05)


def test_press_mask_rejects_nonpositive_delta():
    with pytest.raises(NonpositiveThreshold):
        press_mask(np.zeros((415, 3)), 0.0)
    with pytest.raises(NonpositiveThreshold):
        press_mask(np.zeros((415, 3)), -0.1)


def test_interaction_force_empty_and_direct_sum():
    disp = np.zeros((415, 3))
    mask = press_mask(disp, 0.05)
    assert interaction_force(disp, mask) == 0.0
    disp[0, 2] = -0.1
    disp[1, 2] = -0.2
    disp[2, 2] = -0.3
    mask = press_mask(disp, 0.05)
    assert interaction_force(disp, mask) == pytest.approx(0.6, abs=1e-15)


def test_interaction_force_masked_sum_oracle():
    rng = np.random.default_rng(7)
    disp = rng.normal(scale=0.1, size=(415, 3))
    disp[:, 2] = -np.abs(disp[:, 2])
    mask = press_mask(disp, 0.05)
    oracle = sum(abs(disp[i, 2]) for i in range(415) if mask.flags[i])
    assert interaction_force(disp, mask) == pytest.approx(oracle, rel=0, abs=1e-12)


def test_cop_no_press_is_pad_center():
    cloud = undeformed_cloud(Finger.MIDDLE)
    mask = press_mask(compute_displacements(cloud), 0.05)
    assert np.allclose(center_of_pressure(cloud, mask), [0.0, 0.0], atol=1e-12)


def test_cop_two_point_mean():
    rest = pad_rest_grid().copy()
    rest.setflags(write=True)
    # move two rest points to known xy, press only those
    rest[0, :2] = [1.0, 0.0]
    rest[1, :2] = [3.0, 0.0]
    current = rest.copy()
    current[0, 2] -= 0.5
    current[1, 2] -= 0.5
    cloud = tactile.TactileCloud(finger=Finger.THUMB, rest=rest, current=current)
    mask = press_mask(compute_displacements(cloud), 0.05)
    assert mask.pressed_count == 2
    assert np.allclose(center_of_pressure(cloud, mask), [2.0, 0.0], atol=1e-12)


def test_cop_weighted_mean_oracle():
    rng = np.random.default_rng(3)
    cloud = random_cloud(rng)
    mask = press_mask(compute_displacements(cloud), 0.3)
    assert 0 < mask.pressed_count < 415
    num = np.zeros(2)
    for i in range(415):
        if mask.flags[i]:
            num += cloud.current[i, :2]
    oracle = num / mask.pressed_count
    assert np.allclose(center_of_pressure(cloud, mask), oracle, atol=1e-12)


def test_deformation_zero_depth_no_change():
    rest = undeformed_cloud(Finger.INDEX)
    out = simulate_deformation(rest, ContactPatch(np.array([1.0, 1.0]), 0.0, 2.0))
    assert np.array_equal(out.current, rest.rest)


def test_deformation_matches_bump_formula():
    rest = undeformed_cloud(Finger.INDEX)
    patch = ContactPatch(np.array([2.0, -1.0]), 0.4, 1.3)
    out = simulate_deformation(rest, patch)
    for i in range(0, 415, 13):
        p = rest.rest[i]
        d2 = (p[0] - 2.0) ** 2 + (p[1] + 1.0) ** 2
        expect = -0.4 * np.exp(-d2 / (2 * 1.3**2))
        assert out.current[i, 2] == pytest.approx(expect, abs=1e-15)
        assert out.current[i, 0] == p[0] and out.current[i, 1] == p[1]


def test_deformation_small_radius_localizes_cop():
    grid = pad_rest_grid()
    target = grid[100, :2].copy()
    rest = undeformed_cloud(Finger.THUMB)
    patch = ContactPatch(target, 0.5, 0.25 * pad_grid_pitch())
    s = summarize(simulate_deformation(rest, patch), 0.05)
    assert s.pressed_count >= 1
    assert np.linalg.norm(s.cop_xy - target) <= pad_grid_pitch() / 2


def test_deformation_centered_patch_gives_centered_cop():
    rest = undeformed_cloud(Finger.THUMB)
    patch = ContactPatch(np.array([0.0, 0.0]), 0.5, 2.0)
    s = summarize(simulate_deformation(rest, patch), 0.05)
    assert s.pressed_count > 0
    assert np.allclose(s.cop_xy, [0.0, 0.0], atol=1e-12)


def test_summarize_composition_and_determinism():
    rest = undeformed_cloud(Finger.THUMB)
    patch = ContactPatch(np.array([1.5, 0.5]), 0.3, 0.9)
    a = summarize(simulate_deformation(rest, patch), 0.01)
    b = summarize(simulate_deformation(rest, patch), 0.01)
    assert a.force_z == b.force_z
    assert np.array_equal(a.cop_xy, b.cop_xy)
    assert a.pressed_count == b.pressed_count
    with pytest.raises(NonpositiveThreshold):
        summarize(simulate_deformation(rest, patch), -1.0)


def test_locality_of_subthreshold_points():
    rng = np.random.default_rng(11)
    rest = undeformed_cloud(Finger.INDEX)
    cloud = simulate_deformation(rest, ContactPatch(np.array([0.5, 0.5]), 0.4, 1.0))
    delta = 0.05
    s0 = summarize(cloud, delta)
    assert s0.pressed_count > 0
    # nudge a point that stays at or below the threshold
    mask = press_mask(compute_displacements(cloud), delta)
    quiet = np.nonzero(~mask.flags)[0][5]
    cloud.current[quiet, 2] = cloud.rest[quiet, 2] - delta  # exactly delta: still off
    s1 = summarize(cloud, delta)
    assert s1.force_z == s0.force_z
    assert np.array_equal(s1.cop_xy, s0.cop_xy)


def test_force_monotone_in_pressed_depth():
    rest = undeformed_cloud(Finger.INDEX)
    cloud = simulate_deformation(rest, ContactPatch(np.array([0.0, 0.0]), 0.3, 1.0))
    delta = 0.05
    mask = press_mask(compute_displacements(cloud), delta)
    f0 = interaction_force(compute_displacements(cloud), mask)
    i = np.nonzero(mask.flags)[0][0]
    cloud.current[i, 2] -= 0.05
    f1 = interaction_force(compute_displacements(cloud), mask)
    assert f1 > f0


def test_cop_inside_convex_hull_of_pressed_points():
    rng = np.random.default_rng(5)
    for _ in range(50):
        cloud = random_cloud(rng)
        mask = press_mask(compute_displacements(cloud), 0.3)
        if mask.pressed_count == 0:
            continue
        cop = center_of_pressure(cloud, mask)
        pts = cloud.current[mask.flags][:, :2]
        # mean of points is inside their convex hull: check support functions
        for theta in np.linspace(0, 2 * np.pi, 16, endpoint=False):
            d = np.array([np.cos(theta), np.sin(theta)])
            assert cop @ d <= (pts @ d).max() + 1e-9


def test_translation_equivariance():
    rng = np.random.default_rng(9)
    cloud = random_cloud(rng)
    delta = 0.1
    s0 = summarize(cloud, delta)
    shift = np.array([2.5, -1.25])
    moved = tactile.TactileCloud(
        finger=cloud.finger,
        rest=cloud.rest + np.append(shift, 0.0),
        current=cloud.current + np.append(shift, 0.0),
    )
    s1 = summarize(moved, delta)
    assert s1.force_z == pytest.approx(s0.force_z, abs=1e-12)
    assert np.allclose(s1.cop_xy - s0.cop_xy, shift, atol=1e-9)


def test_cloud_record_roundtrip():
    rest = undeformed_cloud(Finger.MIDDLE, timestamp=1.25)
    cloud = simulate_deformation(rest, ContactPatch(np.array([1.0, 0.0]), 0.2, 0.7))
    cloud.timestamp = 1.25
    rec = cloud_to_record(cloud)
    back = cloud_from_record(rec)
    assert back.finger == Finger.MIDDLE
    assert back.timestamp == 1.25
    assert np.allclose(back.rest, cloud.rest)
    assert np.allclose(back.current, cloud.current)


def test_validate_rejects_outward_motion():
    cloud = undeformed_cloud(Finger.THUMB)
    cloud.current[0, 2] += 0.1
    with pytest.raises(ValueError):
        cloud.validate()
