"""Fingertip pressure-pad model: a fixed 415-point cloud on an elliptical
pad, with displacement, press-mask, pseudo-force, and contact-centroid
(CoP) estimation, plus a synthetic Gaussian indentation used by the
simulator in place of real gel deformation.

Conventions (sensor frame): z is the outward pad normal, x the finger long
axis, y completes the right-handed frame. Positions are millimeters. The
pad only indents inward, so pressed points have current z below rest z.
Force is the millimeter-sum of pressed |dz| values ("pseudo-force" units);
it is not calibrated to newtons anywhere in this package.
"""

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import numpy as np

from .errors import NonpositiveThreshold

POINT_COUNT = 415
PAD_HALF_X = 8.0  # mm, long half-axis
PAD_HALF_Y = 5.0  # mm, short half-axis

# Defaults for the synthetic indentation bridge. The press threshold and
# patch radius are calibrated so that the pad's pseudo-force gain matches
# the simulator's contact stiffness (10 units/mm) over the working range
# of indentation depths (0.05-0.35 mm); see config.py.
DEFAULT_PRESS_THRESHOLD = 0.002  # mm
DEFAULT_PATCH_RADIUS = 0.70  # mm


class Finger(IntEnum):
    THUMB = 0
    INDEX = 1
    MIDDLE = 2


FINGER_NAMES = ("thumb", "index", "middle")


def _hex_lattice(pitch: float) -> np.ndarray:
    """Hexagonally packed points inside the pad ellipse, symmetric about
    the origin (rows mirror under 180 degree rotation)."""
    dy = pitch * np.sqrt(3.0) / 2.0
    jmax = int(np.floor(PAD_HALF_Y / dy))
    pts = []
    for j in range(-jmax, jmax + 1):
        y = j * dy
        off = 0.5 * pitch * (j % 2)
        half_w = PAD_HALF_X * np.sqrt(max(0.0, 1.0 - (y / PAD_HALF_Y) ** 2))
        kmax = int(np.floor((half_w + abs(off)) / pitch)) + 1
        for k in range(-kmax, kmax + 1):
            x = (k + 0.5 * (j % 2)) * pitch
            if (x / PAD_HALF_X) ** 2 + (y / PAD_HALF_Y) ** 2 <= 1.0:
                pts.append((x, y))
    return np.array(pts, dtype=np.float64)


@lru_cache(maxsize=1)
def _pad_grid_cached() -> tuple:
    # Scan the lattice pitch downward until at least POINT_COUNT points fit,
    # then trim outermost mirror pairs so the count is exact and the grid
    # stays symmetric (centroid exactly at the origin).
    pitch = 0.62
    pts = _hex_lattice(pitch)
    while len(pts) < POINT_COUNT:
        pitch -= 1e-4
        pts = _hex_lattice(pitch)
    excess = len(pts) - POINT_COUNT
    if excess:
        assert excess % 2 == 0, "lattice must hold an odd point count"
        r = (pts[:, 0] / PAD_HALF_X) ** 2 + (pts[:, 1] / PAD_HALF_Y) ** 2
        canonical = (pts[:, 0] > 1e-12) | ((np.abs(pts[:, 0]) <= 1e-12) & (pts[:, 1] > 1e-12))
        idx = np.nonzero(canonical)[0]
        order = idx[np.lexsort((pts[idx, 1], pts[idx, 0], -r[idx]))]
        drop: set = set()
        for i in order[: excess // 2]:
            drop.add(i)
            # mirror partner
            d = pts + pts[i]
            j = int(np.argmin(d[:, 0] ** 2 + d[:, 1] ** 2))
            drop.add(j)
        keep = np.array([i for i in range(len(pts)) if i not in drop])
        pts = pts[keep]
    assert len(pts) == POINT_COUNT
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    grid = np.zeros((POINT_COUNT, 3), dtype=np.float64)
    grid[:, :2] = pts
    grid.setflags(write=False)
    return grid, float(pitch)


def pad_rest_grid() -> np.ndarray:
    """The fixed (415, 3) rest grid shared by all fingertips, z = 0."""
    return _pad_grid_cached()[0]


def pad_grid_pitch() -> float:
    """Lattice pitch of the rest grid, mm."""
    return _pad_grid_cached()[1]


@dataclass
class TactileCloud:
    """Rest/current point pairs for one fingertip at one instant."""

    finger: Finger
    rest: np.ndarray  # (415, 3) mm
    current: np.ndarray  # (415, 3) mm
    timestamp: float = 0.0

    def validate(self) -> None:
        if self.rest.shape != (POINT_COUNT, 3) or self.current.shape != (POINT_COUNT, 3):
            raise ValueError(f"cloud arrays must be ({POINT_COUNT}, 3)")
        if np.any(self.current[:, 2] > self.rest[:, 2] + 1e-12):
            raise ValueError("pad may only indent inward (current z <= rest z)")


@dataclass
class PressMask:
    flags: np.ndarray  # (415,) bool
    threshold_used: float  # mm

    @property
    def pressed_count(self) -> int:
        return int(np.count_nonzero(self.flags))


@dataclass
class TactileSummary:
    force_z: float  # pseudo-force (mm-sum), >= 0
    cop_xy: np.ndarray  # (2,) mm, sensor frame
    pressed_count: int


@dataclass
class ContactPatch:
    """Synthetic stand-in for a physical contact: a Gaussian indentation."""

    center_xy: np.ndarray  # (2,) mm
    depth: float  # mm, >= 0
    radius: float  # mm, > 0

    def validate(self) -> None:
        if self.radius <= 0.0:
            raise ValueError("patch radius must be positive")
        if self.depth < 0.0:
            raise ValueError("patch depth must be nonnegative")


def undeformed_cloud(finger: Finger, timestamp: float = 0.0) -> TactileCloud:
    grid = pad_rest_grid()
    return TactileCloud(finger=finger, rest=grid, current=grid.copy(), timestamp=timestamp)


def compute_displacements(cloud: TactileCloud) -> np.ndarray:
    """Per-point displacement, current minus rest. Shape (415, 3)."""
    return cloud.current - cloud.rest


def press_mask(displacements: np.ndarray, delta: float) -> PressMask:
    """Points whose displacement magnitude strictly exceeds ``delta``.

    The boundary case (magnitude exactly delta) is not a press.
    """
    if delta <= 0.0:
        raise NonpositiveThreshold(f"delta must be > 0, got {delta}")
    mag = np.linalg.norm(displacements, axis=1)
    return PressMask(flags=mag > delta, threshold_used=float(delta))


def interaction_force(displacements: np.ndarray, mask: PressMask) -> float:
    """Pseudo-force: sum of |dz| over pressed points.

    Only the z-axis contributes; the absolute value keeps the result
    nonnegative under the inward-indentation sign convention.
    """
    return float(np.sum(np.abs(displacements[:, 2]) * mask.flags))


def center_of_pressure(cloud: TactileCloud, mask: PressMask) -> np.ndarray:
    """Contact centroid in the pad plane.

    With no pressed points this is the xy centroid of all rest positions
    (the pad center for the symmetric grid); otherwise the unweighted mean
    of the pressed points' current positions. Only x, y are retained.
    """
    n = mask.pressed_count
    if n == 0:
        return cloud.rest[:, :2].mean(axis=0)
    sel = cloud.current[mask.flags]
    return sel[:, :2].sum(axis=0) / n


def simulate_deformation(rest_cloud: TactileCloud, patch: ContactPatch) -> TactileCloud:
    """Apply a Gaussian indentation bump along -z to the rest cloud."""
    patch.validate()
    rest = rest_cloud.rest
    d2 = np.sum((rest[:, :2] - patch.center_xy) ** 2, axis=1)
    dz = patch.depth * np.exp(-d2 / (2.0 * patch.radius**2))
    current = rest.copy()
    current[:, 2] -= dz
    return TactileCloud(
        finger=rest_cloud.finger, rest=rest, current=current, timestamp=rest_cloud.timestamp
    )


def summarize(cloud: TactileCloud, delta: float) -> TactileSummary:
    """Displacements -> mask -> force and CoP, in one pass."""
    disp = compute_displacements(cloud)
    mask = press_mask(disp, delta)
    return TactileSummary(
        force_z=interaction_force(disp, mask),
        cop_xy=center_of_pressure(cloud, mask),
        pressed_count=mask.pressed_count,
    )


def cloud_to_record(cloud: TactileCloud) -> dict:
    """JSON-lines record for one cloud."""
    return {
        "finger": FINGER_NAMES[cloud.finger],
        "t": cloud.timestamp,
        "rest": cloud.rest.tolist(),
        "cur": cloud.current.tolist(),
    }


def cloud_from_record(rec: dict) -> TactileCloud:
    return TactileCloud(
        finger=Finger(FINGER_NAMES.index(rec["finger"])),
        rest=np.asarray(rec["rest"], dtype=np.float64),
        current=np.asarray(rec["cur"], dtype=np.float64),
        timestamp=float(rec["t"]),
    )
