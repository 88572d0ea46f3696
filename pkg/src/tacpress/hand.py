"""Kinematics of an 11-joint three-finger hand.

Finger layout (hand base frame: x forward, y left, z up):
  thumb  -- 4 joints (yaw + 3 pitch), curls downward to press from above
  index  -- 4 joints (pitch abduction + 3 yaw flexions), curls in from +y
  middle -- 3 joints (3 yaw flexions), curls in from -y

Joint vector order: q = [thumb(4), index(4), middle(3)], radians.

Each fingertip carries a flat elliptical pressure pad. The pose orientation
returned by the FK maps the fingertip control frame to the base frame:
z = outward pad normal (toward the object), x = finger long axis. The
tactile image frame used by the pad readout is this frame rotated by pi
about the pad normal (sensor mounting constant, see sim.contact_in_pad).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import JointLimitViolation, Unreachable
from .tactile import FINGER_NAMES

IK_DAMPING = 1e-2
IK_MAX_ITERS = 100
IK_TOL_MM = 1e-3
IK_FAIL_MM = 0.5


@dataclass
class FingerChain:
    name: str
    base_pos: np.ndarray  # (3,)
    axes: np.ndarray  # (n, 3) unit rotation axes, parent frame
    trans: np.ndarray  # (n, 3) translation after each joint, local frame
    limits: np.ndarray  # (n, 2) radians
    mount: np.ndarray  # (3, 3) distal-link frame -> pad control frame
    posture: np.ndarray | None = None  # preferred redundancy resolution

    @property
    def dof(self) -> int:
        return len(self.axes)

    @property
    def reach(self) -> float:
        return float(np.sum(np.linalg.norm(self.trans, axis=1)))


@dataclass
class HandState:
    q: np.ndarray  # (11,) radians
    joint_velocities: np.ndarray | None = None


@dataclass
class FingertipPoses:
    positions: np.ndarray  # (3, 3) mm, rows in Finger order
    orientations: np.ndarray  # (3, 3, 3) control frame -> base frame

    @property
    def stacked(self) -> np.ndarray:
        """x in R^9: thumb, index, middle positions concatenated."""
        return self.positions.reshape(9)


def _default_chains() -> list:
    z = [0.0, 0.0, 1.0]
    y = [0.0, 1.0, 0.0]
    nz = [0.0, 0.0, -1.0]
    thumb = FingerChain(
        name="thumb",
        base_pos=np.array([-25.0, 0.0, 60.0]),
        axes=np.array([z, y, y, y]),
        trans=np.array([[14.0, 0.0, -6.0], [45.0, 0.0, 0.0], [35.0, 0.0, 0.0], [25.0, 0.0, 0.0]]),
        limits=np.array([[-0.8, 0.8], [-1.3, 2.1], [-1.3, 2.1], [-1.3, 2.1]]),
        mount=np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]),
        posture=np.array([0.0, 0.35, 1.1, -1.0]),
    )
    index = FingerChain(
        name="index",
        base_pos=np.array([5.0, 45.0, -8.0]),
        axes=np.array([y, nz, nz, nz]),
        trans=np.array([[0.0, 0.0, 0.0], [50.0, 0.0, 0.0], [30.0, 0.0, 0.0], [20.0, 0.0, 0.0]]),
        limits=np.array([[-0.6, 0.6], [-0.3, 2.3], [-0.3, 2.3], [-0.3, 2.3]]),
        mount=np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
        posture=np.array([0.0, 0.35, 0.5, 0.15]),
    )
    middle = FingerChain(
        name="middle",
        base_pos=np.array([5.0, -45.0, -8.0]),
        axes=np.array([z, z, z]),
        trans=np.array([[50.0, 0.0, 0.0], [30.0, 0.0, 0.0], [20.0, 0.0, 0.0]]),
        limits=np.array([[-0.3, 2.3], [-0.3, 2.3], [-0.3, 2.3]]),
        mount=np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]]),
        posture=np.array([0.35, 0.5, 0.15]),
    )
    return [thumb, index, middle]


class HandGeometry:
    """Immutable chain constants plus the joint-vector layout."""

    def __init__(self, chains: list | None = None):
        self.chains = chains if chains is not None else _default_chains()
        if [c.name for c in self.chains] != list(FINGER_NAMES):
            raise ValueError("chains must be thumb, index, middle in order")
        dofs = [c.dof for c in self.chains]
        if sum(dofs) != 11:
            raise ValueError(f"joint counts must sum to 11, got {dofs}")
        self.slices = []
        start = 0
        for d in dofs:
            self.slices.append(slice(start, start + d))
            start += d
        self.limits = np.concatenate([c.limits for c in self.chains])

    @classmethod
    def from_json(cls, path) -> "HandGeometry":
        with open(path) as f:
            data = json.load(f)
        chains = []
        for name in FINGER_NAMES:
            c = data["fingers"][name]
            chains.append(
                FingerChain(
                    name=name,
                    base_pos=np.asarray(c["base_pos"], dtype=np.float64),
                    axes=np.asarray(c["axes"], dtype=np.float64),
                    trans=np.asarray(c["trans"], dtype=np.float64),
                    limits=np.asarray(c["limits"], dtype=np.float64),
                    mount=np.asarray(c["mount"], dtype=np.float64),
                    posture=(
                        np.asarray(c["posture"], dtype=np.float64)
                        if c.get("posture") is not None
                        else None
                    ),
                )
            )
        return cls(chains)

    def to_dict(self) -> dict:
        return {
            "fingers": {
                c.name: {
                    "base_pos": c.base_pos.tolist(),
                    "axes": c.axes.tolist(),
                    "trans": c.trans.tolist(),
                    "limits": c.limits.tolist(),
                    "mount": c.mount.tolist(),
                    "posture": None if c.posture is None else c.posture.tolist(),
                }
                for c in self.chains
            }
        }

    def check_limits(self, q: np.ndarray) -> None:
        for j in range(11):
            lo, hi = self.limits[j]
            if q[j] < lo - 1e-9 or q[j] > hi + 1e-9:
                raise JointLimitViolation(j, float(q[j]), float(lo), float(hi))

    def clamp(self, q: np.ndarray) -> tuple[np.ndarray, bool]:
        """Clamp q into the limit box; returns (clamped, was_clamped)."""
        c = np.clip(q, self.limits[:, 0], self.limits[:, 1])
        return c, bool(np.any(c != q))


def _axis_rot(axis: np.ndarray, angle: float) -> np.ndarray:
    x, y, z = axis
    c = np.cos(angle)
    s = np.sin(angle)
    t = 1.0 - c
    return np.array(
        [
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ]
    )


def _finger_fk(chain: FingerChain, q: np.ndarray, want_frames: bool = False):
    """Chain product for one finger.

    Returns (tip_pos, pad_rot) and, when requested, the per-joint world
    origins and axes needed for the Jacobian.
    """
    p = chain.base_pos.copy()
    rot = np.eye(3)
    origins = np.empty((chain.dof, 3)) if want_frames else None
    axes_w = np.empty((chain.dof, 3)) if want_frames else None
    for j in range(chain.dof):
        if want_frames:
            origins[j] = p
            axes_w[j] = rot @ chain.axes[j]
        rot = rot @ _axis_rot(chain.axes[j], q[j])
        p = p + rot @ chain.trans[j]
    pad_rot = rot @ chain.mount
    if want_frames:
        return p, pad_rot, origins, axes_w
    return p, pad_rot


def forward_kinematics(geometry: HandGeometry, state: HandState) -> FingertipPoses:
    """Fingertip pad poses for all three fingers."""
    geometry.check_limits(state.q)
    positions = np.empty((3, 3))
    orientations = np.empty((3, 3, 3))
    for f, chain in enumerate(geometry.chains):
        p, r = _finger_fk(chain, state.q[geometry.slices[f]])
        positions[f] = p
        orientations[f] = r
    return FingertipPoses(positions=positions, orientations=orientations)


def jacobian(geometry: HandGeometry, state: HandState) -> list:
    """Per-finger positional Jacobians, one (3, dof) array per finger.

    Columns for joints outside a finger's chain are implicitly zero; the
    full (9, 11) block-diagonal matrix can be assembled from these.
    """
    geometry.check_limits(state.q)
    out = []
    for f, chain in enumerate(geometry.chains):
        tip, _, origins, axes_w = _finger_fk(chain, state.q[geometry.slices[f]], want_frames=True)
        J = np.empty((3, chain.dof))
        for j in range(chain.dof):
            J[:, j] = np.cross(axes_w[j], tip - origins[j])
        out.append(J)
    return out


def full_jacobian(geometry: HandGeometry, state: HandState) -> np.ndarray:
    """(9, 11) stacked positional Jacobian (block diagonal by finger)."""
    J = np.zeros((9, 11))
    for f, Jf in enumerate(jacobian(geometry, state)):
        J[3 * f : 3 * f + 3, geometry.slices[f]] = Jf
    return J


def _finger_ik(chain: FingerChain, target: np.ndarray, q0: np.ndarray) -> np.ndarray:
    gap = np.linalg.norm(target - chain.base_pos) - chain.reach
    if gap > IK_FAIL_MM:
        raise Unreachable(chain.name, float(gap))
    q = np.clip(q0, chain.limits[:, 0], chain.limits[:, 1])
    best_q = q.copy()
    best_err = np.inf
    lam2 = IK_DAMPING**2
    for _ in range(IK_MAX_ITERS):
        tip, _, origins, axes_w = _finger_fk(chain, q, want_frames=True)
        e = target - tip
        err = np.linalg.norm(e)
        if err < best_err:
            best_err = err
            best_q = q.copy()
        if err < IK_TOL_MM:
            break
        J = np.empty((3, chain.dof))
        for j in range(chain.dof):
            J[:, j] = np.cross(axes_w[j], tip - origins[j])
        A = J @ J.T + lam2 * np.eye(3)
        dq = J.T @ np.linalg.solve(A, e)
        step = np.max(np.abs(dq))
        if step > 0.3:  # trust region keeps the linearization honest
            dq *= 0.3 / step
        if chain.posture is not None and err > 0.1:
            # null-space pull toward the preferred posture keeps the pad
            # orientation family consistent across redundant solutions
            Jp = np.linalg.pinv(J)
            null = (np.eye(chain.dof) - Jp @ J) @ (chain.posture - q)
            nstep = np.max(np.abs(null))
            if nstep > 0.05:
                null *= 0.05 / nstep
            dq = dq + null
        q = np.clip(q + dq, chain.limits[:, 0], chain.limits[:, 1])
    if best_err > IK_FAIL_MM:
        raise Unreachable(chain.name, float(best_err))
    return best_q


def inverse_kinematics(
    geometry: HandGeometry, target: np.ndarray, q_seed: HandState
) -> HandState:
    """Damped least-squares IK, solved independently per finger.

    ``target`` is the stacked 9-vector of fingertip positions. Raises
    Unreachable when any finger cannot get within 0.5 mm.
    """
    target = np.asarray(target, dtype=np.float64).reshape(3, 3)
    q = q_seed.q.copy()
    for f, chain in enumerate(geometry.chains):
        q[geometry.slices[f]] = _finger_ik(chain, target[f], q[geometry.slices[f]])
    return HandState(q=q)
