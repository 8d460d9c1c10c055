"""3-D pose math for keyframe replay.

Landmark frames are translation-only (tabletop objects are axis-aligned), so
re-expressing a pose in a frame shifts its position and leaves orientation
untouched.  Quaternions are kept for end-effector orientation and interpolated
with slerp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Vec3 = tuple[float, float, float]
Quat = tuple[float, float, float, float]  # (w, x, y, z)

IDENTITY_QUAT: Quat = (1.0, 0.0, 0.0, 0.0)


def v_add(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def v_sub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def v_dist(a: Vec3, b: Vec3) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def horizontal_dist(a: Vec3 | tuple[float, float], b: Vec3 | tuple[float, float]) -> float:
    """Distance projected onto the table plane (x, y only)."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


def q_norm(q: Quat) -> float:
    return math.sqrt(sum(c * c for c in q))


def q_normalize(q: Quat) -> Quat:
    n = q_norm(q)
    if n == 0.0:
        raise ValueError("zero quaternion")
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def q_slerp(qa: Quat, qb: Quat, t: float) -> Quat:
    """Spherical interpolation along the shorter arc."""
    dot = sum(a * b for a, b in zip(qa, qb))
    if dot < 0.0:  # antipodal representations of the same rotation
        qb = tuple(-c for c in qb)  # type: ignore[assignment]
        dot = -dot
    if dot > 0.9995:  # nearly parallel: lerp then renormalize
        mixed = tuple(a + t * (b - a) for a, b in zip(qa, qb))
        return q_normalize(mixed)  # type: ignore[arg-type]
    theta = math.acos(min(1.0, dot))
    sin_theta = math.sin(theta)
    wa = math.sin((1.0 - t) * theta) / sin_theta
    wb = math.sin(t * theta) / sin_theta
    return q_normalize(tuple(wa * a + wb * b for a, b in zip(qa, qb)))  # type: ignore[arg-type]


@dataclass(frozen=True)
class Pose:
    """Position in meters plus orientation quaternion (w, x, y, z)."""

    position: Vec3
    orientation: Quat = IDENTITY_QUAT

    def translated(self, offset: Vec3) -> "Pose":
        return Pose(v_add(self.position, offset), self.orientation)


def express_in_frame(world: Pose, frame_origin: Vec3) -> Pose:
    """World pose -> frame-local pose for a translation-only frame."""
    return Pose(v_sub(world.position, frame_origin), world.orientation)


def express_in_world(local: Pose, frame_origin: Vec3) -> Pose:
    """Frame-local pose -> world pose for a translation-only frame."""
    return Pose(v_add(local.position, frame_origin), local.orientation)


def interpolate(a: Pose, b: Pose, t: float) -> Pose:
    """Straight-line position, slerped orientation; t in [0, 1]."""
    pos = tuple(pa + t * (pb - pa) for pa, pb in zip(a.position, b.position))
    return Pose(pos, q_slerp(a.orientation, b.orientation, t))  # type: ignore[arg-type]
