import math
import random

from irp.geometry import (
    Pose,
    express_in_frame,
    express_in_world,
    interpolate,
    q_norm,
    q_normalize,
    q_slerp,
)


def random_quat(rng):
    q = tuple(rng.gauss(0, 1) for _ in range(4))
    return q_normalize(q)


def test_frame_round_trip_1000_random_poses():
    rng = random.Random(7)
    for _ in range(1000):
        pos = tuple(rng.uniform(-1, 1) for _ in range(3))
        origin = tuple(rng.uniform(-1, 1) for _ in range(3))
        pose = Pose(pos, random_quat(rng))
        back = express_in_world(express_in_frame(pose, origin), origin)
        assert all(abs(a - b) <= 1e-9 for a, b in zip(back.position, pose.position))
        assert back.orientation == pose.orientation


def test_slerp_endpoints_and_norm():
    rng = random.Random(11)
    for _ in range(50):
        qa, qb = random_quat(rng), random_quat(rng)
        assert abs(q_norm(q_slerp(qa, qb, 0.37)) - 1.0) < 1e-9
        start = q_slerp(qa, qb, 0.0)
        assert all(abs(a - b) < 1e-9 for a, b in zip(start, qa))


def test_slerp_takes_shorter_arc():
    qa = (1.0, 0.0, 0.0, 0.0)
    qb = (-math.cos(0.1), math.sin(0.1), 0.0, 0.0)  # antipodal-ish representation
    mid = q_slerp(qa, qb, 0.5)
    # same rotation as the un-negated qb neighbourhood: w stays near +1
    assert mid[0] > 0.9


def test_interpolate_midpoint_position():
    a = Pose((0.0, 0.0, 0.0))
    b = Pose((1.0, 2.0, 4.0))
    mid = interpolate(a, b, 0.5)
    assert mid.position == (0.5, 1.0, 2.0)
