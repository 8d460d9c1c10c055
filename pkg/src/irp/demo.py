"""Keyframe-based low-level actions: recording, landmark frames, replay.

A demonstration is a sparse sequence of end-effector keyframes (pose + gripper
state), each expressed in either the robot base frame or a landmark frame.
Frames are assigned heuristically at record time (nearest landmark within a
radius) and re-resolved against the current scene at execution time, which is
what lets one taught motion generalize to relocated or substituted landmarks.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .config import WorkbenchConfig
from .errors import (
    EmptyDemonstration,
    GraspFailed,
    InvalidScene,
    OutOfWorkspace,
    UnresolvedLandmark,
)
from .geometry import Pose, Vec3, horizontal_dist, q_norm, v_add, v_dist, v_sub
from .world import (
    Arm,
    ObjectInstance,
    PerceptionMode,
    PositionInstance,
    Scene,
    TypeTag,
    WorldState,
    instance_type,
    perceive,
)


class GripperState(str, enum.Enum):
    OPEN = "OPEN"
    CLOSE = "CLOSE"


class FrameKind(str, enum.Enum):
    BASE = "BASE"
    LANDMARK = "LANDMARK"


@dataclass(frozen=True)
class LandmarkDescriptor:
    """Demo-time landmark identity: matched at execution by type and dims."""

    type: TypeTag
    dims: Vec3  # (0, 0, 0) for positions
    original_id: str


@dataclass(frozen=True)
class FrameRef:
    kind: FrameKind
    descriptor: Optional[LandmarkDescriptor] = None

    def __post_init__(self):
        if (self.kind is FrameKind.LANDMARK) != (self.descriptor is not None):
            raise ValueError("descriptor present iff kind is LANDMARK")


BASE_FRAME = FrameRef(FrameKind.BASE)


@dataclass(frozen=True)
class Keyframe:
    arm: Arm
    pose: Pose  # expressed in `frame`
    frame: FrameRef
    gripper: GripperState

    def __post_init__(self):
        if abs(q_norm(self.pose.orientation) - 1.0) > 1e-9:
            raise ValueError("keyframe orientation quaternion must be normalized")


@dataclass(frozen=True)
class LowLevelAction:
    """Named, single-arm keyframe sequence."""

    name: str
    keyframes: tuple[Keyframe, ...]

    def __post_init__(self):
        if not self.keyframes:
            raise EmptyDemonstration(f"action {self.name!r} has no keyframes")
        arms = {kf.arm for kf in self.keyframes}
        if len(arms) > 1:
            raise InvalidScene(f"action {self.name!r} mixes arms {sorted(a.value for a in arms)}")

    @property
    def arm(self) -> Arm:
        return self.keyframes[0].arm

    def landmark_ids(self) -> list[str]:
        out = []
        for kf in self.keyframes:
            if kf.frame.descriptor and kf.frame.descriptor.original_id not in out:
                out.append(kf.frame.descriptor.original_id)
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "arm": self.arm.value,
            "keyframes": [
                {
                    "position": list(kf.pose.position),
                    "orientation": list(kf.pose.orientation),
                    "gripper": kf.gripper.value,
                    "frame": (
                        {"kind": "BASE"}
                        if kf.frame.kind is FrameKind.BASE
                        else {
                            "kind": "LANDMARK",
                            "type": kf.frame.descriptor.type.name,
                            "dims": list(kf.frame.descriptor.dims),
                            "original_id": kf.frame.descriptor.original_id,
                        }
                    ),
                }
                for kf in self.keyframes
            ],
        }

    @staticmethod
    def from_dict(data: dict, hierarchy) -> "LowLevelAction":
        kfs = []
        for kf in data["keyframes"]:
            frame_data = kf["frame"]
            if frame_data["kind"] == "BASE":
                frame = BASE_FRAME
            else:
                frame = FrameRef(
                    FrameKind.LANDMARK,
                    LandmarkDescriptor(
                        type=hierarchy.get(frame_data["type"]),
                        dims=tuple(frame_data["dims"]),
                        original_id=frame_data["original_id"],
                    ),
                )
            kfs.append(
                Keyframe(
                    arm=Arm(data["arm"]),
                    pose=Pose(tuple(kf["position"]), tuple(kf["orientation"])),
                    frame=frame,
                    gripper=GripperState(kf["gripper"]),
                )
            )
        return LowLevelAction(data["name"], tuple(kfs))


# --- frame anchors -----------------------------------------------------------

def landmark_anchor(inst, pose_override: Optional[Vec3] = None) -> Vec3:
    """Frame origin of a landmark: object top-center, or the table point.

    Poses relative to an object's top face transfer naturally between objects
    of different heights (a place offset stays "just above the top").
    """
    if isinstance(inst, PositionInstance):
        if pose_override is not None:
            return (pose_override[0], pose_override[1], 0.0)
        return inst.center
    base = pose_override if pose_override is not None else inst.pose
    return (base[0], base[1], base[2] + inst.dims[2])


def _landmark_center(inst) -> Vec3:
    return inst.center


# --- demonstration sessions ------------------------------------------------------


@dataclass
class DemoSession:
    """Single-writer recording session; O1 is captured once at begin."""

    scene_before: Scene
    O1: WorldState
    recorded: list[Keyframe] = field(default_factory=list)
    config: WorkbenchConfig = field(default_factory=WorkbenchConfig)


def begin_demo(
    scene: Scene,
    config: Optional[WorkbenchConfig] = None,
    mode: PerceptionMode = PerceptionMode.FULL,
) -> DemoSession:
    """Open a session, perceiving the initial world state exactly once."""
    cfg = config or WorkbenchConfig()
    scene.validate_support(cfg.on_threshold, cfg.stack_tolerance)
    o1 = perceive(scene, cfg.on_threshold, cfg.rules, mode, cfg.stack_tolerance)
    return DemoSession(scene_before=scene, O1=o1, config=cfg)


def record_keyframe(
    session: DemoSession,
    arm: Arm,
    world_pose: Pose,
    gripper: GripperState,
    r_frame: Optional[float] = None,
) -> Keyframe:
    """Append a keyframe, assigning it to the nearest landmark within r_frame.

    No landmark within range means the robot base frame.  Ties break on the
    lexicographically smallest landmark id.
    """
    cfg = session.config
    radius = cfg.frame_radius if r_frame is None else r_frame
    if not cfg.in_workspace(world_pose.position):
        raise OutOfWorkspace(f"pose {world_pose.position} outside workspace bounds")

    scene = session.scene_before
    candidates = []
    for inst in list(scene.objects) + list(scene.positions):
        dist = v_dist(world_pose.position, _landmark_center(inst))
        if dist <= radius:
            candidates.append((dist, inst.id, inst))

    if candidates:
        _, _, nearest = min(candidates)
        if isinstance(nearest, ObjectInstance):
            descriptor = LandmarkDescriptor(nearest.type, nearest.dims, nearest.id)
        else:
            descriptor = LandmarkDescriptor(instance_type(nearest), (0.0, 0.0, 0.0), nearest.id)
        frame = FrameRef(FrameKind.LANDMARK, descriptor)
        origin = landmark_anchor(nearest)
        local = Pose(v_sub(world_pose.position, origin), world_pose.orientation)
    else:
        frame = BASE_FRAME
        local = world_pose

    kf = Keyframe(arm=arm, pose=local, frame=frame, gripper=gripper)
    session.recorded.append(kf)
    return kf


def finish_demo(
    session: DemoSession,
    scene_after: Scene,
    name: str,
    mode: PerceptionMode = PerceptionMode.FULL,
) -> tuple[LowLevelAction, WorldState, WorldState]:
    """Close the session: build the named action and perceive the after-state."""
    if not session.recorded:
        raise EmptyDemonstration("no keyframes recorded")
    cfg = session.config
    action = LowLevelAction(name, tuple(session.recorded))
    o2 = perceive(scene_after, cfg.on_threshold, cfg.rules, mode, cfg.stack_tolerance)
    return action, session.O1, o2


# --- execution ---------------------------------------------------------------


def _resolve_landmark(
    descriptor: LandmarkDescriptor,
    scene: Scene,
    bindings: Mapping[str, str],
):
    """Bindings win; otherwise match same-type instance with nearest dims."""
    if descriptor.original_id in bindings:
        target = bindings[descriptor.original_id]
        inst = scene.instances.get(target)
        if inst is None:
            raise UnresolvedLandmark(f"bound landmark {target!r} not in scene")
        return inst
    same_type = [
        inst
        for inst in scene.instances.values()
        if instance_type(inst).name == descriptor.type.name
    ]
    if not same_type:
        raise UnresolvedLandmark(f"no {descriptor.type.name} instance for landmark "
                                 f"{descriptor.original_id!r}")

    def dims_of(inst) -> Vec3:
        return inst.dims if isinstance(inst, ObjectInstance) else (0.0, 0.0, 0.0)

    return min(same_type, key=lambda i: (v_dist(dims_of(i), descriptor.dims), i.id))


def execute_low_level(
    action: LowLevelAction,
    scene: Scene,
    bindings: Optional[Mapping[str, str]] = None,
    config: Optional[WorkbenchConfig] = None,
    landmark_poses: Optional[Mapping[str, Vec3]] = None,
) -> Scene:
    """Kinematic replay of a taught action on a scene.

    Landmarks are resolved once at the start (optionally against believed
    poses from a mental model), keyframe poses are re-expressed in world
    coordinates, and gripper transitions move objects: OPEN->CLOSE grasps the
    nearest object within the grasp radius (plus everything stacked on it),
    CLOSE->OPEN releases and the stack settles onto the highest support
    directly below.
    """
    cfg = config or WorkbenchConfig()
    bindings = bindings or {}
    g = cfg.grasp_radius
    d = cfg.on_threshold
    eps = cfg.stack_tolerance

    world_points: list[Vec3] = []
    for kf in action.keyframes:
        if kf.frame.kind is FrameKind.BASE:
            world_points.append(kf.pose.position)
        else:
            inst = _resolve_landmark(kf.frame.descriptor, scene, bindings)
            override = landmark_poses.get(inst.id) if landmark_poses else None
            origin = landmark_anchor(inst, override)
            world_points.append(v_add(origin, kf.pose.position))

    objects = {o.id: o for o in scene.objects}
    attachments = dict(scene.attachments)
    arm = action.arm.value
    carried: dict[str, Vec3] = {}  # object id -> offset from gripper
    grasped: Optional[str] = None
    prev = GripperState.CLOSE if attachments.get(arm) else GripperState.OPEN

    if attachments.get(arm):
        # arm starts holding: anchor the grip offset at the first keyframe
        held_id = attachments[arm]
        carried[held_id] = v_sub(objects[held_id].pose, world_points[0])
        grasped = held_id

    def held_anywhere() -> set[str]:
        return {oid for oid in attachments.values() if oid}

    for kf, gripper_pos in zip(action.keyframes, world_points):
        for oid, offset in carried.items():
            obj = objects[oid]
            objects[oid] = ObjectInstance(obj.id, v_add(gripper_pos, offset), obj.dims, obj.type)

        if kf.gripper is GripperState.CLOSE and prev is GripperState.OPEN:
            reachable = [
                (v_dist(o.center, gripper_pos), o.id)
                for o in objects.values()
                if o.id not in held_anywhere()
            ]
            reachable = [(dist, oid) for dist, oid in reachable if dist <= g]
            if not reachable:
                raise GraspFailed(
                    f"{action.name}: close at {tuple(round(c, 3) for c in gripper_pos)} "
                    f"grasped nothing within {g} m"
                )
            _, target = min(reachable)
            snapshot = Scene(tuple(objects.values()), scene.positions, attachments)
            stack = snapshot.supported_stack(target, d, eps)
            carried = {
                oid: v_sub(objects[oid].pose, gripper_pos) for oid in [target] + stack
            }
            grasped = target
            attachments[arm] = target

        elif kf.gripper is GripperState.OPEN and prev is GripperState.CLOSE and grasped:
            # settle onto the highest support directly below (or barely pierced:
            # frame transfer between different-height objects can land the base
            # slightly inside its support, hence the clearance)
            base = objects[grasped]
            support_z = 0.0
            for o in objects.values():
                if o.id in carried or o.id in held_anywhere():
                    continue
                if (
                    horizontal_dist(o.pose, base.pose) <= d
                    and o.top <= base.pose[2] + cfg.settle_clearance
                ):
                    support_z = max(support_z, o.top)
            dz = support_z - base.pose[2]
            for oid in carried:
                obj = objects[oid]
                objects[oid] = ObjectInstance(
                    obj.id, (obj.pose[0], obj.pose[1], obj.pose[2] + dz), obj.dims, obj.type
                )
            carried = {}
            grasped = None
            attachments[arm] = None

        prev = kf.gripper

    result = Scene(tuple(objects.values()), scene.positions, attachments)
    result.validate_support(d, eps)
    return result


def interpolate_trajectory(
    action: LowLevelAction,
    scene: Scene,
    bindings: Optional[Mapping[str, str]] = None,
    config: Optional[WorkbenchConfig] = None,
    samples_per_segment: int = 8,
) -> list[Pose]:
    """Dense end-effector path for previewing a replay.

    Straight-line position interpolation with slerped orientation between the
    resolved keyframe poses; purely kinematic, no arm model.
    """
    from .geometry import interpolate

    cfg = config or WorkbenchConfig()
    bindings = bindings or {}
    poses: list[Pose] = []
    for kf in action.keyframes:
        if kf.frame.kind is FrameKind.BASE:
            poses.append(kf.pose)
        else:
            inst = _resolve_landmark(kf.frame.descriptor, scene, bindings)
            origin = landmark_anchor(inst)
            poses.append(Pose(v_add(origin, kf.pose.position), kf.pose.orientation))
    out: list[Pose] = []
    for a, b in zip(poses, poses[1:]):
        for k in range(samples_per_segment):
            out.append(interpolate(a, b, k / samples_per_segment))
    out.append(poses[-1])
    return out


# --- scripted demonstrations -----------------------------------------------------


@dataclass(frozen=True)
class ScriptKeyframe:
    t: float
    position: Vec3
    gripper: GripperState
    orientation: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class DemoScript:
    """Declarative teaching: a scene plus timed poses and gripper commands."""

    name: str
    arm: Arm
    scene: Scene
    keyframes: tuple[ScriptKeyframe, ...]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "arm": self.arm.value,
            "scene": self.scene.to_dict(),
            "keyframes": [
                {
                    "t": kf.t,
                    "position": list(kf.position),
                    "orientation": list(kf.orientation),
                    "gripper": kf.gripper.value,
                }
                for kf in self.keyframes
            ],
        }

    @staticmethod
    def from_dict(data: dict, hierarchy=None) -> "DemoScript":
        return DemoScript(
            name=data["name"],
            arm=Arm(data["arm"]),
            scene=Scene.from_dict(data["scene"], hierarchy),
            keyframes=tuple(
                ScriptKeyframe(
                    t=float(kf.get("t", i)),
                    position=tuple(kf["position"]),
                    orientation=tuple(kf.get("orientation", (1.0, 0.0, 0.0, 0.0))),
                    gripper=GripperState(kf["gripper"]),
                )
                for i, kf in enumerate(data["keyframes"])
            ),
        )

    @staticmethod
    def from_json(text: str, hierarchy=None) -> "DemoScript":
        return DemoScript.from_dict(json.loads(text), hierarchy)


@dataclass(frozen=True)
class RecordedDemo:
    action: LowLevelAction
    O1: WorldState
    O2: WorldState
    scene_before: Scene
    scene_after: Scene


def teach_from_script(
    script: DemoScript,
    config: Optional[WorkbenchConfig] = None,
    mode: PerceptionMode = PerceptionMode.FULL,
) -> RecordedDemo:
    """Run a scripted demonstration headlessly.

    Keyframes are recorded in timestamp order with heuristic frame assignment;
    the after-scene is obtained by replaying the taught motion on the before
    scene (the scripted stand-in for the human physically moving the arm).
    """
    cfg = config or WorkbenchConfig()
    session = begin_demo(script.scene, cfg, mode)
    for skf in sorted(script.keyframes, key=lambda k: k.t):
        record_keyframe(
            session, script.arm, Pose(skf.position, skf.orientation), skf.gripper
        )
    action = LowLevelAction(script.name, tuple(session.recorded))
    identity = {lid: lid for lid in action.landmark_ids()}
    scene_after = execute_low_level(action, script.scene, identity, cfg)
    action, o1, o2 = finish_demo(session, scene_after, script.name, mode)
    return RecordedDemo(action, o1, o2, script.scene, scene_after)
