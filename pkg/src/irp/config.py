"""Workbench configuration: perception thresholds, grasp geometry, prototypes.

Config files are JSON key-value documents (all keys optional, defaults below):

    {
      "on_threshold_m": 0.05,        horizontal radius for on(o, e) detection
      "stack_tolerance_m": 0.01,     vertical tolerance for resting contact
      "frame_radius_m": 0.2,         keyframe landmark-assignment radius
      "grasp_radius_m": 0.04,        gripper close must be this near a grasp point
      "settle_clearance_m": 0.05,    released objects snap onto supports this close
      "confirm_timeout_s": 300,      watchdog on the execution confirm callback
      "workspace_min": [-1.0, -1.0, -0.05],
      "workspace_max": [1.0, 1.0, 1.0],
      "prototypes": {"CUBE": {"dims": [0.05, 0.05, 0.05],
                              "tolerance": [0.015, 0.015, 0.015]}, ...},
      "stackable_rules": [["OBJECT", "POSITION"], ["CUBE", "BASE"],
                          ["CUBE", "CUBE"], ["ROOF", "CUBE"]]
    }

The IRP_CONFIG environment variable points at such a file; absent, defaults
apply.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from .errors import CorruptFile
from .geometry import Vec3
from .world import (
    DEFAULT_PROTOTYPES,
    DEFAULT_STACKABILITY,
    Prototype,
    StackabilityRules,
    TypeHierarchy,
    default_hierarchy,
)

ENV_VAR = "IRP_CONFIG"


@dataclass(frozen=True)
class WorkbenchConfig:
    on_threshold: float = 0.05
    stack_tolerance: float = 0.01
    frame_radius: float = 0.2
    grasp_radius: float = 0.04
    settle_clearance: float = 0.05
    confirm_timeout: float = 300.0
    workspace_min: Vec3 = (-1.0, -1.0, -0.05)
    workspace_max: Vec3 = (1.0, 1.0, 1.0)
    prototypes: dict = field(default_factory=lambda: dict(DEFAULT_PROTOTYPES))
    rules: StackabilityRules = DEFAULT_STACKABILITY

    def in_workspace(self, point: Vec3) -> bool:
        return all(
            lo <= c <= hi
            for c, lo, hi in zip(point, self.workspace_min, self.workspace_max)
        )

    def to_dict(self) -> dict:
        return {
            "on_threshold_m": self.on_threshold,
            "stack_tolerance_m": self.stack_tolerance,
            "frame_radius_m": self.frame_radius,
            "grasp_radius_m": self.grasp_radius,
            "settle_clearance_m": self.settle_clearance,
            "confirm_timeout_s": self.confirm_timeout,
            "workspace_min": list(self.workspace_min),
            "workspace_max": list(self.workspace_max),
            "prototypes": {
                tag.name: {"dims": list(p.dims), "tolerance": list(p.tolerance)}
                for tag, p in sorted(self.prototypes.items(), key=lambda kv: kv[0].name)
            },
            "stackable_rules": [[o.name, e.name] for o, e in self.rules.pairs],
        }

    @staticmethod
    def from_dict(data: dict, hierarchy: Optional[TypeHierarchy] = None) -> "WorkbenchConfig":
        hier = hierarchy or default_hierarchy()
        kwargs: dict = {}
        if "on_threshold_m" in data:
            kwargs["on_threshold"] = float(data["on_threshold_m"])
        if "stack_tolerance_m" in data:
            kwargs["stack_tolerance"] = float(data["stack_tolerance_m"])
        if "frame_radius_m" in data:
            kwargs["frame_radius"] = float(data["frame_radius_m"])
        if "grasp_radius_m" in data:
            kwargs["grasp_radius"] = float(data["grasp_radius_m"])
        if "settle_clearance_m" in data:
            kwargs["settle_clearance"] = float(data["settle_clearance_m"])
        if "confirm_timeout_s" in data:
            kwargs["confirm_timeout"] = float(data["confirm_timeout_s"])
        if "workspace_min" in data:
            kwargs["workspace_min"] = tuple(data["workspace_min"])
        if "workspace_max" in data:
            kwargs["workspace_max"] = tuple(data["workspace_max"])
        if "prototypes" in data:
            kwargs["prototypes"] = {
                hier.get(name): Prototype(tuple(spec["dims"]), tuple(spec["tolerance"]))
                for name, spec in data["prototypes"].items()
            }
        if "stackable_rules" in data:
            kwargs["rules"] = StackabilityRules(
                tuple((hier.get(o), hier.get(e)) for o, e in data["stackable_rules"])
            )
        return WorkbenchConfig(**kwargs)

    @staticmethod
    def load(path: str) -> "WorkbenchConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise CorruptFile(f"config {path}: {exc.msg} at byte {exc.pos}") from exc
        return WorkbenchConfig.from_dict(data)

    @staticmethod
    def from_env() -> "WorkbenchConfig":
        path = os.environ.get(ENV_VAR)
        if path:
            return WorkbenchConfig.load(path)
        return WorkbenchConfig()
