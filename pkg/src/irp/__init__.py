"""Interactive robot-programming workbench.

Teach tabletop manipulation actions by demonstration on a simulated scene,
infer and correct their symbolic preconditions and effects, generate PDDL,
and solve previously unseen goals with the embedded task planner; plans run
back on the simulator through the taught motions.
"""

from .actions import (
    AddEffMinus,
    AddEffPlus,
    AddPre,
    Domain,
    HighLevelAction,
    Literal,
    Parameter,
    Polarity,
    RemoveEff,
    RemovePre,
    Rename,
    SetParamType,
    copy_action,
    edit_action,
    infer_ground_conditions,
    lift_action,
    make_atom,
    make_literal,
    render_atom_english,
    render_literal_english,
)
from .config import WorkbenchConfig
from .demo import (
    Arm,
    DemoScript,
    DemoSession,
    FrameKind,
    FrameRef,
    GripperState,
    Keyframe,
    LandmarkDescriptor,
    LowLevelAction,
    begin_demo,
    execute_low_level,
    finish_demo,
    record_keyframe,
    teach_from_script,
)
from .execution import (
    ExecutionLog,
    ExecutionResult,
    MentalModel,
    StateCorrection,
    StepOutcome,
    auto_confirm,
    execute_plan,
    execute_plan_step,
    init_mental_model,
)
from .geometry import Pose
from .pddl import PddlProblem, emit_domain, emit_problem, parse_domain, parse_problem
from .planner import (
    GroundAction,
    Plan,
    PlanningTask,
    SearchConfig,
    SearchMode,
    bfs_oracle,
    ground_task,
    h_ff,
    plan,
    validate_plan,
)
from .session import Problem, Session
from .benchmarks import BenchmarkReport, run_benchmark
from .world import (
    BASE,
    CUBE,
    ELEMENT,
    OBJECT,
    POSITION,
    ROOF,
    Atom,
    GroundAtom,
    ObjectInstance,
    PerceptionMode,
    PositionInstance,
    PredicateSchema,
    Scene,
    StackabilityRules,
    TypeHierarchy,
    TypeTag,
    WorldState,
    apply_effects,
    classify_type,
    default_hierarchy,
    is_subtype,
    perceive,
)

__version__ = "0.1.0"
