"""Exception hierarchy for the workbench.

Every error raised by this package derives from :class:`IrpError` so callers
(CLI, REST layer) can map failures to exit codes / HTTP responses uniformly.
"""


class IrpError(Exception):
    """Base class for all workbench errors."""


# --- world model -----------------------------------------------------------

class UnknownType(IrpError):
    """Bounding box matches no type prototype."""


class AmbiguousType(IrpError):
    """Bounding box matches more than one type prototype."""


class UnknownInstance(IrpError):
    """An atom or effect references an instance id that does not exist."""


class InvalidScene(IrpError):
    """Scene violates a structural invariant (support, overlap, duplicate id)."""


# --- demonstration ---------------------------------------------------------

class OutOfWorkspace(IrpError):
    """Recorded pose lies outside the table workspace bounds."""


class EmptyDemonstration(IrpError):
    """finish_demo called with no recorded keyframes."""


class UnresolvedLandmark(IrpError):
    """A keyframe landmark cannot be matched to any scene instance."""


class GraspFailed(IrpError):
    """Gripper closed with no object within the grasp radius."""


# --- inference / action editing -------------------------------------------

class InstanceMismatch(IrpError):
    """Before/after observations cover different instance sets."""


class UntypedInstance(IrpError):
    """Lifting encountered an instance with no known type."""


class TypeViolation(IrpError):
    """An edit would make a literal argument incompatible with its schema."""


class EffectConflict(IrpError):
    """An edit would put the same atom in both add and delete effects."""


class DanglingVariable(IrpError):
    """A literal references a variable that is not an action parameter."""


class DuplicateName(IrpError):
    """Action (or problem) name already taken in the domain."""


# --- PDDL ------------------------------------------------------------------

class PddlError(IrpError):
    """Base class for PDDL reader/writer errors."""


class PddlSyntaxError(PddlError):
    """Malformed s-expression; message carries line:column."""


class UnknownRequirement(PddlError):
    """Domain declares a :requirements flag this dialect does not support."""


class UndeclaredPredicate(PddlError):
    """Atom uses a predicate missing from the :predicates clause."""


class ArityMismatch(PddlError):
    """Atom argument count differs from its predicate schema."""


class UndeclaredObject(PddlError):
    """Init or goal references an object missing from :objects."""


class DomainMismatch(PddlError):
    """Problem's :domain clause names a different domain."""


# --- planning --------------------------------------------------------------

class NoSolution(IrpError):
    """Search space exhausted without reaching the goal (proof of absence)."""


class ResourceLimit(IrpError):
    """Node or time cap hit before the search could finish (not a proof)."""


class Cancelled(IrpError):
    """Planning job stopped via its cooperative stop flag."""


class TooLarge(IrpError):
    """Exhaustive oracle exceeded its state guard."""


class InvalidPlan(IrpError):
    """A plan failed validation against its task."""


# --- execution -------------------------------------------------------------

class InconsistentCorrection(IrpError):
    """User state correction violates the clear/on coupling."""


class PreconditionUnsatisfied(IrpError):
    """Plan step's symbolic preconditions do not hold in the mental model."""


# --- session ---------------------------------------------------------------

class NoActionsDefined(IrpError):
    """Problems require at least one taught action."""


class EmptyGoal(IrpError):
    """Problem has no goal literals to solve for."""


class SchemaVersionMismatch(IrpError):
    """Persisted session uses an unsupported schema version."""


class CorruptFile(IrpError):
    """Persisted session cannot be decoded; message carries the byte offset."""


class StaleSnapshot(IrpError):
    """Plan refers to a domain/problem state that has since been edited."""
