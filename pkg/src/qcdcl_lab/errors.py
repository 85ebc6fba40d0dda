"""Exception types shared across the package."""


class QcdclError(Exception):
    """Base class for all errors raised by this package."""


class QdimacsError(QcdclError):
    """Malformed QDIMACS input; carries the offending 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TautologicalAxiomError(QdimacsError):
    """An input clause contains a variable in both polarities."""


class UnboundVariableError(QdimacsError):
    """A matrix clause mentions a variable missing from the prefix."""


class IllegalTautologyError(QcdclError):
    """A resolution step would violate its mode's tautology side condition."""


class PivotMissingError(QcdclError):
    """The requested pivot does not occur with the required polarities."""


class IllegalDecisionError(QcdclError):
    """A decision violates the active decision policy."""


class PendingPropagationError(QcdclError):
    """A decision was attempted while a unit propagation is still available."""


class InvalidTimeError(QcdclError):
    """A (level, offset) pair does not name a position of the trail."""


class InternalTautologyError(QcdclError):
    """Conflict analysis produced an illegal tautology.

    Unreachable for well-formed trails; raising it signals a bug in the
    trail construction, not in the input.
    """


class ScriptDivergenceError(QcdclError):
    """A replay script does not match the propagation behaviour it implies."""


class LoopBoundExceededError(QcdclError):
    """The unreliability loop exceeded its quadratic round bound (bug signal)."""


class WitnessInvalidError(QcdclError):
    """A recorded unreliability witness no longer re-validates (bug signal)."""


class SimulationError(QcdclError):
    """An invariant of the constructive simulation failed (bug signal)."""


class InputNotRefutationError(QcdclError):
    """The derivation handed to the simulation is not a valid refutation."""


class TooLargeError(QcdclError):
    """The formula exceeds the exhaustive game evaluator's variable bound."""
