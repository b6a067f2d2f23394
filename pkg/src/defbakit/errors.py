"""Exception hierarchy shared by all defbakit modules."""


class DefbaError(Exception):
    """Base class for every error raised by defbakit."""


# -- model construction -----------------------------------------------------

class ModelError(DefbaError, ValueError):
    """A metabolic model violates one of its structural invariants."""


class UnknownSpeciesRef(ModelError):
    pass


class MissingKcat(ModelError):
    pass


class BlockViolation(ModelError):
    pass


class DimensionMismatch(DefbaError, ValueError):
    pass


# -- optimisation -------------------------------------------------------------

class NumericalFailure(DefbaError, RuntimeError):
    """The LP solver hit its iteration cap or lost numerical accuracy."""


class Infeasible(DefbaError):
    pass


class Unbounded(DefbaError):
    pass


class InfeasibleComposition(Infeasible):
    """The biomass composition constraint is violated by a given state."""


class StatusNotOptimal(DefbaError):
    pass


class InfeasibleIteration(Infeasible):
    def __init__(self, t_k, message=None):
        self.t_k = t_k
        super().__init__(message or f"short-term problem infeasible at t_k = {t_k:g} h")


# -- horizon selection ----------------------------------------------------------

class BracketFailure(DefbaError, RuntimeError):
    pass


class NonpositiveBound(DefbaError, ValueError):
    pass


class TooFewPoints(DefbaError, ValueError):
    pass


# -- serialisation --------------------------------------------------------------

class SchemaError(DefbaError, ValueError):
    pass


class ValidationError(DefbaError, ValueError):
    pass
