"""Exception hierarchy for engines, oracles, and adapters."""


class CopredictError(Exception):
    """Base class for all library errors."""


class SchemaError(CopredictError):
    """Instance file violates the JSONL schema."""


class InfeasibleSuggestion(CopredictError):
    """A suggestion does not cover its constraint to value at least 1."""


class StalledPhase(CopredictError):
    """Every active variable has zero value and zero suggested mass, so the
    growth rate is identically zero while the target is unmet."""


class UnsatisfiableConstraint(CopredictError):
    """All supported variables are frozen at 1/2 (or the coefficients sum to
    less than 1) while the half-satisfaction target is unmet."""


class BudgetExceeded(CopredictError):
    """Exact benchmark enumeration would exceed the sequence budget.

    Carries a certified upper bound: the best single-slot (expert) cost.
    """

    def __init__(self, sequences: int, budget: int, upper_bound: float, slot: int):
        super().__init__(
            f"{sequences} choice sequences exceed budget {budget}; "
            f"best single-slot cost {upper_bound} is a certified upper bound"
        )
        self.sequences = sequences
        self.budget = budget
        self.upper_bound = upper_bound
        self.slot = slot


class LedgerViolation(CopredictError):
    """A recorded phase broke the cost-vs-potential ledger."""


class BoundViolation(CopredictError):
    """Output cost exceeded the competitive bound against the benchmark."""


class InfeasibleReference(CopredictError):
    """Reference solution handed to a predictor does not satisfy the constraint."""


class RepairFailed(CopredictError):
    """Feasibility repair cannot reach constraint value 1 even with every
    entry at its cap."""


class UncoverableElement(CopredictError):
    """An arriving element belongs to no set."""


class MetricError(CopredictError):
    """Distance data is not a metric (symmetry, nonnegativity, or triangle
    inequality failed)."""
