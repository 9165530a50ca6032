"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: infeasible input -> 2, budget
refusal -> 3, anything else -> 1.
"""


class SpanoptError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SpanoptError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class InfeasibleInstanceError(SpanoptError):
    """The instance admits no feasible solution (e.g. bound below distance)."""


class UnreachablePairError(InfeasibleInstanceError):
    """A demand pair (s, t) with t not reachable from s."""

    def __init__(self, s, t):
        super().__init__(f"no path from {s} to {t}")
        self.pair = (s, t)


class BudgetError(SpanoptError):
    """A configured search or size budget would be exceeded; refused."""


class LpNumericalError(SpanoptError):
    """The LP solver failed numerically (distinct from infeasibility)."""


class RoundingError(SpanoptError):
    """Randomized rounding exhausted its retry budget."""
