"""Exception types shared across the package.

The CLI maps these onto exit codes: usage errors -> 2, invariant
violations -> 3, exceeded search budgets -> 4.
"""


class UsageError(ValueError):
    """Bad arguments, unsupported combinations, or size guards."""


class SizeGuardError(UsageError):
    """An enumeration or rendering size guard was exceeded."""


class InvariantError(AssertionError):
    """A structural invariant of a combinatorial object was violated."""


class BudgetExceededError(RuntimeError):
    """An exact search exceeded its evaluation budget."""
