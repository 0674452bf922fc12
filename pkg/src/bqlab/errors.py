"""Exception types shared across the package."""


class BQLabError(Exception):
    pass


class CapacityError(BQLabError):
    """A desk-scale bound (qubits, variables, subset DP size) was exceeded."""


class ContractError(BQLabError, ValueError):
    """An operation was called with arguments violating its preconditions."""


class ExactnessViolation(BQLabError):
    """No measurement outcome reached probability 1 - 1e-9.

    Every algorithm in this package is claimed exact, so this signals a bug
    (or an oracle that does not satisfy the algorithm's promise).
    """


class AdaptivityError(BQLabError):
    """An oracle query fell outside the declared non-adaptive plan."""


class ParseError(BQLabError, ValueError):
    def __init__(self, message, lineno=None, source=None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)
