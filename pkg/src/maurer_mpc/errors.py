"""Exception hierarchy shared by every module of the package."""


class MPCError(Exception):
    """Base class for all errors raised by this package."""


class ModulusMismatch(MPCError):
    pass


class TapeExhausted(MPCError):
    pass


class InconsistentShares(MPCError):
    pass


class IncompleteCover(MPCError):
    pass


class NoMajority(MPCError):
    """No value occurs in more than half of the copies.

    Inside a protocol run this can only happen when more than one party
    deviates, i.e. outside the threat model.
    """


class OwnerMismatch(MPCError):
    pass


class PartyCountTooSmall(MPCError):
    pass


class ArityMismatch(MPCError):
    pass


class ParseError(MPCError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ProtocolViolation(MPCError):
    pass


class ConfigError(MPCError):
    pass


class BudgetExceeded(MPCError):
    pass


class PreconditionError(MPCError):
    pass
