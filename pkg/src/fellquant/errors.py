"""Exception types shared across modules."""
from __future__ import annotations


class FellQuantError(Exception):
    """Base class for every error raised by this package."""


class SizeLimit(FellQuantError):
    pass


class DimensionMismatch(FellQuantError, ValueError):
    pass


class InvalidAction(FellQuantError, ValueError):
    pass


class GroupoidAxiomError(FellQuantError, ValueError):
    def __init__(self, axiom: str, witness: tuple):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"{axiom} fails at {witness}")


class JoinNotPreserved(FellQuantError, ValueError):
    def __init__(self, witness: list[int]):
        self.witness = witness
        super().__init__(f"join of {witness} not preserved")


class MeetNotPreserved(FellQuantError, ValueError):
    def __init__(self, witness: list[int]):
        self.witness = witness
        super().__init__(f"meet of {witness} not preserved")


class NotMonotone(FellQuantError, ValueError):
    pass


class NotCompatible(FellQuantError, ValueError):
    def __init__(self, pair: tuple[int, int]):
        self.pair = pair
        super().__init__(f"elements {pair[0]} and {pair[1]} are not compatible")


class NotComplete(FellQuantError, ValueError):
    def __init__(self, message: str, witness):
        self.witness = witness
        super().__init__(message)


class InvalidSemigroup(FellQuantError, ValueError):
    pass


class BundleMismatch(FellQuantError, ValueError):
    pass


class CocycleInvalid(FellQuantError, ValueError):
    def __init__(self, message: str, witness: tuple):
        self.witness = witness
        super().__init__(message)


class DegenerateRealization(FellQuantError):
    pass


class AlgebraMismatch(FellQuantError, ValueError):
    pass


class NotAbelian(FellQuantError, ValueError):
    pass


class NotProjection(FellQuantError, ValueError):
    pass


class StablyGelfandViolated(FellQuantError, AssertionError):
    pass


class NotNormalizer(FellQuantError, ValueError):
    pass


class NotInIpiB(FellQuantError, ValueError):
    pass


class BaseMismatch(FellQuantError, ValueError):
    pass


class InvariantBug(FellQuantError, AssertionError):
    pass


class DefinitionSyntaxError(FellQuantError, ValueError):
    def __init__(self, line: int, col: int, expected: str):
        self.line, self.col, self.expected = line, col, expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


class UnresolvedReference(FellQuantError, ValueError):
    pass


class UnknownCheck(FellQuantError, ValueError):
    pass
