"""Exception hierarchy.

Every error raised by the engine derives from :class:`KappaMuError`.  A few
classes are *sentinels*: they signal that a mathematically guaranteed identity did
not hold, which on valid input means an engine bug.
"""


class KappaMuError(Exception):
    """Base class for all engine errors."""


# arithmetic
class DivisionByZero(KappaMuError, ZeroDivisionError):
    pass


class IncompatibleDiscriminants(KappaMuError, ArithmeticError):
    pass


class NegativeRadicand(KappaMuError, ValueError):
    pass


class NestedRadical(KappaMuError, ArithmeticError):
    pass


class SingularSystem(KappaMuError, ArithmeticError):
    pass


class InconsistentSystem(KappaMuError, ArithmeticError):
    pass


# model input
class ParseError(KappaMuError, ValueError):
    def __init__(self, message, *, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


class InvariantViolation(KappaMuError, ValueError):
    def __init__(self, identity, detail=""):
        super().__init__(f"{identity}: {detail}" if detail else identity)
        self.identity = identity


class IdentityViolation(InvariantViolation):
    pass


# contact core
class CriteriaDisagreement(KappaMuError):
    pass


class NotNullity(KappaMuError):
    pass


class NonConstantFit(NotNullity):
    pass


class SasakianUndefined(KappaMuError, ValueError):
    pass


class ClassMismatch(KappaMuError):
    pass


# legendre
class AsymmetryDetected(KappaMuError):
    pass


class FlatCriteriaDisagree(KappaMuError):
    pass


class DegenerateForm(KappaMuError, ValueError):
    pass


class NoSolution(KappaMuError):
    pass


class NonUniqueSolution(KappaMuError):
    pass


class EquivalenceViolation(KappaMuError):
    pass


# synthesis
class PreconditionFailed(KappaMuError, ValueError):
    def __init__(self, hypothesis, detail=""):
        super().__init__(f"{hypothesis}: {detail}" if detail else hypothesis)
        self.hypothesis = hypothesis


class SignCaseMismatch(PreconditionFailed):
    pass


class ParameterOutOfRange(PreconditionFailed):
    pass


class SasakianInput(PreconditionFailed):
    pass


class InvariantTooSmall(PreconditionFailed):
    pass


class InvariantTooLarge(PreconditionFailed):
    pass
