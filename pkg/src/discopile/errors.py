"""Exception hierarchy shared by every stage of the pipeline."""


class DiscopileError(Exception):
    """Base class for all errors raised by discopile."""


class UnknownToken(DiscopileError, KeyError):
    def __init__(self, token: str):
        super().__init__(token)
        self.token = token

    def __str__(self) -> str:
        return f"unknown token {self.token!r}"


class AdjointDepthError(DiscopileError, ValueError):
    pass


class NotGrammatical(DiscopileError, ValueError):
    pass


class NotANoun(DiscopileError, ValueError):
    pass


class TypeMismatch(DiscopileError, ValueError):
    pass


class InvalidDiagram(DiscopileError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InvalidCircuit(DiscopileError, ValueError):
    pass


class UnboundParam(DiscopileError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"no value bound for parameter {self.name!r}"


class ZeroPostselectMass(DiscopileError, ArithmeticError):
    pass


class ZeroMass(DiscopileError, ArithmeticError):
    pass


class NotHermitian(DiscopileError, ValueError):
    pass


class InvalidDistribution(DiscopileError, ValueError):
    pass


class TooManyBranches(DiscopileError, ValueError):
    pass


class AllBranchesZeroMass(DiscopileError, ArithmeticError):
    pass


class IncompatibleShapes(DiscopileError, ValueError):
    pass


class NanLoss(DiscopileError, ArithmeticError):
    pass


class ParseError(DiscopileError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
