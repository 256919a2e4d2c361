"""Exception hierarchy shared by all modules."""


class EscapeAtlasError(Exception):
    pass


class InvalidValue(EscapeAtlasError, ValueError):
    pass


class RangeExceeded(EscapeAtlasError, OverflowError):
    pass


class ArgumentOutOfEvaluableRange(EscapeAtlasError):
    pass


class UnknownKind(EscapeAtlasError, ValueError):
    pass


class DescriptorSyntaxError(EscapeAtlasError, SyntaxError):
    def __init__(self, msg, text, position):
        super().__init__(f"{msg} at position {position} in {text!r}")
        self.text = text
        self.position = position


class PreconditionError(EscapeAtlasError, ValueError):
    pass


class InvalidRadius(PreconditionError):
    pass


class BelowCriticalRadius(PreconditionError):
    pass


class NotBracketed(EscapeAtlasError):
    pass


class IndexCapExceeded(EscapeAtlasError):
    pass


class NoAdmissibleRadius(EscapeAtlasError):
    pass


class OutsideDisc(EscapeAtlasError):
    pass


class BranchLost(EscapeAtlasError):
    pass


class InverseFailed(EscapeAtlasError):
    pass


class ScaffoldFailed(EscapeAtlasError):
    def __init__(self, level, cause=None):
        super().__init__(f"scaffold construction failed at level {level}: {cause}")
        self.level = level
        self.cause = cause


class PullbackFailed(EscapeAtlasError):
    def __init__(self, level, cause=None):
        super().__init__(f"inverse branch failed at level {level}: {cause}")
        self.level = level
        self.cause = cause


class PixelBudgetExceeded(EscapeAtlasError):
    pass


class EmptyIntersection(EscapeAtlasError):
    pass
