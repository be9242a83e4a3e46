"""Exception hierarchy for the engine."""


class MorseError(Exception):
    """Base class for all engine errors."""


class NonConvergence(MorseError):
    pass


class OffSurface(MorseError):
    pass


class NotCritical(MorseError):
    pass


class DegenerateCritical(MorseError):
    pass


class BlowUp(MorseError):
    pass


class IndexGap(MorseError):
    pass


class AmbiguousCluster(MorseError):
    pass


class DegenerateFrame(MorseError):
    pass


class NotAComplex(MorseError):
    def __init__(self, degree, message=None):
        self.degree = degree
        super().__init__(message or f"boundary composition nonzero at degree {degree}")


class ParseError(MorseError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ThresholdOnCriticalValue(MorseError):
    pass


class UnknownScenario(MorseError, KeyError):
    def __init__(self, name, registered):
        self.name = name
        self.registered = list(registered)
        msg = f"unknown scenario {name!r}; registered: {', '.join(self.registered)}"
        super().__init__(msg)

    def __str__(self):
        return self.args[0]


class SeedExhaustion(UserWarning):
    """Critical point set changed under seed-grid refinement."""


class NonManifoldWarning(UserWarning):
    """An edge of a loaded mesh does not border exactly two triangles."""
