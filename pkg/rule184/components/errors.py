class Rule184Error(Exception):
    """Root of every error raised by the library; the CLI maps its subclasses to
    exit codes (`ToleranceError` is 3, everything else raised from user input is 2).
    """


class TopologyError(Rule184Error, ValueError):
    pass


class InvalidSpecError(Rule184Error, ValueError):
    pass


class SlopeError(Rule184Error, ValueError):
    pass


class WindowTooShortError(Rule184Error, ValueError):
    pass


class LightConeExhaustedError(Rule184Error, ValueError):
    pass


class NotInLambdaError(Rule184Error, ValueError):
    """The trit configuration has no CA 184 preimage. The offending pair of
    subsequent particles is kept in `witness`."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"No CA 184 preimage: {witness}")


class RingParityError(Rule184Error, ValueError):
    pass


class RingImbalanceError(Rule184Error, ValueError):
    pass


class NotPhaseBoundaryError(Rule184Error, ValueError):
    pass


class HorizonExhaustedError(Rule184Error, ValueError):
    pass


class InvalidPathError(Rule184Error, ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__(f"Invalid path: {violations[:3]}")


class BurnInTooShortError(Rule184Error, ValueError):
    pass


class EnumerationTooLargeError(Rule184Error, ValueError):
    pass


class DegenerateFitError(Rule184Error, ValueError):
    pass


class NoSurvivorsError(Rule184Error, RuntimeError):
    pass


class InsufficientSamplesError(Rule184Error, RuntimeError):
    pass


class ManifestError(Rule184Error, ValueError):
    pass


class ToleranceError(Rule184Error, AssertionError):
    pass
