'''
Exceptions raised by zetabranch. Verifier failures are report entries, never exceptions;
everything here signals bad input, a violated precondition or a cutoff that starved a computation.
'''

class ZetaBranchError(Exception):
    '''
    Base class of every error raised by the library.
    '''

class PoleError(ZetaBranchError, ValueError):
    '''
    Raised when a derivative is requested at the pole g^-1.oo of a transformation.
    '''

class AmbiguousClassification(ZetaBranchError, ValueError):
    '''
    The trace sits within tolerance of 2 without being exactly 2 up to round-off.
    '''
    def __init__(self, message: str, candidates: list):
        super().__init__(message)
        self.candidates = list(candidates)

class IdentityHasNoFixedPointSet(ZetaBranchError, ValueError):
    pass

class NotHyperbolic(ZetaBranchError, ValueError):
    pass

class CoincidentGeodesics(ZetaBranchError, ValueError):
    pass

class InvalidPoint(ZetaBranchError, ValueError):
    pass

class BallTooLarge(ZetaBranchError, RuntimeError):
    pass

class StabilizesInfinity(ZetaBranchError, ValueError):
    pass

class EmptyInput(ZetaBranchError, ValueError):
    pass

class NoSpheres(ZetaBranchError, ValueError):
    pass

class PairingIncomplete(ZetaBranchError, RuntimeError):
    pass

class ParabolicDetected(ZetaBranchError, ValueError):
    pass

class ConditionStarFails(ZetaBranchError, ValueError):
    pass

class EmptyActiveSet(ZetaBranchError, RuntimeError):
    pass

class ChartViolation(ZetaBranchError, RuntimeError):
    '''
    Some transition maps its source chart across a pole or outside every admissible target chart.
    '''
    def __init__(self, message: str, offenders: list):
        super().__init__(message)
        self.offenders = list(offenders)

class NoConvergence(ZetaBranchError, RuntimeError):
    pass

class ParseError(ZetaBranchError, ValueError):
    pass

class BadDeterminant(ZetaBranchError, ValueError):
    def __init__(self, message: str, context: dict = None):
        super().__init__(message)
        self.context = context or {}

class IdentityGenerator(ZetaBranchError, ValueError):
    pass

class IoError(ZetaBranchError, OSError):
    pass
