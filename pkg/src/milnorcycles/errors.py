"""
Exceptions raised by :py:mod:`milnorcycles`.

Input and precondition problems subclass :py:class:`ValueError`; arithmetic
obstructions met during a computation subclass :py:class:`ArithmeticError`.
The command line front end maps the first group to exit code 2 and the second
to exit code 1.
"""


class MilnorCyclesError(Exception):
    """Root of the package's exception hierarchy"""


# -- input / precondition errors ---------------------------------------------

class ParseError(MilnorCyclesError, ValueError):
    """Text that does not follow the polynomial grammar"""


class FieldError(MilnorCyclesError, ValueError):
    """Bad field tag, non-prime modulus, or mixed fields"""


class PreconditionError(MilnorCyclesError, ValueError):
    """An operation was called outside its domain"""


class NotInLocalRing(MilnorCyclesError, ValueError):
    """A fraction whose denominator vanishes at t = 0"""


class GhostUndefined(MilnorCyclesError, ValueError):
    """Ghost map requested in characteristic p <= m"""


class ReducibleExtension(MilnorCyclesError, ValueError):
    """Extension polynomial (or tower step) is not irreducible"""


class NonUnitCoordinate(MilnorCyclesError, ValueError):
    """A point coordinate is not a unit of the extension algebra"""


class NonUnitParameter(MilnorCyclesError, ValueError):
    """A witness parameter is not a unit of A"""


class SteinbergDegenerate(NonUnitParameter):
    """1 - a is not a unit for a Steinberg witness"""


class NonUnitEntry(MilnorCyclesError, ValueError):
    """A Milnor symbol entry is not a unit"""


class NotRelative(MilnorCyclesError, ValueError):
    """No symbol entry is congruent to 1 modulo t^r"""


# -- arithmetic obstructions --------------------------------------------------

class NonUnit(MilnorCyclesError, ArithmeticError):
    """Inverse requested for a non-unit"""


class DivisionByNonUnit(NonUnit, ZeroDivisionError):
    """Division in the local ring by an element vanishing at t = 0"""


class DenominatorNotUnit(MilnorCyclesError, ArithmeticError):
    """A minimal polynomial has coefficients outside A"""


class UnhandledFaceShape(MilnorCyclesError, ArithmeticError):
    """A face that is neither empty nor a monic triangular cycle"""


class PairDiverged(MilnorCyclesError, ArithmeticError):
    """Two mod-equivalent reductions took different schedules"""


class CrossCheckFailed(MilnorCyclesError, ArithmeticError):
    """Two computations of the same quantity disagree"""


class WitnessMismatch(CrossCheckFailed):
    """A witness boundary or a reduction telescope differs from its claim"""


class RelativeOrderLost(CrossCheckFailed):
    """A relative norm output vanishes to a lower order than its input"""


class VerificationFailed(MilnorCyclesError, ArithmeticError):
    """A recorded witness or a property suite did not verify"""


class PropertyFailure(MilnorCyclesError, AssertionError):
    """A randomized property check found a counterexample"""

    def __init__(self, prop, message):
        super().__init__(f'{prop}: {message}')
        self.prop = prop
