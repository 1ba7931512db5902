"""Exception taxonomy shared by all modules.

Every failure mode that a caller is expected to branch on gets its own
class; messages carry the offending valuations/precisions so that suite
counterexamples are replayable from the text alone.
"""


class PadicError(Exception):
    """Base class for all errors raised by this package."""


class ContextMismatch(PadicError):
    """Operands live over different primes."""


class DivisionByZeroToPrecision(PadicError):
    """Inversion of a value all of whose known digits vanish."""


class OutsideExpDomain(PadicError):
    """exp requires valuation >= e0 (1 for p > 2, 2 for p = 2)."""


class OutsideLogDomain(PadicError):
    """log requires the argument to be congruent to 1 at the stated level."""


class OutsideRepresentableDomain(PadicError):
    """The global exponential splits log only over an algebraically closed
    field; over Q_p it is representable exactly on the exp-domain."""


class ZeroResidue(PadicError):
    """Teichmuller lift of the zero residue class does not exist."""


class PrecisionExhausted(PadicError):
    """A rank/pivot decision is ambiguous at the working precision."""


class NotConnected(PadicError):
    """Operation requires an algebra with a single primitive idempotent."""


class NotAUnit(PadicError):
    """Element is not invertible (to precision)."""


class IntegralStructureFailure(PadicError):
    """No usable integral structure was found; the caller may supply
    idempotents explicitly instead."""


class NotSurjective(PadicError):
    """The given algebra morphism is not surjective."""


class AlgebraMismatch(PadicError):
    """Twist/spectral data belong to different algebras."""


class CommutationFailure(PadicError):
    """Operators/units required to commute do not."""


class DimensionMismatch(PadicError):
    """Operands disagree in rank or in the number of Higgs components."""


class ValidationError(PadicError):
    """A Higgs module / representation violates its invariants."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class ComparisonFailure(PadicError):
    """Higgs and group cohomology dimensions disagree; carries both reports."""

    def __init__(self, higgs_report, group_report):
        self.higgs_report = higgs_report
        self.group_report = group_report
        super().__init__(
            "cohomology mismatch: higgs h=%s vs group h=%s"
            % (list(higgs_report.h), list(group_report.h))
        )


class ParseError(PadicError):
    """Malformed instance file."""
