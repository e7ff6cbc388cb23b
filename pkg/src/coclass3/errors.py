"""Exception hierarchy for the coclass3 library."""


class Coclass3Error(Exception):
    """Base class for all library errors."""


class MalformedSpec(Coclass3Error):
    """A structured presentation description is invalid (dangling generator,
    relative order not a prime power, malformed word)."""


class InconsistentPresentation(Coclass3Error):
    """A presentation failed the overlap consistency tests where consistency
    was required."""


class CollectionError(Coclass3Error):
    """Collection failed to terminate within the fuel bound (indicates a
    non-weighted presentation or an engine bug)."""


class PresentationMismatch(Coclass3Error):
    """Two elements from different presentations were combined."""


class CapExceeded(Coclass3Error):
    """An enumeration or construction exceeded the configured cap."""


class NotNormal(Coclass3Error):
    """A quotient was requested by a non-normal subgroup."""


class BadParameters(Coclass3Error):
    """Family label parameters outside their valid range."""


class NotTwoGenerated(Coclass3Error):
    """An operation requiring a 2-generated group got something else."""


class WrongAbelianization(Coclass3Error):
    """The commutator quotient is not of the required C_{3^e} x C_3 shape."""


class UncodedKernel(Coclass3Error):
    """A transfer kernel matches none of the five coded candidate subgroups."""


class StepTooLarge(Coclass3Error):
    """Descendant step size exceeds the nuclear rank."""


class AmbiguousSelector(Coclass3Error):
    """A path selector matched more than one descendant."""


class NoMatch(Coclass3Error):
    """A path selector matched no descendant."""


class RefinementError(Coclass3Error):
    """A coarse presentation could not be refined to a weighted presentation
    with prime relative orders (right-hand side not strictly ascending)."""
