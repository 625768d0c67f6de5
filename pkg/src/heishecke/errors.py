"""Exception hierarchy.

Input errors subclass ValueError; resource limits and verification failures
do not, so callers (the CLI in particular) can map them to distinct exit codes.
"""


class HeckeError(Exception):
    pass


class SingularMatrix(HeckeError, ValueError):
    pass


class IllDefinedAction(HeckeError, ValueError):
    pass


class NotInMonoid(HeckeError, ValueError):
    pass


class NotLocallyIntegral(HeckeError, ValueError):
    pass


class LocalityMismatch(HeckeError, ValueError):
    pass


class SizeLimit(HeckeError):
    """An enumeration would exceed its configured budget."""


class BudgetExhausted(HeckeError):
    """A search gave up without a conclusion. Not a refutation."""


class FormulaMismatch(HeckeError):
    """An enumerated quantity disagrees with its closed form."""


class WitnessNotFound(HeckeError):
    pass
