"""Exception hierarchy shared by the library and the command line."""


class HiddenFailureError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(HiddenFailureError, ValueError):
    """Invalid model parameters, evidence or argument ranges."""


class DegenerateEvidenceError(HiddenFailureError):
    """The observation has zero probability under every model cell."""


class UndefinedLimitError(HiddenFailureError):
    """The unanimous-positive limit does not exist for the model."""


class ConvergenceError(HiddenFailureError):
    """An adaptive computation hit its size cap before converging."""


class OracleBudgetError(HiddenFailureError):
    """Rejection sampling ran out of draws before enough acceptances."""
