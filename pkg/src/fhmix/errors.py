"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage errors are handled by argparse
(exit 1), `DataError` exits 2, `PriorProprietyError` exits 3 and
`SamplerError` exits 4.
"""


class FhmixError(Exception):
    """Base class for all package-specific errors."""


class DataError(FhmixError):
    """Malformed or inconsistent input data."""


class PriorProprietyError(FhmixError):
    """Requested prior fails the posterior-propriety conditions."""


class ConfigError(FhmixError):
    """Invalid run configuration (chain lengths, option values)."""


class EstimationError(FhmixError):
    """Frequentist fit failure (e.g. REML optimizer non-convergence)."""


class SamplerError(FhmixError):
    """Sampler failure: non-finite state, non-integrable conditional,
    or rejection loop exceeding its iteration budget."""
