"""Exception hierarchy.

Three families map onto CLI exit codes: configuration problems (2), numerical
failures (3) and cache problems (4).
"""


class EthGammaError(Exception):
    exit_code = 3


class ConfigError(EthGammaError, ValueError):
    exit_code = 2


class NumericError(EthGammaError):
    exit_code = 3


class CacheError(EthGammaError):
    exit_code = 4


# hilbert / models
class InvalidSector(NumericError, ValueError):
    pass


class SectorMismatch(NumericError, ValueError):
    pass


class InvalidSize(NumericError, ValueError):
    pass


class InvalidSite(NumericError, IndexError):
    pass


# linalg
class NotHermitian(NumericError, ValueError):
    pass


class ConvergenceFailure(NumericError, RuntimeError):
    pass


class DimensionMismatch(NumericError, ValueError):
    pass


# thermo
class EmptySpectrum(NumericError, ValueError):
    pass


class NonFiniteInput(NumericError, ValueError):
    pass


class EnergyOutOfRange(NumericError, ValueError):
    pass


class DegenerateSpectrum(NumericError, ValueError):
    pass


# eth
class EmptyWindow(NumericError, ValueError):
    pass


class AllBinsSparse(NumericError, ValueError):
    pass


class TooFewBins(NumericError, ValueError):
    pass


class DegenerateAbscissa(NumericError, ValueError):
    pass


class DomainError(NumericError, ValueError):
    pass


class ZeroColumn(NumericError, ValueError):
    pass


class WindowTooLarge(NumericError, ValueError):
    pass


# cli
class ConfigInvalid(ConfigError):
    pass


class DimensionGuard(ConfigError):
    pass


class MissingData(EthGammaError, FileNotFoundError):
    exit_code = 3


class CacheCorrupt(CacheError):
    pass


class CacheMiss(CacheError, KeyError):
    pass
