EXIT_PASS = 0
EXIT_ASSERTION = 2
EXIT_CONFIG = 3


class ChainforgeError(Exception):
    exit_code = EXIT_ASSERTION


class ConfigError(ChainforgeError):
    exit_code = EXIT_CONFIG


class BadSpec(ConfigError):
    pass


class HardAssertionError(ChainforgeError):
    def __init__(self, name: str, message: str = ""):
        super().__init__(f"{name}: {message}" if message else name)
        self.name = name


class DegenerateCrossing(ChainforgeError):
    pass


class TangencyError(ChainforgeError):
    pass


class NonConvexDomain(ChainforgeError):
    pass


class TooLarge(ChainforgeError):
    pass


class NotInCommonCell(ChainforgeError):
    pass


class Infeasible(ChainforgeError):
    pass


class BudgetExceeded(ChainforgeError):
    pass


class NotFine(ChainforgeError):
    pass


class DeltaTooLarge(ChainforgeError):
    pass


class DimUnsupported(ChainforgeError):
    pass


class BoundaryMismatch(ChainforgeError):
    pass


class OddParity(ChainforgeError):
    pass


class NotLocalized(ChainforgeError):
    pass


class CertMissing(ChainforgeError):
    pass


class ExhaustedSamples(ChainforgeError):
    pass


class TangentRay(ChainforgeError):
    pass


class DegenerateCenter(ChainforgeError):
    pass


class NotFound(ChainforgeError):
    pass


class NotContractible(ChainforgeError):
    pass


def hard_assert(condition: bool, name: str, message: str = "") -> None:
    if not condition:
        raise HardAssertionError(name, message)
