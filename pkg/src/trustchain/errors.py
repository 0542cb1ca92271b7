"""Exception types raised by the trustchain package."""


class TrustChainError(Exception):
    """Base class for all trustchain errors."""


class MalformedInput(TrustChainError):
    pass


class DuplicateIdentity(TrustChainError):
    pass


class Unauthorized(TrustChainError):
    pass


class InvalidTransactionInBatch(TrustChainError):
    """A block was rejected because one of its transactions failed validation."""

    def __init__(self, index: int, tx_id: str, reason: str):
        self.index = index
        self.tx_id = tx_id
        self.reason = reason
        super().__init__(f"tx {tx_id} at index {index} rejected: {reason}")


class InvalidThresholds(TrustChainError):
    pass


class DuplicateContract(TrustChainError):
    pass


class UnknownCommodity(TrustChainError):
    pass


class UnknownContract(TrustChainError):
    pass


class ChainIncomplete(TrustChainError):
    pass


class DimensionMismatch(TrustChainError):
    pass


class NoSuchTrade(TrustChainError):
    pass


class DuplicateFlag(TrustChainError):
    pass


class NotPartyToTrade(TrustChainError):
    pass


class UnknownSeller(TrustChainError):
    pass


class NotFound(TrustChainError):
    pass


class AlreadyRevoked(TrustChainError):
    pass


class NotRevoked(TrustChainError):
    pass


class PlanMismatch(TrustChainError):
    pass


class ScenarioParseError(TrustChainError):
    """Scenario file failed to parse or validate; carries a location hint."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{message}" + (f" (at {where})" if where else ""))


class ScenarioAssertionError(TrustChainError):
    """One or more scenario assertions failed after replay."""

    def __init__(self, failures: list):
        self.failures = failures
        super().__init__("; ".join(str(f) for f in failures))
