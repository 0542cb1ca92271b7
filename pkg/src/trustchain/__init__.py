"""TrustChain: a deterministic permissioned supply-chain ledger with
commodity quality scoring, trader reputation and trust management, an
attack-defense suite, and a throughput/latency benchmark harness."""

__version__ = "0.1.0"

from .contracts import QualityContract, RatingConfig
from .network import Network, Orderer
from .trust import TrustConfig

__all__ = ["Network", "Orderer", "QualityContract", "RatingConfig",
           "TrustConfig", "__version__"]
