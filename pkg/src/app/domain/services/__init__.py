"""Domain services - Construction services, one per module"""

from .bratteli_service import BratteliService
from .odometer_service import OdometerService
from .rank_one_service import RankOneService
from .sampling_service import SamplingService
from .symbolic_service import SymbolicService
from .topology_service import TopologyService
from .tower_service import TowerService
from .vershik_service import VershikService

__all__ = [
    "SymbolicService",
    "BratteliService",
    "VershikService",
    "OdometerService",
    "TowerService",
    "RankOneService",
    "TopologyService",
    "SamplingService",
]
