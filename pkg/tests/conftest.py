"""Shared fixtures: the binary odometer, its zero markers and the services around them."""

from pathlib import Path

import pytest

from app.application.workflows.construction_workflow import ConstructionWorkflow
from app.domain.entities.bratteli import SpecialDiagramSpec, SpecialLevel
from app.domain.entities.measures import Bernoulli
from app.domain.entities.symbolic import SeqSpace
from app.domain.services.bratteli_service import BratteliService
from app.domain.services.odometer_service import OdometerService
from app.domain.services.rank_one_service import RankOneService
from app.domain.services.symbolic_service import SymbolicService
from app.domain.services.topology_service import TopologyService
from app.domain.services.tower_service import TowerService
from app.domain.services.vershik_service import VershikService
from app.infrastructure.codecs import DiagramCodec
from app.infrastructure.repositories.file_artifact_repository import FileArtifactRepository
from app.infrastructure.services.event_publishers import InMemoryEventPublisher
from app.infrastructure.settings import DeskSettings
from app.utils.trace_logger import reset_trace_logger

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def fresh_trace_logger():
    reset_trace_logger()
    yield
    reset_trace_logger()


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def binary() -> SeqSpace:
    return SeqSpace.constant(2)


@pytest.fixture
def events() -> InMemoryEventPublisher:
    return InMemoryEventPublisher()


@pytest.fixture
def symbolic() -> SymbolicService:
    return SymbolicService()


@pytest.fixture
def odometer(symbolic) -> OdometerService:
    return OdometerService(symbolic)


@pytest.fixture
def vershik() -> VershikService:
    return VershikService()


@pytest.fixture
def towers(symbolic, events) -> TowerService:
    return TowerService(symbolic_service=symbolic, event_publisher=events)


@pytest.fixture
def topology(symbolic) -> TopologyService:
    return TopologyService(symbolic_service=symbolic)


@pytest.fixture
def bratteli(events) -> BratteliService:
    return BratteliService(event_publisher=events)


@pytest.fixture
def rank_one(odometer, vershik) -> RankOneService:
    return RankOneService(odometer, vershik)


@pytest.fixture
def T(odometer, binary):
    """The dyadic odometer x -> x + 1"""
    return odometer.odometer_map(binary)


@pytest.fixture
def markers(towers, binary):
    return towers.odometer_markers(binary, 6)


@pytest.fixture
def P3(towers, T, markers):
    return towers.approximant_map(T, markers, 3)


@pytest.fixture
def uniform(binary) -> Bernoulli:
    return Bernoulli.uniform(binary)


@pytest.fixture
def load_diagram():
    codec = DiagramCodec()

    def load(name: str):
        return codec.parse((FIXTURES / "diagrams" / name).read_text(encoding="utf-8"))

    return load


@pytest.fixture
def special_spec() -> SpecialDiagramSpec:
    return SpecialDiagramSpec(
        levels=(
            SpecialLevel(level=1, zero=(0, 1), one=(2, 3), blocks={2: (4, 5), 3: (6, 7)}),
            SpecialLevel(level=2, zero=(0, 1), one=(2, 3), blocks={3: (4, 5)}),
        )
    )


@pytest.fixture
def workflow(events) -> ConstructionWorkflow:
    return ConstructionWorkflow(
        settings=DeskSettings(),
        repository=FileArtifactRepository(FIXTURES),
        event_publisher=events,
    )
