"""File-backed artifacts: suffix dispatch, storage and diagnostics that name the file."""

import logging
import shutil

import pytest

from app.domain.models.errors import FormatSemanticError, FormatSyntaxError
from app.domain.models.events import ConstructionCompleted
from app.infrastructure.repositories import FileArtifactRepository
from app.infrastructure.services.event_publishers import LoggingEventPublisher

pytestmark = pytest.mark.unit


@pytest.fixture
def repository(fixtures_dir):
    return FileArtifactRepository(fixtures_dir)


class TestLoading:
    def test_relative_paths_resolve_against_the_root(self, repository):
        diagram = repository.load_diagram("diagrams/odometer2.bbd")
        assert diagram.vertex_counts == (1, 1, 1, 1)
        assert len(repository.load_cylmap("maps/p3.cyl").rules) == 4
        assert repository.load_measure("measures/uniform.msr").kind == "bernoulli"
        assert repository.load_spec("specs/spacer.csp").repeat == 1

    @pytest.mark.parametrize(
        "relative, codec",
        [
            ("a.bbd", "diagrams"),
            ("a.cyl", "cylmaps"),
            ("a.msr", "measures"),
            ("a.csp", "specs"),
        ],
    )
    def test_codec_follows_the_suffix(self, repository, relative, codec):
        assert repository.codec_for(relative) is getattr(repository, codec)

    def test_unknown_suffix(self, repository):
        with pytest.raises(FormatSyntaxError) as excinfo:
            repository.codec_for("notes.txt")
        assert excinfo.value.source == "notes.txt"

    def test_errors_carry_the_path(self, repository):
        with pytest.raises(FormatSemanticError) as excinfo:
            repository.load_diagram("diagrams/unknown_vertex.bbd")
        assert excinfo.value.diagnostic().startswith("diagrams/unknown_vertex.bbd:3:10: ")

    def test_missing_file(self, repository):
        with pytest.raises(FileNotFoundError):
            repository.load_diagram("diagrams/absent.bbd")

    def test_canonical_text(self, repository, fixtures_dir):
        expected = (fixtures_dir / "diagrams/odometer2.bbd").read_text(encoding="utf-8")
        assert repository.canonical_text("diagrams/odometer2_messy.bbd") == expected


class TestStoring:
    def test_saved_artifacts_load_back(self, repository, tmp_path):
        store = FileArtifactRepository(tmp_path)
        diagram = repository.load_diagram("diagrams/fibonacci.bbd")
        T = repository.load_cylmap("maps/p3.cyl")
        store.save_diagram("out/fibonacci.bbd", diagram)
        path = store.save_cylmap("out/p3.cyl", T)
        assert path == tmp_path / "out" / "p3.cyl"
        assert store.load_diagram("out/fibonacci.bbd") == diagram
        assert store.load_cylmap(path) == T

    def test_files_are_written_canonically(self, fixtures_dir, tmp_path):
        shutil.copytree(fixtures_dir / "maps", tmp_path / "maps")
        store = FileArtifactRepository(tmp_path)
        text = store.canonical_text("maps/odometer.cyl")
        store.write_text("maps/copy.cyl", text)
        assert (tmp_path / "maps" / "copy.cyl").read_bytes() == text.encode("utf-8")


class TestLoggingPublisher:
    def test_events_reach_the_log(self, caplog):
        publisher = LoggingEventPublisher()
        event = ConstructionCompleted(
            aggregate_id="odometer2", construction="towers", levels=3
        )
        with caplog.at_level(logging.INFO):
            publisher.publish(event)
        assert "odometer2" in caplog.text
        assert "towers" in caplog.text
