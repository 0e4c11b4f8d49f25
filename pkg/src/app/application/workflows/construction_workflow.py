"""Construction workflow: the facade the command line and the graph nodes call."""

import logging
import re
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, TypeVar

from ...domain.entities.adic import AdicInt
from ...domain.entities.bratteli import Diagram
from ...domain.entities.cylmap import CylMap
from ...domain.entities.measures import Bernoulli, MeasureSpec
from ...domain.entities.paths import DigitTail, LazyPath, PathPrefix
from ...domain.entities.rank_one import InvariantMeasure
from ...domain.entities.symbolic import SeqSpace
from ...domain.entities.towers import MarkerSeq, RokhlinCertificate
from ...domain.interfaces.events import EventPublisher
from ...domain.interfaces.repositories import ArtifactRepository, PathLike
from ...domain.models.errors import (
    FormatError,
    FormatSyntaxError,
    RokhlinInfeasibleError,
    StageBudgetError,
)
from ...domain.models.value_objects import ClauseStatus, Verdict, fraction_text, parse_fraction
from ...domain.services.bratteli_service import BratteliService
from ...domain.services.odometer_service import OdometerService
from ...domain.services.rank_one_service import RankOneService
from ...domain.services.sampling_service import SamplingService
from ...domain.services.symbolic_service import SymbolicService
from ...domain.services.topology_service import TopologyService
from ...domain.services.tower_service import TowerService
from ...domain.services.vershik_service import VershikService
from ...infrastructure.codecs import CylMapCodec, DiagramCodec
from ...infrastructure.codecs.literals import (
    format_adic,
    format_point,
    parse_lambda_spec,
    parse_path_labels,
    parse_point,
    parse_set,
)
from ...infrastructure.repositories.file_artifact_repository import FileArtifactRepository
from ...infrastructure.settings import DeskSettings
from .reports import CommandReport, CommandStatus

logger = logging.getLogger(__name__)

R = TypeVar("R")

_APPROXIMANT = re.compile(r"^P(\d+)$")


def _option(name: str, parse: Callable[[], R]) -> R:
    """Run a literal parser and attribute its errors to a command-line option"""
    try:
        return parse()
    except FormatError as e:
        if e.source is None:
            e.source = name
        raise


def _verdict(flag: bool) -> str:
    return Verdict.YES.value if flag else Verdict.NO.value


class ConstructionWorkflow:
    """Presets plus one method per command; every method returns a CommandReport."""

    def __init__(
        self,
        settings: Optional[DeskSettings] = None,
        repository: Optional[ArtifactRepository] = None,
        event_publisher: Optional[EventPublisher] = None,
    ):
        self.settings = settings or DeskSettings()
        self.repository = repository or FileArtifactRepository()
        self.event_publisher = event_publisher

        budgets = self.settings.budgets
        self.symbolic = SymbolicService(budgets=budgets, event_publisher=event_publisher)
        self.bratteli = BratteliService(event_publisher=event_publisher)
        self.vershik = VershikService()
        self.odometer = OdometerService(self.symbolic)
        self.towers = TowerService(
            symbolic_service=self.symbolic,
            budgets=budgets,
            event_publisher=event_publisher,
            vershik_service=self.vershik,
            odometer_service=self.odometer,
        )
        self.rank_one = RankOneService(
            odometer_service=self.odometer,
            vershik_service=self.vershik,
            event_publisher=event_publisher,
        )
        self.topology = TopologyService(
            symbolic_service=self.symbolic, budgets=budgets, event_publisher=event_publisher
        )
        self.sampling = SamplingService(self.settings.seed)
        self.diagram_codec = DiagramCodec()
        self.cylmap_codec = CylMapCodec(self.symbolic)

        logger.info(f"Construction workflow initialized (seed={self.settings.seed})")

    # -- presets -------------------------------------------------------------

    def space(self, text: str) -> SeqSpace:
        """``2``, ``2adic`` or any lambda-spec"""
        return _option("--space", lambda: parse_lambda_spec(text))

    def markers(self, kind: str, space: SeqSpace, N: int) -> MarkerSeq:
        """The certified odometer marker presets ``zeros`` and ``ones``"""
        if kind not in ("zeros", "ones"):
            raise _option_error("--markers", f"unknown marker preset '{kind}'")
        return self.towers.odometer_markers(space, N, kind)

    def cylmap(self, text: str, space: SeqSpace) -> CylMap:
        """``odometer``, ``identity``, ``P<n>`` (periodic approximant) or a table file"""
        if text == "odometer":
            return self.odometer.odometer_map(space)
        if text == "identity":
            return CylMap.identity(space)
        match = _APPROXIMANT.match(text)
        if match:
            n = int(match.group(1))
            M = self.towers.odometer_markers(space, n)
            return self.towers.approximant_map(M.T, M, n)
        T = self.repository.load_cylmap(text)
        space.ensure_same(T.space)
        return T

    def measure(self, text: str, space: SeqSpace) -> MeasureSpec:
        """``uniform`` or a measure file"""
        if text == "uniform":
            return Bernoulli.uniform(space)
        mu = self.repository.load_measure(text)
        space.ensure_same(mu.space)
        return mu

    def measures(self, texts: Sequence[str], space: SeqSpace) -> List[MeasureSpec]:
        return [self.measure(text, space) for text in (texts or ["uniform"])]

    def _path(self, D: Diagram, text: str) -> PathPrefix:
        labels, vertices = _option("--path", lambda: parse_path_labels(text))
        return self.vershik.path_from_labels(D, labels, vertices)

    def _lazy_path(self, D: Diagram, prefix: PathPrefix) -> LazyPath:
        return LazyPath(
            diagram=D, head=prefix, tail=DigitTail(), depth_budget=self.settings.depth_budget
        )

    @staticmethod
    def _shows_vertices(D: Diagram) -> bool:
        return any(count > 1 for count in D.vertex_counts)

    # -- diagrams --------------------------------------------------------------

    def validate(self, path: PathLike, up_to_level: Optional[int] = None) -> CommandReport:
        D = self.repository.load_diagram(path)
        report = self.bratteli.validate(D, up_to_level)
        extremes = self.bratteli.check_no_cofinal_extremes(D)
        lines = [str(defect) for defect in report.defects]
        if report.is_valid:
            lines.append(f"valid up to level {report.up_to_level}")
        else:
            lines.append(f"{len(report.defects)} defect(s) up to level {report.up_to_level}")
        lines.append(f"no cofinal extreme paths: {extremes.verdict.value} ({extremes.detail})")
        return CommandReport(
            verb="validate",
            status=CommandStatus.OK if report.is_valid else CommandStatus.DEFECTS,
            data={
                "up_to_level": report.up_to_level,
                "valid": report.is_valid,
                "defects": [d.model_dump(mode="json") for d in report.defects],
                "clauses": report.clauses,
                "extremes": extremes.model_dump(mode="json"),
            },
            lines=lines,
        )

    def fmt(self, path: PathLike, write: bool = False, check: bool = False) -> CommandReport:
        """Canonical form of any artifact; ``check`` reports files that are not canonical"""
        canonical = self.repository.canonical_text(path)
        changed = canonical != self.repository.read_text(path)
        if write and changed:
            self.repository.write_text(path, canonical)
        status = CommandStatus.DEFECTS if check and changed else CommandStatus.OK
        return CommandReport(
            verb="fmt",
            status=status,
            data={"text": canonical, "changed": changed},
            lines=canonical.splitlines(),
        )

    def _diagram_report(self, verb: str, D: Diagram, output: Optional[PathLike]) -> CommandReport:
        if output is not None:
            self.repository.save_diagram(output, D)
        text = self.diagram_codec.serialize(D)
        return CommandReport(
            verb=verb,
            data={"vertex_counts": list(D.vertex_counts), "diagram": text},
            lines=text.splitlines(),
        )

    def telescope(
        self, path: PathLike, cuts: Sequence[int], output: Optional[PathLike] = None
    ) -> CommandReport:
        D = self.repository.load_diagram(path)
        return self._diagram_report("telescope", self.bratteli.telescope(D, cuts), output)

    def split(self, path: PathLike, level: int, output: Optional[PathLike] = None) -> CommandReport:
        D = self.repository.load_diagram(path)
        return self._diagram_report("split", self.bratteli.split(D, level), output)

    def heights(self, path: PathLike, levels: Optional[int] = None) -> CommandReport:
        D = self.repository.load_diagram(path)
        top = D.depth if levels is None else levels
        D.ensure_level(top)
        table = [list(D.heights(n)) for n in range(top + 1)]
        lines = [f"level {n}: " + " ".join(str(h) for h in row) for n, row in enumerate(table)]
        incidence = [list(map(list, self.bratteli.incidence(D, n).rows)) for n in range(1, top + 1)]
        return CommandReport(
            verb="heights", data={"heights": table, "incidence": incidence}, lines=lines
        )

    # -- paths -----------------------------------------------------------------

    def rank(self, path: PathLike, labels: str) -> CommandReport:
        D = self.repository.load_diagram(path)
        prefix = self._path(D, labels)
        n = prefix.length
        rank = self.vershik.rank(D, prefix)
        height = self.vershik.height(D, n, prefix.terminal)
        coords = [
            [self.vershik.rank(D, prefix.truncate(k)), prefix.edges[k - 1].target]
            for k in range(1, n + 1)
        ]
        return CommandReport(
            verb="rank",
            data={
                "path": prefix.text(with_vertices=self._shows_vertices(D)),
                "level": n,
                "vertex": prefix.terminal,
                "rank": rank,
                "height": height,
                "coords": coords,
            },
            lines=[
                f"rank {rank} of {height} at level {n} vertex {prefix.terminal}",
                "coords " + " ".join(f"({i},{v})" for i, v in coords),
            ],
        )

    def successor(
        self, path: PathLike, labels: str, steps: int = 1, inverse: bool = False
    ) -> CommandReport:
        D = self.repository.load_diagram(path)
        start = self._path(D, labels)
        y = self._lazy_path(D, start)
        switch = 0
        for _ in range(steps):
            if not inverse:
                switch = max(switch, self.vershik.switch_level(y))
            y = self.vershik.predecessor(y) if inverse else self.vershik.successor(y)
        length = max(start.length, switch)
        if not D.is_infinite:
            length = min(length, D.depth)
        result = y.prefix(length)
        with_vertices = self._shows_vertices(D)
        verb = "predecessor" if inverse else "successor"
        return CommandReport(
            verb="successor",
            data={
                "from": start.text(with_vertices),
                "to": result.text(with_vertices),
                "steps": steps,
                "direction": verb,
                "switch_level": switch if not inverse else None,
            },
            lines=[f"{start.text(with_vertices)} -> {result.text(with_vertices)} ({verb} x{steps})"],
        )

    def orbit(self, path: PathLike, labels: str, steps: int) -> CommandReport:
        D = self.repository.load_diagram(path)
        start = self._path(D, labels)
        n = start.length
        with_vertices = self._shows_vertices(D)
        y = self._lazy_path(D, start)
        visited = []
        for _ in range(steps + 1):
            prefix = y.prefix(n)
            visited.append((prefix.text(with_vertices), self.vershik.rank(D, prefix)))
            y = self.vershik.successor(y)
        return CommandReport(
            verb="orbit",
            data={"level": n, "orbit": [{"path": p, "rank": r} for p, r in visited]},
            lines=[f"{i}: {p} (rank {r})" for i, (p, r) in enumerate(visited)],
        )

    # -- odometer --------------------------------------------------------------

    def odometer_report(
        self,
        space_text: str,
        x_text: str,
        b_text: Optional[str] = None,
        levels: Optional[int] = None,
    ) -> CommandReport:
        space = self.space(space_text)
        x = AdicInt(space=space, value=_option("--x", lambda: parse_point(x_text, dotted=space.dotted)))
        b = AdicInt.one(space)
        if b_text is not None:
            b = AdicInt(space=space, value=_option("--add", lambda: parse_point(b_text, dotted=space.dotted)))
        total = self.odometer.add(x, b)
        data: Dict[str, object] = {
            "space": space.describe(),
            "x": format_adic(x),
            "b": format_adic(b),
            "x+1": format_adic(self.odometer.add_one(x)),
            "x+b": format_adic(total),
            "x-b": format_adic(self.odometer.sub(x, b)),
            "-x": format_adic(self.odometer.neg(x)),
            "distance": fraction_text(self.odometer.adic_metric(x, total)),
            "exceptional": [
                [format_point(p, space.dotted), format_point(q, space.dotted)]
                for p, q in self.odometer.exceptional_points(b)
            ],
        }
        lines = [f"{key} = {data[key]}" for key in ("x", "b", "x+1", "x+b", "x-b", "-x")]
        lines.append(f"d(x, x+b) = {data['distance']}")
        lines.extend(f"exceptional {p} -> {q}" for p, q in data["exceptional"])
        if levels is not None:
            text = self.diagram_codec.serialize(self.odometer.to_vershik_diagram(space, levels))
            data["diagram"] = text
            lines.extend(text.splitlines())
        return CommandReport(verb="odometer", data=data, lines=lines)

    # -- towers ----------------------------------------------------------------

    def towers_report(
        self,
        space_text: str,
        map_text: str,
        set_text: str,
        depth: int = 0,
        k: Optional[int] = None,
        induced: bool = False,
    ) -> CommandReport:
        space = self.space(space_text)
        T = self.cylmap(map_text, space)
        A = _option("--set", lambda: parse_set(space, set_text))
        xi = self.towers.build_towers(T, A, depth, self.settings.orbit_horizon)
        towers = [
            {"height": tower.height, "base": str(tower.base)} for tower in xi.towers
        ]
        lines = [f"tower height {t['height']} base {t['base']}" for t in towers]
        if not xi.is_complete:
            lines.append(f"unresolved {xi.unresolved}")
        data: Dict[str, object] = {
            "depth": xi.depth,
            "towers": towers,
            "unresolved": str(xi.unresolved),
            "complete": xi.is_complete,
        }
        status = CommandStatus.OK if xi.is_complete else CommandStatus.DEFECTS
        if k is not None:
            chosen = self.towers.k_maximal(T, xi, k)
            data["k_maximal"] = {
                "k": k,
                "set": str(chosen.set),
                "levels": {str(h): list(levels) for h, levels in chosen.levels},
                "disjoint": chosen.disjoint.value,
                "covering": chosen.covering.value,
            }
            lines.append(f"{k}-maximal set {chosen.set}")
            lines.extend(f"  height {h}: levels {list(levels)}" for h, levels in chosen.levels)
            lines.append(f"  disjoint {chosen.disjoint.value}, covering {chosen.covering.value}")
            if ClauseStatus.FAIL in (chosen.disjoint, chosen.covering):
                status = CommandStatus.DEFECTS
        if induced:
            table = self.cylmap_codec.serialize(self.towers.induced_map(T, A, self.settings.orbit_horizon))
            data["induced"] = table
            lines.append("induced map:")
            lines.extend(table.splitlines())
        return CommandReport(verb="towers", status=status, data=data, lines=lines)

    def certificate_data(self, certificate: RokhlinCertificate) -> Dict[str, object]:
        return certificate.model_dump(mode="json") | {"success": certificate.success}

    def certificate_lines(self, certificate: RokhlinCertificate) -> List[str]:
        lines = [
            f"level {certificate.level}, m = {certificate.m}, eps = {fraction_text(certificate.eps)}",
            f"F = {certificate.F}",
            f"disjoint iterates: {_verdict(certificate.disjoint)}",
        ]
        for i, coverage in enumerate(certificate.coverage):
            lines.append(
                f"measure {i}: coverage {fraction_text(coverage)}, "
                f"short towers {fraction_text(certificate.bounds.short_mass[i])}, "
                f"leftover {fraction_text(certificate.bounds.leftover_mass[i])}"
            )
        for tower in certificate.towers:
            masses = ", ".join(fraction_text(m) for m in tower.masses)
            lines.append(f"tower height {tower.height} base {tower.base} mass {masses}")
        lines.append(f"certificate: {'success' if certificate.success else 'failed'}")
        return lines

    def rokhlin(
        self,
        space_text: str,
        markers: str,
        levels: int,
        m: int,
        eps: str,
        measures: Sequence[str] = (),
        level: Optional[int] = None,
    ) -> CommandReport:
        space = self.space(space_text)
        epsilon = _option("--eps", lambda: _fraction(eps))
        M = self.markers(markers, space, levels)
        mus = self.measures(measures, space)
        try:
            certificate = self.towers.rokhlin_set(M.T, M, m, epsilon, mus, level)
        except RokhlinInfeasibleError as e:
            logger.warning(str(e))
            data: Dict[str, object] = {"error": str(e), "success": False}
            lines = [str(e)]
            if e.best is not None:
                data["best"] = self.certificate_data(e.best)
                lines.append("best level seen:")
                lines.extend(self.certificate_lines(e.best))
            return CommandReport(verb="rokhlin", status=CommandStatus.FAILED, data=data, lines=lines)
        return CommandReport(
            verb="rokhlin",
            status=CommandStatus.OK if certificate.success else CommandStatus.FAILED,
            data=self.certificate_data(certificate),
            lines=self.certificate_lines(certificate),
        )

    def approx(
        self,
        space_text: str,
        markers: str,
        n: int,
        measures: Sequence[str] = (),
        depth: Optional[int] = None,
        samples: int = 100,
        output: Optional[PathLike] = None,
    ) -> CommandReport:
        space = self.space(space_text)
        M = self.markers(markers, space, n + 1)
        T = M.T
        P = self.towers.approximant_map(T, M, n)
        d = n if depth is None else depth
        masses = [self.topology.dist_uniform(P, T, mu, d) for mu in self.measures(measures, space)]
        periodic = self.towers.check_periodicity(T, M, n)
        points = self.sampling.points(space, samples, head_length=n + 2)
        monotone = self.towers.check_monotone_agreement(T, M, n, points)
        exponents = self.towers.periodic_approx(T, M, n).exponents
        if output is not None:
            self.repository.save_cylmap(output, P)
        table = self.cylmap_codec.serialize(P)
        lines = [f"P_{n} exponents {exponents}"]
        lines.extend(f"measure {i}: mu(E(P_{n}, T)) = {mass}" for i, mass in enumerate(masses))
        lines.append(f"P_{n}^k is the identity on height-k towers: {_verdict(periodic)}")
        lines.append(f"agreement with T persists at level {n + 1}: {_verdict(monotone)} on {samples} point(s)")
        lines.extend(table.splitlines())
        return CommandReport(
            verb="approx",
            status=CommandStatus.OK if periodic and monotone else CommandStatus.FAILED,
            data={
                "n": n,
                "exponents": exponents,
                "e_mass": [mass.model_dump(mode="json") for mass in masses],
                "periodic": periodic,
                "monotone": monotone,
                "table": table,
            },
            lines=lines,
        )

    def build_diagram(
        self,
        space_text: str,
        markers: str,
        levels: int,
        split_bases: bool = False,
        samples: int = 100,
        output: Optional[PathLike] = None,
    ) -> CommandReport:
        space = self.space(space_text)
        M = self.markers(markers, space, levels)
        construction, _ = self.towers.diagram_from_markers(
            M.T, M, levels, split_bases=split_bases, samples=samples, seed=self.settings.seed
        )
        D = construction.diagram
        if output is not None:
            self.repository.save_diagram(output, D)
        text = self.diagram_codec.serialize(D)
        lines = [
            f"vertices per level {list(D.vertex_counts)}",
            *(f"level {n}: tower heights {list(h)}" for n, h in enumerate(construction.tower_heights, start=1)),
            f"conjugacy checked on {construction.sampled} point(s): "
            f"{construction.conjugacy_failures} failure(s)",
            *text.splitlines(),
        ]
        return CommandReport(
            verb="build-diagram",
            status=CommandStatus.OK if construction.conjugacy_holds else CommandStatus.FAILED,
            data={
                "vertex_counts": list(D.vertex_counts),
                "tower_heights": [list(h) for h in construction.tower_heights],
                "depth": construction.depth,
                "sampled": construction.sampled,
                "conjugacy_failures": construction.conjugacy_failures,
                "diagram": text,
            },
            lines=lines,
        )

    def rank1(
        self,
        spec_path: PathLike,
        levels: int,
        eps: Optional[str] = None,
        output: Optional[PathLike] = None,
        samples: int = 100,
    ) -> CommandReport:
        spec = self.repository.load_spec(spec_path)
        system = self.rank_one.rank1_build(spec, levels)
        if output is not None:
            self.repository.save_diagram(output, system.diagram)
        text = self.diagram_codec.serialize(system.diagram)
        data: Dict[str, object] = {"heights": list(system.heights), "diagram": text}
        lines = ["heights " + " ".join(str(h) for h in system.heights)]
        status = CommandStatus.OK
        if eps is not None:
            epsilon = _option("--eps", lambda: _fraction(eps))
            try:
                approximation = self.rank_one.odometer_approx(system, [InvariantMeasure()], epsilon)
            except StageBudgetError as e:
                data["approximation"] = {"error": str(e), "success": False}
                lines.append(str(e))
                status = CommandStatus.FAILED
            else:
                rng = self.sampling.rng(salt=approximation.stage)
                paths = [
                    self.sampling.lazy_path(rng, system.diagram, approximation.stage + 8)
                    for _ in range(samples)
                ]
                compared = self.rank_one.check_agreement(system, approximation, paths)
                data["approximation"] = {
                    "stage": approximation.stage,
                    "height": approximation.height,
                    "space": approximation.S.space.describe(),
                    "bounds": [fraction_text(b) for b in approximation.bounds],
                    "agreement": compared,
                    "success": approximation.success,
                }
                lines.append(
                    f"odometer at stage {approximation.stage} (height {approximation.height}, "
                    f"space {approximation.S.space.describe()}): "
                    f"mu(E(S, T)) <= {', '.join(fraction_text(b) for b in approximation.bounds)}"
                )
                lines.append(f"S = T on {compared} of {samples} sampled path(s) below the top")
        lines.extend(text.splitlines())
        return CommandReport(verb="rank1", status=status, data=data, lines=lines)

    # -- topology --------------------------------------------------------------

    def distance(
        self,
        space_text: str,
        S_text: str,
        T_text: str,
        measures: Sequence[str] = (),
        depth: int = 0,
    ) -> CommandReport:
        space = self.space(space_text)
        S = self.cylmap(S_text, space)
        T = self.cylmap(T_text, space)
        rows = self.topology.distance_table(S, T, self.measures(measures, space), depth)
        header = ["measure", "uniform", "symdiff_lo", "symdiff_hi", "abs_diff", "D"]
        lines = ["\t".join(header)] + ["\t".join(row.cells()) for row in rows]
        return CommandReport(
            verb="distance",
            data={
                "depth": depth,
                "rows": [dict(zip(header, row.cells())) for row in rows],
                "witnesses": [str(row.symdiff.witness) for row in rows],
                "exhaustive": [row.symdiff.exhaustive for row in rows],
            },
            lines=lines,
        )

    def witness(self, depth: int = 4) -> CommandReport:
        report = self.topology.separation_witness(depth)
        lines = [
            "T = dyadic odometer, S = P_3, uniform measure",
            f"sup_F |mu(SF) - mu(TF)| = {fraction_text(report.abs_diff)}",
            f"mu(E(S, T)) = {report.uniform}",
            f"separates: {_verdict(report.separates)}",
        ]
        return CommandReport(
            verb="witness",
            status=CommandStatus.OK if report.separates else CommandStatus.FAILED,
            data={
                "depth": depth,
                "abs_diff": fraction_text(report.abs_diff),
                "uniform": report.uniform.model_dump(mode="json"),
                "separates": report.separates,
            },
            lines=lines,
        )


def _fraction(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except ValueError as e:
        raise FormatSyntaxError(str(e), 1) from None


def _option_error(option: str, message: str) -> FormatSyntaxError:
    error = FormatSyntaxError(message, 1)
    error.source = option
    return error
