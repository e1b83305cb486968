"""``coordctl`` command line.

Exit codes: 0 success or the property holds, 1 the property fails or synthesis
is blocked, 2 usage, parse or validation errors.
"""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Awaitable, Callable, Dict, FrozenSet, List, Optional

import yaml

from descoord.automata import (
    Generator,
    ProjectionSpec,
    difference,
    enumerate_bounded,
    is_nonblocking,
    language_equal,
    mark_all,
    prefix_closure,
    project,
    shortest_marked_word,
    sync_product,
    trim,
)
from descoord.config import ALPHABET_STRATEGIES, OBSERVATION_MODES, REPORT_FORMATS, Settings, load_settings
from descoord.errors import (
    DescoordError,
    NonconflictCheckFailed,
    NotConditionallyDecomposable,
)
from descoord.fixtures import FIXTURES, fixture_names
from descoord.genfile import serialize_generator
from descoord.reports import (
    SupervisorModel,
    generator_model,
    render_synthesis,
    render_sufficient_conditions,
    render_verdict,
    synthesis_report_model,
    verdict_model,
)
from descoord.services.coordination import (
    CoordinationProblem,
    Observation,
    build_coordinator,
    extend_alphabet_for_cd,
    extend_alphabet_for_observer,
    is_conditionally_decomposable,
    sufficient_condition_report,
    synthesize,
)
from descoord.services.properties import (
    PropertyVerdict,
    is_controllable,
    is_lcc,
    is_lm_closed,
    is_normal,
    is_observable,
    is_observer,
    is_occ,
    is_relatively_observable,
    is_sync_nonconflicting,
)
from descoord.services.storage import GeneratorStore
from descoord.services.synthesis import SynthesisInput, sup_c, sup_cn
from descoord.services.tracing import StageTimer

LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

CHECKS = (
    "controllable",
    "observable",
    "relatively-observable",
    "normal",
    "lm-closed",
    "nonconflicting",
    "observer",
    "occ",
    "lcc",
    "nonblocking",
)


class UsageError(DescoordError):
    """Bad or missing command-line arguments."""


def setup_logging(settings: Settings) -> None:
    level = getattr(logging, settings.logging.level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT)
    if settings.logging.file:
        settings.logging.file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(settings.logging.file, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logging.getLogger().addHandler(file_handler)


def parse_events(text: Optional[str], universe: FrozenSet[str], flag: str) -> FrozenSet[str]:
    """Comma-separated event names; every name must belong to ``universe``."""

    if not text:
        return frozenset()
    names = frozenset(part.strip() for part in text.split(",") if part.strip())
    unknown = sorted(names - universe)
    if unknown:
        raise UsageError(f"{flag}: unknown events {', '.join(unknown)}")
    return names


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name, None) is None]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


class Command:
    """Runs one parsed command against the store and prints or writes the result."""

    def __init__(self, args: argparse.Namespace, settings: Settings, store: GeneratorStore) -> None:
        self.args = args
        self.settings = settings
        self.store = store
        self.format = args.format or settings.report.format

    async def emit(self, text: str) -> None:
        if not text.endswith("\n"):
            text += "\n"
        if self.args.out:
            await self.store.write_text(self.args.out, text)
        else:
            sys.stdout.write(text)

    async def emit_generator(self, generator: Generator) -> None:
        if self.format == "json":
            await self.emit(generator_model(generator).model_dump_json(indent=2))
        else:
            await self.emit(serialize_generator(generator))

    async def emit_verdict(self, verdict: PropertyVerdict) -> int:
        if self.format == "json":
            await self.emit(verdict_model(verdict).model_dump_json(indent=2))
        else:
            await self.emit(render_verdict(verdict))
        return EXIT_OK if verdict else EXIT_FAILED

    async def load_spec(self, path: Path) -> Generator:
        spec = await self.store.load(path)
        if self.settings.synthesis.trim_specs:
            trimmed = trim(spec).renamed(spec.name)
            if len(trimmed) != len(spec):
                LOGGER.info("spec_trimmed", extra={"path": str(path), "removed": len(spec) - len(trimmed)})
            return trimmed
        return spec

    async def load_problem(self) -> CoordinationProblem:
        _require(self.args, "g1", "g2", "spec")
        g1, g2 = await self.store.load_many([self.args.g1, self.args.g2])
        spec = await self.load_spec(self.args.spec)
        universe = g1.alphabet.events | g2.alphabet.events
        sigma_k = parse_events(self.args.sigma_k, universe, "--sigma-k")
        observation = Observation(getattr(self.args, "observation", None) or self.settings.synthesis.observation)
        return CoordinationProblem(g1, g2, spec, sigma_k, observation)

    # individual commands

    async def product(self) -> int:
        generators = await self.store.load_many(self.args.inputs)
        result = generators[0]
        for generator in generators[1:]:
            result = sync_product(result, generator)
        await self.emit_generator(result)
        return EXIT_OK

    async def project(self) -> int:
        generator = await self.store.load(self.args.input)
        events = parse_events(self.args.events, generator.alphabet.events, "--events")
        await self.emit_generator(project(generator, ProjectionSpec(generator.alphabet, events)))
        return EXIT_OK

    async def trim(self) -> int:
        await self.emit_generator(trim(await self.store.load(self.args.input)))
        return EXIT_OK

    async def closure(self) -> int:
        await self.emit_generator(prefix_closure(await self.store.load(self.args.input)))
        return EXIT_OK

    async def enumerate(self) -> int:
        generator = await self.store.load(self.args.input)
        limit = self.args.max_len if self.args.max_len is not None else self.settings.report.enumerate_limit
        lines = [
            f"{' '.join(word) or 'ε'}{' *' if marked else ''}"
            for word, marked in enumerate_bounded(generator, limit)
        ]
        await self.emit("\n".join(lines))
        return EXIT_OK

    async def eq(self) -> int:
        left, right = await self.store.load_many(self.args.inputs)
        comparison = language_equal(left, right)
        await self.emit(
            f"generated: {'equal' if comparison.generated else 'different'}\n"
            f"marked: {'equal' if comparison.marked else 'different'}"
        )
        return EXIT_OK if comparison else EXIT_FAILED

    async def check(self) -> int:
        args = self.args
        name = args.property
        if name in ("observer", "occ", "lcc", "nonblocking"):
            _require(args, "plant")
            plant = await self.store.load(args.plant)
            if name == "nonblocking":
                return await self.emit_verdict(_nonblocking_verdict(plant))
            _require(args, "events")
            p = ProjectionSpec(plant.alphabet, parse_events(args.events, plant.alphabet.events, "--events"))
            check = {"observer": is_observer, "occ": is_occ, "lcc": is_lcc}[name]
            return await self.emit_verdict(check(p, plant))

        if name == "nonconflicting":
            _require(args, "spec", "other")
            k1, k2 = await self.store.load_many([args.spec, args.other])
            return await self.emit_verdict(is_sync_nonconflicting(k1, k2))

        _require(args, "spec", "plant")
        spec, plant = await self.store.load_many([args.spec, args.plant])
        if name == "controllable":
            verdict = is_controllable(spec, plant)
        elif name == "observable":
            verdict = is_observable(spec, plant)
        elif name == "lm-closed":
            verdict = is_lm_closed(spec, plant)
        elif name == "normal":
            p = None
            if args.events is not None:
                p = ProjectionSpec(spec.alphabet, parse_events(args.events, spec.alphabet.events, "--events"))
            verdict = is_normal(spec, plant, p)
        else:
            _require(args, "ambient")
            ambient = await self.store.load(args.ambient)
            verdict = is_relatively_observable(spec, ambient, plant)
        return await self.emit_verdict(verdict)

    async def _supervisor(self, partial: bool) -> int:
        _require(self.args, "spec", "plant")
        spec = await self.load_spec(self.args.spec)
        plant = await self.store.load(self.args.plant)
        if partial:
            events = (
                parse_events(self.args.events, spec.alphabet.events, "--events")
                if self.args.events is not None
                else spec.alphabet.observable
            )
            result = sup_cn(SynthesisInput(spec, plant, ProjectionSpec(spec.alphabet, events)))
        else:
            result = sup_c(SynthesisInput(spec, plant))
        closed = is_lm_closed(result, plant)
        if self.format == "json":
            model = SupervisorModel(result=generator_model(result), lm_closed=verdict_model(closed))
            await self.emit(model.model_dump_json(indent=2))
        else:
            await self.emit(serialize_generator(result) + "# " + render_verdict(closed))
        return EXIT_OK

    async def supc(self) -> int:
        return await self._supervisor(partial=False)

    async def supcn(self) -> int:
        return await self._supervisor(partial=True)

    async def coordinator(self) -> int:
        _require(self.args, "g1", "g2")
        g1, g2 = await self.store.load_many([self.args.g1, self.args.g2])
        sigma_k = parse_events(self.args.sigma_k, g1.alphabet.events | g2.alphabet.events, "--sigma-k")
        await self.emit_generator(build_coordinator(g1, g2, sigma_k))
        return EXIT_OK

    async def cd_check(self) -> int:
        problem = await self.load_problem()
        verdict = is_conditionally_decomposable(
            problem.spec, problem.sigma_1, problem.sigma_2, problem.sigma_k, closed=self.args.closed
        )
        return await self.emit_verdict(verdict)

    async def extend_alphabet(self) -> int:
        _require(self.args, "g1", "g2", "spec")
        g1, g2 = await self.store.load_many([self.args.g1, self.args.g2])
        spec = await self.load_spec(self.args.spec)
        universe = g1.alphabet.events | g2.alphabet.events
        events = parse_events(self.args.sigma_k, universe, "--sigma-k")
        strategy = self.args.strategy or self.settings.alphabet.strategy
        if strategy == "observer-cd":
            events = extend_alphabet_for_observer(g1, g2, events)
        events = extend_alphabet_for_cd(spec, g1.alphabet.events, g2.alphabet.events, events)
        await self.emit(",".join(sorted(events)))
        return EXIT_OK

    async def synthesize(self) -> int:
        problem = await self.load_problem()
        timer = StageTimer()
        conditions = None
        try:
            report = synthesize(
                problem, timer=timer, check_distributed=self.settings.synthesis.assert_distributed
            )
        except NotConditionallyDecomposable as exc:
            LOGGER.warning("synthesis_blocked", extra={"reason": str(exc)})
            await self.emit_verdict(exc.verdict)
            return EXIT_FAILED
        except NonconflictCheckFailed as exc:
            LOGGER.warning("synthesis_blocked", extra={"reason": str(exc)})
            report = exc.report
        if self.args.conditions:
            conditions = sufficient_condition_report(problem, report.coordinator)
        limit = self.settings.report.enumerate_limit
        if self.format == "json":
            await self.emit(synthesis_report_model(report, conditions).model_dump_json(indent=2))
        else:
            text = render_synthesis(report, limit)
            if conditions is not None:
                text += "\n" + render_sufficient_conditions(conditions)
            await self.emit(text)
        return EXIT_OK if report.completed else EXIT_FAILED

    async def fixture(self) -> int:
        await self.emit_generator(FIXTURES[self.args.name]())
        return EXIT_OK


def _nonblocking_verdict(generator: Generator) -> PropertyVerdict:
    if is_nonblocking(generator):
        return PropertyVerdict.ok("nonblocking")
    blocked = shortest_marked_word(difference(mark_all(generator), prefix_closure(generator)))
    return PropertyVerdict.violated("nonblocking", (blocked or (),))


COMMANDS: Dict[str, Callable[[Command], Awaitable[int]]] = {
    "product": Command.product,
    "project": Command.project,
    "trim": Command.trim,
    "closure": Command.closure,
    "check": Command.check,
    "supc": Command.supc,
    "supcn": Command.supcn,
    "coordinator": Command.coordinator,
    "cd-check": Command.cd_check,
    "extend-alphabet": Command.extend_alphabet,
    "synthesize": Command.synthesize,
    "enumerate": Command.enumerate,
    "eq": Command.eq,
    "fixture": Command.fixture,
}


def _problem_arguments(parser: argparse.ArgumentParser, *, sigma_required: bool = False) -> None:
    parser.add_argument("--g1", type=Path, required=True, help="first subsystem (.gen)")
    parser.add_argument("--g2", type=Path, required=True, help="second subsystem (.gen)")
    parser.add_argument("--spec", type=Path, help="specification (.gen)")
    parser.add_argument("--sigma-k", dest="sigma_k", required=sigma_required, help="coordinator events, comma separated")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="settings file (default: $DESCOORD_SETTINGS or config/)")
    common.add_argument("--format", choices=REPORT_FORMATS, help="output format")
    common.add_argument("--out", type=Path, help="write the result to this file instead of stdout")
    common.add_argument("--log-level", dest="log_level", help="override the configured log level")

    parser = argparse.ArgumentParser(
        prog="coordctl", description="Coordination control synthesis for two discrete-event subsystems."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    product = sub.add_parser("product", parents=[common], help="synchronous product")
    product.add_argument("inputs", nargs="+", type=Path)

    project_cmd = sub.add_parser("project", parents=[common], help="natural projection")
    project_cmd.add_argument("input", type=Path)
    project_cmd.add_argument("--events", required=True, help="target events, comma separated")

    for name, text in (("trim", "accessible and coaccessible part"), ("closure", "prefix closure")):
        cmd = sub.add_parser(name, parents=[common], help=text)
        cmd.add_argument("input", type=Path)

    check = sub.add_parser("check", parents=[common], help="decide a language property")
    check.add_argument("property", choices=CHECKS)
    check.add_argument("--spec", type=Path)
    check.add_argument("--plant", type=Path)
    check.add_argument("--ambient", type=Path, help="C for relative observability")
    check.add_argument("--other", type=Path, help="second language for nonconflicting")
    check.add_argument("--events", help="projection target events, comma separated")

    for name, text in (("supc", "supremal controllable sublanguage"), ("supcn", "supremal controllable and normal sublanguage")):
        cmd = sub.add_parser(name, parents=[common], help=text)
        cmd.add_argument("--spec", type=Path, required=True)
        cmd.add_argument("--plant", type=Path, required=True)
        if name == "supcn":
            cmd.add_argument("--events", help="observable events (default: the alphabet's)")

    coordinator = sub.add_parser("coordinator", parents=[common], help="build Gk = Pk(G1) || Pk(G2)")
    coordinator.add_argument("--g1", type=Path, required=True)
    coordinator.add_argument("--g2", type=Path, required=True)
    coordinator.add_argument("--sigma-k", dest="sigma_k", required=True)

    cd_check = sub.add_parser("cd-check", parents=[common], help="conditional decomposability")
    _problem_arguments(cd_check, sigma_required=True)
    cd_check.add_argument("--closed", action="store_true", help="test the prefix closure")

    extend = sub.add_parser("extend-alphabet", parents=[common], help="greedy coordinator alphabet")
    _problem_arguments(extend)
    extend.add_argument("--strategy", choices=ALPHABET_STRATEGIES)

    synth = sub.add_parser("synthesize", parents=[common], help="run the coordination pipeline")
    _problem_arguments(synth, sigma_required=True)
    synth.add_argument("--observation", choices=OBSERVATION_MODES)
    synth.add_argument("--conditions", action="store_true", help="also report sufficient conditions")

    enumerate_cmd = sub.add_parser("enumerate", parents=[common], help="list words up to a length")
    enumerate_cmd.add_argument("input", type=Path)
    enumerate_cmd.add_argument("--max-len", dest="max_len", type=int)

    eq = sub.add_parser("eq", parents=[common], help="compare two generators")
    eq.add_argument("inputs", nargs=2, type=Path)

    fixture = sub.add_parser("fixture", parents=[common], help="write a worked-example generator")
    fixture.add_argument("name", choices=fixture_names())
    return parser


async def run(args: argparse.Namespace, settings: Settings) -> int:
    command = Command(args, settings, GeneratorStore())
    try:
        return await COMMANDS[args.command](command)
    except (DescoordError, OSError, ValueError) as exc:
        LOGGER.debug("command_failed", exc_info=True)
        sys.stderr.write(f"coordctl {args.command}: {exc}\n")
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings(args.config)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        sys.stderr.write(f"coordctl: cannot load settings: {exc}\n")
        return EXIT_USAGE
    if args.log_level:
        settings.logging.level = args.log_level
    setup_logging(settings)
    return asyncio.run(run(args, settings))
