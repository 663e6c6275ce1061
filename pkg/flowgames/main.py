import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel

from flowgames.config import settings, settings_manager
from flowgames.errors.exceptions import FlowgamesError, InputError
from flowgames.errors.handlers import EXIT_NEGATIVE, EXIT_OK, exit_code_for
from flowgames.models.games import ProfileFile
from flowgames.numerics.rational import parse_rational
from flowgames.services.circuit_service import CircuitService, parse_pins
from flowgames.services.documents import DocumentStore
from flowgames.services.reduction_service import TARGETS, ReductionService
from flowgames.services.report_service import ReportService, summarize
from flowgames.services.solve_service import METHODS, SolveService
from flowgames.services.verification_service import VerificationService

logger = logging.getLogger(__name__)


def _rational(value: str) -> Fraction:
    try:
        return parse_rational(value)
    except FlowgamesError as e:
        raise argparse.ArgumentTypeError(e.message) from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Seed of the run")
    common.add_argument("--output", type=Path, help="Write the JSON result here")
    common.add_argument(
        "--summary", action="store_true", help="Print a text table of the result"
    )

    parser = argparse.ArgumentParser(
        prog="flowgames",
        description="Equilibria of preference, routing and matrix games.",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    verify = verbs.add_parser("verify", parents=[common], help="Check a profile")
    target = verify.add_mutually_exclusive_group(required=True)
    target.add_argument("--game", type=Path)
    target.add_argument("--batch", type=Path, help="Directory of game/profile pairs")
    verify.add_argument("--profile", type=Path)
    verify.add_argument("--eps", type=_rational, help="Check an eps-equilibrium")

    solve = verbs.add_parser("solve", parents=[common], help="Find equilibria")
    solve.add_argument("--game", type=Path, required=True)
    solve.add_argument("--method", choices=METHODS, required=True)
    solve.add_argument("--profile", type=Path, help="Starting profile of dynamics")
    solve.add_argument("--max-rounds", type=int)
    solve.add_argument("--report", type=Path, help="Write the solve report here")

    dynamics = verbs.add_parser(
        "dynamics", parents=[common], help="Run best-response dynamics"
    )
    dynamics.add_argument("--game", type=Path, required=True)
    dynamics.add_argument("--profile", type=Path)
    dynamics.add_argument("--max-rounds", type=int)
    dynamics.add_argument("--report", type=Path)

    best = verbs.add_parser(
        "best-response", parents=[common], help="Best response of one player"
    )
    best.add_argument("--game", type=Path, required=True)
    best.add_argument("--profile", type=Path, required=True)
    best.add_argument("--player", required=True)

    reduce = verbs.add_parser("reduce", parents=[common], help="Reduce a game")
    reduce.add_argument("--game", type=Path, required=True)
    reduce.add_argument("--to", choices=TARGETS, required=True)
    reduce.add_argument("--profile", type=Path, help="Profile to carry across")

    compile_ = verbs.add_parser(
        "compile-circuit", parents=[common], help="Compile a circuit to a game"
    )
    compile_.add_argument("--circuit", type=Path, required=True)
    compile_.add_argument("--eps-l", type=_rational)
    compile_.add_argument("--ports", type=Path, help="Write the port map here")
    compile_.add_argument(
        "--pin", action="append", default=[], help="Pin an input: wire=p/q"
    )
    compile_.add_argument("--eps", type=_rational, help="Report wire intervals")

    verbs.add_parser("report", parents=[common], help="Check the bundled fixtures")
    return parser


class Runner:
    """Runs one parsed command and writes its artifacts."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.seed = settings_manager.resolve_seed(args.seed)
        self.store = DocumentStore(indent=settings.report_indent)
        self.verifier = VerificationService(settings, self.store)
        self.solver = SolveService(settings)

    def emit(self, result: BaseModel | dict, path: Path | None = None) -> None:
        path = path if path is not None else self.args.output
        if path is not None:
            self.store.write(path, result)
        else:
            sys.stdout.write(self.store.dumps(result))
        if self.args.summary and isinstance(result, BaseModel):
            print(summarize(result))

    def _init_profile(self, kind: str):
        if self.args.profile is None:
            return None
        return self.store.load_profile(self.args.profile, kind)

    def verify(self) -> int:
        args = self.args
        if args.batch is not None:
            report = self.verifier.verify_batch(args.batch, self.seed, args.eps)
        else:
            if args.profile is None:
                raise InputError("verify --game needs --profile")
            report = self.verifier.verify_files(
                args.game, args.profile, self.seed, args.eps
            )
        self.emit(report)
        return EXIT_OK if report.ok else EXIT_NEGATIVE

    def solve(self, method: str) -> int:
        args = self.args
        kind, game = self.store.load_game(args.game)
        report, profiles = self.solver.solve(
            kind, game, method, self.seed, self._init_profile(kind), args.max_rounds
        )
        if args.output is not None and profiles:
            self.store.write(args.output, ProfileFile.from_domain(profiles[0]))
        if args.report is not None or args.output is None:
            self.emit(report, args.report)
        elif args.summary:
            print(summarize(report))
        if not profiles or report.converged is False:
            return EXIT_NEGATIVE
        return EXIT_OK

    def best_response(self) -> int:
        args = self.args
        kind, game = self.store.load_game(args.game)
        profile = self.store.load_profile(args.profile, kind)
        self.emit(
            self.solver.best_response(kind, game, profile, args.player, self.seed)
        )
        return EXIT_OK

    def reduce(self) -> int:
        args = self.args
        kind, game = self.store.load_game(args.game)
        bundle = ReductionService().reduce(
            kind, game, args.to, self._init_profile(kind)
        )
        self.emit(bundle)
        return EXIT_OK

    def compile_circuit(self) -> int:
        args = self.args
        service = CircuitService(settings, self.store)
        compiled = service.compile(args.circuit, args.eps_l)
        game = service.game_file(compiled)
        result = service.port_map(compiled)
        if args.pin:
            result["evaluation"] = service.evaluate(
                compiled, parse_pins(args.pin), args.eps, args.eps_l
            )
        if args.ports is not None:
            self.store.write(args.ports, result)
        if args.output is not None:
            self.store.write(args.output, game)
            if args.ports is None:
                sys.stdout.write(self.store.dumps(result))
        else:
            combined = {"game": game.model_dump(mode="json"), **result}
            sys.stdout.write(self.store.dumps(combined))
        return EXIT_OK

    def report(self) -> int:
        service = ReportService(settings_manager.fixtures, self.verifier)
        report = service.fixture_report(self.seed)
        self.emit(report)
        return EXIT_OK if report.ok else EXIT_NEGATIVE

    def run(self) -> int:
        match self.args.verb:
            case "verify":
                return self.verify()
            case "solve":
                return self.solve(self.args.method)
            case "dynamics":
                return self.solve("dynamics")
            case "best-response":
                return self.best_response()
            case "reduce":
                return self.reduce()
            case "compile-circuit":
                return self.compile_circuit()
            case "report":
                return self.report()
        raise InputError("Unknown command", details={"verb": self.args.verb})


def main(argv: list[str] | None = None) -> int:
    """
    Parse the command line, run the command and return its exit status.

    Exit statuses:
    0. The command succeeded and the result is positive.
    1. The result is negative: a profile is not an equilibrium, or no
       equilibrium was found.
    2. The input could not be read, parsed or routed.
    """
    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s %(levelname)s %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    args = build_parser().parse_args(argv)
    try:
        runner = Runner(args)
        logger.info("Running %s with seed %s", args.verb, runner.seed)
        status = runner.run()
        logger.info("Finished %s with exit status %s", args.verb, status)
        return status
    except FlowgamesError as e:
        logger.error(
            "Command %s failed: %s",
            args.verb,
            e.message,
            exc_info=True,
            extra={
                "error_type": type(e).__name__,
                "error_details": getattr(e, "details", {}),
            },
        )
        return exit_code_for(e)
    except OSError as e:
        logger.error("Command %s failed: %s", args.verb, e, exc_info=True)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
