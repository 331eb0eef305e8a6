import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from core.config import Settings
from core.errors import EngineError, InvalidScenarioError
from core.factory import ServiceFactory
from core.models import InstructionCostModel
from services.event_model import validate_scenario
from services.report_formatter import explain_table, oracle_summary, summary

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unexpectedness",
        description="Score the unexpectedness of event scenarios as world complexity minus description complexity.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    score = commands.add_parser("score", help="Print the JSON score report of a scenario file.")
    score.add_argument("path", help="Scenario JSON file.")

    explain = commands.add_parser("explain", help="Print the per-atom cost breakdown of a scenario file.")
    explain.add_argument("path", help="Scenario JSON file.")

    validate = commands.add_parser("validate", help="List the invariant violations of a scenario file.")
    validate.add_argument("path", help="Scenario JSON file.")

    sweep = commands.add_parser("sweep", help="Score a scenario over a range of values and print CSV.")
    sweep.add_argument("--spec", required=True, help="Sweep specification JSON file.")

    oracle = commands.add_parser("oracle-check", help="Compare the digit codec with exhaustive program search.")
    oracle.add_argument("--max-len", type=int, default=4, help="Longest digit string to check (at most 5).")
    oracle.add_argument("--opcode-cost", type=float, default=None, help="Override the bits per opcode.")
    oracle.add_argument("--no-progress", action="store_true", help="Hide the progress bar.")
    return parser


def _report_violations(error: InvalidScenarioError) -> int:
    print(f"Error: {error}", file=sys.stderr)
    for violation in error.violations:
        print(f"  - {violation}", file=sys.stderr)
    return EXIT_INVALID


def cmd_score(factory: ServiceFactory, path: str) -> int:
    scenario = factory.get_scenario_repository().load_scenario(path)
    report = factory.get_unexpectedness_service().score(scenario)
    # no probability field when U < 0
    omitted = {"cognitive_probability"} if report.cognitive_probability is None else None
    print(report.model_dump_json(by_alias=True, indent=2, exclude=omitted))
    print(summary(report, scenario.name), file=sys.stderr)
    return EXIT_OK


def cmd_explain(factory: ServiceFactory, path: str) -> int:
    scenario = factory.get_scenario_repository().load_scenario(path)
    report = factory.get_unexpectedness_service().unexpectedness(scenario)
    payload = report.model_dump(
        mode="json", by_alias=True,
        include={"w_breakdown", "o_breakdown", "w_sequence", "o_sequence", "hypotheses_used"},
    )
    print(json.dumps(payload, indent=2))
    print(explain_table(report), file=sys.stderr)
    return EXIT_OK


def cmd_validate(factory: ServiceFactory, path: str) -> int:
    scenario = factory.get_scenario_repository().load_scenario(path)
    violations = validate_scenario(scenario)
    print(json.dumps(violations, indent=2))
    return EXIT_INVALID if violations else EXIT_OK


def cmd_sweep(factory: ServiceFactory, spec_path: str) -> int:
    service = factory.get_sweep_service()
    spec = factory.get_scenario_repository().load_sweep_spec(spec_path)
    rows = service.run(spec, spec_path)
    service.write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_oracle_check(factory: ServiceFactory, max_len: int, opcode_cost: Optional[float],
                     show_progress: bool = True) -> int:
    limit = factory.settings.oracle_check_max_length
    if not 1 <= max_len <= limit:
        print(f"Error: --max-len must be between 1 and {limit}.", file=sys.stderr)
        return EXIT_INVALID
    model = InstructionCostModel() if opcode_cost is None else InstructionCostModel(opcode_cost=opcode_cost)
    result = factory.get_program_oracle().equivalence_sweep(max_len, model, show_progress=show_progress)
    print(oracle_summary(result))
    return EXIT_OK if result.passed else EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point
    """
    load_dotenv()

    # Instantiate settings once
    SETTINGS = Settings()
    SETTINGS.configure_logging(SETTINGS.log_level)

    args = build_parser().parse_args(argv)
    service_factory = ServiceFactory(SETTINGS)

    try:
        if args.command == "score":
            return cmd_score(service_factory, args.path)
        if args.command == "explain":
            return cmd_explain(service_factory, args.path)
        if args.command == "validate":
            return cmd_validate(service_factory, args.path)
        if args.command == "sweep":
            return cmd_sweep(service_factory, args.spec)
        return cmd_oracle_check(service_factory, args.max_len, args.opcode_cost, not args.no_progress)
    except InvalidScenarioError as e:
        return _report_violations(e)
    except (EngineError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    finally:
        service_factory.close_all()
        logger.info("Application finished.")


if __name__ == "__main__":
    sys.exit(main())
