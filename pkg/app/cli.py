"""
Batch command line: python -m app.cli {basis,invariants,verify} [options]

Exit codes: 0 on success, 1 when a reported property fails, 2 on invalid
configuration.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from app.archive import open_archive
from app.config import settings
from app.models.models import ReportFormat, RunConfig, RunReport
from app.services.services import (
    archive_report,
    basis_service,
    invariant_service,
    render_report,
    verify_service,
)
from app.utils.utils import FreeFieldError, configure_logging

logger = logging.getLogger(__name__)

VERIFY_KMAX = 3

COMMANDS: Dict[str, Callable[[RunConfig], RunReport]] = {
    "basis": basis_service.run,
    "invariants": invariant_service.run,
    "verify": verify_service.run,
}


def _add_run_options(parser: argparse.ArgumentParser, default_kmax: int = 2) -> None:
    parser.add_argument("--n", type=int, default=2, help="number of βγ and bc pairs")
    parser.add_argument("--type", choices=["A", "C"], default="A", help="vector field algebra type")
    parser.add_argument("--kmax", type=int, default=default_kmax, help="largest conformal weight")
    parser.add_argument("--lmin", type=int, help="smallest charge to report")
    parser.add_argument("--lmax", type=int, help="largest charge to report")
    parser.add_argument("--flavor", choices=["plus", "full"], default="plus")
    parser.add_argument("--gamma-degree", dest="gamma_degree", type=int, help="gamma_(-1) degree bound for full spaces")
    parser.add_argument("--g1", help="degree-1 vector field, e.g. '1 x1^2 d2'")
    parser.add_argument("--format", choices=[f.value for f in ReportFormat], default=ReportFormat.JSON.value)
    parser.add_argument("--seed", type=int, default=settings.default_seed)
    parser.add_argument("--threads", type=int, default=settings.default_threads)
    parser.add_argument("--output", type=Path, help="write the report here instead of stdout")
    parser.add_argument("--archive", action="store_true", help="also write the report into the output directory")
    parser.add_argument("--log-level", dest="log_level", default=settings.log_level)
    parser.add_argument("--properties", help="comma separated property names (verify only)")


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="freefield",
        description="Weight spaces and vector-field invariants of the βγ-bc system.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, text, default_kmax in (
        ("basis", "weight-space dimensions per grade", 2),
        ("invariants", "invariant dimensions next to the generated span", 2),
        # the property suite defaults to its full scale
        ("verify", "run the property suite", VERIFY_KMAX),
    ):
        _add_run_options(commands.add_parser(name, help=text), default_kmax)
    return parser.parse_args(argv)


def _validation_message(exc: ValidationError) -> str:
    error = exc.errors()[0]
    cause = error.get("ctx", {}).get("error")
    message = str(cause) if cause is not None else error["msg"]
    location = ".".join(str(part) for part in error["loc"])
    return f"{location}: {message}" if location else message


def build_config(args: argparse.Namespace) -> RunConfig:
    properties = args.properties.split(",") if args.properties else None
    return RunConfig(
        n=args.n,
        type=args.type,
        k_max=args.kmax,
        l_min=args.lmin,
        l_max=args.lmax,
        flavor=args.flavor,
        gamma_degree=args.gamma_degree,
        g1=args.g1,
        format=args.format,
        seed=args.seed,
        threads=args.threads,
        properties=properties,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = _parse_args(argv)
    configure_logging(args.log_level)
    try:
        cfg = build_config(args)
        report = COMMANDS[args.command](cfg)
    except ValidationError as e:
        print(f"error: {_validation_message(e)}", file=sys.stderr)
        return 2
    except FreeFieldError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    text = render_report(report, cfg.format)
    if args.output is not None:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.archive:
        open_archive()
        archive_report(report, cfg.format)

    for failure in report.failures:
        logger.error("❌ %s: %s", failure.name, failure.witness)
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
