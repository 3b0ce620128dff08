# stefanctl/cli/main.py
import click
import logging
import numpy as np
import orjson
from pathlib import Path
from typing import Optional, Tuple
from stefanctl import __version__
from stefanctl.config.settings import settings
from stefanctl.models.common import ErrorReport
from stefanctl.models.run_config import RunConfig, load_run_config
from stefanctl.services.check_service import check_service
from stefanctl.services.run_service import run_service
from stefanctl.services.storage import CHECK_FILE, storage_service
from stefanctl.services.sweep_service import sweep_service
from stefanctl.utils.exceptions import StefanError
from stefanctl.utils.logger import setup_logging

logger = logging.getLogger(__name__)

EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


def _fail(ctx: click.Context, error_code: str, message: str, exit_code: int, debug_info: Optional[str] = None):
    report = ErrorReport(
        error_code=error_code,
        message=message,
        debug_info=debug_info if settings.debug else None,
    )
    click.echo(orjson.dumps(report.model_dump(mode="json")).decode(), err=True)
    ctx.exit(exit_code)


def _run_directory(ctx: click.Context, cfg: RunConfig) -> Path:
    if cfg.output.directory is not None and Path(cfg.output.directory).is_absolute():
        return Path(cfg.output.directory)
    return ctx.obj["out"] / (cfg.output.directory or cfg.name)


class _ErrorHandling:
    """Turns package errors into a JSON line on stderr and the matching exit code."""

    def __init__(self, ctx: click.Context):
        self.ctx = ctx

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None:
            return False
        if isinstance(exc, StefanError):
            logger.error(f"{exc.error_code}: {exc.message}")
            _fail(self.ctx, exc.error_code, exc.message, exc.exit_code, exc.debug_info)
        if isinstance(exc, (FloatingPointError, OverflowError, np.linalg.LinAlgError)):
            logger.exception("Numerical failure")
            _fail(self.ctx, "NUMERICAL_FAILURE", str(exc), EXIT_NUMERICAL)
        return False


@click.group()
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Output root directory (default: settings.output_dir)")
@click.option("--quiet", is_flag=True, help="Only log warnings and errors")
@click.version_option(__version__, prog_name=settings.app_name)
@click.pass_context
def cli(ctx: click.Context, out_dir: Optional[str], quiet: bool):
    """Simulate and certify boundary heat-flux control of the Stefan problem."""
    setup_logging(quiet)
    ctx.ensure_object(dict)
    ctx.obj["out"] = Path(out_dir or settings.output_dir)


@cli.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.pass_context
def run(ctx: click.Context, config: str):
    """Simulate CONFIG and write trajectory.csv, snapshots.npz and report.json."""
    with _ErrorHandling(ctx):
        cfg = load_run_config(config)
        result = run_service.execute(cfg, _run_directory(ctx, cfg))
        report = result.report
        click.echo(orjson.dumps({
            "name": report.name,
            "directory": str(result.directory),
            "completed": report.completed,
            "all_satisfied": report.safety.all_satisfied,
            "final_s": report.final_s,
            "final_error": report.final_error,
            "phi_rate": report.phi_decay.rate,
            "exit_code": report.exit_code,
        }, option=orjson.OPT_SORT_KEYS).decode())
        ctx.exit(report.exit_code)


@cli.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.pass_context
def check(ctx: click.Context, config: str):
    """Report the admissibility of CONFIG without simulating it."""
    with _ErrorHandling(ctx):
        cfg = load_run_config(config)
        report = check_service.check(cfg)
        storage_service.write_report(report, _run_directory(ctx, cfg) / CHECK_FILE)
        click.echo(storage_service.dumps(report).decode())
        if report.gating_failures():
            ctx.exit(EXIT_VALIDATION)


@cli.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--axis", "axes", multiple=True, help="Sweep axis as key=v1,v2,... (repeatable)")
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Concurrent workers")
@click.pass_context
def sweep(ctx: click.Context, config: str, axes: Tuple[str, ...], jobs: Optional[int]):
    """Run the cross product of the --axis values and write summary.csv."""
    with _ErrorHandling(ctx):
        cfg = load_run_config(config)
        summary = sweep_service.sweep(cfg, list(axes), ctx.obj["out"], workers=jobs)
        click.echo(summary.to_csv(index=False, float_format="%.17g", lineterminator="\n"), nl=False)


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
