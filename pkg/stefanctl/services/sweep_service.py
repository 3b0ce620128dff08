# stefanctl/services/sweep_service.py
import asyncio
import itertools
import logging
import math
import os
import time
import yaml
import pandas as pd
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
from stefanctl.config.settings import settings
from stefanctl.core.analysis.convergence import observed_order, richardson_extrapolate
from stefanctl.models.run_config import RunConfig, build_run_config, with_overrides
from stefanctl.services.run_service import run_service
from stefanctl.services.storage import SUMMARY_FILE, storage_service
from stefanctl.utils.exceptions import ConfigError, NumericalError, StefanError, ValidationError
from stefanctl.utils.timing import PerformanceTimer

logger = logging.getLogger(__name__)

REFINEMENT_AXIS = "solver.nx"
UNEXPECTED_EXIT = 4


def parse_axis(spec: str) -> Tuple[str, List[Any]]:
    """``gains.c2=0.1,0.2,0.3`` -> ("gains.c2", [0.1, 0.2, 0.3]). Values are read as YAML scalars."""
    key, sep, values = spec.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError("BAD_SWEEP_AXIS", f"Axis '{spec}' must look like key=v1,v2,...")
    tokens = [token.strip() for token in values.split(",") if token.strip()]
    if not tokens:
        raise ConfigError("BAD_SWEEP_AXIS", f"Axis '{key}' lists no values")
    try:
        parsed = [yaml.safe_load(token) for token in tokens]
    except yaml.YAMLError as exc:
        raise ConfigError("BAD_SWEEP_AXIS", f"Cannot parse values of axis '{key}'", debug_info=str(exc))
    return key, parsed


def _status(error: Exception) -> str:
    if isinstance(error, ConfigError):
        return "config_error"
    if isinstance(error, ValidationError):
        return "validation_error"
    if isinstance(error, NumericalError):
        return "numerical_error"
    return "error"


def _failed_row(parameters: Dict[str, Any], directory: str, error: Exception) -> Dict[str, Any]:
    row: Dict[str, Any] = dict(parameters)
    row.update(run=Path(directory).name, status=_status(error))
    if isinstance(error, StefanError):
        row.update(exit_code=error.exit_code, error_code=error.error_code, error=error.message)
    else:
        row.update(exit_code=UNEXPECTED_EXIT, error_code=type(error).__name__, error=str(error))
    return row


def _run_one(raw_cfg: Dict[str, Any], directory: str, parameters: Dict[str, Any]) -> Dict[str, Any]:
    """Worker entry point. Failures come back as rows, never as exceptions."""
    started = time.perf_counter()
    try:
        cfg = build_run_config(raw_cfg, source=directory)
        report = run_service.execute(cfg, Path(directory)).report
        row: Dict[str, Any] = dict(parameters)
        row.update(
            run=Path(directory).name,
            status="ok" if report.exit_code == 0 else "violated",
            exit_code=report.exit_code,
            error_code=None,
            error=None,
            completed=report.completed,
            all_satisfied=report.safety.all_satisfied,
            implication_holds=report.safety.implication_holds,
            violated=";".join(report.safety.violated()),
            final_s=report.final_s,
            final_error=report.final_error,
            phi_rate=report.phi_decay.rate,
        )
    except Exception as exc:
        logger.warning(f"Sweep run {directory} failed: {exc}")
        row = _failed_row(parameters, directory, exc)
    row["runtime_s"] = time.perf_counter() - started
    return row


class SweepService:
    def expand(self, cfg: RunConfig, axes: Sequence[str]) -> List[Tuple[Dict[str, Any], Union[RunConfig, ConfigError]]]:
        """Cross product of the axes in lexicographic parameter order.

        A combination whose values the schema rejects is returned with its ConfigError in
        place of a config. Unknown keys reject the whole sweep.
        """
        if not axes:
            raise ConfigError("EMPTY_SWEEP", "A sweep needs at least one --axis key=v1,v2,...")
        parsed = [parse_axis(spec) for spec in axes]
        keys = [key for key, _ in parsed]
        if len(set(keys)) != len(keys):
            raise ConfigError("BAD_SWEEP_AXIS", f"Repeated sweep axis in {keys}")

        grids = [sorted(values) for _, values in parsed]
        runs = []
        for combination in itertools.product(*grids):
            parameters = dict(zip(keys, combination))
            try:
                runs.append((parameters, with_overrides(cfg, parameters)))
            except ConfigError as exc:
                if exc.error_code == "BAD_SWEEP_AXIS":
                    raise
                runs.append((parameters, exc))
        return runs

    async def _run_all(self, jobs: List[Tuple[Dict[str, Any], str, Dict[str, Any]]], workers: int):
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tasks = [loop.run_in_executor(pool, _run_one, raw, directory, params) for raw, directory, params in jobs]
            return await asyncio.gather(*tasks)

    def sweep(self, cfg: RunConfig, axes: Sequence[str], out_dir: Path, workers: Optional[int] = None) -> pd.DataFrame:
        timer = PerformanceTimer(f"sweep-{cfg.name}")
        runs = self.expand(cfg, axes)
        keys = list(runs[0][0])
        root = storage_service.prepare(Path(out_dir) / cfg.name)

        rows: List[Dict[str, Any]] = []
        jobs = []
        for index, (parameters, run_cfg) in enumerate(runs):
            directory = str(root / f"run_{index:03d}")
            if isinstance(run_cfg, ConfigError):
                logger.warning(f"Sweep run {directory} rejected: {run_cfg.message}")
                rows.append(dict(_failed_row(parameters, directory, run_cfg), runtime_s=0.0))
            else:
                jobs.append((run_cfg.model_dump(mode="json"), directory, parameters))

        if jobs:
            workers = workers or settings.max_jobs or os.cpu_count() or 1
            workers = max(1, min(workers, len(jobs)))
            logger.info(f"Sweeping {len(jobs)} runs over {keys} with {workers} workers")
            with timer.time_step("runs"):
                rows.extend(asyncio.run(self._run_all(jobs, workers)))

        summary = pd.DataFrame(rows).sort_values(by=keys, kind="mergesort").reset_index(drop=True)
        if REFINEMENT_AXIS in keys:
            orders, limits = self._refinement_estimates(summary, keys)
            summary["observed_order"] = orders
            summary["extrapolated_s"] = limits
        storage_service.write_frame(summary, root / SUMMARY_FILE)
        timer.log_summary()
        failed = int(summary["error_code"].notna().sum())
        if failed:
            logger.warning(f"{failed} of {len(summary)} sweep runs failed")
        return summary

    @staticmethod
    def _refinement_estimates(summary: pd.DataFrame, keys: List[str]) -> Tuple[pd.Series, pd.Series]:
        """Observed order of final s across the nx axis and the Richardson limit it implies,
        per combination of the other axes."""
        orders = pd.Series(math.nan, index=summary.index)
        limits = pd.Series(math.nan, index=summary.index)
        if "final_s" not in summary:
            return orders, limits
        others = [key for key in keys if key != REFINEMENT_AXIS]
        groups = summary.groupby(others, sort=False) if others else [(None, summary)]
        for _, group in groups:
            group = group.sort_values(REFINEMENT_AXIS)
            values = group["final_s"].tolist()
            if len(values) < 3 or any(pd.isna(v) for v in values):
                continue
            nx = group[REFINEMENT_AXIS].tolist()
            ratio = nx[-1] / nx[-2]
            order = observed_order(values, ratio)
            if order is not None:
                orders[group.index] = order
                if order > 0.0:
                    limits[group.index] = richardson_extrapolate(values, order, ratio)
        return orders, limits


sweep_service = SweepService()
