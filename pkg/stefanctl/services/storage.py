# stefanctl/services/storage.py
import logging
import numpy as np
import orjson
import pandas as pd
from pathlib import Path
from pydantic import BaseModel
from stefanctl.models.trajectory import Trajectory

logger = logging.getLogger(__name__)

TRAJECTORY_FILE = "trajectory.csv"
SNAPSHOT_FILE = "snapshots.npz"
REPORT_FILE = "report.json"
CHECK_FILE = "check.json"
SUMMARY_FILE = "summary.csv"

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
FLOAT_FORMAT = "%.17g"


class StorageService:
    """Writes trajectories, snapshots and reports into a run directory."""

    def prepare(self, directory: Path) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    def write_frame(self, frame: pd.DataFrame, path: Path) -> Path:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def write_trajectory(self, trajectory: Trajectory, directory: Path) -> Path:
        path = self.prepare(directory) / TRAJECTORY_FILE
        self.write_frame(trajectory.to_frame(), path)
        logger.info(f"Wrote {len(trajectory)} records to {path}")
        return path

    def write_snapshots(self, trajectory: Trajectory, directory: Path) -> Path:
        path = self.prepare(directory) / SNAPSHOT_FILE
        np.savez(
            path,
            t=trajectory.snapshot_t,
            s=trajectory.snapshot_s,
            temp=trajectory.snapshot_temp,
            xi=trajectory.xi_grid,
        )
        return path

    def dumps(self, report: BaseModel) -> bytes:
        return orjson.dumps(report.model_dump(mode="json"), option=JSON_OPTIONS)

    def write_report(self, report: BaseModel, path: Path) -> Path:
        path = Path(path)
        self.prepare(path.parent)
        path.write_bytes(self.dumps(report))
        logger.info(f"Wrote report to {path}")
        return path


storage_service = StorageService()
