"""Trajectory CSV export and import."""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import GameFileError
from ..models.dynamics import TrajectoryRecord
from ..utils.logging_config import log_file_operation

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def trajectory_header(tr: TrajectoryRecord) -> list[str]:
    """`t`, then `player.strategy` per coordinate, then observable names."""
    coords = [f"{i}.{s}" for i, m in enumerate(tr.strategy_counts) for s in range(m)]
    return ["t", *coords, *sorted(tr.observables)]


def trajectory_frame(tr: TrajectoryRecord) -> pd.DataFrame:
    """One row per recorded step, columns in trajectory_header order."""
    columns = trajectory_header(tr)
    names = sorted(tr.observables)
    data = np.column_stack([tr.times, tr.states, *(tr.observables[name] for name in names)])
    return pd.DataFrame(data, columns=columns)


def write_trajectory_csv(tr: TrajectoryRecord, path: str | Path) -> Path:
    """Write one row per recorded step at full precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(tr).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    log_file_operation("write", str(path), logger, rows=len(tr), stop=tr.stop_reason)
    return path


def read_trajectory_csv(path: str | Path) -> TrajectoryRecord:
    """Read a CSV written by write_trajectory_csv back into a record."""
    path = Path(path)
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except pd.errors.EmptyDataError:
        raise GameFileError("Trajectory CSV is empty", path=str(path))
    if df.columns[:1].tolist() != ["t"]:
        raise GameFileError("Trajectory CSV must start with a 't' column", path=str(path))

    coord_cols = [name for name in df.columns[1:] if name[:1].isdigit()]
    obs_cols = [name for name in df.columns[1:] if name not in coord_cols]
    counts = pd.Series([int(name.split(".")[0]) for name in coord_cols]).value_counts().sort_index()

    try:
        data = df.astype(float)
    except ValueError as e:
        raise GameFileError(f"Non-numeric trajectory value: {e}", path=str(path))

    log_file_operation("read", str(path), logger, rows=len(data))
    return TrajectoryRecord(
        strategy_counts=tuple(int(m) for m in counts),
        times=data["t"].to_numpy(),
        states=data[coord_cols].to_numpy(),
        observables={name: data[name].to_numpy() for name in obs_cols},
    )
