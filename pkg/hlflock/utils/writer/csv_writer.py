import logging
import os

import numpy as np
import pandas as pd

from hlflock.utils.errors import OutputError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


# Function to create necessary directories
def create_directory(directory_path):
    """
    Creates a directory if it doesn't exist.

    Args:
        directory_path (str): Path of the directory to be created.
    """
    try:
        os.makedirs(directory_path, exist_ok=True)
    except OSError as e:
        logger.error(f"Error creating directory: {e}")
        raise OutputError(f"cannot create {directory_path}: {e}") from e


def trajectory_columns(k):
    """Fixed column order: t, then x_i.1..3 and v_i.1..3 per bird, then the sup norms."""
    columns = ["t"]
    for i in range(1, k + 1):
        columns += [f"x_{i}.{c}" for c in (1, 2, 3)]
        columns += [f"v_{i}.{c}" for c in (1, 2, 3)]
    return columns + ["sup_v", "sup_x"]


def trajectory_frame(x, v):
    """
    Lays a run out as one row per step.

    Args:
        x (np.ndarray): Positions, shape (T + 1, k, 3).
        v (np.ndarray): Velocities, shape (T + 1, k, 3).

    Returns:
        pd.DataFrame: Columns as in ``trajectory_columns``.
    """
    steps, k, _ = x.shape
    blocks = np.concatenate([x, v], axis=2).reshape(steps, 6 * k)
    sup_v = np.linalg.norm(v, axis=2).max(axis=1)
    sup_x = np.linalg.norm(x, axis=2).max(axis=1)
    frame = pd.DataFrame(blocks, columns=trajectory_columns(k)[1:-2])
    frame.insert(0, "t", np.arange(steps, dtype=np.int64))
    frame["sup_v"] = sup_v
    frame["sup_x"] = sup_x
    return frame


# Save a table as CSV
def save_csv(frame: pd.DataFrame, file_path):
    """
    Writes a table with full 64-bit precision.

    Args:
        frame (pd.DataFrame): Table to write.
        file_path (str): Destination.
    """
    try:
        create_directory(os.path.dirname(file_path) or ".")
        frame.to_csv(file_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        logger.error(f"Error saving CSV: {e}")
        raise OutputError(f"cannot write {file_path}: {e}") from e
