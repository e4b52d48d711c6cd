"""Reading univariate data files and the bundled synthetic dataset."""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .twopiece import TpSasParams, tpsas_sample

__all__ = ["Dataset", "read_dataset", "parse_values", "load_teletraffic_synthetic",
           "make_teletraffic_synthetic", "TELETRAFFIC_PARAMS", "TELETRAFFIC_N",
           "TELETRAFFIC_SEED"]

log = logging.getLogger(__name__)

# TP SAS fit reported for the log transferred bytes/sec series (n = 3143)
TELETRAFFIC_PARAMS = TpSasParams(mu=11.80, sigma=0.85, gamma=0.14, delta=1.26)
TELETRAFFIC_N = 3143
TELETRAFFIC_SEED = 3143
_BUNDLED = "teletraffic_synthetic.txt"
_SPLIT = re.compile(r"[,\s;]+")


@dataclass
class Dataset:
    values: np.ndarray
    source_path: str
    n_dropped: int = 0
    dropped_lines: list = field(default_factory=list)


def parse_values(text: str, log_transform: bool = False):
    """Numbers from one-value-per-line or delimited text.

    Returns ``(values, dropped_line_numbers)``. A line is dropped when it is
    blank or any token on it is not a finite number (a header, say). With
    ``log_transform`` non-positive values are dropped too.
    """
    values, dropped = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = [t for t in _SPLIT.split(line.strip()) if t]
        try:
            nums = [float(t) for t in tokens]
        except ValueError:
            nums = []
        if not nums or not all(math.isfinite(v) for v in nums):
            dropped.append(lineno)
            continue
        if log_transform:
            if any(v <= 0 for v in nums):
                dropped.append(lineno)
                continue
            nums = [math.log(v) for v in nums]
        values.extend(nums)
    return np.array(values, dtype=float), dropped


def read_dataset(path, log_transform: bool = False) -> Dataset:
    """Read a data file; raises ``OSError`` when it cannot be read."""
    text = Path(path).read_text()
    values, dropped = parse_values(text, log_transform)
    if dropped:
        shown = ", ".join(str(k) for k in dropped[:20])
        more = "" if len(dropped) <= 20 else f" (+{len(dropped) - 20} more)"
        log.warning("%s: skipped %d line(s): %s%s", path, len(dropped), shown, more)
    return Dataset(values, str(path), len(dropped), dropped)


def make_teletraffic_synthetic(seed: int = TELETRAFFIC_SEED) -> np.ndarray:
    return tpsas_sample(TELETRAFFIC_N, TELETRAFFIC_PARAMS, seed)


def load_teletraffic_synthetic() -> np.ndarray:
    """Synthetic stand-in (TP SAS draws at the published fit) for the log
    teletraffic series; the original data are not redistributed."""
    text = resources.files("sinharcsinh.data").joinpath(_BUNDLED).read_text()
    return parse_values(text)[0]
