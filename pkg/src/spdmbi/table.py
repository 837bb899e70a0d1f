"""Column tables for sweep output, and the ordered parallel map behind sweeps."""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SpectrumTable", "parallel_map", "worker_count"]


def _column(values) -> np.ndarray:
    """Integer columns (particle numbers) stay integer; everything else is float."""
    a = np.asarray(values)
    if a.dtype.kind in "iu":
        return a.astype(np.int64)
    return a.astype(float)


@dataclass
class SpectrumTable:
    """Named, equal-length float columns plus free-form metadata."""

    columns: dict
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = {k: _column(v) for k, v in self.columns.items()}
        lens = {len(v) for v in self.columns.values()}
        if len(lens) > 1:
            raise ValueError(f"columns have unequal lengths {sorted(lens)}")

    def __getitem__(self, key):
        return self.columns[key]

    def __len__(self):
        return len(next(iter(self.columns.values()))) if self.columns else 0

    @property
    def names(self):
        return list(self.columns)

    def with_column(self, name: str, values) -> "SpectrumTable":
        cols = dict(self.columns)
        cols[name] = values
        return SpectrumTable(cols, dict(self.meta))

    def to_csv(self, path=None, columns=None) -> str:
        """Write (or return) CSV text. ``repr`` floats keep the output lossless
        and byte-stable across runs."""
        names = list(columns) if columns is not None else self.names
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names)
        for row in zip(*(self.columns[n] for n in names)):
            w.writerow([repr(x.item()) for x in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def worker_count(requested: int | None = None) -> int:
    """Worker pool size: ``requested`` or the CPU count, capped by ``SPDMBI_THREADS``."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("SPDMBI_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


def parallel_map(fn, items, workers: int | None = None) -> list:
    """``[fn(x) for x in items]`` on a thread pool; result order follows ``items``.

    numpy releases the GIL inside LAPACK/BLAS, so threads scale on the
    eigendecompositions that dominate a sweep.
    """
    items = list(items)
    n = min(worker_count(workers), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
