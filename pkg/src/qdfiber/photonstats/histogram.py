"""Binned two-detector coincidence histograms and their on-disk form."""

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DomainError
from ..reporting import dumps_json


@dataclass
class CoincidenceHistogram:
    bin_width: float  # ps
    centers: np.ndarray  # ps
    counts: np.ndarray  # int64
    total_starts: int = 0

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if not self.bin_width > 0:
            raise DomainError(f"bin_width must be > 0 ps, got {self.bin_width!r}")
        if self.centers.shape != self.counts.shape or self.centers.ndim != 1:
            raise DomainError("centers and counts must be 1-D arrays of equal length")
        if np.any(self.counts < 0):
            raise DomainError("counts must be non-negative")
        if self.centers.size > 1:
            d = np.diff(self.centers)
            if np.any(d <= 0) or np.max(np.abs(d - self.bin_width)) > 1e-6 * self.bin_width:
                raise DomainError("centers must be strictly increasing with spacing bin_width")

    @property
    def edges(self):
        return np.append(self.centers - self.bin_width / 2, self.centers[-1] + self.bin_width / 2)

    def same_binning(self, other):
        return (
            self.bin_width == other.bin_width
            and self.centers.shape == other.centers.shape
            and np.array_equal(self.centers, other.centers)
        )

    def __add__(self, other):
        if not self.same_binning(other):
            raise DomainError("cannot merge histograms with different binning")
        return CoincidenceHistogram(
            self.bin_width, self.centers, self.counts + other.counts,
            self.total_starts + other.total_starts,
        )

    def area(self, center, window):
        """Counts in bins whose centre lies in ``[center - window/2, center + window/2)``."""
        sel = (self.centers >= center - window / 2) & (self.centers < center + window / 2)
        return int(self.counts[sel].sum())

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_center_ps", "counts"])
        for c, n in zip(self.centers.tolist(), self.counts.tolist()):
            w.writerow([repr(c), n])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, total_starts=0):
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["bin_center_ps", "counts"]:
            raise DomainError("histogram CSV must start with header bin_center_ps,counts")
        centers = np.array([float(r[0]) for r in rows[1:]])
        counts = np.array([int(r[1]) for r in rows[1:]], dtype=np.int64)
        bw = float(centers[1] - centers[0]) if centers.size > 1 else 1.0
        return cls(bw, centers, counts, total_starts)


def make_bins(span, bin_width, align="center"):
    """Bin centres covering ``[-span, span]``.

    ``align="center"`` puts a bin centre on zero; ``align="edge"`` puts a
    bin edge on zero (no bin straddles zero delay).
    """
    if not (span > 0 and bin_width > 0):
        raise DomainError("span and bin_width must be > 0")
    if align == "center":
        n = math.ceil(span / bin_width - 1e-9)
        return np.arange(-n, n + 1) * bin_width
    if align == "edge":
        n = math.ceil(span / bin_width - 1e-9)
        return (np.arange(-n, n) + 0.5) * bin_width
    raise DomainError(f"unknown alignment {align!r}")


def bin_index(tau, centers, bin_width):
    """Integer bin index of each delay; ``-1`` when outside the histogram."""
    lo = centers[0] - bin_width / 2
    idx = np.floor((tau - lo) / bin_width).astype(np.int64)
    idx[(idx < 0) | (idx >= centers.size)] = -1
    return idx


def accumulate(counts, idx):
    ok = idx >= 0
    counts += np.bincount(idx[ok], minlength=counts.size)


def write_histogram(hist, csv_path, sidecar=None):
    """Write ``<name>.csv`` plus a ``<name>.json`` sidecar next to it."""
    csv_path = Path(csv_path)
    csv_path.write_bytes(hist.to_csv().encode("ascii"))
    meta = {
        "bin_width_ps": hist.bin_width,
        "n_bins": int(hist.centers.size),
        "total_counts": int(hist.counts.sum()),
        "total_starts": int(hist.total_starts),
    }
    meta.update(sidecar or {})
    csv_path.with_suffix(".json").write_bytes(dumps_json(meta).encode("utf-8"))


def read_histogram(csv_path):
    csv_path = Path(csv_path)
    meta_path = csv_path.with_suffix(".json")
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    h = CoincidenceHistogram.from_csv(csv_path.read_text(), meta.get("total_starts", 0))
    if "bin_width_ps" in meta:
        h.bin_width = float(meta["bin_width_ps"])
    return h, meta
