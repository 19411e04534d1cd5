"""Comparing rankings: adjusted Rand index and confusion matrices."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import PathOrStream, _open_text


def _labels(r, name):
    r = np.asarray(r)
    if r.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return r


def _comb2(x: int) -> int:
    return x * (x - 1) // 2


def adjusted_rand_index(r1, r2) -> float:
    """Hubert-Arabie adjusted Rand index of two partitions.

    Class order is ignored, so a ranking and its inversion score 1.  Pair
    counts are exact Python integers; when both partitions are all-singleton
    or both single-class the index is undefined and reported as 1.
    """
    a, b = _labels(r1, "r1"), _labels(r2, "r2")
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        return 1.0
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    _, nij = np.unique(np.stack([ia.reshape(-1), ib.reshape(-1)]), axis=1, return_counts=True)
    index = sum(_comb2(int(x)) for x in nij)
    sum_a = sum(_comb2(int(x)) for x in np.bincount(ia.reshape(-1)))
    sum_b = sum(_comb2(int(x)) for x in np.bincount(ib.reshape(-1)))
    total = _comb2(n)
    expected = Fraction(sum_a * sum_b, total)
    best = Fraction(sum_a + sum_b, 2)
    if best == expected:
        return 1.0
    return float((index - expected) / (best - expected))


@dataclass(frozen=True)
class ConfusionMatrix:
    """Node counts by (planted class, inferred class)."""

    counts: np.ndarray
    row_labels: tuple[int, ...]
    col_labels: tuple[int, ...]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self, dest: PathOrStream) -> None:
        """Rows are planted classes, columns inferred classes, with a header."""
        with _open_text(dest, "w") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["planted\\inferred", *self.col_labels])
            for label, row in zip(self.row_labels, self.counts.tolist()):
                w.writerow([label, *row])

    def to_svg(self, dest: PathOrStream, cell: int = 12, title: str | None = None) -> None:
        """Grey-scale heat map; darker cells hold more nodes."""
        R, C = self.counts.shape
        top = 24 if title else 4
        width, height = C * cell + 8, R * cell + top + 4
        peak = max(int(self.counts.max()) if self.counts.size else 0, 1)
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
            f'<rect width="{width}" height="{height}" fill="white"/>',
        ]
        if title:
            parts.append(f'<text x="4" y="16" font-family="sans-serif" font-size="12">{title}</text>')
        for i in range(R):
            for j in range(C):
                v = int(self.counts[i, j])
                if not v:
                    continue
                shade = int(round(255 * (1 - v / peak)))
                parts.append(
                    f'<rect x="{4 + j * cell}" y="{top + i * cell}" width="{cell}" height="{cell}" '
                    f'fill="rgb({shade},{shade},{shade})"><title>{v}</title></rect>'
                )
        parts.append(
            f'<rect x="4" y="{top}" width="{C * cell}" height="{R * cell}" fill="none" stroke="black"/>'
        )
        parts.append("</svg>")
        with _open_text(dest, "w") as fh:
            fh.write("\n".join(parts) + "\n")


def confusion_matrix(planted, inferred) -> ConfusionMatrix:
    """Entry ``(i, j)`` counts nodes with planted rank ``i+1`` and inferred rank ``j+1``."""
    a, b = _labels(planted, "planted"), _labels(inferred, "inferred")
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    R = int(a.max()) if len(a) else 0
    C = int(b.max()) if len(b) else 0
    if len(a) and (a.min() < 1 or b.min() < 1):
        raise ValueError("ranks must start at 1")
    counts = np.zeros((R, C), dtype=np.int64)
    np.add.at(counts, (a - 1, b - 1), 1)
    return ConfusionMatrix(counts, tuple(range(1, R + 1)), tuple(range(1, C + 1)))
