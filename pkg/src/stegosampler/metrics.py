"""Embedding-rate, entropy, and divergence reporting over coding runs."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .models import PixelDistribution
from .pnm import ImageGrid

CSV_HEADER = ["image", "steps", "bits", "er_pixel", "er_step", "h_p", "h_q", "kld", "jsd"]


class AbsoluteContinuityViolated(ValueError):
    """q places mass on a symbol p gives zero weight; KLD would be infinite."""


class ShapeMismatch(ValueError):
    pass


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def entropy(obj) -> float:
    """Shannon entropy in bits of a distribution or a quantized partition."""
    if isinstance(obj, PixelDistribution):
        return obj.entropy_bits
    return _entropy(partition_probs(obj)[0])


def partition_probs(partition) -> tuple[np.ndarray, np.ndarray]:
    """(q over 256 symbols, mask of symbols with nonzero quantized width)."""
    q = np.zeros(256)
    ws = np.diff(partition.cut)
    idx = partition.order[: len(ws)]
    q[idx] = ws / partition.width
    return q, q > 0


def kld_q_p(partition, dist: PixelDistribution) -> float:
    q, nz = partition_probs(partition)
    p = dist.probs
    if np.any(p[nz] == 0):
        raise AbsoluteContinuityViolated("quantized mass on a zero-weight symbol")
    return float((q[nz] * np.log2(q[nz] / p[nz])).sum())


def jsd_q_p(partition, dist: PixelDistribution) -> float:
    q, _ = partition_probs(partition)
    p = dist.probs
    m = 0.5 * (p + q)
    qnz = q > 0
    pnz = p > 0
    dqm = (q[qnz] * np.log2(q[qnz] / m[qnz])).sum()
    dpm = (p[pnz] * np.log2(p[pnz] / m[pnz])).sum()
    return float(0.5 * dqm + 0.5 * dpm)


def step_stats(partition, dist: PixelDistribution) -> tuple[float, float, float, float]:
    """(H(p), H(q), D_KL(q||p), D_JS(q||p)) for one coding step, in bits."""
    q, nz = partition_probs(partition)
    p = dist.probs
    h_p = dist.entropy_bits
    h_q = _entropy(q)
    if np.any(p[nz] == 0):
        raise AbsoluteContinuityViolated("quantized mass on a zero-weight symbol")
    kld = float((q[nz] * np.log2(q[nz] / p[nz])).sum())
    m = 0.5 * (p + q)
    pnz = p > 0
    dpm = (p[pnz] * np.log2(p[pnz] / m[pnz])).sum()
    dqm = (q[nz] * np.log2(q[nz] / m[nz])).sum()
    jsd = float(0.5 * dqm + 0.5 * dpm)
    return h_p, h_q, kld, jsd


@dataclass
class EmbedReport:
    """Per-step records plus aggregate rates for one embedded image."""

    width: int
    height: int
    channels: int
    prc: int
    steps: list = field(default_factory=list)  # list[StepRecord]

    @property
    def bits_confirmed(self) -> int:
        return sum(r.bits_confirmed for r in self.steps)

    @property
    def er_per_pixel(self) -> float:
        return self.bits_confirmed / (self.width * self.height)

    @property
    def er_per_step(self) -> float:
        return self.bits_confirmed / len(self.steps)

    @property
    def self_information_bits(self) -> float:
        """Sum of -log2(q_width/width_before) over all steps."""
        return sum(-math.log2(r.q_width / r.width_before) for r in self.steps)

    def _mean(self, attr: str) -> float:
        vals = [getattr(r, attr) for r in self.steps]
        if any(v is None for v in vals):
            raise ValueError(f"per-step {attr} was not collected during embedding")
        return float(np.mean(vals))

    @property
    def mean_h_p(self) -> float:
        return self._mean("h_p")

    @property
    def mean_h_q(self) -> float:
        return self._mean("h_q")

    @property
    def mean_kld(self) -> float:
        return self._mean("kld")

    @property
    def mean_jsd(self) -> float:
        return self._mean("jsd")

    def row(self, name: str) -> list:
        return [
            name,
            len(self.steps),
            self.bits_confirmed,
            self.er_per_pixel,
            self.er_per_step,
            self.mean_h_p,
            self.mean_h_q,
            self.mean_kld,
            self.mean_jsd,
        ]


def aggregate(reports: Sequence[EmbedReport]) -> dict[str, tuple[float, float]]:
    """Mean and sample std (ddof=1; 0 for a single report) of the rate columns."""
    if not reports:
        raise ValueError("need at least one report")
    out = {}
    for key, attr in [
        ("er_pixel", "er_per_pixel"),
        ("er_step", "er_per_step"),
        ("h_p", "mean_h_p"),
        ("h_q", "mean_h_q"),
        ("kld", "mean_kld"),
        ("jsd", "mean_jsd"),
    ]:
        vals = np.array([getattr(r, attr) for r in reports])
        std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        out[key] = (float(vals.mean()), std)
    return out


def write_csv(reports: Sequence[EmbedReport], names: Sequence[str], sink) -> None:
    """Detail row per image plus mean and std summary rows."""
    summary = aggregate(reports)

    def emit(f):
        w = csv.writer(f)
        w.writerow(CSV_HEADER)
        for name, rep in zip(names, reports):
            w.writerow(rep.row(name))
        w.writerow(["mean", "", ""] + [summary[k][0] for k in CSV_HEADER[3:]])
        w.writerow(["std", "", ""] + [summary[k][1] for k in CSV_HEADER[3:]])

    if hasattr(sink, "write"):
        emit(sink)
    else:
        with open(sink, "w", newline="") as f:
            emit(f)


def _scale_to_bytes(field_: np.ndarray) -> bytearray:
    lo, hi = field_.min(), field_.max()
    if hi > lo:
        scaled = np.round((field_ - lo) / (hi - lo) * 255)
    elif hi > 0:
        scaled = np.full_like(field_, 255.0)
    else:
        scaled = np.zeros_like(field_)
    return bytearray(scaled.astype(np.uint8).tobytes())


def position_means(reports: Sequence[EmbedReport], attr: str) -> np.ndarray:
    """Per-position mean of a StepRecord attribute across same-shape reports."""
    shape = (reports[0].width, reports[0].height, reports[0].channels)
    acc = np.zeros(reports[0].width * reports[0].height * reports[0].channels)
    for rep in reports:
        if (rep.width, rep.height, rep.channels) != shape:
            raise ShapeMismatch(f"report shape {(rep.width, rep.height, rep.channels)} != {shape}")
        vals = [getattr(r, attr) for r in rep.steps]
        if any(v is None for v in vals):
            raise ValueError(f"per-step {attr} was not collected during embedding")
        acc += np.array(vals, dtype=np.float64)
    return acc / len(reports)


def heatmaps(reports: Sequence[EmbedReport]) -> tuple[ImageGrid, ImageGrid]:
    """Min-max scaled per-position mean H(p) and mean confirmed-bits maps.

    Multi-channel step values are averaged per pixel so the maps stay gray.
    """
    w, h, c = reports[0].width, reports[0].height, reports[0].channels
    ent = position_means(reports, "h_p").reshape(h * w, c).mean(axis=1).reshape(h, w)
    bits = position_means(reports, "bits_confirmed").reshape(h * w, c).mean(axis=1).reshape(h, w)
    return (
        ImageGrid(w, h, 1, _scale_to_bytes(ent)),
        ImageGrid(w, h, 1, _scale_to_bytes(bits)),
    )
