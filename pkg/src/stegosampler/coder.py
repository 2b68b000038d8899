"""Fixed-precision arithmetic-coding stegosampling, plus the LSB baseline.

Embedding runs the coder as a decoder: the message window picks each pixel's
subinterval. Extraction re-derives the same partitions from the received
pixels and emits the shared interval prefixes as recovered bits.
"""
from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .bitio import BitStream, BitString, frame_decode, frame_encode
from .metrics import EmbedReport, step_stats
from .models import PixelDistribution
from .pnm import ImageGrid, sequence_positions

DEFAULT_PRC = 26
PRC_MIN, PRC_MAX = 8, 62


class CapacityExceeded(ValueError):
    """Framed message not fully confirmed by image end."""


class UndecodablePixel(ValueError):
    """Pixel has zero quantized width: model mismatch or corrupted image."""


class NoParityMass(ValueError):
    """No value of the required LSB parity has nonzero weight."""


@dataclass
class CoderState:
    prc: int = DEFAULT_PRC
    low: int = 0
    high: int = -1  # filled to 2^prc - 1
    steps: int = 0
    confirmed: int = 0

    def __post_init__(self):
        if not 2 <= self.prc <= 64:
            raise ValueError(f"prc {self.prc} outside [2, 64]")
        if self.high < 0:
            self.high = (1 << self.prc) - 1

    @property
    def width(self) -> int:
        return self.high - self.low + 1

    def check(self) -> None:
        assert 0 <= self.low <= self.high < (1 << self.prc)
        assert self.width >= 2


@dataclass
class QuantizedPartition:
    """Integer tiling of the current interval, most probable symbols first.

    cut holds boundaries for the symbols with nonzero width only (the tail of
    the sorted order is empty); cut[0] = 0 and cut[-1] = width always.
    """

    order: np.ndarray  # permutation of 0..255, weight-descending, ties by value
    cut: list[int]
    width: int

    def rank_of(self, pixel: int) -> int:
        hits = np.nonzero(self.order == pixel)[0]
        return int(hits[0])


@dataclass
class StepRecord:
    pixel_value: int
    bits_confirmed: int
    q_width: int
    width_before: int
    h_p: float | None = None
    h_q: float | None = None
    kld: float | None = None
    jsd: float | None = None


def quantize(dist: PixelDistribution, state: CoderState) -> QuantizedPartition:
    """Tile [low, high] proportionally to the sorted weights.

    Per-symbol widths are floored; the rounding deficit goes to the most
    probable symbol, which therefore always stays selectable.
    """
    width = state.width
    order = dist.order
    weights = dist.weights
    total = dist.total
    ws: list[int] = []
    for k in range(256):
        w = width * int(weights[order[k]]) // total
        if w == 0:
            break  # weights are sorted, so every later floor is 0 too
        ws.append(w)
    if not ws:
        ws = [0]
    ws[0] += width - sum(ws)
    cut = [0]
    for w in ws:
        cut.append(cut[-1] + w)
    return QuantizedPartition(order, cut, width)


def _apply(state: CoderState, partition: QuantizedPartition, k: int) -> tuple[int, int]:
    """Narrow to subinterval k, shift out the shared prefix; returns (s, prefix)."""
    low1 = state.low + partition.cut[k]
    high1 = state.low + partition.cut[k + 1] - 1
    diff = low1 ^ high1
    s = state.prc if diff == 0 else state.prc - diff.bit_length()
    prefix = low1 >> (state.prc - s) if s else 0
    mask = (1 << state.prc) - 1
    state.low = (low1 << s) & mask
    state.high = ((high1 << s) & mask) | ((1 << s) - 1)
    state.steps += 1
    state.confirmed += s
    state.check()
    return s, prefix


def embed_step(
    state: CoderState,
    dist: PixelDistribution,
    msg: BitStream,
    collect: bool = False,
) -> StepRecord:
    """Decode one pixel out of the message window; confirm the shared prefix."""
    partition = quantize(dist, state)
    t = msg.window(msg.confirmed_ptr, state.prc)
    assert state.low <= t <= state.high
    k = bisect_right(partition.cut, t - state.low) - 1
    width_before = partition.width
    q_width = partition.cut[k + 1] - partition.cut[k]
    rec = StepRecord(int(partition.order[k]), 0, q_width, width_before)
    if collect:
        rec.h_p, rec.h_q, rec.kld, rec.jsd = step_stats(partition, dist)
    s, _ = _apply(state, partition, k)
    rec.bits_confirmed = s
    msg.advance(s)
    return rec


def extract_step(
    state: CoderState, dist: PixelDistribution, pixel: int
) -> tuple[int, int]:
    """Mirror of embed_step driven by the received pixel; returns (prefix, s)."""
    partition = quantize(dist, state)
    k = partition.rank_of(pixel)
    if k + 1 >= len(partition.cut) or partition.cut[k + 1] == partition.cut[k]:
        raise UndecodablePixel(f"pixel {pixel} has zero quantized width")
    s, prefix = _apply(state, partition, k)
    return prefix, s


def embed_image(
    model,
    width: int,
    height: int,
    channels: int,
    message: bytes,
    prc: int = DEFAULT_PRC,
    framed: bool = True,
    pad_seed: int | None = None,
    collect: bool = True,
) -> tuple[ImageGrid, EmbedReport]:
    if not PRC_MIN <= prc <= PRC_MAX:
        raise ValueError(f"prc {prc} outside [{PRC_MIN}, {PRC_MAX}]")
    bits = frame_encode(message) if framed else BitString.from_bytes(message)
    msg = BitStream(bits, pad_seed)
    state = CoderState(prc)
    grid = ImageGrid.blank(width, height, channels)
    report = EmbedReport(width, height, channels, prc)
    for pos in sequence_positions(width, height, channels):
        dist = model.distribution(grid, pos)
        rec = embed_step(state, dist, msg, collect=collect)
        grid.data[pos.index] = rec.pixel_value
        report.steps.append(rec)
    if framed and state.confirmed < bits.length:
        raise CapacityExceeded(
            f"image confirmed {state.confirmed} of {bits.length} framed bits"
        )
    return grid, report


def extract_bits(model, image: ImageGrid, prc: int = DEFAULT_PRC) -> BitString:
    state = CoderState(prc)
    out = BitString()
    for pos in sequence_positions(image.width, image.height, image.channels):
        dist = model.distribution(image, pos)
        prefix, s = extract_step(state, dist, image.data[pos.index])
        out.append(prefix, s)
    return out


def extract_image(
    model, image: ImageGrid, prc: int = DEFAULT_PRC, framed: bool = True
) -> bytes:
    bits = extract_bits(model, image, prc)
    return frame_decode(bits) if framed else bits.to_bytes()


def lsb_embed(
    model,
    width: int,
    height: int,
    channels: int,
    message: bytes,
    rng_seed: int,
    pad_seed: int | None = None,
    max_retries: int = 64,
) -> ImageGrid:
    """Rejection-sampling baseline: resample until the LSB matches the next bit."""
    msg = BitStream(BitString.from_bytes(message), pad_seed)
    rng = random.Random(rng_seed)
    grid = ImageGrid.blank(width, height, channels)
    for pos in sequence_positions(width, height, channels):
        dist = model.distribution(grid, pos)
        want = msg.window(msg.confirmed_ptr, 1)
        msg.advance(1)
        cum = np.cumsum(dist.weights)
        value = -1
        for _ in range(max_retries):
            r = rng.randrange(dist.total)
            v = int(np.searchsorted(cum, r, side="right"))
            if v & 1 == want:
                value = v
                break
        if value < 0:
            parity_w = dist.weights[want::2]
            if parity_w.max() == 0:
                raise NoParityMass(f"no weight on values with LSB {want}")
            value = want + 2 * int(parity_w.argmax())
        grid.data[pos.index] = value
    return grid


def lsb_extract(image: ImageGrid) -> BitString:
    out = BitString()
    for b in image.data:
        out.append(b & 1, 1)
    return out
