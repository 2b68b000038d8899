"""Synthetic desk corpora: random pen-stroke images on black, and noise."""
from __future__ import annotations

import math
import random

from .pnm import ImageGrid


def stroke_image(width: int, height: int, channels: int, rng: random.Random) -> ImageGrid:
    """Binary strokes (255) on a flat background (0), concentrated near center."""
    grid = ImageGrid.blank(width, height, channels)
    for _ in range(rng.randint(1, 2)):
        x = width / 2 + rng.uniform(-width / 6, width / 6)
        y = height / 2 + rng.uniform(-height / 6, height / 6)
        angle = rng.uniform(0, 2 * math.pi)
        for _ in range(int(1.5 * max(width, height))):
            angle += rng.uniform(-0.5, 0.5)
            x += math.cos(angle)
            y += math.sin(angle)
            # 2px-thick pen, clipped to the frame
            for dx in (0, 1):
                for dy in (0, 1):
                    px, py = int(x) + dx, int(y) + dy
                    if 0 <= px < width and 0 <= py < height:
                        base = (py * width + px) * channels
                        for ch in range(channels):
                            grid.data[base + ch] = 255
    return grid


def stroke_corpus(
    count: int,
    width: int = 28,
    height: int = 28,
    channels: int = 1,
    seed: int = 0,
    noise: float = 0.0,
) -> list[ImageGrid]:
    """Stroke images; `noise` replaces that fraction of pixels with uniform values.

    Noise keeps every neighbor context populated during training, so generated
    images cannot drift into contexts the model has never seen.
    """
    rng = random.Random(seed)
    images = [stroke_image(width, height, channels, rng) for _ in range(count)]
    if noise > 0:
        for img in images:
            for i in range(len(img.data)):
                if rng.random() < noise:
                    img.data[i] = rng.randrange(256)
    return images


def noise_corpus(
    count: int, width: int = 28, height: int = 28, channels: int = 1, seed: int = 0
) -> list[ImageGrid]:
    """Uniform random images; trains near-flat, high-entropy models."""
    rng = random.Random(seed)
    n = width * height * channels
    return [
        ImageGrid(width, height, channels, bytearray(rng.randbytes(n)))
        for _ in range(count)
    ]
