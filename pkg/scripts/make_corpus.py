#!/usr/bin/env python3
"""Write a synthetic stroke corpus as PGM/PPM files for CLI training."""
import argparse
import os

from stegosampler import corpus, pnm


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--width", type=int, default=28)
    ap.add_argument("--height", type=int, default=28)
    ap.add_argument("--rgb", action="store_true")
    ap.add_argument("--noise", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    channels = 3 if args.rgb else 1
    ext = "ppm" if args.rgb else "pgm"
    images = corpus.stroke_corpus(
        args.count, args.width, args.height, channels, seed=args.seed, noise=args.noise
    )
    for i, img in enumerate(images):
        pnm.write_image(img, os.path.join(args.out, f"stroke_{i:05d}.{ext}"))
    print(f"wrote {len(images)} images to {args.out}")


if __name__ == "__main__":
    main()
