#!/usr/bin/env python3
"""Writes the 64x64 noisy step-edge PGM used by the restoration fixtures."""
import argparse

import numpy as np


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("output")
    ap.add_argument("--size", type=int, default=64)
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=20240607)
    args = ap.parse_args()

    n = args.size
    img = np.full((n, n), 0.2)
    img[:, n // 2:] = 0.8
    rng = np.random.default_rng(args.seed)
    img += rng.normal(0.0, args.noise, img.shape)
    levels = np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)
    with open(args.output, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (n, n))
        f.write(levels.tobytes())


if __name__ == "__main__":
    main()
