#!/usr/bin/env python3
"""Regenerate the golden PGM files under tests/golden/.

The small image is derived from the exact-rational geometric binning oracle
(independent of the production rendering path); the 100 kb fixture image uses
the counting path, whose equivalence to the geometry is covered by the oracle
tests at small scale.
"""

import os

import numpy as np

from chaoskit import parse_fasta, render_cgr
from chaoskit.cgr import fcgr_geometric
from chaoskit.imaging import GrayImage, pgm_bytes

HERE = os.path.dirname(__file__)
GOLDEN_DIR = os.path.join(HERE, "..", "tests", "golden")
FIXTURE = os.path.join(HERE, "..", "tests", "fixtures", "fragment-01.fasta")


def occupancy_image(matrix) -> GrayImage:
    pixels = np.where(matrix.entries > 0, 0, 255).astype(np.uint8)
    side = matrix.entries.shape[0]
    return GrayImage(side, side, pixels.tobytes())


def main():
    os.makedirs(GOLDEN_DIR, exist_ok=True)

    acg = occupancy_image(fcgr_geometric("ACG", 1))
    with open(os.path.join(GOLDEN_DIR, "cgr_acg_r1.pgm"), "wb") as fh:
        fh.write(pgm_bytes(acg))
    print("wrote cgr_acg_r1.pgm")

    with open(FIXTURE, "rb") as fh:
        [(_, fragment)] = parse_fasta(fh)
    big = render_cgr(fragment, 8)
    with open(os.path.join(GOLDEN_DIR, "cgr_fragment01_r8.pgm"), "wb") as fh:
        fh.write(pgm_bytes(big))
    print("wrote cgr_fragment01_r8.pgm")


if __name__ == "__main__":
    main()
