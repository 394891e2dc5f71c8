"""Grayscale rendering of CGR occupancy and FCGR count matrices.

Binary PGM (P5) is the canonical, bit-exact output format; PNG export is
optional and requires Pillow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Union

import numpy as np

from .seqcore import DnaSequence, EmptyWindowError, as_sequence
from .cgr import FcgrMatrix, fcgr_count


class ResolutionError(ValueError):
    """Resolution order outside the supported range."""


MIN_RESOLUTION, MAX_RESOLUTION = 1, 16

RENDER_MODES = ("linear", "log")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale image, row-major, 0 = black."""

    width: int
    height: int
    pixels: bytes

    def __post_init__(self):
        if len(self.pixels) != self.width * self.height:
            raise ValueError("pixel buffer does not match width * height")

    def pixel(self, row: int, col: int) -> int:
        return self.pixels[row * self.width + col]

    def as_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(
            self.height, self.width
        )


def render_cgr(s: Union[str, DnaSequence], r: int) -> GrayImage:
    """Binary occupancy image at resolution 2**r: a pixel is black exactly when
    the corresponding order-r cell holds at least one trajectory point."""
    if not MIN_RESOLUTION <= r <= MAX_RESOLUTION:
        raise ResolutionError(
            f"resolution order must be in [{MIN_RESOLUTION}, {MAX_RESOLUTION}], got {r}"
        )
    seq = as_sequence(s)
    if len(seq) < r:
        raise EmptyWindowError(
            f"sequence of length {len(seq)} is shorter than resolution order {r}"
        )
    matrix = fcgr_count(seq, r)
    pixels = np.where(matrix.entries > 0, 0, 255).astype(np.uint8)
    side = 2 ** r
    return GrayImage(side, side, pixels.tobytes())


def render_fcgr(matrix: FcgrMatrix, mode: str = "log") -> GrayImage:
    """Render counts to gray levels; darker means more frequent.

    linear: pixel = 255 - floor(255 * count / max_count)
    log:    pixel = 255 - floor(255 * ln(1 + count) / ln(1 + max_count))

    An all-zero matrix renders all white.
    """
    if mode not in RENDER_MODES:
        raise ValueError(f"mode must be one of {RENDER_MODES}, got {mode!r}")
    entries = matrix.entries
    side = entries.shape[0]
    peak = int(entries.max())
    if peak == 0:
        return GrayImage(side, side, bytes([255]) * (side * side))
    if mode == "linear":
        shade = (255 * entries) // peak
    else:
        shade = np.floor(255.0 * np.log1p(entries) / np.log1p(peak)).astype(np.int64)
    pixels = (255 - shade).astype(np.uint8)
    return GrayImage(side, side, pixels.tobytes())


def pgm_bytes(image: GrayImage) -> bytes:
    """Binary PGM: ASCII header `P5\\n<w> <h>\\n255\\n` then raw row-major bytes."""
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.pixels


def write_pgm(image: GrayImage, sink: Union[str, BinaryIO]) -> None:
    data = pgm_bytes(image)
    if isinstance(sink, str):
        with open(sink, "wb") as fh:
            fh.write(data)
    else:
        sink.write(data)


def read_pgm(data: bytes) -> GrayImage:
    """Parse the binary PGM produced by :func:`pgm_bytes` (maxval 255)."""
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P5" or fields[3] != b"255":
        raise ValueError("not an 8-bit binary PGM")
    width, height = int(fields[1]), int(fields[2])
    pos += 1  # single whitespace byte after maxval
    pixels = data[pos : pos + width * height]
    if len(pixels) != width * height:
        raise ValueError("truncated PGM pixel data")
    return GrayImage(width, height, pixels)


def write_png(image: GrayImage, sink: Union[str, BinaryIO]) -> None:
    """Optional PNG export via Pillow; excluded from bit-exact comparisons."""
    try:
        from PIL import Image
    except ImportError as exc:
        raise RuntimeError(
            "PNG export requires Pillow (install the 'png' extra)"
        ) from exc
    img = Image.frombytes("L", (image.width, image.height), image.pixels)
    img.save(sink, format="PNG")
