#!/usr/bin/env python3
"""Generate the bundled 100 kb FASTA test fragments (committed under
tests/fixtures/). Each fragment is drawn from a seeded first-order Markov
chain with a distinct compositional bias, standing in for genome fragments of
different organisms. Rerunning reproduces the committed files byte for byte.
"""

import os

import numpy as np

FRAGMENT_LENGTH = 100_000
OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")

ALPHABET = "ACGT"
A, C, G, T = range(4)


def markov_fragment(transition: np.ndarray, start: int, length: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    cumulative = np.cumsum(transition, axis=1)
    cumulative /= cumulative[:, -1:]
    draws = rng.random(length)
    out = np.empty(length, dtype=np.uint8)
    state = start
    for pos in range(length):
        state = int(np.searchsorted(cumulative[state], draws[pos], side="right"))
        out[pos] = state
    return "".join(ALPHABET[c] for c in out)


def biased(rows):
    m = np.array(rows, dtype=float)
    return m / m.sum(axis=1, keepdims=True)


FRAGMENTS = [
    (
        "fragment-01",
        "gc-depleted",
        # CpG-suppressed, AT-leaning: the classic double-scoop pattern
        biased(
            [
                [32, 18, 22, 28],
                [30, 22, 2, 30],  # C -> G strongly suppressed
                [26, 20, 24, 22],
                [30, 18, 22, 30],
            ]
        ),
        11,
    ),
    (
        "fragment-02",
        "gc-rich",
        biased(
            [
                [14, 30, 34, 12],
                [12, 34, 30, 14],
                [12, 32, 34, 12],
                [14, 30, 32, 14],
            ]
        ),
        22,
    ),
    (
        "fragment-03",
        "at-rich",
        biased(
            [
                [36, 12, 12, 32],
                [32, 14, 12, 32],
                [30, 12, 14, 34],
                [34, 12, 12, 34],
            ]
        ),
        33,
    ),
    (
        "fragment-04",
        "near-uniform",
        biased(
            [
                [26, 25, 24, 25],
                [25, 26, 25, 24],
                [24, 25, 26, 25],
                [25, 24, 25, 26],
            ]
        ),
        44,
    ),
    (
        "fragment-05",
        "repeat-heavy",
        # strong self-transitions produce homopolymer runs and banded CGRs
        biased(
            [
                [60, 12, 16, 12],
                [12, 58, 12, 18],
                [18, 12, 58, 12],
                [12, 16, 12, 60],
            ]
        ),
        55,
    ),
]


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    for name, flavour, transition, seed in FRAGMENTS:
        text = markov_fragment(transition, start=A, length=FRAGMENT_LENGTH, seed=seed)
        path = os.path.join(OUT_DIR, f"{name}.fasta")
        with open(path, "w") as fh:
            fh.write(f">{name} synthetic 100kb test fragment ({flavour})\n")
            for pos in range(0, len(text), 70):
                fh.write(text[pos : pos + 70] + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
