import os
from fractions import Fraction

import numpy as np
import pytest

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")
GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")

ALPHABET = "ACGT"


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURE_DIR, name)


def golden_bytes(name: str) -> bytes:
    with open(os.path.join(GOLDEN_DIR, name), "rb") as fh:
        return fh.read()


def random_dna(rng: np.random.Generator, length: int) -> str:
    return "".join(ALPHABET[c] for c in rng.integers(0, 4, length))


def brute_force_counts(text: str, k: int) -> dict:
    """Window-scan oracle: k-mer string -> occurrence count."""
    counts = {}
    for i in range(len(text) - k + 1):
        w = text[i : i + k]
        counts[w] = counts.get(w, 0) + 1
    return counts


def exact_trajectory(text: str) -> list:
    """Fraction-arithmetic oracle for CGR points p_0..p_n."""
    corners = {"A": (-1, -1), "C": (-1, 1), "G": (1, 1), "T": (1, -1)}
    points = [(Fraction(0), Fraction(0))]
    x = y = Fraction(0)
    for ch in text:
        cx, cy = corners[ch]
        x = (x + cx) / 2
        y = (y + cy) / 2
        points.append((x, y))
    return points


@pytest.fixture(scope="session")
def fragment01():
    from chaoskit import parse_fasta

    with open(fixture_path("fragment-01.fasta"), "rb") as fh:
        [(_, seq)] = parse_fasta(fh)
    return seq


@pytest.fixture(scope="session")
def all_fragments():
    from chaoskit import parse_fasta

    fragments = []
    for i in range(1, 6):
        with open(fixture_path(f"fragment-0{i}.fasta"), "rb") as fh:
            [(header, seq)] = parse_fasta(fh)
        fragments.append((header, seq))
    return fragments
