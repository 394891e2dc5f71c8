"""DNA alphabet, sequences, k-mer indexing and counting, letter permutations, FASTA I/O.

Sequences are stored as immutable arrays of 2-bit codes (A=0, C=1, G=2, T=3,
the lexicographic order of the alphabet), so the base-4 value of a window is
simultaneously its k-mer index.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import BinaryIO, Iterable, TextIO, Union

import numpy as np

ALPHABET = "ACGT"
MAX_KMER_LENGTH = 32

# ASCII byte -> 2-bit code, 255 for anything outside ACGT/acgt.
_ASCII_TO_CODE = np.full(256, 255, dtype=np.uint8)
for _i, _letter in enumerate(ALPHABET):
    _ASCII_TO_CODE[ord(_letter)] = _i
    _ASCII_TO_CODE[ord(_letter.lower())] = _i

_CODE_TO_LETTER = np.frombuffer(ALPHABET.encode("ascii"), dtype=np.uint8)


class SequenceAlphabetError(ValueError):
    """A symbol outside the ACGT alphabet was encountered."""


class EmptyWindowError(ValueError):
    """The sequence is shorter than the requested window length k."""


class KmerLengthError(ValueError):
    """k outside the supported range [1, 32]."""


class KmerIndexRangeError(ValueError):
    """Index outside [0, 4**k - 1]."""


class FastaError(ValueError):
    """Malformed FASTA input."""


class DnaSequence:
    """An immutable sequence over {A, C, G, T}. The empty sequence is allowed."""

    __slots__ = ("_codes",)

    def __init__(self, codes: np.ndarray):
        codes = np.asarray(codes, dtype=np.uint8)
        if codes.ndim != 1:
            raise ValueError("codes must be one-dimensional")
        if codes.size and int(codes.max()) > 3:
            raise SequenceAlphabetError("codes must be in {0, 1, 2, 3}")
        codes = codes.copy()
        codes.setflags(write=False)
        self._codes = codes

    @classmethod
    def from_string(cls, text: str) -> "DnaSequence":
        raw = np.frombuffer(text.encode("ascii"), dtype=np.uint8)
        codes = _ASCII_TO_CODE[raw]
        bad = np.flatnonzero(codes == 255)
        if bad.size:
            pos = int(bad[0])
            raise SequenceAlphabetError(
                f"invalid symbol {text[pos]!r} at position {pos}"
            )
        return cls(codes)

    @property
    def codes(self) -> np.ndarray:
        """Read-only uint8 array of 2-bit codes."""
        return self._codes

    def __len__(self) -> int:
        return self._codes.size

    def __str__(self) -> str:
        if not self._codes.size:
            return ""
        return _CODE_TO_LETTER[self._codes].tobytes().decode("ascii")

    def __repr__(self) -> str:
        text = str(self)
        if len(text) > 40:
            text = text[:37] + "..."
        return f"DnaSequence({text!r}, length={len(self)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DnaSequence):
            return NotImplemented
        return self._codes.size == other._codes.size and bool(
            np.array_equal(self._codes, other._codes)
        )

    def __hash__(self) -> int:
        return hash(self._codes.tobytes())

    def __getitem__(self, item):
        if isinstance(item, slice):
            return DnaSequence(self._codes[item])
        return ALPHABET[int(self._codes[item])]

    def __add__(self, other: "DnaSequence") -> "DnaSequence":
        if not isinstance(other, DnaSequence):
            return NotImplemented
        return DnaSequence(np.concatenate([self._codes, other._codes]))

    def __iter__(self):
        for c in self._codes:
            yield ALPHABET[int(c)]


def as_sequence(s: Union[str, DnaSequence]) -> DnaSequence:
    if isinstance(s, DnaSequence):
        return s
    return DnaSequence.from_string(s)


@dataclass(frozen=True, eq=False)
class KmerFrequencyVector:
    """Counts of all 4**k k-mers of a sequence, in k-mer index order.

    When derived from a sequence of length n >= k the counts sum to n - k + 1
    (overlapping windows).
    """

    k: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (4 ** self.k,):
            raise ValueError(f"expected {4 ** self.k} counts for k={self.k}")
        if counts.size and int(counts.min()) < 0:
            raise ValueError("counts must be nonnegative")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    def total(self) -> int:
        return int(self.counts.sum())

    def count_of(self, w: Union[str, DnaSequence]) -> int:
        return int(self.counts[kmer_index(w)])


def _validate_k(k: int, upper: int = MAX_KMER_LENGTH) -> None:
    if not 1 <= k <= upper:
        raise KmerLengthError(f"k must be in [1, {upper}], got {k}")


def kmer_index(w: Union[str, DnaSequence]) -> int:
    """Base-4 index of a k-mer under A=0, C=1, G=2, T=3, first letter most significant.

    The induced order on k-mers is lexicographic with A < C < G < T, and the
    index equals the packed 2-bit encoding of the k-mer.
    """
    seq = as_sequence(w)
    _validate_k(len(seq))
    value = 0
    for c in seq.codes:
        value = (value << 2) | int(c)
    return value


def kmer_from_index(index: int, k: int) -> str:
    """Inverse of :func:`kmer_index` for a given k."""
    _validate_k(k)
    if not 0 <= index < 4 ** k:
        raise KmerIndexRangeError(f"index {index} out of range for k={k}")
    letters = []
    for t in range(k):
        letters.append(ALPHABET[(index >> (2 * (k - 1 - t))) & 3])
    return "".join(letters)


def _window_indices(codes: np.ndarray, k: int) -> np.ndarray:
    """Base-4 values of every length-k window, via shift-and-add over k passes."""
    m = codes.size - k + 1
    idx = np.zeros(m, dtype=np.int64)
    wide = codes.astype(np.int64)
    for t in range(k):
        idx += wide[t : t + m] << (2 * (k - 1 - t))
    return idx


def count_kmers(s: Union[str, DnaSequence], k: int) -> KmerFrequencyVector:
    """Count all overlapping k-mer occurrences of s.

    Raises EmptyWindowError when len(s) < k; the component sum of the result
    equals len(s) - k + 1.
    """
    seq = as_sequence(s)
    _validate_k(k)
    if len(seq) < k:
        raise EmptyWindowError(f"sequence of length {len(seq)} has no {k}-windows")
    idx = _window_indices(seq.codes, k)
    counts = np.bincount(idx, minlength=4 ** k)
    return KmerFrequencyVector(k, counts)


def occurrences(s: Union[str, DnaSequence], w: Union[str, DnaSequence]) -> int:
    """Number of (overlapping) occurrences of w in s."""
    seq = as_sequence(s)
    kmer = as_sequence(w)
    k = len(kmer)
    _validate_k(k)
    if len(seq) < k:
        raise EmptyWindowError(f"sequence of length {len(seq)} has no {k}-windows")
    if k > 31:
        # Packed windows would overflow int64; fall back to a direct scan.
        text, pat = str(seq), str(kmer)
        return sum(1 for i in range(len(text) - k + 1) if text[i : i + k] == pat)
    idx = _window_indices(seq.codes, k)
    return int((idx == kmer_index(kmer)).sum())


class LetterPermutation:
    """A bijection of the alphabet, extended to sequences letterwise (a morphism)."""

    __slots__ = ("_images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(int(v) for v in images)
        if sorted(images) != [0, 1, 2, 3]:
            raise ValueError("images must be a permutation of (0, 1, 2, 3)")
        self._images = images

    @classmethod
    def identity(cls) -> "LetterPermutation":
        return cls((0, 1, 2, 3))

    @classmethod
    def from_cycles(cls, notation: str) -> "LetterPermutation":
        """Parse cycle notation such as "(A G)(C T)" or "()"; whitespace and commas
        between letters are ignored."""
        images = list(range(4))
        body = notation.strip()
        if body in ("", "()"):
            return cls(images)
        depth = 0
        cycle: list[int] = []
        seen: set[int] = set()
        for ch in body:
            if ch == "(":
                if depth:
                    raise ValueError("nested parenthesis in cycle notation")
                depth = 1
                cycle = []
            elif ch == ")":
                if not depth:
                    raise ValueError("unbalanced parenthesis in cycle notation")
                depth = 0
                for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                    images[a] = b
            elif ch in " ,\t":
                continue
            elif depth and ch.upper() in ALPHABET:
                code = ALPHABET.index(ch.upper())
                if code in seen:
                    raise ValueError(f"letter {ch} appears twice in cycle notation")
                seen.add(code)
                cycle.append(code)
            else:
                raise ValueError(f"unexpected character {ch!r} in cycle notation")
        if depth:
            raise ValueError("unbalanced parenthesis in cycle notation")
        return cls(images)

    @property
    def images(self) -> tuple:
        return self._images

    def of_code(self, code: int) -> int:
        return self._images[code]

    def of_letter(self, letter: str) -> str:
        return ALPHABET[self._images[ALPHABET.index(letter)]]

    def of_kmer(self, w: Union[str, DnaSequence]) -> str:
        return str(apply_permutation(self, as_sequence(w)))

    def compose(self, other: "LetterPermutation") -> "LetterPermutation":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        return LetterPermutation(tuple(self._images[o] for o in other._images))

    def inverse(self) -> "LetterPermutation":
        inv = [0] * 4
        for src, dst in enumerate(self._images):
            inv[dst] = src
        return LetterPermutation(inv)

    def cycles(self) -> str:
        """Canonical cycle notation, e.g. "(A G)(C T)"; identity is "()"."""
        seen = [False] * 4
        parts = []
        for start in range(4):
            if seen[start] or self._images[start] == start:
                seen[start] = True
                continue
            cycle = [start]
            seen[start] = True
            nxt = self._images[start]
            while nxt != start:
                cycle.append(nxt)
                seen[nxt] = True
                nxt = self._images[nxt]
            parts.append("(" + " ".join(ALPHABET[c] for c in cycle) + ")")
        return "".join(parts) if parts else "()"

    def __eq__(self, other) -> bool:
        if not isinstance(other, LetterPermutation):
            return NotImplemented
        return self._images == other._images

    def __hash__(self) -> int:
        return hash(self._images)

    def __repr__(self) -> str:
        return f"LetterPermutation({self.cycles()!r})"


# The eight alphabet permutations whose morphisms correspond to symmetries of
# the CGR square, in the order (), (A T G C), (A G)(C T), (A C G T),
# (A C)(G T), (C T), (A T)(C G), (A G).
S_PERMUTATIONS = (
    LetterPermutation((0, 1, 2, 3)),
    LetterPermutation((3, 0, 1, 2)),
    LetterPermutation((2, 3, 0, 1)),
    LetterPermutation((1, 2, 3, 0)),
    LetterPermutation((1, 0, 3, 2)),
    LetterPermutation((0, 3, 2, 1)),
    LetterPermutation((3, 2, 1, 0)),
    LetterPermutation((2, 1, 0, 3)),
)


def apply_permutation(sigma: LetterPermutation, s: Union[str, DnaSequence]) -> DnaSequence:
    """Apply sigma letter by letter; the output has the same length as the input."""
    seq = as_sequence(s)
    lut = np.array(sigma.images, dtype=np.uint8)
    return DnaSequence(lut[seq.codes])


VALID_FASTA_POLICIES = ("skip", "split", "fail")


def _clean_record(raw: bytes, header: str, policy: str) -> DnaSequence:
    codes = _ASCII_TO_CODE[np.frombuffer(raw, dtype=np.uint8)]
    valid = codes != 255
    if valid.all():
        return DnaSequence(codes)
    if policy == "fail":
        pos = int(np.flatnonzero(~valid)[0])
        raise SequenceAlphabetError(
            f"record {header!r}: invalid symbol {chr(raw[pos])!r} at position {pos}"
        )
    if policy == "skip":
        return DnaSequence(codes[valid])
    # split: keep the longest all-valid fragment, ties broken to the later one
    edges = np.flatnonzero(np.diff(np.concatenate(([0], valid.view(np.int8), [0]))))
    starts, ends = edges[0::2], edges[1::2]
    if starts.size == 0:
        return DnaSequence(np.empty(0, dtype=np.uint8))
    lengths = ends - starts
    best = int(lengths.size - 1 - np.argmax(lengths[::-1]))
    return DnaSequence(codes[starts[best] : ends[best]])


def parse_fasta(
    source: Union[bytes, str, BinaryIO, TextIO], policy: str = "split"
) -> list:
    """Parse FASTA records into (header, DnaSequence) pairs.

    Sequence lines are joined and case-folded. Non-ACGT symbols are handled per
    `policy`: "skip" drops them, "split" keeps the longest clean fragment
    (ties go to the later fragment), "fail" raises SequenceAlphabetError.
    """
    if policy not in VALID_FASTA_POLICIES:
        raise ValueError(f"policy must be one of {VALID_FASTA_POLICIES}, got {policy!r}")
    if isinstance(source, str):
        source = io.BytesIO(source.encode("ascii"))
    elif isinstance(source, bytes):
        source = io.BytesIO(source)

    records = []
    header = None
    chunks: list[bytes] = []

    def flush():
        if header is not None:
            records.append((header, _clean_record(b"".join(chunks), header, policy)))

    for line in source:
        if isinstance(line, str):
            line = line.encode("ascii")
        line = line.strip()
        if not line:
            continue
        if line.startswith(b">"):
            flush()
            header = line[1:].decode("ascii")
            chunks = []
        else:
            if header is None:
                raise FastaError("sequence data before the first '>' header")
            chunks.append(line)
    flush()
    return records


def write_counts_csv(vector: KmerFrequencyVector, sink: TextIO) -> None:
    """Emit `kmer,count` rows in k-mer index order."""
    sink.write("kmer,count\n")
    k = vector.k
    for i, c in enumerate(vector.counts):
        sink.write(f"{kmer_from_index(i, k)},{int(c)}\n")
