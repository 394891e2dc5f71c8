"""Chaos-game geometry: trajectories, grid cells, FCGR matrices, square symmetries.

Coordinates live in the open square (-1, 1) x (-1, 1) with corners labelled
A=(-1,-1), C=(-1,1), G=(1,1), T=(1,-1). Every trajectory point is a dyadic
rational and is stored exactly as (numerator, depth) with value n / 2**depth,
alongside a float shadow used only for rendering and export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, TextIO, Union

import numpy as np

from .seqcore import (
    ALPHABET,
    DnaSequence,
    EmptyWindowError,
    KmerFrequencyVector,
    LetterPermutation,
    S_PERMUTATIONS,
    as_sequence,
    count_kmers,
    kmer_from_index,
    _validate_k,
)

#: Corner of the CGR square for each 2-bit code (A, C, G, T).
CORNERS = ((-1, -1), (-1, 1), (1, 1), (1, -1))

#: Maximum depth for which exact dyadic numerators are kept on trajectory
#: points; deeper points carry only the float shadow. Cell binning never
#: depends on this (it uses the k-letter suffix, exact at any depth).
DEFAULT_DEPTH_CAP = 64


class EmptySequenceError(ValueError):
    """Operation requires at least one letter."""


class CellIndexError(ValueError):
    """Grid-cell indices outside [0, 2**k - 1]."""


class UnsupportedPermutationError(ValueError):
    """Letter permutation without a counterpart among the 8 square symmetries."""


def label(letter: str) -> tuple:
    """Corner of the CGR square assigned to a nucleotide."""
    return CORNERS[ALPHABET.index(letter)]


def label_inverse(x: int, y: int) -> str:
    """Nucleotide whose corner is (x, y), each in {-1, +1}."""
    return ALPHABET[CORNERS.index((x, y))]


@dataclass(frozen=True)
class CgrPoint:
    """A point of a CGR trajectory.

    `x` and `y` are the float shadow. When `depth` is not None the exact value
    is (num_x / 2**depth, num_y / 2**depth); trajectory points past the depth
    cap carry floats only.
    """

    x: float
    y: float
    num_x: Optional[int] = None
    num_y: Optional[int] = None
    depth: Optional[int] = None

    @property
    def is_exact(self) -> bool:
        return self.depth is not None

    def fractions(self) -> tuple:
        if not self.is_exact:
            raise ValueError("point beyond the exact-depth cap")
        scale = 1 << self.depth
        return Fraction(self.num_x, scale), Fraction(self.num_y, scale)


ORIGIN = CgrPoint(0.0, 0.0, 0, 0, 0)


@dataclass(frozen=True)
class CgrTrajectory:
    """Ordered CGR points p_0 .. p_n of a DNA sequence of length n."""

    points: tuple

    @property
    def length(self) -> int:
        return len(self.points) - 1

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i: int) -> CgrPoint:
        return self.points[i]


def cgr_trajectory(
    s: Union[str, DnaSequence], depth_cap: int = DEFAULT_DEPTH_CAP
) -> CgrTrajectory:
    """Trajectory p_0=(0,0), p_i = (p_{i-1} + corner(a_i)) / 2.

    Points up to index `depth_cap` are exact dyadics; beyond that only the
    float recursion is carried.
    """
    seq = as_sequence(s)
    points = [ORIGIN]
    x, y = 0.0, 0.0
    nx, ny, d = 0, 0, 0
    exact = True
    for code in seq.codes:
        cx, cy = CORNERS[code]
        x = (x + cx) / 2.0
        y = (y + cy) / 2.0
        if exact and d < depth_cap:
            nx = nx + (cx << d)
            ny = ny + (cy << d)
            d += 1
            points.append(CgrPoint(x, y, nx, ny, d))
        else:
            exact = False
            points.append(CgrPoint(x, y))
    return CgrTrajectory(tuple(points))


def last_point(
    s: Union[str, DnaSequence], depth_cap: int = DEFAULT_DEPTH_CAP
) -> CgrPoint:
    """Final trajectory point, from the closed-form letter sums.

    The coordinate numerators are sum(corner_l * 2**(l-1)) over letter
    positions l = 1..n at depth n. For sequences longer than the cap the
    exact part is evaluated on the last `depth_cap` letters only (the dropped
    prefix contributes less than 2**-depth_cap, far below float resolution)
    and only the float shadow is returned.
    """
    seq = as_sequence(s)
    n = len(seq)
    if n == 0:
        raise EmptySequenceError("last_point requires a non-empty sequence")
    exact = n <= depth_cap
    codes = seq.codes if exact else seq.codes[n - depth_cap :]
    nx = ny = 0
    for l, code in enumerate(codes):
        cx, cy = CORNERS[code]
        nx += cx << l
        ny += cy << l
    d = len(codes)
    scale = float(1 << d)
    if exact:
        return CgrPoint(nx / scale, ny / scale, nx, ny, d)
    return CgrPoint(nx / scale, ny / scale)


@dataclass(frozen=True)
class CellIndices:
    """Row i and column j of a grid cell of order k; row 0 is the top of the
    square (y near +1), column 0 the left (x near -1)."""

    k: int
    i: int
    j: int


def cell_center(k: int, i: int, j: int) -> CgrPoint:
    """Exact center of grid cell (i, j) of order k; the cell side is 2**-(k-1)."""
    _validate_k(k)
    side = 1 << k
    if not (0 <= i < side and 0 <= j < side):
        raise CellIndexError(f"cell ({i}, {j}) out of range for k={k}")
    nx = 2 * j + 1 - side
    ny = side - 1 - 2 * i
    scale = float(side)
    return CgrPoint(nx / scale, ny / scale, nx, ny, k)


def kmer_cell_indices(w: Union[str, DnaSequence]) -> CellIndices:
    """Grid cell of order k = len(w) whose open box equals the cell of the k-mer w.

    Integer-only: bit l-1 of the column is 1 when letter l sits on the x=+1
    side (G or T), bit l-1 of the row is 1 when it sits on the y=-1 side
    (A or T).
    """
    seq = as_sequence(w)
    k = len(seq)
    _validate_k(k)
    i = j = 0
    for l, code in enumerate(seq.codes):
        c = int(code)
        j |= (c >> 1) << l
        i |= (1 ^ ((c >> 1) ^ (c & 1))) << l
    return CellIndices(k, i, j)


# code of the letter with alpha = row bit, beta = column bit, indexed by 2*alpha + beta
_LETTER_CODE_OF_BITS = (1, 2, 0, 3)  # C, G, A, T


def cell_indices_to_kmer(cell: CellIndices) -> str:
    """k-mer whose cell is grid cell (i, j); inverse of :func:`kmer_cell_indices`.

    Letter l is read from bit l-1 of the binary expansions of i and j
    (x_l = 2*beta - 1, y_l = 1 - 2*alpha).
    """
    k, i, j = cell.k, cell.i, cell.j
    _validate_k(k)
    side = 1 << k
    if not (0 <= i < side and 0 <= j < side):
        raise CellIndexError(f"cell ({i}, {j}) out of range for k={k}")
    letters = []
    for l in range(k):
        alpha = (i >> l) & 1
        beta = (j >> l) & 1
        letters.append(ALPHABET[_LETTER_CODE_OF_BITS[2 * alpha + beta]])
    return "".join(letters)


@dataclass(frozen=True, eq=False)
class FcgrMatrix:
    """2**k x 2**k matrix of nonnegative k-mer counts, row 0 at the top."""

    k: int
    entries: np.ndarray

    def __post_init__(self):
        side = 2 ** self.k
        entries = np.asarray(self.entries, dtype=np.int64)
        if entries.shape != (side, side):
            raise ValueError(f"expected a {side}x{side} matrix for k={self.k}")
        if entries.size and int(entries.min()) < 0:
            raise ValueError("entries must be nonnegative")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def total(self) -> int:
        return int(self.entries.sum())


def _cell_bit_arrays(s: DnaSequence, k: int):
    """Per-letter row/column bits: beta (x side) and alpha (y side)."""
    codes = s.codes.astype(np.int64)
    beta = codes >> 1
    alpha = 1 - ((codes >> 1) ^ (codes & 1))
    return alpha, beta


def fcgr_grid(s: Union[str, DnaSequence], k: int) -> FcgrMatrix:
    """FCGR by discretizing the trajectory: bin each point p_m, m >= k, into the
    open grid cell determined by its k-letter suffix.

    Points p_0 .. p_{k-1} sit on grid lines of order k and belong to no open
    cell, so they are excluded; the entry sum is len(s) - k + 1. Agrees
    exactly with :func:`fcgr_count` (the two are cross-checked in tests).
    """
    seq = as_sequence(s)
    _validate_k(k)
    n = len(seq)
    if n < k:
        raise EmptyWindowError(f"sequence of length {n} has no {k}-windows")
    alpha, beta = _cell_bit_arrays(seq, k)
    m = n - k + 1
    i = np.zeros(m, dtype=np.int64)
    j = np.zeros(m, dtype=np.int64)
    for t in range(k):
        i += alpha[t : t + m] << t
        j += beta[t : t + m] << t
    flat = (i << k) | j
    side = 1 << k
    entries = np.bincount(flat, minlength=side * side).reshape(side, side)
    return FcgrMatrix(k, entries)


@lru_cache(maxsize=None)
def _cell_kmer_index_map(k: int) -> np.ndarray:
    """tau[i, j] = k-mer index of the k-mer associated with grid cell (i, j)."""
    side = 1 << k
    i = np.arange(side, dtype=np.int64)[:, None]
    j = np.arange(side, dtype=np.int64)[None, :]
    lut = np.array(_LETTER_CODE_OF_BITS, dtype=np.int64)
    tau = np.zeros((side, side), dtype=np.int64)
    for l in range(k):
        alpha = (i >> l) & 1
        beta = (j >> l) & 1
        tau += lut[2 * alpha + beta] << (2 * (k - 1 - l))
    tau.setflags(write=False)
    return tau


@lru_cache(maxsize=None)
def _kronecker_kmer_index_map(k: int) -> np.ndarray:
    """tau[i, j] = k-mer index under the Kronecker-power layout of [[C, G], [A, T]].

    Letter l of the cell's k-mer is selected by bit k-l of i and j (the
    top-level 2x2 block decides the first letter), the reverse of the grid
    convention."""
    side = 1 << k
    i = np.arange(side, dtype=np.int64)[:, None]
    j = np.arange(side, dtype=np.int64)[None, :]
    lut = np.array(_LETTER_CODE_OF_BITS, dtype=np.int64)
    tau = np.zeros((side, side), dtype=np.int64)
    for t in range(k):
        a = (i >> t) & 1
        b = (j >> t) & 1
        tau += lut[2 * a + b] << (2 * t)
    tau.setflags(write=False)
    return tau


def fcgr_count(s: Union[str, DnaSequence], k: int) -> FcgrMatrix:
    """FCGR by counting: one k-mer counting pass scattered onto the grid, entry
    (i, j) being the occurrence count of the k-mer of cell (i, j)."""
    counts = count_kmers(s, k)
    return FcgrMatrix(k, counts.counts[_cell_kmer_index_map(k)])


def fcgr_kronecker(s: Union[str, DnaSequence], k: int) -> FcgrMatrix:
    """FCGR under the Kronecker-product layout.

    Coincides with :func:`fcgr_count` at k=1 and diverges for k >= 2 (e.g. the
    0-based entry (0, 1) holds the CG count here but the GC count under the
    grid layout)."""
    counts = count_kmers(s, k)
    return FcgrMatrix(k, counts.counts[_kronecker_kmer_index_map(k)])


def fcgr_to_frequency_vector(matrix: FcgrMatrix) -> KmerFrequencyVector:
    """Vectorize a grid-layout FCGR into k-mer index order (exact inverse of the
    scatter in :func:`fcgr_count`)."""
    k = matrix.k
    vec = np.zeros(4 ** k, dtype=np.int64)
    vec[_cell_kmer_index_map(k)] = matrix.entries
    return KmerFrequencyVector(k, vec)


def fcgr_geometric(s: Union[str, DnaSequence], k: int) -> FcgrMatrix:
    """Slow exact-rational oracle for :func:`fcgr_grid`.

    Recomputes the trajectory in Fraction arithmetic and bins each point
    p_m, m >= k, by interval comparison against the open cell boxes. Points on
    grid lines belong to no open cell and are dropped. Intended for
    cross-checking on short sequences only (cost grows with sequence length
    and denominator size).
    """
    seq = as_sequence(s)
    _validate_k(k)
    n = len(seq)
    if n < k:
        raise EmptyWindowError(f"sequence of length {n} has no {k}-windows")
    side = 1 << k
    half = Fraction(1, 2)
    scale = 1 << (k - 1)
    entries = np.zeros((side, side), dtype=np.int64)
    x = y = Fraction(0)
    for m, code in enumerate(seq.codes, start=1):
        cx, cy = CORNERS[code]
        x = (x + cx) * half
        y = (y + cy) * half
        if m < k:
            continue
        tx = (x + 1) * scale
        ty = (y + 1) * scale
        if tx.denominator == 1 or ty.denominator == 1:
            continue  # on a grid line: in no open cell
        col = math.floor(tx)
        row = side - 1 - math.floor(ty)
        entries[row, col] += 1
    return FcgrMatrix(k, entries)


def on_order_k_grid_lines(point: CgrPoint, k: int) -> bool:
    """True when both coordinates are integer multiples of 2**-(k-1)."""
    fx, fy = point.fractions()
    scale = 1 << (k - 1)
    return (fx * scale).denominator == 1 and (fy * scale).denominator == 1


@dataclass(frozen=True)
class Symmetry:
    """One of the eight symmetries of the square, as a 2x2 matrix with entries
    in {-1, 0, 1} acting on column vectors."""

    name: str
    matrix: tuple

    def apply_point(self, p: CgrPoint) -> CgrPoint:
        (a, b), (c, d) = self.matrix
        x = a * p.x + b * p.y
        y = c * p.x + d * p.y
        if p.is_exact:
            nx = a * p.num_x + b * p.num_y
            ny = c * p.num_x + d * p.num_y
            return CgrPoint(x, y, nx, ny, p.depth)
        return CgrPoint(x, y)

    def compose(self, other: "Symmetry") -> "Symmetry":
        """Matrix product self @ other; the result is looked up in the group."""
        (a, b), (c, d) = self.matrix
        (e, f), (g, h) = other.matrix
        product = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
        return _SYMMETRY_BY_MATRIX[product]

    def inverse(self) -> "Symmetry":
        (a, b), (c, d) = self.matrix
        return _SYMMETRY_BY_MATRIX[((a, c), (b, d))]  # orthogonal: inverse = transpose


SYMMETRIES = {
    "e": Symmetry("e", ((1, 0), (0, 1))),
    "r": Symmetry("r", ((0, -1), (1, 0))),
    "r2": Symmetry("r2", ((-1, 0), (0, -1))),
    "r3": Symmetry("r3", ((0, 1), (-1, 0))),
    "s": Symmetry("s", ((1, 0), (0, -1))),
    "sr": Symmetry("sr", ((0, -1), (-1, 0))),
    "sr2": Symmetry("sr2", ((-1, 0), (0, 1))),
    "sr3": Symmetry("sr3", ((0, 1), (1, 0))),
}

_SYMMETRY_BY_MATRIX = {h.matrix: h for h in SYMMETRIES.values()}

# The correspondence between square symmetries and alphabet permutations:
# e -> (), r -> (A T G C), r2 -> (A G)(C T), r3 -> (A C G T),
# s -> (A C)(G T), sr -> (A G), sr2 -> (A T)(C G), sr3 -> (C T).
_SYMMETRY_ORDER = ("e", "r", "r2", "r3", "s", "sr", "sr2", "sr3")
_PERMUTATION_ORDER = (
    S_PERMUTATIONS[0],  # ()
    S_PERMUTATIONS[1],  # (A T G C)
    S_PERMUTATIONS[2],  # (A G)(C T)
    S_PERMUTATIONS[3],  # (A C G T)
    S_PERMUTATIONS[4],  # (A C)(G T)
    S_PERMUTATIONS[7],  # (A G)
    S_PERMUTATIONS[6],  # (A T)(C G)
    S_PERMUTATIONS[5],  # (C T)
)

PERMUTATION_FOR_SYMMETRY = dict(zip(_SYMMETRY_ORDER, _PERMUTATION_ORDER))
_SYMMETRY_FOR_PERMUTATION = {
    sigma: SYMMETRIES[name] for name, sigma in PERMUTATION_FOR_SYMMETRY.items()
}


def permutation_for_symmetry(h: Symmetry) -> LetterPermutation:
    """The alphabet permutation matching a square symmetry."""
    return PERMUTATION_FOR_SYMMETRY[h.name]


def symmetry_for_permutation(sigma: LetterPermutation) -> Symmetry:
    """The square symmetry matching an alphabet permutation.

    Only the 8 permutations in S have a counterpart; the other 16 elements of
    the full permutation group raise UnsupportedPermutationError.
    """
    try:
        return _SYMMETRY_FOR_PERMUTATION[sigma]
    except KeyError:
        raise UnsupportedPermutationError(
            f"permutation {sigma.cycles()} has no square-symmetry counterpart"
        ) from None


def symmetry_apply_trajectory(h: Symmetry, t: CgrTrajectory) -> CgrTrajectory:
    """Apply the symmetry matrix to every point; order and count are preserved
    and exact coordinates stay exact."""
    return CgrTrajectory(tuple(h.apply_point(p) for p in t.points))


def avoided_kmer_image(sigma: LetterPermutation, alpha: Union[str, DnaSequence]) -> str:
    """The k-mer avoided by sigma(s) when s avoids alpha: sigma applied letterwise."""
    return sigma.of_kmer(alpha)


def write_trajectory_tsv(t: CgrTrajectory, sink: TextIO) -> None:
    """Emit `index\\tx\\ty` rows using the float shadow."""
    sink.write("index\tx\ty\n")
    for idx, p in enumerate(t.points):
        sink.write(f"{idx}\t{p.x!r}\t{p.y!r}\n")


def write_fcgr_csv(matrix: FcgrMatrix, sink: TextIO) -> None:
    """Emit the matrix row-major as CSV under a `k=<k>` header line."""
    sink.write(f"k={matrix.k}\n")
    for row in matrix.entries:
        sink.write(",".join(str(int(v)) for v in row) + "\n")
