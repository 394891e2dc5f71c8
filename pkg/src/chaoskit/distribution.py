"""Empirical k-mer distributions, marginal-consistency constraints, and
hit-and-run sampling from the constrained simplex.

A k-mer distribution of a real sequence satisfies, for every (k-1)-mer v, the
marginal condition: total probability of k-mers with prefix v equals total
probability of k-mers with suffix v. Together with the sum-to-one row this is
a linear system B theta = b whose solution set, intersected with theta >= 0,
is the polytope the sampler walks.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, TextIO, Tuple, Union

import numpy as np

from .seqcore import (
    KmerFrequencyVector,
    kmer_from_index,
    kmer_index,
    _validate_k,
)

#: Supported distribution orders for the constraint system and sampler.
MIN_ORDER, MAX_ORDER = 2, 6

#: Relative singular-value threshold for the numerical rank of B.
RANK_THRESHOLD = 1e-10

#: A direction with norm below this is redrawn.
DEGENERATE_DIRECTION_NORM = 1e-14

MAX_DIRECTION_REDRAWS = 100

DEFAULT_SEED = 42


class OrderRangeError(ValueError):
    """k outside the supported [2, 6] range."""


class DegenerateDirectionError(RuntimeError):
    """Repeatedly drew near-zero directions from the kernel."""


@dataclass(frozen=True, eq=False)
class KmerDistribution:
    """A point theta in the probability simplex over all 4**k k-mers."""

    k: int
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64)
        if theta.shape != (4 ** self.k,):
            raise ValueError(f"expected {4 ** self.k} components for k={self.k}")
        if theta.size and float(theta.min()) < 0.0:
            raise ValueError("components must be nonnegative")
        total = float(theta.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"components must sum to 1, got {total!r}")
        theta = theta.copy()
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    def component(self, w) -> float:
        return float(self.theta[kmer_index(w)])


def empirical_distribution(vector: KmerFrequencyVector) -> KmerDistribution:
    """Normalize a count vector to a distribution; zero-sum vectors are an error."""
    total = vector.total()
    if total <= 0:
        raise ValueError("cannot normalize a zero-sum count vector")
    return KmerDistribution(vector.k, vector.counts / total)


def uniform_distribution(k: int) -> KmerDistribution:
    _validate_k(k)
    n = 4 ** k
    return KmerDistribution(k, np.full(n, 1.0 / n))


def marginal_residual(dist: KmerDistribution) -> np.ndarray:
    """Per-(k-1)-mer prefix-mass minus suffix-mass, one entry per v in index order.

    A distribution is marginal-consistent when the largest residual magnitude
    is at numerical noise level (default tolerance 1e-9).
    """
    if dist.k < 2:
        raise OrderRangeError("marginal residuals require k >= 2")
    nv = 4 ** (dist.k - 1)
    prefix = dist.theta.reshape(nv, 4).sum(axis=1)
    suffix = dist.theta.reshape(4, nv).sum(axis=0)
    return prefix - suffix


def is_marginal_consistent(dist: KmerDistribution, tol: float = 1e-9) -> bool:
    return float(np.abs(marginal_residual(dist)).max()) <= tol


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """The linear system B theta = b of simplex normalization plus marginal rows.

    B has 1 + 4**(k-1) rows: row 0 is all ones, and the row of each (k-1)-mer
    v carries +1 on k-mers with prefix v and -1 on k-mers with suffix v
    (cancelling to 0 where prefix and suffix coincide). b = (1, 0, ..., 0).
    `kernel_basis` holds an orthonormal basis N of the null space of B, so
    directions N z stay inside the affine solution set.
    """

    k: int
    matrix: np.ndarray
    rhs: np.ndarray
    numerical_rank: int
    kernel_basis: np.ndarray

    @property
    def kernel_dimension(self) -> int:
        return self.kernel_basis.shape[1]


@lru_cache(maxsize=None)
def build_constraints(k: int) -> ConstraintSystem:
    """Construct B, its numerical rank, and an orthonormal kernel basis.

    The rank is computed (SVD with threshold 1e-10 times the largest singular
    value), never assumed: the marginal rows sum to the zero vector, so B is
    not of full row rank.
    """
    if not MIN_ORDER <= k <= MAX_ORDER:
        raise OrderRangeError(f"constraint system supports {MIN_ORDER} <= k <= {MAX_ORDER}, got {k}")
    n = 4 ** k
    nv = 4 ** (k - 1)
    matrix = np.zeros((1 + nv, n))
    matrix[0, :] = 1.0
    rows = np.arange(nv)
    for a in range(4):
        matrix[1 + rows, rows * 4 + a] += 1.0  # k-mers with prefix v
        matrix[1 + rows, a * nv + rows] -= 1.0  # k-mers with suffix v
    rhs = np.zeros(1 + nv)
    rhs[0] = 1.0
    _, singular, vt = np.linalg.svd(matrix)
    rank = int((singular > RANK_THRESHOLD * singular[0]).sum())
    kernel = vt[rank:].T
    for arr in (matrix, rhs, kernel):
        arr.setflags(write=False)
    return ConstraintSystem(k, matrix, rhs, rank, kernel)


def hit_and_run_chain(
    k: int, iterations: int, seed: int = DEFAULT_SEED
) -> Iterator[np.ndarray]:
    """Yield successive hit-and-run iterates (copies), one per iteration.

    Starting from the uniform distribution, each step draws a standard-normal
    coefficient vector z, walks along d = N z / ||N z||, and jumps to a uniform
    point of the feasible chord {t : theta + t d >= 0}. Every iterate satisfies
    B theta = b up to numerical drift. Near-zero directions are redrawn, at
    most 100 times in a row.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    system = build_constraints(k)
    kernel = system.kernel_basis
    rng = np.random.default_rng(seed)
    theta = np.full(4 ** k, 1.0 / 4 ** k)
    for _ in range(iterations):
        for attempt in range(MAX_DIRECTION_REDRAWS + 1):
            z = rng.standard_normal(system.kernel_dimension)
            direction = kernel @ z
            norm = float(np.linalg.norm(direction))
            if norm >= DEGENERATE_DIRECTION_NORM:
                break
        else:
            raise DegenerateDirectionError(
                f"no usable direction after {MAX_DIRECTION_REDRAWS} redraws"
            )
        direction /= norm
        positive = direction > 0.0
        negative = direction < 0.0
        t_min = float(np.max(-theta[positive] / direction[positive]))
        t_max = float(np.min(-theta[negative] / direction[negative]))
        if t_min > t_max:  # numerically collapsed chord; stay in place
            t_min = t_max = 0.0
        theta = theta + rng.uniform(t_min, t_max) * direction
        yield theta.copy()


def hit_and_run_sample(
    k: int, iterations: Optional[int] = None, seed: int = DEFAULT_SEED
) -> KmerDistribution:
    """Sample a marginal-consistent distribution from the constrained simplex.

    `iterations` defaults to 1000 times the kernel dimension. Identical
    (k, iterations, seed) produce identical output; the iterate after t steps
    equals the sample drawn with iterations=t and the same seed. Components
    that drift to tiny negatives are clamped to zero and the output is
    renormalized.
    """
    if iterations is None:
        iterations = 1000 * build_constraints(k).kernel_dimension
    theta = None
    for theta in hit_and_run_chain(k, iterations, seed):
        pass
    theta = np.clip(theta, 0.0, None)
    return KmerDistribution(k, theta / theta.sum())


def total_variation_l1(d1: KmerDistribution, d2: KmerDistribution) -> float:
    """L1 distance sum(|d1 - d2|) between two distributions of equal order."""
    if d1.k != d2.k:
        raise ValueError(f"order mismatch: {d1.k} vs {d2.k}")
    return float(np.abs(d1.theta - d2.theta).sum())


def write_distribution_csv(dist: KmerDistribution, sink: TextIO) -> None:
    """Emit `kmer,theta` rows in k-mer index order."""
    sink.write("kmer,theta\n")
    for i, value in enumerate(dist.theta):
        sink.write(f"{kmer_from_index(i, dist.k)},{float(value)!r}\n")


def read_distribution_csv(source: Union[str, TextIO]) -> Tuple[KmerDistribution, bool]:
    """Parse a `kmer,theta` CSV; returns (distribution, was_renormalized).

    Validates nonnegative components, k-mer order matching the index order,
    and a component sum within 1e-6 of one; the vector is renormalized and the
    flag reports whether that changed it beyond float noise.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    header = source.readline().strip()
    if header != "kmer,theta":
        raise ValueError(f"expected 'kmer,theta' header, got {header!r}")
    values = []
    kmers = []
    for line in source:
        line = line.strip()
        if not line:
            continue
        kmer, _, value = line.partition(",")
        kmers.append(kmer)
        values.append(float(value))
    count = len(values)
    k = round(np.log(count) / np.log(4)) if count else 0
    if count == 0 or 4 ** k != count:
        raise ValueError(f"{count} rows is not 4**k for any supported k")
    for i, kmer in enumerate(kmers):
        if kmer != kmer_from_index(i, k):
            raise ValueError(
                f"row {i}: expected k-mer {kmer_from_index(i, k)}, got {kmer!r}"
            )
    theta = np.asarray(values)
    if float(theta.min()) < 0.0:
        raise ValueError("negative component in distribution")
    total = float(theta.sum())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"component sum {total!r} not within 1e-6 of 1")
    renormalized = abs(total - 1.0) > 1e-9
    return KmerDistribution(k, theta / total), renormalized
