"""De Bruijn multigraphs over k-mer counts: balancing, connection, Eulerian
traversal, and reconstruction of synthetic DNA from a target distribution.

Vertices are (k-1)-mers (as integer indices), the edge of k-mer w runs from
prefix(w) to suffix(w), and edge multiplicities are the k-mer counts. Spelling
an Eulerian walk yields a sequence whose k-mer counts equal the edge multiset
exactly, so the distance from the target distribution is attributable to count
rounding and artificial (balance/connect) edges only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

import numpy as np

from .seqcore import (
    DnaSequence,
    count_kmers,
    kmer_from_index,
)
from .distribution import (
    KmerDistribution,
    MAX_ORDER,
    MIN_ORDER,
    OrderRangeError,
    empirical_distribution,
    total_variation_l1,
)


class NotEulerianError(ValueError):
    """The graph admits no Eulerian path/cycle under the required pattern."""


class InconsistentFlowError(ValueError):
    """Vertex imbalances do not sum to zero."""


@dataclass(frozen=True, eq=False)
class DeBruijnMultigraph:
    """Edge multiplicities for all 4**k k-mers; vertices are the (k-1)-mers
    with at least one incident edge."""

    k: int
    edge_counts: np.ndarray

    def __post_init__(self):
        if not 2 <= self.k:
            raise OrderRangeError("De Bruijn multigraph requires k >= 2")
        counts = np.asarray(self.edge_counts, dtype=np.int64)
        if counts.shape != (4 ** self.k,):
            raise ValueError(f"expected {4 ** self.k} edge counts for k={self.k}")
        if int(counts.min(initial=0)) < 0:
            raise ValueError("edge counts must be nonnegative")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "edge_counts", counts)

    @classmethod
    def from_sequence(cls, s: Union[str, DnaSequence], k: int) -> "DeBruijnMultigraph":
        return cls(k, count_kmers(s, k).counts)

    def total_edges(self) -> int:
        return int(self.edge_counts.sum())

    def _vertex_degrees(self) -> Tuple[np.ndarray, np.ndarray]:
        nv = 4 ** (self.k - 1)
        out_deg = self.edge_counts.reshape(nv, 4).sum(axis=1)
        in_deg = self.edge_counts.reshape(4, nv).sum(axis=0)
        return out_deg, in_deg


def counts_from_distribution(dist: KmerDistribution, n: int) -> np.ndarray:
    """Rescale theta by n - k + 1 and round half away from zero.

    The rounded total may differ from n - k + 1; downstream formulas use the
    actual total.
    """
    if n <= dist.k:
        raise ValueError(f"target length {n} must exceed k={dist.k}")
    return np.floor((n - dist.k + 1) * dist.theta + 0.5).astype(np.int64)


def _imbalance_array(g: DeBruijnMultigraph) -> np.ndarray:
    out_deg, in_deg = g._vertex_degrees()
    return out_deg - in_deg


def flow_imbalance(g: DeBruijnMultigraph) -> Dict[str, int]:
    """delta(v) = out-count minus in-count, for every (k-1)-mer v with at least
    one incident edge. The values always sum to zero."""
    delta = _imbalance_array(g)
    out_deg, in_deg = g._vertex_degrees()
    support = np.flatnonzero((out_deg + in_deg) > 0)
    return {kmer_from_index(int(v), g.k - 1): int(delta[v]) for v in support}


def _vertex_digits(v: int, width: int) -> List[int]:
    digits = []
    for t in range(width - 1, -1, -1):
        digits.append((v >> (2 * t)) & 3)
    return digits


def _path_edges(k: int, v: int, w: int) -> List[int]:
    """The k-1 edge k-mers of the De Bruijn path from vertex v to vertex w,
    spelling the word v + w."""
    digits = _vertex_digits(v, k - 1) + _vertex_digits(w, k - 1)
    edges = []
    for offset in range(k - 1):
        e = 0
        for t in range(k):
            e = (e << 2) | digits[offset + t]
        edges.append(e)
    return edges


def balance(g: DeBruijnMultigraph) -> Tuple[DeBruijnMultigraph, int]:
    """Add artificial edges until every vertex has equal in- and out-count.

    Surplus vertices (excess out-count) are paired with deficit vertices in
    index order; each transferred unit adds one copy of every edge on the
    (k-1)-edge path spelling deficit + surplus. The path runs from the deficit
    vertex to the surplus vertex, granting the former an out-edge and the
    latter an in-edge, which is the orientation that drives every imbalance to
    zero (intermediate vertices gain one in- and one out-edge each). Returns
    the balanced graph and the number of edge copies added.
    """
    delta = _imbalance_array(g).copy()
    if int(delta.sum()) != 0:
        raise InconsistentFlowError("vertex imbalances do not sum to zero")
    surplus = [int(v) for v in np.flatnonzero(delta > 0)]
    deficit = [int(v) for v in np.flatnonzero(delta < 0)]
    if not surplus:
        return g, 0
    counts = g.edge_counts.copy()
    added = 0
    si = di = 0
    while si < len(surplus) and di < len(deficit):
        v, w = surplus[si], deficit[di]
        units = min(int(delta[v]), -int(delta[w]))
        for e in _path_edges(g.k, w, v):
            counts[e] += units
            added += units
        delta[v] -= units
        delta[w] += units
        if delta[v] == 0:
            si += 1
        if delta[w] == 0:
            di += 1
    return DeBruijnMultigraph(g.k, counts), added


def _strongly_connected_components(g: DeBruijnMultigraph) -> List[List[int]]:
    """Kosaraju over the support (vertices with incident edges), deterministic."""
    nv = 4 ** (g.k - 1)
    mask = nv - 1
    adjacency: Dict[int, set] = {}
    reverse: Dict[int, set] = {}
    support = set()
    for w in np.flatnonzero(g.edge_counts > 0):
        u, v = int(w) >> 2, int(w) & mask
        adjacency.setdefault(u, set()).add(v)
        reverse.setdefault(v, set()).add(u)
        support.add(u)
        support.add(v)
    finish_order = []
    visited = set()
    for root in sorted(support):
        if root in visited:
            continue
        visited.add(root)
        stack = [(root, iter(sorted(adjacency.get(root, ()))))]
        while stack:
            node, neighbours = stack[-1]
            advanced = False
            for nb in neighbours:
                if nb not in visited:
                    visited.add(nb)
                    stack.append((nb, iter(sorted(adjacency.get(nb, ())))))
                    advanced = True
                    break
            if not advanced:
                finish_order.append(node)
                stack.pop()
    assignment: Dict[int, int] = {}
    components: List[List[int]] = []
    for root in reversed(finish_order):
        if root in assignment:
            continue
        members = [root]
        assignment[root] = len(components)
        stack = [root]
        while stack:
            node = stack.pop()
            for nb in reverse.get(node, ()):
                if nb not in assignment:
                    assignment[nb] = len(components)
                    members.append(nb)
                    stack.append(nb)
        components.append(members)
    return components


def connect(g: DeBruijnMultigraph) -> Tuple[DeBruijnMultigraph, int]:
    """Make the support strongly connected while preserving balance.

    When more than one strongly connected component exists, the smallest
    vertex of each is taken as representative and one unit is added along the
    De Bruijn paths r1 -> r2 -> ... -> rm -> r1, forming a balanced cycle
    through all components.
    """
    components = _strongly_connected_components(g)
    if len(components) <= 1:
        return g, 0
    representatives = sorted(min(members) for members in components)
    counts = g.edge_counts.copy()
    added = 0
    for a, b in zip(representatives, representatives[1:] + representatives[:1]):
        for e in _path_edges(g.k, a, b):
            counts[e] += 1
            added += 1
    return DeBruijnMultigraph(g.k, counts), added


def eulerian_path(g: DeBruijnMultigraph) -> List[int]:
    """Edge sequence (k-mer indices) of an Eulerian traversal.

    Requires either a balanced graph (cycle, started at the smallest vertex
    with edges) or exactly one +1 / one -1 imbalance pair (path, started at
    the +1 vertex); anything else, or a disconnected support, raises
    NotEulerianError. Among parallel choices the smallest next k-mer is taken,
    so the output is deterministic. Stack-based cycle splicing, O(total edges).
    """
    total = g.total_edges()
    if total == 0:
        raise NotEulerianError("graph has no edges")
    delta = _imbalance_array(g)
    nonzero = np.flatnonzero(delta)
    if nonzero.size == 0:
        out_deg, in_deg = g._vertex_degrees()
        start = int(np.flatnonzero((out_deg + in_deg) > 0)[0])
    elif (
        nonzero.size == 2
        and sorted(int(delta[v]) for v in nonzero) == [-1, 1]
    ):
        start = int(nonzero[0] if delta[nonzero[0]] > 0 else nonzero[1])
    else:
        raise NotEulerianError(
            "imbalances admit neither an Eulerian cycle nor a single path"
        )

    k = g.k
    nv = 4 ** (k - 1)
    mask = nv - 1
    remaining = g.edge_counts.tolist()
    out_remaining = g.edge_counts.reshape(nv, 4).sum(axis=1).tolist()
    next_letter = [0] * nv
    stack = [start]
    order: List[int] = []
    while stack:
        v = stack[-1]
        if out_remaining[v]:
            base = v << 2
            a = next_letter[v]
            while not remaining[base + a]:
                a += 1
            next_letter[v] = a
            remaining[base + a] -= 1
            out_remaining[v] -= 1
            stack.append((base + a) & mask)
        else:
            order.append(stack.pop())
    if len(order) != total + 1:
        raise NotEulerianError("support is not strongly connected")
    order.reverse()
    return [(order[t] << 2) | (order[t + 1] & 3) for t in range(total)]


def _spell(k: int, start_vertex: int, edges: List[int]) -> DnaSequence:
    """First k-1 letters are the start vertex, then the last letter of each edge."""
    head = np.array(_vertex_digits(start_vertex, k - 1), dtype=np.uint8)
    tail = (np.asarray(edges, dtype=np.int64) & 3).astype(np.uint8)
    return DnaSequence(np.concatenate([head, tail]))


@dataclass(frozen=True)
class ReconstructionReport:
    """Accounting for one reconstruction run.

    `achieved_l1` is the L1 distance between the output's empirical
    distribution and the input target; `rounded_target_l1` is the distance to
    the rounded-count distribution c / |E|, the quantity the artificial-edge
    bound `bound_l1` = 2 n_art / (|E| + n_art) governs.
    """

    n_artificial_balance: int
    n_artificial_connect: int
    achieved_l1: float
    bound_l1: float
    rounded_target_l1: float
    path_start: str
    path_end: str
    used_direct_eulerian_path: bool

    def to_json_dict(self) -> dict:
        return {
            "n_artificial_balance": self.n_artificial_balance,
            "n_artificial_connect": self.n_artificial_connect,
            "achieved_l1": self.achieved_l1,
            "bound_l1": self.bound_l1,
            "rounded_target_l1": self.rounded_target_l1,
            "path_start": self.path_start,
            "path_end": self.path_end,
            "used_direct_eulerian_path": self.used_direct_eulerian_path,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def error_bound(k: int, n: int, n_art: int = None) -> float:
    """2 n_art / ((n - k + 1) + n_art); with n_art omitted, the worst case
    n_art = (k - 1) * 4**k is used."""
    if n <= k:
        raise ValueError(f"target length {n} must exceed k={k}")
    if n_art is None:
        n_art = (k - 1) * 4 ** k
    return 2.0 * n_art / ((n - k + 1) + n_art)


def reconstruct(
    dist: KmerDistribution, n: int
) -> Tuple[DnaSequence, ReconstructionReport]:
    """Build a sequence of roughly length n whose k-mer distribution matches
    the target.

    Pipeline: round theta to counts, build the multigraph, and traverse. When
    the imbalance pattern is exactly one +1 and one -1 vertex the plain
    Eulerian path is taken with zero artificial edges (exactly realizable
    counts then reproduce the target perfectly); otherwise the graph is
    balanced, connected, and traversed as a cycle. Deterministic for identical
    inputs.
    """
    if not MIN_ORDER <= dist.k <= MAX_ORDER:
        raise OrderRangeError(
            f"reconstruction supports {MIN_ORDER} <= k <= {MAX_ORDER}, got {dist.k}"
        )
    counts = counts_from_distribution(dist, n)
    total = int(counts.sum())
    if total == 0:
        raise ValueError("rounded counts are all zero; target length too small")
    k = dist.k
    graph = DeBruijnMultigraph(k, counts)
    delta = _imbalance_array(graph)
    nonzero = np.flatnonzero(delta)
    direct = (
        nonzero.size == 2
        and sorted(int(delta[v]) for v in nonzero) == [-1, 1]
    )
    edges = None
    n_balance = n_connect = 0
    if direct:
        try:
            edges = eulerian_path(graph)
            final = graph
        except NotEulerianError:
            # +1/-1 pattern but disconnected support: fall back to the
            # balance-and-connect construction.
            direct = False
    if edges is None:
        balanced, n_balance = balance(graph)
        connected, n_connect = connect(balanced)
        edges = eulerian_path(connected)
        final = connected
    sequence = _spell(k, edges[0] >> 2, edges)

    achieved = empirical_distribution(count_kmers(sequence, k))
    n_art = n_balance + n_connect
    rounded_target = KmerDistribution(k, counts / total)
    report = ReconstructionReport(
        n_artificial_balance=n_balance,
        n_artificial_connect=n_connect,
        achieved_l1=total_variation_l1(achieved, dist),
        bound_l1=2.0 * n_art / (total + n_art) if n_art else 0.0,
        rounded_target_l1=total_variation_l1(achieved, rounded_target),
        path_start=kmer_from_index(edges[0] >> 2, k - 1),
        path_end=kmer_from_index(edges[-1] & (4 ** (k - 1) - 1), k - 1),
        used_direct_eulerian_path=direct,
    )
    return sequence, report


def reconstruction_fasta(
    sequence: DnaSequence, report: ReconstructionReport, k: int, width: int = 70
) -> str:
    """FASTA text with the reconstruction header
    `>reconstructed k=<k> n=<len> l1=<achievedL1>`."""
    text = str(sequence)
    lines = [f">reconstructed k={k} n={len(sequence)} l1={report.achieved_l1!r}"]
    for pos in range(0, len(text), width):
        lines.append(text[pos : pos + width])
    return "\n".join(lines) + "\n"
