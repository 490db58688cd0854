"""Term-adjacency graph, degree-driven thresholds, and connected clusters.

Vertices are Hamiltonian terms; distinct terms are adjacent iff their qubit
supports overlap. A cluster is a nonempty multiset of terms; it is
connected iff the distinct terms it contains induce a connected subgraph
(repeated copies of one term are mutually adjacent, so multiplicity never
breaks connectivity).

Degree convention: all bounds and the convergence threshold use
d_eff = max(d, 1), since repeated single terms already form nontrivial
clusters and the counting bound |S| (e d)^m degenerates at d = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .config import Caps, DEFAULT_CAPS
from .errors import CapExceededError
from .pauli import LocalHamiltonian

E_SQUARED = math.e ** 2


@dataclass(frozen=True)
class InteractionGraph:
    """Adjacency structure of the Hamiltonian's terms."""

    n_vertices: int
    adjacency: tuple[frozenset[int], ...]
    supports: tuple[frozenset[int], ...]

    @property
    def max_degree(self) -> int:
        return max(len(nbrs) for nbrs in self.adjacency)

    @property
    def effective_degree(self) -> int:
        return max(self.max_degree, 1)

    def edges(self) -> list[tuple[int, int]]:
        return [
            (u, v)
            for u in range(self.n_vertices)
            for v in sorted(self.adjacency[u])
            if u < v
        ]


@dataclass(frozen=True)
class Cluster:
    """Multiset of term indices with multiplicities."""

    multiplicities: tuple[tuple[int, int], ...]  # (term index, count), sorted

    @property
    def size(self) -> int:
        return sum(count for _, count in self.multiplicities)

    @property
    def support_terms(self) -> tuple[int, ...]:
        return tuple(term for term, _ in self.multiplicities)

    def is_connected(self, graph: InteractionGraph) -> bool:
        """Connectivity of the induced multigraph: equivalent to
        connectivity of the distinct-term set in the simple graph."""
        terms = set(self.support_terms)
        if not terms:
            return False
        stack = [next(iter(terms))]
        seen = {stack[0]}
        while stack:
            u = stack.pop()
            for v in graph.adjacency[u] & terms:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen == terms


def build_graph(hamiltonian: LocalHamiltonian) -> InteractionGraph:
    """Adjacency lists from pairwise support intersection."""
    supports = tuple(string.support for _, string in hamiltonian.terms)
    n = len(supports)
    neighbors: list[set[int]] = [set() for _ in range(n)]
    for u, v in combinations(range(n), 2):
        if supports[u] & supports[v]:
            neighbors[u].add(v)
            neighbors[v].add(u)
    return InteractionGraph(
        n_vertices=n,
        adjacency=tuple(frozenset(nbrs) for nbrs in neighbors),
        supports=supports,
    )


def beta_star(max_degree: int) -> float:
    """Convergence threshold 1 / (2 e^2 d_eff (d_eff + 1)) of the expansion."""
    d_eff = max(max_degree, 1)
    return 1.0 / (2.0 * E_SQUARED * d_eff * (d_eff + 1))


def lattice_degree_bound(locality: int, lattice_dim: int) -> float:
    """Worst-case degree 4^k 2^(Dk) k^(k/D) D^(2k) on a D-dimensional lattice.

    Returns +inf when the value overflows double precision.
    """
    if locality < 1 or lattice_dim < 1:
        raise ValueError("locality and lattice dimension must be >= 1")
    k, d = locality, lattice_dim
    try:
        log_value = (
            k * math.log(4.0)
            + d * k * math.log(2.0)
            + (k / d) * math.log(k)
            + 2 * k * math.log(d)
        )
        return math.exp(log_value) if log_value < 709 else math.inf
    except OverflowError:
        return math.inf


def _connected_vertex_subsets(graph: InteractionGraph, max_size: int) -> list[frozenset[int]]:
    """All connected subsets of distinct vertices via anchored growth.

    Each subset is generated exactly once, anchored at its smallest vertex
    and grown only through neighbors with larger indices.
    """
    found: list[frozenset[int]] = []
    for anchor in range(graph.n_vertices):
        frontier = {frozenset([anchor])}
        seen = set(frontier)
        found.extend(frontier)
        for _ in range(max_size - 1):
            grown = set()
            for subset in frontier:
                reachable = set()
                for u in subset:
                    reachable |= graph.adjacency[u]
                for v in reachable - subset:
                    if v <= anchor:
                        continue
                    candidate = subset | {v}
                    if candidate not in seen:
                        seen.add(candidate)
                        grown.add(candidate)
            found.extend(grown)
            frontier = grown
            if not frontier:
                break
    return found


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_connected_clusters(
    graph: InteractionGraph, size: int, caps: Caps = DEFAULT_CAPS
) -> list[Cluster]:
    """Exact, duplicate-free list of connected clusters of the given size.

    Grows connected distinct-term subsets, then distributes multiplicities
    over each subset. Deterministic canonical order.
    """
    if size < 1:
        raise ValueError("cluster size must be >= 1")
    clusters: list[Cluster] = []
    subsets = [s for s in _connected_vertex_subsets(graph, size) if len(s) <= size]
    subsets.sort(key=lambda s: tuple(sorted(s)))
    for subset in subsets:
        vertices = tuple(sorted(subset))
        for counts in _compositions(size, len(vertices)):
            clusters.append(Cluster(tuple(zip(vertices, counts))))
            if len(clusters) > caps.cluster_count:
                raise CapExceededError(
                    f"more than {caps.cluster_count} connected clusters at size {size}"
                )
    return clusters


def count_connected_clusters(
    graph: InteractionGraph, size: int, caps: Caps = DEFAULT_CAPS
) -> int:
    """|G_m| without materializing the clusters (binomial per subset)."""
    total = 0
    for subset in _connected_vertex_subsets(graph, size):
        u = len(subset)
        if u <= size:
            total += math.comb(size - 1, u - 1)
        if total > caps.cluster_count:
            raise CapExceededError(
                f"more than {caps.cluster_count} connected clusters at size {size}"
            )
    return total


def cluster_count_check(
    graph: InteractionGraph, size: int, caps: Caps = DEFAULT_CAPS
) -> tuple[int, float, bool]:
    """Compare |G_m| against the combinatorial bound |S| (e d_eff)^m.

    Returns (count, bound, count <= bound).
    """
    count = count_connected_clusters(graph, size, caps)
    bound = graph.n_vertices * (math.e * graph.effective_degree) ** size
    return count, bound, count <= bound
