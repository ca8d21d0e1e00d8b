"""Directed-graph environments, canonical topologies and attack-duration classes."""

from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from typing import Iterable

import networkx as nx
import numpy as np

from .errors import ConnectivityError, DimensionError, DomainError
from .logging_config import get_logger

logger = get_logger(__name__)

Edge = tuple[int, int]


@dataclass(frozen=True)
class DiGraph:
    """Surveillance environment: ``n`` nodes labelled 1..n and a directed edge set.

    Edges use 1-based labels. Self-loops are ordinary edges. ``topology`` is a
    hint set by the canonical builders; :func:`detect_topology` recovers it
    for graphs loaded from files.
    """

    n: int
    edges: frozenset[Edge]
    topology: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"node count must be positive, got {self.n}")
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise DomainError(f"edge ({i},{j}) outside nodes 1..{self.n}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[Edge], topology: str | None = None
    ) -> "DiGraph":
        return cls(n=n, edges=frozenset(edges), topology=topology)

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges

    @cached_property
    def nx_graph(self) -> nx.DiGraph:
        """0-based networkx view of the graph."""
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from((i - 1, j - 1) for i, j in sorted(self.edges))
        return g

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean 0-based adjacency matrix."""
        adj = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges:
            adj[i - 1, j - 1] = True
        adj.setflags(write=False)
        return adj

    def out_neighbors(self, i: int) -> list[int]:
        """1-based out-neighbors of node ``i`` (self included if looped)."""
        return [int(j) + 1 for j in np.flatnonzero(self.adjacency[i - 1])]

    def proper_edges(self) -> frozenset[Edge]:
        """Edges without self-loops."""
        return frozenset((i, j) for i, j in self.edges if i != j)


def _self_loops(n: int) -> set[Edge]:
    return {(i, i) for i in range(1, n + 1)}


def build_star(n: int) -> DiGraph:
    """Star with center 1, bidirectional spokes to leaves 2..n, self-loops everywhere."""
    if n < 3:
        raise DimensionError(f"star graphs need n >= 3, got {n}")
    edges = _self_loops(n)
    for leaf in range(2, n + 1):
        edges |= {(1, leaf), (leaf, 1)}
    return DiGraph.from_edges(n, edges, topology="star")


def build_line(n: int) -> DiGraph:
    """Path 1-2-...-n with edges both ways and self-loops everywhere."""
    if n < 3:
        raise DimensionError(f"line graphs need n >= 3, got {n}")
    edges = _self_loops(n)
    for i in range(1, n):
        edges |= {(i, i + 1), (i + 1, i)}
    return DiGraph.from_edges(n, edges, topology="line")


def build_complete(n: int) -> DiGraph:
    """All n² ordered pairs, self-loops included."""
    if n < 2:
        raise DimensionError(f"complete graphs need n >= 2, got {n}")
    edges = {(i, j) for i in range(1, n + 1) for j in range(1, n + 1)}
    return DiGraph.from_edges(n, edges, topology="complete")


_BUILDERS = {"star": build_star, "line": build_line, "complete": build_complete}


def build_topology(name: str, n: int) -> DiGraph:
    """Build a canonical topology by name."""
    try:
        return _BUILDERS[name](n)
    except KeyError:
        raise DomainError(
            f"unknown topology {name!r}; expected one of {sorted(_BUILDERS)}"
        ) from None


def detect_topology(g: DiGraph) -> str | None:
    """Name of the canonical topology ``g`` matches, ignoring self-loops."""
    if g.topology is not None:
        return g.topology
    for name, builder in _BUILDERS.items():
        try:
            canonical = builder(g.n)
        except DimensionError:
            continue
        if canonical.proper_edges() == g.proper_edges():
            return name
    return None


def is_strongly_connected(g: DiGraph) -> bool:
    """True iff every node reaches every other node along directed edges."""
    return nx.is_strongly_connected(g.nx_graph)


def require_strongly_connected(g: DiGraph) -> None:
    if not is_strongly_connected(g):
        raise ConnectivityError(f"graph with {g.n} nodes is not strongly connected")


def shortest_path_lengths(g: DiGraph) -> np.ndarray:
    """0-based matrix of BFS distances; unreachable pairs hold -1."""
    dist = np.full((g.n, g.n), -1, dtype=int)
    for source, lengths in nx.all_pairs_shortest_path_length(g.nx_graph):
        for target, d in lengths.items():
            dist[source, target] = d
    return dist


def diameter(g: DiGraph) -> int:
    """Longest shortest directed path over ordered pairs; self-loops never count."""
    require_strongly_connected(g)
    return int(shortest_path_lengths(g).max())


def leaves(g: DiGraph) -> dict[int, int]:
    """Map each leaf node to its unique neighbor (1-based).

    A leaf has exactly one neighbor other than itself and is joined to it in
    both directions.
    """
    result = {}
    ug = g.nx_graph.to_undirected(as_view=True)
    for v in range(g.n):
        neighbors = set(ug.neighbors(v)) - {v}
        if len(neighbors) != 1:
            continue
        (u,) = neighbors
        if g.adjacency[v, u] and g.adjacency[u, v]:
            result[v + 1] = u + 1
    return result


class TauClassification(StrEnum):
    TRIVIAL_ZERO = "TrivialZero"
    NONTRIVIAL = "Nontrivial"
    TRIVIAL_ONE = "TrivialOne"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class TauClass:
    classification: TauClassification
    diameter: int
    closed_walk_bound: int | None

    def to_dict(self) -> dict:
        return {
            "classification": str(self.classification),
            "diameter": self.diameter,
            "closed_walk_bound": self.closed_walk_bound,
        }


def closed_walk_order(g: DiGraph) -> list[int]:
    """DFS preorder of the nodes from node 1 (0-based labels)."""
    return list(nx.dfs_preorder_nodes(g.nx_graph, source=0))


def closed_spanning_walk_length(g: DiGraph) -> int:
    """Length of a closed walk visiting every node, from a DFS preorder.

    Consecutive preorder nodes are joined by shortest paths, so on graphs
    with symmetric edges the result never exceeds twice the spanning-tree
    size (the doubled tree traversal).
    """
    require_strongly_connected(g)
    dist = shortest_path_lengths(g)
    order = closed_walk_order(g)
    cycle = order + order[:1]
    return int(sum(dist[a, b] for a, b in zip(cycle, cycle[1:])))


def hamiltonian_cycle(g: DiGraph) -> list[int] | None:
    """A Hamiltonian cycle (1-based) when the DFS preorder happens to be one."""
    if g.n == 1:
        return None
    order = closed_walk_order(g)
    cycle = order + order[:1]
    if all(g.adjacency[a, b] for a, b in zip(cycle, cycle[1:])):
        return [v + 1 for v in order]
    return None


def _exact_closed_walk(g: DiGraph) -> int | None:
    topology = detect_topology(g)
    if topology == "line":
        return 2 * g.n - 2
    if topology == "star":
        return 2 * (g.n - 1)
    if topology == "complete":
        return g.n
    return None


def classify_tau(g: DiGraph, tau: int) -> TauClass:
    """Classify the attack duration ``tau`` on ``g``.

    TrivialZero when ``tau`` is below the diameter, TrivialOne when a closed
    spanning walk of length at most ``tau`` is known, Nontrivial when no
    closed spanning walk can be that short, Unknown otherwise.
    """
    if tau < 1:
        raise DomainError(f"attack duration must be positive, got {tau}")
    d = diameter(g)
    exact = _exact_closed_walk(g)
    bound = exact if exact is not None else closed_spanning_walk_length(g)

    if tau < d:
        label = TauClassification.TRIVIAL_ZERO
    elif tau >= bound:
        label = TauClassification.TRIVIAL_ONE
    elif exact is not None or tau < g.n:
        # every closed spanning walk has length >= n
        label = TauClassification.NONTRIVIAL
    else:
        label = TauClassification.UNKNOWN
    logger.debug(f"classify_tau(n={g.n}, tau={tau}) -> {label} (D={d}, walk={bound})")
    return TauClass(classification=label, diameter=d, closed_walk_bound=bound)
