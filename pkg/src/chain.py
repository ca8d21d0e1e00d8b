"""Row-stochastic surveillance strategies conforming to a graph."""

from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy import linalg

from .config import ROW_SUM_TOL
from .errors import (
    ConformanceError,
    DanglingNodeError,
    DimensionError,
    DomainError,
    IrreducibilityError,
    StochasticityError,
)
from .graph import DiGraph, build_complete
from .logging_config import get_logger

logger = get_logger(__name__)

SEED_MASK = (1 << 64) - 1
STATIONARY_RESIDUAL_TOL = 1e-10


def derive_seed(master: int, index: int) -> int:
    """Per-worker seed: the master seed XOR the work-item index."""
    return (int(master) ^ int(index)) & SEED_MASK


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """A transition matrix ``P`` on the nodes of ``g``.

    Build instances with :func:`from_matrix`, which validates and
    renormalizes; the stored matrix is read-only.
    """

    g: DiGraph
    P: np.ndarray

    @property
    def n(self) -> int:
        return self.g.n

    def row(self, i: int) -> np.ndarray:
        """Transition row of 1-based node ``i``."""
        return self.P[i - 1]

    def to_rows(self) -> list[list[float]]:
        return [[float(v) for v in r] for r in self.P]

    def with_matrix(self, P: np.ndarray) -> "MarkovChain":
        """Same graph, new matrix; validated like :func:`from_matrix`."""
        return from_matrix(self.g, P)


def from_matrix(g: DiGraph, rows, tol: float = ROW_SUM_TOL) -> MarkovChain:
    """Validate ``rows`` against ``g`` and return the chain.

    Rows whose sums are within ``tol`` of one are rescaled to sum exactly one.

    Raises:
        DimensionError: ``rows`` is not n×n.
        DomainError: a negative entry.
        ConformanceError: a positive entry on a pair that is not an edge.
        StochasticityError: a row sum further than ``tol`` from one.
    """
    P = np.array(rows, dtype=float)
    if P.shape != (g.n, g.n):
        raise DimensionError(f"expected a {g.n}x{g.n} matrix, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise DomainError("transition matrix has non-finite entries")

    negative = np.argwhere(P < 0)
    if negative.size:
        i, j = negative[0]
        raise DomainError(f"negative probability {P[i, j]!r} at ({i + 1},{j + 1})")

    off_support = np.argwhere((P > 0) & ~g.adjacency)
    if off_support.size:
        i, j = off_support[0]
        raise ConformanceError((int(i) + 1, int(j) + 1), float(P[i, j]))

    sums = P.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if bad.size:
        i = bad[0]
        raise StochasticityError(f"row {i + 1} sums to {sums[i]!r}, not 1")

    P = P / sums[:, None]
    P.setflags(write=False)
    return MarkovChain(g=g, P=P)


def from_rows(rows, tol: float = ROW_SUM_TOL) -> MarkovChain:
    """Chain on the complete graph of matching size (no support constraint)."""
    n = len(rows)
    return from_matrix(build_complete(n) if n >= 2 else _single_node(), rows, tol)


def _single_node() -> DiGraph:
    return DiGraph.from_edges(1, {(1, 1)})


def support_graph(c: MarkovChain) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(c.n))
    g.add_edges_from(zip(*np.nonzero(c.P > 0)))
    return g


def is_irreducible(c: MarkovChain) -> bool:
    """True iff the transition diagram {(i,j): p_ij > 0} is strongly connected."""
    return nx.is_strongly_connected(support_graph(c))


def stationary_distribution(c: MarkovChain) -> np.ndarray:
    """Stationary distribution of an irreducible chain by a direct linear solve.

    One balance equation of (Pᵀ − I)π = 0 is replaced by the normalization
    row, which keeps the system full rank for periodic chains too.
    """
    if not is_irreducible(c):
        raise IrreducibilityError("stationary distribution needs an irreducible chain")
    n = c.n
    A = c.P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = linalg.solve(A, b)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()

    residual = np.max(np.abs(pi @ c.P - pi))
    if residual > STATIONARY_RESIDUAL_TOL:
        logger.warning(f"stationary residual {residual:.3e} above tolerance")
    return pi


def random_chain(g: DiGraph, seed: int) -> MarkovChain:
    """Seeded chain whose rows are uniform draws from the simplex on each out-neighborhood.

    Each row is a unit-concentration Dirichlet sample built from normalized
    exponential draws.
    """
    adj = g.adjacency
    dangling = np.flatnonzero(~adj.any(axis=1))
    if dangling.size:
        raise DanglingNodeError(f"node {dangling[0] + 1} has no outgoing edge")
    rng = np.random.default_rng(derive_seed(seed, 0))
    draws = rng.standard_exponential((g.n, g.n)) * adj
    P = draws / draws.sum(axis=1, keepdims=True)
    return from_matrix(g, P)


def uniform_chain(g: DiGraph) -> MarkovChain:
    """Every row uniform over its out-neighbors."""
    adj = g.adjacency.astype(float)
    if not adj.any(axis=1).all():
        raise DanglingNodeError("graph has a node without outgoing edges")
    return from_matrix(g, adj / adj.sum(axis=1, keepdims=True))


def permutation_chain(g: DiGraph, cycle: list[int]) -> MarkovChain:
    """Deterministic chain following the cyclic node order ``cycle`` (1-based)."""
    P = np.zeros((g.n, g.n))
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        P[a - 1, b - 1] = 1.0
    if sorted(cycle) != list(range(1, g.n + 1)):
        raise DomainError("cycle must visit every node exactly once")
    return from_matrix(g, P)
