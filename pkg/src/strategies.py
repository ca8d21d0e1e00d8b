"""Closed-form surveillance strategies and their values."""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .chain import MarkovChain, from_matrix
from .errors import ApplicabilityError, DimensionError, DomainError, TopologyError
from .graph import DiGraph, build_complete, build_line, build_star, detect_topology
from .logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class LineParams:
    """Rightward probabilities x_1..x_{n-2} of the interior nodes of a line."""

    x: tuple[float, ...]

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        if not x:
            raise DimensionError("a line needs at least one interior node")
        for k, v in enumerate(x, start=1):
            if not 0.0 < v < 1.0:
                raise DomainError(f"x_{k} = {v!r} is not in (0, 1)")
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return len(self.x) + 2

    def reflected(self) -> "LineParams":
        """x -> 1 - x componentwise."""
        return LineParams(tuple(1.0 - v for v in self.x))


def star_optimal(n: int) -> MarkovChain:
    """Center spreads uniformly over the leaves; every leaf returns to the center."""
    g = build_star(n)
    P = np.zeros((n, n))
    P[0, 1:] = 1.0 / (n - 1)
    P[1:, 0] = 1.0
    return from_matrix(g, P)


def star_value(n: int, tau: int) -> float:
    """Value of the game on the n-node star: 1 - (1 - 1/(n-1))^floor(tau/2)."""
    if n < 3:
        raise DimensionError(f"star graphs need n >= 3, got {n}")
    if tau < 2:
        raise DomainError(f"the star value is defined for tau >= 2, got {tau}")
    # (tau - 1) / 2 for odd tau and tau / 2 for even tau
    return 1.0 - (1.0 - 1.0 / (n - 1)) ** (tau // 2)


def star_capture_probability(p: float, tau: int) -> float:
    """P(center reaches a given leaf within tau) when the center picks it w.p. p.

    Assumes no self-loop at the center and leaves that return at once, so
    visits to the leaf are only possible at odd times.
    """
    if not 0.0 < p <= 1.0:
        raise DomainError(f"p = {p!r} is not in (0, 1]")
    if tau < 1:
        raise DomainError(f"tau must be >= 1, got {tau}")
    return 1.0 - (1.0 - p) ** math.ceil(tau / 2)


def line_optimal(n: int) -> MarkovChain:
    """Ends step inward; interior nodes step left or right with probability 1/2."""
    return line_param(build_line(n), LineParams((0.5,) * (n - 2)))


def _require_line(g: DiGraph) -> None:
    if g.n < 3 or detect_topology(g) != "line":
        raise TopologyError("operation requires a line graph 1-2-...-n")


def line_matrix(x: Sequence[float]) -> np.ndarray:
    """Transition matrix of the no-self-loop line chain with rightward probabilities x."""
    n = len(x) + 2
    P = np.zeros((n, n))
    P[0, 1] = 1.0
    P[n - 1, n - 2] = 1.0
    for k, v in enumerate(x, start=1):
        P[k, k + 1] = v
        P[k, k - 1] = 1.0 - v
    return P


def line_param(g: DiGraph, x: LineParams) -> MarkovChain:
    """Line chain with interior row i+1 = (1 - x_i left, 0 stay, x_i right)."""
    _require_line(g)
    if x.n != g.n:
        raise DimensionError(f"need {g.n - 2} parameters, got {len(x.x)}")
    return from_matrix(g, line_matrix(x.x))


def _block_permutation(tau: int, permutation: Sequence[int] | None) -> list[int]:
    if permutation is None:
        return [(b + 1) % tau for b in range(tau)]
    perm = [int(p) for p in permutation]
    if sorted(perm) != list(range(tau)):
        raise DomainError(f"permutation must rearrange blocks 0..{tau - 1}")
    # irreducible means a single cycle through every block
    seen, b = set(), 0
    while b not in seen:
        seen.add(b)
        b = perm[b]
    if len(seen) != tau:
        raise DomainError("block permutation must be a single cycle")
    return perm


def complete_kron(
    n: int, tau: int, permutation: Sequence[int] | None = None
) -> MarkovChain:
    """Block-cyclic optimum on the complete graph when tau divides n.

    Node v (1-based) sits in block ceil(v / (n / tau)); a node of block b moves
    uniformly into block ``permutation[b]``, by default b + 1 mod tau. For
    n = 2 the optimum is the uniform chain at tau = 1 and the 2-cycle beyond.
    """
    if n < 2:
        raise DimensionError(f"complete graphs need n >= 2, got {n}")
    if tau < 1:
        raise DomainError(f"tau must be >= 1, got {tau}")
    g = build_complete(n)
    if n == 2:
        rows = [[0.5, 0.5], [0.5, 0.5]] if tau == 1 else [[0.0, 1.0], [1.0, 0.0]]
        return from_matrix(g, rows)
    if tau > n or n % tau:
        raise ApplicabilityError(
            f"block construction needs tau | n and tau <= n (n={n}, tau={tau}); "
            "use the solver instead"
        )
    perm = _block_permutation(tau, permutation)
    size = n // tau
    pi0 = np.zeros((tau, tau))
    for b, target in enumerate(perm):
        pi0[b, target] = 1.0
    P = np.kron(pi0, np.full((size, size), tau / n))
    return from_matrix(g, P)


def random_walk(n: int) -> MarkovChain:
    """Uniform jumps over all n nodes of the complete graph."""
    if n < 2:
        raise DimensionError(f"complete graphs need n >= 2, got {n}")
    return from_matrix(build_complete(n), np.full((n, n), 1.0 / n))


def random_walk_value(n: int, tau: int) -> float:
    """1 - (1 - 1/n)^tau, the capture probability of :func:`random_walk`."""
    if n < 2:
        raise DimensionError(f"complete graphs need n >= 2, got {n}")
    if tau < 1:
        raise DomainError(f"tau must be >= 1, got {tau}")
    return 1.0 - (1.0 - 1.0 / n) ** tau


def suboptimality_factor(n: int, tau: int) -> float:
    """(n^tau - (n-1)^tau) / (tau n^(tau-1)), the random walk's share of tau/n.

    Evaluated in exact rational arithmetic before rounding.
    """
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n}")
    if not 1 <= tau <= n - 1:
        raise DomainError(f"tau must lie in 1..{n - 1}, got {tau}")
    return float(Fraction(n**tau - (n - 1) ** tau, tau * n ** (tau - 1)))


def remove_self_loop(c: MarkovChain, node: int) -> MarkovChain:
    """Drop the self-loop at ``node`` and rescale the rest of its row."""
    P = np.array(c.P)
    k = node - 1
    stay = P[k, k]
    if stay == 0.0:
        return c
    if stay >= 1.0:
        raise DomainError(f"node {node} has no outgoing mass besides its self-loop")
    P[k, k] = 0.0
    P[k] /= 1.0 - stay
    return from_matrix(c.g, P)
