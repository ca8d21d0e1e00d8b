"""Stackelberg layer: intruder best response, game value, bound and dominated pairs."""

from dataclasses import dataclass
from enum import StrEnum

import networkx as nx
import numpy as np

from .chain import MarkovChain
from .errors import DimensionError, DomainError
from .graph import (
    DiGraph,
    TauClassification,
    classify_tau,
    leaves,
    require_strongly_connected,
)
from .hitting import capture_matrix
from .logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class GameInstance:
    g: DiGraph
    tau: int

    def __post_init__(self):
        if self.tau < 1:
            raise DomainError(f"attack duration must be >= 1, got {self.tau}")
        require_strongly_connected(self.g)

    @property
    def n(self) -> int:
        return self.g.n


@dataclass(frozen=True)
class BestResponse:
    pair: tuple[int, int]
    value: float

    def to_dict(self, bound: float | None = None) -> dict:
        out = {"pair": list(self.pair), "value": self.value}
        if bound is not None:
            out["bound"] = bound
            out["gap"] = bound - self.value
        return out


def best_response_from_capture(C: np.ndarray) -> BestResponse:
    """Minimizing pair of a capture matrix; ties go to the lexicographically first pair."""
    # argmin scans row-major, which is lexicographic order on (i, j)
    flat = int(np.argmin(C))
    i, j = divmod(flat, C.shape[1])
    return BestResponse(pair=(i + 1, j + 1), value=float(C[i, j]))


def intruder_best_response(c: MarkovChain, tau: int) -> BestResponse:
    """The omniscient intruder's pair over all n² ordered pairs, diagonal included."""
    return best_response_from_capture(capture_matrix(c, tau))


def game_value(c: MarkovChain, tau: int) -> float:
    """min over (i,j) of P(T_ij <= tau); zero for chains with unreachable pairs."""
    return float(capture_matrix(c, tau).min())


def upper_bound(inst: GameInstance) -> float:
    """tau / n, the universal ceiling on the value of the game."""
    tau_class = classify_tau(inst.g, inst.tau)
    if tau_class.classification is not TauClassification.NONTRIVIAL:
        logger.warning(
            f"tau={inst.tau} is {tau_class.classification} on this graph; "
            "the tau/n bound assumes a nontrivial attack duration"
        )
    return inst.tau / inst.n


class DominanceReason(StrEnum):
    CUT_BEFORE = "cut-before"  # every k->j path passes i
    CUT_AFTER = "cut-after"  # every i->k path passes j
    LEAF = "leaf"


@dataclass(frozen=True, order=True)
class DominatedPair:
    """An intruder pair that some other pair weakly beats.

    For ``cut-before`` the better pair is (witness, j); for ``cut-after`` it is
    (i, witness); for ``leaf`` it is (k, i) for any k off the leaf's
    neighborhood, and ``witness`` is None.
    """

    pair: tuple[int, int]
    reason: DominanceReason
    witness: int | None

    def better_pair(self) -> tuple[int, int] | None:
        i, j = self.pair
        if self.reason is DominanceReason.CUT_BEFORE:
            return (self.witness, j)
        if self.reason is DominanceReason.CUT_AFTER:
            return (i, self.witness)
        return None

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "reason": str(self.reason),
            "witness": self.witness if self.witness is not None else "leaf",
        }


def _reachable_without(g: nx.DiGraph, removed: int) -> dict[int, set[int]]:
    view = nx.restricted_view(g, [removed], [])
    return {v: nx.descendants(view, v) for v in view.nodes}


def dominated_pairs(g: DiGraph, tau: int) -> list[DominatedPair]:
    """Intruder pairs dominated by the cut-node and leaf arguments.

    (i, j), i != j, is dominated when deleting i disconnects some k from j, or
    deleting j disconnects i from some k. (i, i) is dominated for every leaf
    i once tau >= 2. Each pair carries its smallest witness per reason.
    """
    require_strongly_connected(g)
    if g.n < 3:
        raise DimensionError(f"dominance analysis needs n >= 3, got {g.n}")
    G = g.nx_graph
    reach_without = {v: _reachable_without(G, v) for v in range(g.n)}
    result = []
    for i in range(g.n):
        for j in range(g.n):
            if i == j:
                continue
            others = [k for k in range(g.n) if k not in (i, j)]
            before = [k for k in others if j not in reach_without[i][k]]
            if before:
                result.append(
                    DominatedPair((i + 1, j + 1), DominanceReason.CUT_BEFORE, before[0] + 1)
                )
            after = [k for k in others if k not in reach_without[j][i]]
            if after:
                result.append(
                    DominatedPair((i + 1, j + 1), DominanceReason.CUT_AFTER, after[0] + 1)
                )
    if tau >= 2:
        for leaf in leaves(g):
            result.append(DominatedPair((leaf, leaf), DominanceReason.LEAF, None))
    return sorted(result)


def undominated_mask(g: DiGraph, tau: int) -> np.ndarray:
    """0-based boolean mask of pairs no dominance rule removes."""
    mask = np.ones((g.n, g.n), dtype=bool)
    if g.n < 3:
        return mask
    for entry in dominated_pairs(g, tau):
        i, j = entry.pair
        mask[i - 1, j - 1] = False
    return mask
