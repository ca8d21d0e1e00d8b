"""First-hitting-time probabilities: recursion engine and independent oracles."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chain import MarkovChain, derive_seed
from .errors import DomainError, GuardError
from .logging_config import get_logger

logger = get_logger(__name__)

ENUMERATION_GUARD = 10**8
PRUNE_BELOW = 1e-300
SIMULATION_BLOCK = 100_000


@dataclass(frozen=True, eq=False)
class HittingProfile:
    """F[k-1](i,j) = P(T_ij = k) for k = 1..tau, and C = sum of F (0-based indices)."""

    tau: int
    F: np.ndarray
    C: np.ndarray

    def capture(self, i: int, j: int) -> float:
        """P(T_ij <= tau) for 1-based nodes."""
        return float(self.C[i - 1, j - 1])


def _check_tau(tau: int) -> None:
    if tau < 1:
        raise DomainError(f"attack duration must be >= 1, got {tau}")


def hitting_profile(c: MarkovChain, tau: int) -> HittingProfile:
    """First-hitting matrices by F_{k+1} = P (F_k - diag(F_k)) with F_1 = P."""
    _check_tau(tau)
    P = c.P
    off_diagonal = 1.0 - np.eye(c.n)
    F = np.empty((tau, c.n, c.n))
    F[0] = P
    for k in range(1, tau):
        F[k] = P @ (F[k - 1] * off_diagonal)
    return HittingProfile(tau=tau, F=F, C=F.sum(axis=0))


def capture_matrix(c: MarkovChain, tau: int) -> np.ndarray:
    """C(i,j) = P(T_ij <= tau), 0-based."""
    return hitting_profile(c, tau).C


def hitting_profile_vectorized(c: MarkovChain, tau: int) -> HittingProfile:
    """Same quantity through vec(F_{k+1}) = (I ⊗ P)(I - E) vec(F_k).

    vec stacks columns, and E = diag(vec(I)) masks the diagonal entries.
    O(n^4) per step; kept as a verification path.
    """
    _check_tau(tau)
    n = c.n
    step = np.kron(np.eye(n), c.P) @ np.diag(1.0 - np.eye(n).ravel(order="F"))
    f = c.P.ravel(order="F")
    F = np.empty((tau, n, n))
    F[0] = c.P
    for k in range(1, tau):
        f = step @ f
        F[k] = f.reshape((n, n), order="F")
    return HittingProfile(tau=tau, F=F, C=F.sum(axis=0))


def capture_column(c: MarkovChain, j: int, tau: int) -> np.ndarray:
    """P(T_ij <= tau) for every start i by the absorbing-target sum.

    Uses sum_{t=1..tau} Q^{t-1} P e_j where Q is P with column j zeroed.
    """
    _check_tau(tau)
    target = j - 1
    Q = np.array(c.P)
    Q[:, target] = 0.0
    reach = np.array(c.P[:, target])
    total = np.zeros(c.n)
    for _ in range(tau):
        total += reach
        reach = Q @ reach
    return total


def batch_capture(stack: np.ndarray, tau: int) -> np.ndarray:
    """Capture matrices for a stack of transition matrices of shape (B, n, n)."""
    _check_tau(tau)
    stack = np.asarray(stack, dtype=float)
    off_diagonal = 1.0 - np.eye(stack.shape[-1])
    F = stack
    C = np.array(stack)
    for _ in range(1, tau):
        F = np.matmul(stack, F * off_diagonal)
        C += F
    return C


def enumerate_hitting(c: MarkovChain, i: int, j: int, tau: int) -> float:
    """Exact P(T_ij <= tau) by depth-first enumeration of trajectories from i.

    A trajectory stops contributing once it reaches j; time 0 never counts.
    """
    _check_tau(tau)
    if c.n**tau > ENUMERATION_GUARD:
        raise GuardError(f"n^tau = {c.n}^{tau} exceeds {ENUMERATION_GUARD}")
    rows = [[(m, p) for m, p in enumerate(row) if p > 0] for row in c.P.tolist()]
    target = j - 1

    def walk(node: int, prob: float, depth: int) -> float:
        hit = 0.0
        for nxt, p in rows[node]:
            q = prob * p
            if q < PRUNE_BELOW:
                continue
            if nxt == target:
                hit += q
            elif depth < tau:
                hit += walk(nxt, q, depth + 1)
        return hit

    return walk(i - 1, 1.0, 1)


def enumerate_capture_matrix(c: MarkovChain, tau: int) -> np.ndarray:
    """Capture matrix with every entry computed by :func:`enumerate_hitting`."""
    return np.array(
        [
            [enumerate_hitting(c, i, j, tau) for j in range(1, c.n + 1)]
            for i in range(1, c.n + 1)
        ]
    )


@dataclass(frozen=True)
class SimulationEstimate:
    estimate: float
    stderr: float
    samples: int
    seed: int


def _simulate_block(
    cum: np.ndarray, last: np.ndarray, start: int, target: int, tau: int, size: int, seed: int
) -> int:
    rng = np.random.default_rng(seed)
    position = np.full(size, start)
    alive = np.ones(size, dtype=bool)
    hits = 0
    for _ in range(tau):
        u = rng.random(size)
        step = (cum[position] <= u[:, None]).sum(axis=1)
        position = np.minimum(step, last[position])
        arrived = alive & (position == target)
        hits += int(arrived.sum())
        alive &= ~arrived
        if not alive.any():
            break
    return hits


def simulate_hitting(
    c: MarkovChain,
    i: int,
    j: int,
    tau: int,
    samples: int,
    seed: int,
    threads: int = 1,
) -> SimulationEstimate:
    """Monte Carlo estimate of P(T_ij <= tau) with its binomial standard error.

    Samples are split into fixed-size blocks seeded by ``seed XOR block``, so
    the estimate does not depend on ``threads``.
    """
    _check_tau(tau)
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    cum = np.cumsum(c.P, axis=1)
    last = np.array([np.flatnonzero(row > 0).max() for row in c.P])
    sizes = [SIMULATION_BLOCK] * (samples // SIMULATION_BLOCK)
    if samples % SIMULATION_BLOCK:
        sizes.append(samples % SIMULATION_BLOCK)

    def run(block: int) -> int:
        return _simulate_block(
            cum, last, i - 1, j - 1, tau, sizes[block], derive_seed(seed, block)
        )

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        hits = sum(pool.map(run, range(len(sizes))))

    estimate = hits / samples
    stderr = math.sqrt(estimate * (1.0 - estimate) / samples)
    logger.debug(f"simulate_hitting({i},{j}, tau={tau}): {estimate:.6f} ± {stderr:.2e}")
    return SimulationEstimate(estimate=estimate, stderr=stderr, samples=samples, seed=seed)
