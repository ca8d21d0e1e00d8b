"""Maximin search for surveillance strategies.

The general solver runs a multi-start pattern search over the rows of the
transition matrix, moving probability mass between out-neighbors, and
finishes each restart with an optional SLSQP polish of the epigraph form
``max t s.t. C(i,j) >= t``. The line solver searches the rightward
probabilities of the interior nodes against the two end-to-end capture
probabilities.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .chain import (
    MarkovChain,
    derive_seed,
    from_matrix,
    permutation_chain,
    random_chain,
    uniform_chain,
)
from .config import DEFAULT_SEED, DEFAULT_THREADS
from .errors import ConfigError, DimensionError, DomainError, TopologyError
from .game import GameInstance, game_value, undominated_mask
from .graph import (
    DiGraph,
    TauClassification,
    build_line,
    classify_tau,
    detect_topology,
    hamiltonian_cycle,
    leaves,
)
from .hitting import batch_capture, capture_matrix
from .logging_config import get_logger
from .strategies import LineParams, line_param

logger = get_logger(__name__)

LINE_LOWER = 1e-6
LINE_UPPER = 1.0 - 1e-6
POLISH_MAXITER = 200


@dataclass(frozen=True)
class SolveConfig:
    restarts: int = 8
    max_iters: int = 500
    initial_step: float = 0.25
    step_shrink: float = 0.5
    min_step: float = 1e-5
    seed: int = DEFAULT_SEED
    tol: float = 1e-9
    polish: bool = True
    threads: int = DEFAULT_THREADS

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigError(f"restarts must be positive, got {self.restarts}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be positive, got {self.max_iters}")
        if not 0.0 < self.initial_step <= 1.0:
            raise ConfigError(f"initial_step must lie in (0, 1], got {self.initial_step}")
        if not 0.0 < self.step_shrink < 1.0:
            raise ConfigError(f"step_shrink must lie in (0, 1), got {self.step_shrink}")
        if self.min_step <= 0.0:
            raise ConfigError(f"min_step must be positive, got {self.min_step}")
        if self.tol < 0.0:
            raise ConfigError(f"tol must be non-negative, got {self.tol}")
        if self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads}")

    def to_dict(self) -> dict:
        return {
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "initial_step": self.initial_step,
            "step_shrink": self.step_shrink,
            "min_step": self.min_step,
            "seed": self.seed,
            "tol": self.tol,
            "polish": self.polish,
        }


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Outcome of a solve: the best chain found and how it was reached.

    ``trace`` lists (iteration, objective) pairs of the winning restart; for
    :func:`solve_line` the objective is the end-to-end minimum that the
    search maximizes, while ``value`` is always the full game value.
    """

    best: MarkovChain
    value: float
    bound: float
    trace: tuple[tuple[int, float], ...]
    evaluations: int
    classification: TauClassification
    degenerate: bool = False
    seed: int = DEFAULT_SEED
    restart: int | None = None
    params: tuple[float, ...] | None = field(default=None)

    @property
    def gap(self) -> float:
        return self.bound - self.value

    def to_dict(self) -> dict:
        out = {
            "value": self.value,
            "bound": self.bound,
            "gap": self.gap,
            "classification": str(self.classification),
            "degenerate": self.degenerate,
            "evaluations": self.evaluations,
            "iterations": len(self.trace),
            "restart": self.restart,
            "seed": self.seed,
            "chain": {"n": self.best.n, "rows": self.best.to_rows()},
        }
        if self.params is not None:
            out["params"] = list(self.params)
        return out


@dataclass(frozen=True, eq=False)
class _RestartResult:
    index: int
    P: np.ndarray
    value: float
    trace: tuple[tuple[int, float], ...]
    evaluations: int


def apply_leaf_dominance(g: DiGraph, c: MarkovChain) -> MarkovChain:
    """Send every leaf straight back to its neighbor; other rows are untouched.

    Graphs with fewer than three nodes are returned unchanged, since there a
    "leaf" is the whole graph.
    """
    if g.n < 3:
        return c
    leaf_map = leaves(g)
    if not leaf_map:
        return c
    P = np.array(c.P)
    for leaf, neighbor in leaf_map.items():
        P[leaf - 1] = 0.0
        P[leaf - 1, neighbor - 1] = 1.0
    return from_matrix(c.g, P)


def _leximin_greater(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    """True when sorted vector ``a`` beats ``b`` at the first entry they differ by more than tol."""
    diff = a - b
    idx = np.flatnonzero(np.abs(diff) > tol)
    return bool(idx.size) and bool(diff[idx[0]] > 0)


def _proposals(
    P: np.ndarray, free_rows: list[int], support: list[np.ndarray], step: float
) -> np.ndarray:
    """Candidate matrices one mass transfer away from ``P``."""
    out = []
    for i in free_rows:
        cols = support[i]
        m = len(cols)
        if m < 2:
            continue
        row = P[i]
        for a in cols:
            if row[a] <= 0.0:
                continue
            delta = min(step, row[a])
            for b in cols:
                if b == a:
                    continue
                Q = P.copy()
                Q[i, a] -= delta
                Q[i, b] += delta
                out.append(Q)
            if m >= 3:
                # spread: a gives to every other neighbor
                Q = P.copy()
                Q[i, a] -= delta
                Q[i, cols[cols != a]] += delta / (m - 1)
                out.append(Q)
        if m >= 3:
            # gather: every other neighbor gives to b
            for b in cols:
                others = cols[cols != b]
                take = np.minimum(row[others], step / (m - 1))
                total = take.sum()
                if total <= 0.0:
                    continue
                Q = P.copy()
                Q[i, others] -= take
                Q[i, b] += total
                out.append(Q)
    if not out:
        return np.empty((0,) + P.shape)
    stack = np.array(out)
    np.clip(stack, 0.0, None, out=stack)
    return stack


def _polish_chain(
    P: np.ndarray,
    free_rows: list[int],
    support: list[np.ndarray],
    mask: np.ndarray,
    tau: int,
    start_value: float,
) -> tuple[np.ndarray, int]:
    """SLSQP on max t s.t. C(i,j) >= t over undominated pairs and rows summing to one."""
    index = [(i, j) for i in free_rows for j in support[i]]
    if not index:
        return P, 0
    rows, cols = (np.array(v) for v in zip(*index))
    calls = 0

    def unpack(z: np.ndarray) -> np.ndarray:
        Q = P.copy()
        Q[rows, cols] = z[:-1]
        return Q

    def margins(z: np.ndarray) -> np.ndarray:
        nonlocal calls
        calls += 1
        C = batch_capture(unpack(z)[None], tau)[0]
        return C[mask] - z[-1]

    def row_sums(z: np.ndarray) -> np.ndarray:
        return np.bincount(rows, weights=z[:-1], minlength=P.shape[0])[free_rows] - 1.0

    objective_grad = np.zeros(len(index) + 1)
    objective_grad[-1] = -1.0
    z0 = np.append(P[rows, cols], start_value)
    result = minimize(
        lambda z: -z[-1],
        z0,
        jac=lambda z: objective_grad,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * len(z0),
        constraints=[
            {"type": "ineq", "fun": margins},
            {"type": "eq", "fun": row_sums},
        ],
        options={"ftol": 1e-12, "maxiter": POLISH_MAXITER},
    )
    Q = unpack(np.clip(result.x, 0.0, 1.0))
    sums = Q.sum(axis=1, keepdims=True)
    if np.any(sums <= 0.0):
        return P, calls
    return Q / sums, calls


def _search_restart(
    index: int,
    start: np.ndarray,
    free_rows: list[int],
    support: list[np.ndarray],
    mask: np.ndarray,
    tau: int,
    cfg: SolveConfig,
) -> _RestartResult:
    P = np.array(start)
    C = batch_capture(P[None], tau)[0]
    value = float(C.min())
    lex = np.sort(C, axis=None)
    step = cfg.initial_step
    trace = [(0, value)]
    evaluations = 1
    iteration = 0

    while iteration < cfg.max_iters and step >= cfg.min_step:
        iteration += 1
        stack = _proposals(P, free_rows, support, step)
        if not len(stack):
            break
        Cs = batch_capture(stack, tau)
        evaluations += len(stack)
        values = Cs.min(axis=(1, 2))

        choice = int(np.argmax(values))
        if values[choice] <= value + cfg.tol:
            choice = None
            best_lex = lex
            for k in np.flatnonzero(values >= value):
                candidate = np.sort(Cs[k], axis=None)
                if _leximin_greater(candidate, best_lex, cfg.tol):
                    choice, best_lex = int(k), candidate

        if choice is None:
            step *= cfg.step_shrink
            logger.debug(f"restart {index}: step -> {step:.3e} at value {value:.12f}")
            continue

        P = stack[choice]
        P /= P.sum(axis=1, keepdims=True)
        C = Cs[choice]
        value = float(values[choice])
        lex = np.sort(C, axis=None)
        trace.append((iteration, value))

    if cfg.polish:
        Q, calls = _polish_chain(P, free_rows, support, mask, tau, value)
        evaluations += calls
        polished = float(batch_capture(Q[None], tau)[0].min())
        if polished > value:
            logger.debug(f"restart {index}: polish {value:.12f} -> {polished:.12f}")
            P, value = Q, polished
            trace.append((iteration + 1, value))

    return _RestartResult(
        index=index, P=P, value=value, trace=tuple(trace), evaluations=evaluations
    )


def _pick_winner(results: list[_RestartResult]) -> _RestartResult:
    """Largest value; ties go to the lexicographically smallest matrix."""
    return min(results, key=lambda r: (-r.value, tuple(r.P.ravel())))


def solve_maximin(inst: GameInstance, cfg: SolveConfig | None = None) -> SolveReport:
    """Search for a chain maximizing the game value on ``inst.g``.

    Degenerate durations short-circuit: below the diameter every chain scores
    zero, and when a Hamiltonian cycle fits inside ``tau`` following it scores
    one. Restart 0 starts from the uniform out-neighbor chain, restart r from
    a random chain seeded by ``seed XOR r``.
    """
    cfg = cfg or SolveConfig()
    g, tau = inst.g, inst.tau
    bound = tau / g.n
    label = classify_tau(g, tau).classification

    if label is TauClassification.TRIVIAL_ZERO:
        chain = apply_leaf_dominance(g, uniform_chain(g))
        value = game_value(chain, tau)
        logger.info(f"tau={tau} is below the diameter; every strategy scores {value}")
        return SolveReport(
            best=chain,
            value=value,
            bound=bound,
            trace=((0, value),),
            evaluations=1,
            classification=label,
            degenerate=True,
            seed=cfg.seed,
        )

    if label is TauClassification.TRIVIAL_ONE:
        cycle = hamiltonian_cycle(g)
        if cycle is not None:
            chain = permutation_chain(g, cycle)
            value = game_value(chain, tau)
            logger.info(f"tau={tau} covers the cycle {cycle}; value {value}")
            return SolveReport(
                best=chain,
                value=value,
                bound=bound,
                trace=((0, value),),
                evaluations=1,
                classification=label,
                degenerate=True,
                seed=cfg.seed,
            )
        logger.info(f"tau={tau} admits a covering walk but no known cycle; searching")

    leaf_rows = {leaf - 1 for leaf in leaves(g)} if g.n >= 3 else set()
    free_rows = [i for i in range(g.n) if i not in leaf_rows]
    support = [np.flatnonzero(row) for row in g.adjacency]
    mask = undominated_mask(g, tau)

    def start(r: int) -> np.ndarray:
        base = uniform_chain(g) if r == 0 else random_chain(g, derive_seed(cfg.seed, r))
        return np.array(apply_leaf_dominance(g, base).P)

    def run(r: int) -> _RestartResult:
        result = _search_restart(r, start(r), free_rows, support, mask, tau, cfg)
        logger.info(f"restart {r}: value {result.value:.12f} after {len(result.trace)} steps")
        return result

    logger.info(
        f"Solving n={g.n}, tau={tau} ({label}) with {cfg.restarts} restarts, seed={cfg.seed}"
    )
    with ThreadPoolExecutor(max_workers=min(cfg.threads, cfg.restarts)) as pool:
        results = list(pool.map(run, range(cfg.restarts)))

    winner = _pick_winner(results)
    best = from_matrix(g, winner.P)
    return SolveReport(
        best=best,
        value=game_value(best, tau),
        bound=bound,
        trace=winner.trace,
        evaluations=sum(r.evaluations for r in results),
        classification=label,
        degenerate=label is TauClassification.TRIVIAL_ONE,
        seed=cfg.seed,
        restart=winner.index,
    )


def line_matrices(X: np.ndarray) -> np.ndarray:
    """Stack of line transition matrices, one per row of interior parameters."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    batch, m = X.shape
    n = m + 2
    stack = np.zeros((batch, n, n))
    stack[:, 0, 1] = 1.0
    stack[:, n - 1, n - 2] = 1.0
    k = np.arange(1, n - 1)
    stack[:, k, k + 1] = X
    stack[:, k, k - 1] = 1.0 - X
    return stack


def end_captures(X: np.ndarray, tau: int) -> tuple[np.ndarray, np.ndarray]:
    """P(T_1n <= tau) and P(T_n1 <= tau) for each parameter row of ``X``."""
    C = batch_capture(line_matrices(X), tau)
    return C[:, 0, -1], C[:, -1, 0]


def line_objective(x, tau: int) -> float:
    """min{P(T_1n <= tau), P(T_n1 <= tau)} of the line chain with parameters ``x``."""
    forward, backward = end_captures(np.asarray(x, dtype=float)[None], tau)
    return float(min(forward[0], backward[0]))


def _line_directions(m: int) -> np.ndarray:
    eye = np.eye(m)
    dirs = [s * eye[i] for i in range(m) for s in (1.0, -1.0)]
    for i in range(m):
        for j in range(i + 1, m):
            for si in (1.0, -1.0):
                for sj in (1.0, -1.0):
                    dirs.append(si * eye[i] + sj * eye[j])
    return np.array(dirs)


def _polish_line(x: np.ndarray, tau: int, start_value: float) -> tuple[np.ndarray, int]:
    calls = 0

    def margins(z: np.ndarray) -> np.ndarray:
        nonlocal calls
        calls += 1
        forward, backward = end_captures(z[:-1][None], tau)
        return np.array([forward[0] - z[-1], backward[0] - z[-1]])

    objective_grad = np.zeros(len(x) + 1)
    objective_grad[-1] = -1.0
    result = minimize(
        lambda z: -z[-1],
        np.append(x, start_value),
        jac=lambda z: objective_grad,
        method="SLSQP",
        bounds=[(LINE_LOWER, LINE_UPPER)] * len(x) + [(0.0, 1.0)],
        constraints=[{"type": "ineq", "fun": margins}],
        options={"ftol": 1e-12, "maxiter": POLISH_MAXITER},
    )
    return np.clip(result.x[:-1], LINE_LOWER, LINE_UPPER), calls


def _line_restart(
    index: int, x0: np.ndarray, tau: int, cfg: SolveConfig, directions: np.ndarray
) -> _RestartResult:
    def objective(X: np.ndarray) -> np.ndarray:
        return np.minimum(*end_captures(X, tau))

    x = x0
    value = float(objective(x[None])[0])
    step = cfg.initial_step
    trace = [(0, value)]
    evaluations = 1
    iteration = 0
    while iteration < cfg.max_iters and step >= cfg.min_step:
        iteration += 1
        candidates = np.clip(x + step * directions, LINE_LOWER, LINE_UPPER)
        values = objective(candidates)
        evaluations += len(candidates)
        best = int(np.argmax(values))
        if values[best] > value + cfg.tol:
            x, value = candidates[best], float(values[best])
            trace.append((iteration, value))
        else:
            step *= cfg.step_shrink

    if cfg.polish:
        polished_x, calls = _polish_line(x, tau, value)
        evaluations += calls
        polished = float(objective(polished_x[None])[0])
        if polished > value:
            x, value = polished_x, polished
            trace.append((iteration + 1, value))

    return _RestartResult(
        index=index, P=x, value=value, trace=tuple(trace), evaluations=evaluations
    )


def solve_line(n: int, tau: int, cfg: SolveConfig | None = None) -> SolveReport:
    """Search the interior rightward probabilities of a line for the best end-to-end minimum.

    Every restart draws its start uniformly from (0.05, 0.95) with seed
    ``seed XOR r``.
    """
    cfg = cfg or SolveConfig()
    if n < 3:
        raise DimensionError(f"line graphs need n >= 3, got {n}")
    if not n - 1 <= tau <= 2 * n - 3:
        raise DomainError(
            f"tau={tau} is outside the nontrivial line range {n - 1}..{2 * n - 3}"
        )
    g = build_line(n)
    directions = _line_directions(n - 2)

    def run(r: int) -> _RestartResult:
        rng = np.random.default_rng(derive_seed(cfg.seed, r))
        return _line_restart(r, rng.uniform(0.05, 0.95, n - 2), tau, cfg, directions)

    logger.info(f"Solving line n={n}, tau={tau} with {cfg.restarts} restarts, seed={cfg.seed}")
    with ThreadPoolExecutor(max_workers=min(cfg.threads, cfg.restarts)) as pool:
        results = list(pool.map(run, range(cfg.restarts)))

    winner = _pick_winner(results)
    params = LineParams(tuple(float(v) for v in winner.P))
    best = line_param(g, params)
    return SolveReport(
        best=best,
        value=game_value(best, tau),
        bound=tau / n,
        trace=winner.trace,
        evaluations=sum(r.evaluations for r in results),
        classification=classify_tau(g, tau).classification,
        seed=cfg.seed,
        restart=winner.index,
        params=params.x,
    )


def necessary_residual_line(c: MarkovChain, tau: int) -> float:
    """|P(T_1n <= tau) - P(T_n1 <= tau)|, which vanishes at optimal line strategies."""
    if c.n < 3 or detect_topology(c.g) != "line":
        raise TopologyError("residual is defined for line graphs only")
    C = capture_matrix(c, tau)
    return float(abs(C[0, -1] - C[-1, 0]))
