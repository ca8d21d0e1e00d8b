"""Numerical evidence for the optimality results on lines and for the dominance rules.

Everything here is a check that is expected to pass: a failed symmetry test,
a nonzero violation list or an improving sample in the sweep points at a bug
or at a counterexample worth keeping.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .chain import MarkovChain, derive_seed, random_chain
from .config import DEFAULT_THREADS
from .errors import ConfigError, DimensionError, DomainError
from .game import DominanceReason, dominated_pairs, game_value
from .graph import DiGraph, detect_topology, leaves
from .hitting import capture_matrix
from .logging_config import get_logger
from .solver import apply_leaf_dominance, end_captures, line_objective
from .strategies import LineParams, line_matrix, line_optimal, remove_self_loop

logger = get_logger(__name__)

SWEEP_BLOCK = 1000
DOMINANCE_SLACK = 1e-10
MONOTONICITY_SLACK = 1e-12
DEFAULT_CONFIDENCE = 0.99
DEFAULT_LEVEL = 0.99


def required_samples(confidence: float, level: float) -> int:
    """Samples N with no improvement needed to claim P(no improvement) >= level at ``confidence``.

    N >= ln(1 - confidence) / ln(level); 459 for (0.99, 0.99).
    """
    if not 0.0 < confidence < 1.0 or not 0.0 < level < 1.0:
        raise DomainError("confidence and level must lie in (0, 1)")
    return math.ceil(math.log1p(-confidence) / math.log(level))


def certified_level(samples: int, confidence: float = DEFAULT_CONFIDENCE) -> float:
    """Largest level that ``samples`` clean draws certify: (1 - confidence)^(1/N)."""
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    if not 0.0 < confidence < 1.0:
        raise DomainError("confidence must lie in (0, 1)")
    return math.exp(math.log1p(-confidence) / samples)


@dataclass(frozen=True)
class SweepReport:
    n: int
    tau: int
    samples: int
    improvements: int
    reference_value: float
    best_value: float
    confidence: float | None
    level: float | None
    seed: int
    tol: float

    @property
    def certifies_default(self) -> bool:
        """True when the sweep backs the 0.99 / 0.99 statement."""
        return self.improvements == 0 and self.samples >= required_samples(
            DEFAULT_CONFIDENCE, DEFAULT_LEVEL
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["required_samples"] = required_samples(DEFAULT_CONFIDENCE, DEFAULT_LEVEL)
        out["certifies_default"] = self.certifies_default
        out["note"] = "samples are counted per (n, tau) case"
        return out


def _check_sweep_range(n: int, tau: int) -> None:
    if n < 3:
        raise DimensionError(f"line graphs need n >= 3, got {n}")
    if tau < n - 1:
        raise DomainError(f"tau={tau} is below the line diameter {n - 1}")
    if tau > 2 * n - 3:
        logger.warning(f"tau={tau} is past the nontrivial line range {n - 1}..{2 * n - 3}")


def conjecture_sweep(
    n: int,
    tau: int,
    samples: int,
    seed: int,
    tol: float = 1e-9,
    threads: int = DEFAULT_THREADS,
) -> SweepReport:
    """Sample line chains with uniform interior parameters and count those matching the reference.

    The reference is the game value of the half-half line chain. A sample
    counts as an improvement when its end-to-end minimum is at least
    ``reference - tol``. Samples are drawn in blocks seeded by
    ``seed XOR block``, so the counts do not depend on ``threads``.
    """
    _check_sweep_range(n, tau)
    if samples < 1:
        raise ConfigError(f"samples must be >= 1, got {samples}")
    reference = game_value(line_optimal(n), tau)
    sizes = [SWEEP_BLOCK] * (samples // SWEEP_BLOCK)
    if samples % SWEEP_BLOCK:
        sizes.append(samples % SWEEP_BLOCK)

    def run(block: int) -> tuple[int, float]:
        rng = np.random.default_rng(derive_seed(seed, block))
        X = rng.random((sizes[block], n - 2))
        values = np.minimum(*end_captures(X, tau))
        return int((values >= reference - tol).sum()), float(values.max())

    logger.info(f"Sweeping n={n}, tau={tau}: {samples} samples, seed={seed}")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        blocks = list(pool.map(run, range(len(sizes))))

    improvements = sum(count for count, _ in blocks)
    best = max(value for _, value in blocks)
    if improvements:
        logger.warning(f"{improvements} sampled chains reach the reference {reference:.12f}")
        confidence = level = None
    else:
        confidence = DEFAULT_CONFIDENCE
        level = certified_level(samples, confidence)
    return SweepReport(
        n=n,
        tau=tau,
        samples=samples,
        improvements=improvements,
        reference_value=reference,
        best_value=best,
        confidence=confidence,
        level=level,
        seed=seed,
        tol=tol,
    )


@dataclass(frozen=True)
class SymmetryResult:
    x: tuple[float, ...]
    tau: int
    f_x: float
    f_reflected: float
    passed: bool

    @property
    def difference(self) -> float:
        return abs(self.f_x - self.f_reflected)

    def to_dict(self) -> dict:
        return {
            "x": list(self.x),
            "tau": self.tau,
            "f_x": self.f_x,
            "f_reflected": self.f_reflected,
            "difference": self.difference,
            "passed": self.passed,
        }


def symmetry_check(n: int, x: LineParams, tau: int, tol: float = 1e-12) -> SymmetryResult:
    """Compare the end-to-end objective at x and at 1 - x."""
    if x.n != n:
        raise DimensionError(f"need {n - 2} parameters, got {len(x.x)}")
    f_x = line_objective(x.x, tau)
    f_reflected = line_objective(x.reflected().x, tau)
    return SymmetryResult(
        x=x.x,
        tau=tau,
        f_x=f_x,
        f_reflected=f_reflected,
        passed=abs(f_x - f_reflected) <= tol,
    )


def random_line_params(n: int, count: int, seed: int) -> list[LineParams]:
    """``count`` parameter vectors drawn uniformly from (0.01, 0.99)^(n-2)."""
    rng = np.random.default_rng(derive_seed(seed, n))
    return [LineParams(tuple(row)) for row in rng.uniform(0.01, 0.99, (count, n - 2))]


def symmetry_batch(
    n: int, taus: list[int], count: int, seed: int, tol: float = 1e-12
) -> list[SymmetryResult]:
    return [
        symmetry_check(n, x, tau, tol)
        for x in random_line_params(n, count, seed)
        for tau in taus
    ]


def char_poly_sequences(x: LineParams, lam: float) -> tuple[list[float], list[float]]:
    """g_0..g_{n-1} and h_0..h_{n-1} by the three-term recurrences with x_0 = x_{n-1} = 1."""
    xs = (1.0, *x.x, 1.0)
    n = len(xs)
    g = [1.0, lam]
    h = [1.0, lam]
    for k in range(2, n):
        g.append(lam * g[k - 1] - xs[k - 2] * (1.0 - xs[k - 1]) * g[k - 2])
        h.append(lam * h[k - 1] - xs[k] * (1.0 - xs[k - 1]) * h[k - 2])
    return g, h


def char_poly_pair(x: LineParams, lam: float) -> tuple[float, float]:
    """(g_{n-1}(lam), h_{n-1}(lam)); both equal det(lam I - A) for A the chain without node n."""
    g, h = char_poly_sequences(x, lam)
    return g[-1], h[-1]


@dataclass(frozen=True)
class CharPolyResult:
    x: tuple[float, ...]
    lam: float
    g: float
    h: float
    determinant: float
    lhs: float
    rhs: float
    passed: bool

    def to_dict(self) -> dict:
        out = asdict(self)
        out["x"] = list(self.x)
        return out


def charpoly_check(x: LineParams, lam: float, tol: float = 1e-10) -> CharPolyResult:
    """Check g = h, the closing identity, and agreement with the determinant.

    The closing identity is lam g_{n-1} = x_{n-2} g_{n-2} + (lam² - 1) h_{n-2}.
    """
    g, h = char_poly_sequences(x, lam)
    n = x.n
    A = line_matrix(x.x)[: n - 1, : n - 1]
    det = float(np.linalg.det(lam * np.eye(n - 1) - A))
    lhs = lam * g[n - 1]
    rhs = x.x[-1] * g[n - 2] + (lam * lam - 1.0) * h[n - 2]
    passed = (
        abs(g[n - 1] - h[n - 1]) <= tol
        and abs(lhs - rhs) <= tol
        and abs(g[n - 1] - det) <= tol
    )
    return CharPolyResult(
        x=x.x, lam=lam, g=g[n - 1], h=h[n - 1], determinant=det, lhs=lhs, rhs=rhs, passed=passed
    )


def charpoly_grid(
    sizes: list[int], instances: int, points: int, seed: int, tol: float = 1e-10
) -> list[CharPolyResult]:
    """Identity checks for ``instances`` random x per size at ``points`` random lam in [-2, 2]."""
    results = []
    for n in sizes:
        rng = np.random.default_rng(derive_seed(seed, n))
        for x in random_line_params(n, instances, seed):
            for lam in rng.uniform(-2.0, 2.0, points):
                results.append(charpoly_check(x, float(lam), tol))
    return results


@dataclass(frozen=True)
class ProductBound:
    x: tuple[float, ...]
    product: float
    bound: float
    passed: bool
    tight: bool


def product_bound_check(x: LineParams, tol: float = 1e-12) -> ProductBound:
    """At tau = n - 1, P(T_1n <= tau) P(T_n1 <= tau) <= 2^-(2n-4), tight only at x = 1/2."""
    n = x.n
    forward, backward = end_captures(np.array(x.x)[None], n - 1)
    product = float(forward[0] * backward[0])
    bound = 2.0 ** -(2 * n - 4)
    return ProductBound(
        x=x.x,
        product=product,
        bound=bound,
        passed=product <= bound + tol,
        tight=abs(product - bound) <= tol,
    )


@dataclass(frozen=True)
class PeriodicityResult:
    x: tuple[float, ...]
    at_n_minus_1: float
    at_n: float
    passed: bool


def periodicity_check(x: LineParams, tol: float = 1e-12) -> PeriodicityResult:
    """The end-to-end objective is the same at tau = n - 1 and tau = n.

    Without self-loops the line chain alternates parity, so the far end can
    only be entered at steps of the same parity as n - 1.
    """
    n = x.n
    first = line_objective(x.x, n - 1)
    second = line_objective(x.x, n)
    return PeriodicityResult(
        x=x.x, at_n_minus_1=first, at_n=second, passed=abs(first - second) <= tol
    )


@dataclass(frozen=True)
class Violation:
    check: str
    chain: int
    pair: tuple[int, int] | None
    better: tuple[int, int] | None
    lhs: float
    rhs: float

    @property
    def excess(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "chain": self.chain,
            "pair": list(self.pair) if self.pair else None,
            "better": list(self.better) if self.better else None,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "excess": self.excess,
        }


def _self_loop_violations(
    g: DiGraph, chain: MarkovChain, tau: int, index: int
) -> list[Violation]:
    """Dropping a self-loop at a star center or a line interior node never hurts."""
    topology = detect_topology(g)
    found = []
    if topology == "star" and tau >= 2:
        base = apply_leaf_dominance(g, chain)
        before = game_value(base, tau)
        after = game_value(remove_self_loop(base, 1), tau)
        if before > after + DOMINANCE_SLACK:
            found.append(Violation("self-loop", index, (1, 1), None, before, after))
    elif topology == "line":
        C = capture_matrix(chain, tau)
        before = min(C[0, -1], C[-1, 0])
        for node in range(2, g.n):
            C2 = capture_matrix(remove_self_loop(chain, node), tau)
            after = min(C2[0, -1], C2[-1, 0])
            if before > after + DOMINANCE_SLACK:
                found.append(
                    Violation("self-loop", index, (node, node), None, float(before), float(after))
                )
    return found


def audit_dominance(g: DiGraph, tau: int, chains: int, seed: int) -> list[Violation]:
    """Check the dominance inequalities on ``chains`` random chains.

    Returns every violation larger than the slack; an empty list is the
    expected outcome. Leaf checks need tau >= 2 and are skipped otherwise.
    """
    if g.n < 3:
        raise DimensionError(f"dominance analysis needs n >= 3, got {g.n}")
    if tau < 1:
        raise DomainError(f"tau must be >= 1, got {tau}")
    pairs = [p for p in dominated_pairs(g, tau) if p.reason is not DominanceReason.LEAF]
    leaf_map = leaves(g) if tau >= 2 else {}
    if tau < 2:
        logger.info("tau=1: leaf checks skipped")
    logger.info(f"Auditing dominance on n={g.n}, tau={tau}: {chains} chains, seed={seed}")

    violations = []
    for t in range(chains):
        chain = random_chain(g, derive_seed(seed, t))
        C = capture_matrix(chain, tau)
        for entry in pairs:
            i, j = entry.pair
            k, l = entry.better_pair()
            lhs, rhs = float(C[k - 1, l - 1]), float(C[i - 1, j - 1])
            if lhs > rhs + DOMINANCE_SLACK:
                violations.append(Violation(str(entry.reason), t, entry.pair, (k, l), lhs, rhs))
        for leaf, neighbor in leaf_map.items():
            rhs = float(C[leaf - 1, leaf - 1])
            for k in range(1, g.n + 1):
                if k in (leaf, neighbor):
                    continue
                lhs = float(C[k - 1, leaf - 1])
                if lhs > rhs + DOMINANCE_SLACK:
                    violations.append(Violation("leaf", t, (leaf, leaf), (k, leaf), lhs, rhs))
        if leaf_map:
            before = float(C.min())
            after = game_value(apply_leaf_dominance(g, chain), tau)
            if before > after + DOMINANCE_SLACK:
                violations.append(Violation("leaf-dominance", t, None, None, before, after))
        violations.extend(_self_loop_violations(g, chain, tau, t))

    if violations:
        logger.warning(f"{len(violations)} dominance violations found")
    return violations


def monotonicity_audit(
    n: int, tau: int, chains: int, seed: int, eps: float = 1e-3
) -> list[Violation]:
    """Raising one rightward probability by ``eps`` helps 1 -> n and never helps n -> 1."""
    if n < 3:
        raise DimensionError(f"line graphs need n >= 3, got {n}")
    if not 0.0 < eps < 0.5:
        raise DomainError(f"eps must lie in (0, 0.5), got {eps}")
    rng = np.random.default_rng(derive_seed(seed, 0))
    X = rng.uniform(0.01, 0.99 - eps, (chains, n - 2))
    forward, backward = end_captures(X, tau)
    violations = []
    for k in range(n - 2):
        bumped = X.copy()
        bumped[:, k] += eps
        forward2, backward2 = end_captures(bumped, tau)
        for t in np.flatnonzero(forward2 < forward - MONOTONICITY_SLACK):
            lhs, rhs = float(forward[t]), float(forward2[t])
            violations.append(Violation(f"forward-x{k + 1}", int(t), (1, n), None, lhs, rhs))
        for t in np.flatnonzero(backward2 > backward + MONOTONICITY_SLACK):
            lhs, rhs = float(backward2[t]), float(backward[t])
            violations.append(Violation(f"backward-x{k + 1}", int(t), (n, 1), None, lhs, rhs))
    return violations
