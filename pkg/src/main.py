"""Command-line entry point for the patrol toolkit."""

import argparse
import sys

import numpy as np

from .chain import MarkovChain
from .config import (
    DEFAULT_SEED,
    DEFAULT_THREADS,
    cache_report,
    get_cached_report,
    get_report_cache_key,
)
from .errors import DomainError, GuardError, PatrolError
from .evidence import (
    audit_dominance,
    charpoly_grid,
    conjecture_sweep,
    symmetry_batch,
)
from .game import (
    GameInstance,
    best_response_from_capture,
    intruder_best_response,
    upper_bound,
)
from .graph import DiGraph, build_topology, classify_tau
from .hitting import (
    capture_column,
    enumerate_capture_matrix,
    hitting_profile,
    hitting_profile_vectorized,
)
from .logging_config import get_logger, setup_logging
from .pipeline import create_workflow
from .resources.bundled import load_fixtures
from .serialization import (
    chain_to_csv,
    chain_to_json,
    dumps,
    graph_to_dict,
    read_chain,
    read_graph,
    rows_to_csv,
    write_text,
)
from .solver import SolveConfig, solve_line, solve_maximin
from .state import passed
from .strategies import complete_kron, line_optimal, random_walk, star_optimal

logger = get_logger(__name__)

ORACLE_TOL = 1e-12
CHAIN_BUILDERS = ("star", "line", "complete-kron", "random-walk")
GRAPH_TOPOLOGIES = ("star", "line", "complete")


class CommandFailed(PatrolError):
    """A check run from the command line did not pass."""


def _graph_from_args(args, required: bool = True) -> DiGraph | None:
    if getattr(args, "graph", None):
        return read_graph(args.graph)
    if getattr(args, "topology", None):
        if args.n is None:
            raise DomainError("--topology needs --n")
        return build_topology(args.topology, args.n)
    if required:
        raise DomainError("give --graph PATH or --topology NAME --n N")
    return None


def _chain_from_args(args) -> MarkovChain:
    return read_chain(args.chain, _graph_from_args(args, required=False))


def _joined(x: tuple[float, ...]) -> str:
    return " ".join(repr(v) for v in x)


def _matrix_rows(M: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in M]


def cmd_eval(args) -> str:
    chain = _chain_from_args(args)
    profile = hitting_profile(chain, args.tau)
    columns = [f"j{j}" for j in range(1, chain.n + 1)]
    if args.format == "csv" and args.per_step:
        # F_1..F_tau blocks, then the capture matrix under k = "C"
        blocks = [*((str(k), F) for k, F in enumerate(profile.F, start=1)), ("C", profile.C)]
        rows = [[k, i, *row] for k, M in blocks for i, row in enumerate(_matrix_rows(M), start=1)]
        return rows_to_csv(["k", "i", *columns], rows)
    if args.format == "csv":
        return rows_to_csv(columns, _matrix_rows(profile.C))
    response = best_response_from_capture(profile.C)
    document = {
        "n": chain.n,
        "tau": args.tau,
        "capture": _matrix_rows(profile.C),
        "value": response.value,
        "best_response": response.to_dict(),
    }
    if args.per_step:
        document["F"] = [_matrix_rows(F) for F in profile.F]
    return dumps(document)


def cmd_best_response(args) -> str:
    chain = _chain_from_args(args)
    inst = GameInstance(chain.g, args.tau)
    response = intruder_best_response(chain, args.tau)
    return dumps(response.to_dict(bound=upper_bound(inst)))


def cmd_bound(args) -> str:
    g = _graph_from_args(args, required=False)
    if g is not None:
        return dumps({"bound": upper_bound(GameInstance(g, args.tau))})
    if args.n is None or args.n < 1:
        raise DomainError("give --n N (N >= 1) or a graph")
    if args.tau < 1:
        raise DomainError(f"tau must be >= 1, got {args.tau}")
    return dumps({"bound": args.tau / args.n})


def cmd_classify(args) -> str:
    g = _graph_from_args(args)
    return dumps({"n": g.n, "tau": args.tau, **classify_tau(g, args.tau).to_dict()})


def cmd_build(args) -> str:
    if args.n is None:
        raise DomainError("build needs --n")
    if args.kind == "graph":
        if args.topology not in GRAPH_TOPOLOGIES:
            raise DomainError(f"graph topology must be one of {GRAPH_TOPOLOGIES}")
        return dumps(graph_to_dict(build_topology(args.topology, args.n)))
    match args.topology:
        case "star":
            chain = star_optimal(args.n)
        case "line":
            chain = line_optimal(args.n)
        case "complete-kron":
            if args.tau is None:
                raise DomainError("complete-kron needs --tau")
            chain = complete_kron(args.n, args.tau)
        case "random-walk":
            chain = random_walk(args.n)
        case _:
            raise DomainError(f"chain topology must be one of {CHAIN_BUILDERS}")
    if args.format == "csv":
        return chain_to_csv(chain)
    return chain_to_json(chain)


def cmd_solve(args) -> str:
    cfg = SolveConfig(
        restarts=args.restarts,
        max_iters=args.max_iters,
        seed=args.seed,
        polish=not args.no_polish,
        threads=args.threads,
    )
    line_mode = args.topology == "line" and not args.graph
    if line_mode:
        if args.n is None:
            raise DomainError("--topology line needs --n")
        payload = {"line": args.n, "tau": args.tau, "config": cfg.to_dict()}
    else:
        g = _graph_from_args(args)
        payload = {"graph": graph_to_dict(g), "tau": args.tau, "config": cfg.to_dict()}

    cache_key = get_report_cache_key(payload)
    cached = None if args.trace else get_cached_report(cache_key)
    if cached:
        logger.info("Using cached solve report")
        return dumps(cached)

    if line_mode:
        report = solve_line(args.n, args.tau, cfg)
    else:
        report = solve_maximin(GameInstance(g, args.tau), cfg)

    if args.trace:
        write_text(rows_to_csv(["iteration", "value"], [list(t) for t in report.trace]), args.trace)
    document = {**report.to_dict(), "tau": args.tau, "config": cfg.to_dict()}
    cache_report(cache_key, document)
    return dumps(document)


def cmd_evidence_sweep(args) -> str:
    report = conjecture_sweep(
        args.n, args.tau, args.samples, args.seed, tol=args.tol, threads=args.threads
    )
    return dumps(report.to_dict())


def cmd_evidence_symmetry(args) -> str:
    taus = [args.tau] if args.tau is not None else list(range(args.n - 1, 2 * args.n - 2))
    results = symmetry_batch(args.n, taus, args.count, args.seed)
    failures = sum(not r.passed for r in results)
    if args.format == "csv":
        return rows_to_csv(
            ["x", "tau", "f_x", "f_reflected", "difference", "passed"],
            [
                [_joined(r.x), r.tau, r.f_x, r.f_reflected, r.difference, r.passed]
                for r in results
            ],
        )
    return dumps(
        {
            "n": args.n,
            "taus": taus,
            "seed": args.seed,
            "checked": len(results),
            "failures": failures,
            "max_difference": max(r.difference for r in results),
            "results": [r.to_dict() for r in results],
        }
    )


def cmd_evidence_charpoly(args) -> str:
    sizes = args.n or list(range(3, 10))
    results = charpoly_grid(sizes, args.instances, args.points, args.seed)
    if args.format == "csv":
        return rows_to_csv(
            ["x", "lam", "g", "h", "determinant", "lhs", "rhs", "passed"],
            [
                [_joined(r.x), r.lam, r.g, r.h, r.determinant, r.lhs, r.rhs, r.passed]
                for r in results
            ],
        )
    return dumps(
        {
            "sizes": sizes,
            "seed": args.seed,
            "checked": len(results),
            "failures": sum(not r.passed for r in results),
        }
    )


def cmd_evidence_dominance(args) -> str:
    g = _graph_from_args(args)
    violations = audit_dominance(g, args.tau, args.chains, args.seed)
    if args.format == "csv":
        return rows_to_csv(
            ["check", "chain", "pair", "better", "lhs", "rhs", "excess"],
            [list(v.to_dict().values()) for v in violations],
        )
    return dumps(
        {
            "n": g.n,
            "tau": args.tau,
            "chains": args.chains,
            "seed": args.seed,
            "violations": [v.to_dict() for v in violations],
        }
    )


def cmd_evidence_all(args) -> str:
    app = create_workflow()
    initial_state = {
        "seed": args.seed,
        "threads": args.threads,
        "samples": args.samples,
        "chains": args.chains,
        "max_n": args.max_n,
    }
    final_state = app.invoke(initial_state)
    if final_state.get("error_message"):
        raise CommandFailed(final_state["error_message"])
    keys = ("seed", "samples", "chains", "max_n", "sweep", "symmetry", "charpoly", "dominance")
    document = {key: final_state.get(key) for key in keys}
    document["passed"] = passed(final_state)
    return dumps(document)


def _oracle_entry(name: str, chain: MarkovChain, tau: int, expected: float | None) -> dict:
    recursion = hitting_profile(chain, tau).C
    paths = {
        "vectorized": hitting_profile_vectorized(chain, tau).C,
        "column": np.column_stack(
            [capture_column(chain, j, tau) for j in range(1, chain.n + 1)]
        ),
    }
    try:
        paths["enumeration"] = enumerate_capture_matrix(chain, tau)
    except GuardError as e:
        logger.warning(f"{name}: enumeration skipped ({e})")
    discrepancy = {key: float(np.abs(C - recursion).max()) for key, C in paths.items()}
    entry = {
        "name": name,
        "n": chain.n,
        "tau": tau,
        "value": float(recursion.min()),
        "discrepancy": discrepancy,
        "max_discrepancy": max(discrepancy.values()),
    }
    if expected is not None:
        entry["expected"] = expected
        entry["value_error"] = abs(entry["value"] - expected)
    return entry


def cmd_oracle(args) -> str:
    if args.fixtures:
        entries = [
            _oracle_entry(f.name, f.chain, f.tau, f.expected) for f in load_fixtures()
        ]
    else:
        if not args.chain or args.tau is None:
            raise DomainError("oracle needs --chain and --tau, or --fixtures")
        entries = [_oracle_entry(args.chain, _chain_from_args(args), args.tau, None)]
    worst = max(e["max_discrepancy"] for e in entries)
    value_errors = [e["value_error"] for e in entries if "value_error" in e]
    ok = worst <= ORACLE_TOL and all(err <= ORACLE_TOL for err in value_errors)
    text = dumps({"entries": entries, "max_discrepancy": worst, "passed": ok})
    if not ok:
        write_text(text, args.out)
        raise CommandFailed(f"oracle discrepancy {worst:.3e} exceeds {ORACLE_TOL}")
    return text


def _add_graph_flags(parser: argparse.ArgumentParser, topologies=GRAPH_TOPOLOGIES) -> None:
    parser.add_argument("--graph", type=str, help="Graph JSON or edge-list file.")
    parser.add_argument("--topology", choices=topologies, help="Canonical topology.")
    parser.add_argument("--n", type=int, help="Number of nodes.")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per toolkit operation."""
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", type=str, help="Write the report here instead of stdout.")
    output.add_argument("--format", choices=("json", "csv"), default="json")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=DEFAULT_SEED)
    seeded.add_argument("--threads", type=int, default=DEFAULT_THREADS)

    parser = argparse.ArgumentParser(
        prog="patrol",
        description="Hitting-time analysis and strategy search for Stackelberg patrolling.",
    )
    # Verbose options following Unix conventions
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Enable verbose logging (debug output from our application only)",
    )
    parser.add_argument(
        "-vvv",
        "--very-verbose",
        action="store_true",
        help="Enable very verbose logging (debug output from all libraries)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[output], help="Capture matrix of a chain.")
    _add_graph_flags(p)
    p.add_argument("--chain", required=True)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--per-step", action="store_true", help="Include every F_k block.")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("best-response", parents=[output], help="Intruder best response.")
    _add_graph_flags(p)
    p.add_argument("--chain", required=True)
    p.add_argument("--tau", type=int, required=True)
    p.set_defaults(handler=cmd_best_response)

    p = sub.add_parser("bound", parents=[output], help="The tau/n bound.")
    _add_graph_flags(p)
    p.add_argument("--tau", type=int, required=True)
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("classify", parents=[output], help="Classify an attack duration.")
    _add_graph_flags(p)
    p.add_argument("--tau", type=int, required=True)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("build", parents=[output], help="Closed-form chains and canonical graphs.")
    p.add_argument(
        "--topology", required=True, choices=sorted({*CHAIN_BUILDERS, *GRAPH_TOPOLOGIES})
    )
    p.add_argument("--n", type=int)
    p.add_argument("--tau", type=int)
    p.add_argument("--kind", choices=("chain", "graph"), default="chain")
    p.set_defaults(handler=cmd_build)

    p = sub.add_parser("solve", parents=[output, seeded], help="Search for a maximin strategy.")
    _add_graph_flags(p)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--restarts", type=int, default=SolveConfig.restarts)
    p.add_argument("--max-iters", type=int, default=SolveConfig.max_iters)
    p.add_argument("--no-polish", action="store_true", help="Skip the SLSQP polish.")
    p.add_argument("--trace", type=str, help="CSV file for (iteration, value) rows.")
    p.set_defaults(handler=cmd_solve)

    evidence = sub.add_parser("evidence", help="Verification experiments.")
    ev = evidence.add_subparsers(dest="experiment", required=True)

    p = ev.add_parser("sweep", parents=[output, seeded], help="Monte Carlo line sweep.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(handler=cmd_evidence_sweep)

    p = ev.add_parser("symmetry", parents=[output, seeded], help="f(x) = f(1 - x) checks.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=int)
    p.add_argument("--count", type=int, default=50)
    p.set_defaults(handler=cmd_evidence_symmetry)

    p = ev.add_parser("charpoly", parents=[output, seeded], help="Recurrence identities.")
    p.add_argument("--n", type=int, nargs="+", help="Line sizes (default 3..9).")
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--points", type=int, default=10)
    p.set_defaults(handler=cmd_evidence_charpoly)

    p = ev.add_parser("dominance", parents=[output, seeded], help="Dominance audit.")
    _add_graph_flags(p)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--chains", type=int, default=100)
    p.set_defaults(handler=cmd_evidence_dominance)

    p = ev.add_parser("all", parents=[output, seeded], help="Every experiment in one run.")
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--chains", type=int, default=100)
    p.add_argument("--max-n", type=int, default=7)
    p.set_defaults(handler=cmd_evidence_all)

    p = sub.add_parser("oracle", parents=[output], help="Cross-check the hitting engines.")
    _add_graph_flags(p)
    p.add_argument("--chain", type=str)
    p.add_argument("--tau", type=int)
    p.add_argument("--fixtures", action="store_true", help="Check every bundled fixture.")
    p.set_defaults(handler=cmd_oracle)

    return parser


def run(argv: list[str]) -> int:
    """Parse ``argv``, dispatch, and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.very_verbose:
        setup_logging(verbose_level="very_verbose")
    elif args.verbose:
        setup_logging(verbose_level="verbose")
    else:
        setup_logging(verbose_level="normal")

    try:
        text = args.handler(args)
    except (PatrolError, ValueError) as e:
        logger.error(f"❌ {e}")
        return 1
    except OSError as e:
        logger.error(f"❌ {e.filename or ''}: {e.strerror or e}")
        return 1
    write_text(text, getattr(args, "out", None))
    return 0


def main():
    """Console-script entry point."""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
