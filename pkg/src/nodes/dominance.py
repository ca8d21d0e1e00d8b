"""Dominance audit node over the canonical topologies."""

from ..evidence import audit_dominance, monotonicity_audit
from ..graph import build_topology
from ..logging_config import get_logger
from ..state import EvidenceState, log_debug_state

logger = get_logger(__name__)


def dominance_node(state: EvidenceState) -> dict:
    """Audits star, line and complete graphs for n = 3..6 at tau = 2..n."""
    chains = state.get("chains", 100)
    seed = state.get("seed", 0)
    logger.info(f"⚖️ Auditing dominance rules on {chains} chains per instance...")
    try:
        instances = failures = 0
        details = []
        for name in ("star", "line", "complete"):
            for n in range(3, 7):
                g = build_topology(name, n)
                for tau in range(2, n + 1):
                    violations = audit_dominance(g, tau, chains, seed)
                    instances += 1
                    failures += len(violations)
                    details.extend(
                        {"topology": name, "n": n, "tau": tau, **v.to_dict()}
                        for v in violations
                    )
        for n in range(3, 7):
            for tau in range(n - 1, 2 * n - 2):
                violations = monotonicity_audit(n, tau, chains, seed)
                instances += 1
                failures += len(violations)
                details.extend(
                    {"topology": "line", "n": n, "tau": tau, **v.to_dict()}
                    for v in violations
                )
        update = {
            "dominance": {"instances": instances, "failures": failures, "violations": details}
        }
        logger.info(f"    - {instances} instances, {failures} violations")
        log_debug_state("dominance_node", {**state, **update})
        return update
    except Exception as e:
        logger.exception(f"    - ❌ ERROR in dominance_node: {e}")
        return {"error_message": f"Dominance audit failed: {e}"}
