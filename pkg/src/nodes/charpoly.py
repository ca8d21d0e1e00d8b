"""Characteristic-polynomial identity node."""

from ..evidence import charpoly_grid
from ..logging_config import get_logger
from ..state import EvidenceState, log_debug_state

logger = get_logger(__name__)


def charpoly_node(state: EvidenceState) -> dict:
    """Evaluates both recurrences on n = 3..9, 20 parameter draws and 10 points each."""
    logger.info("🧮 Checking characteristic-polynomial identities...")
    try:
        results = charpoly_grid(list(range(3, 10)), 20, 10, state.get("seed", 0))
        failures = sum(not r.passed for r in results)
        update = {"charpoly": {"checked": len(results), "failures": failures}}
        logger.info(f"    - {len(results)} evaluations, {failures} failures")
        log_debug_state("charpoly_node", {**state, **update})
        return update
    except Exception as e:
        logger.exception(f"    - ❌ ERROR in charpoly_node: {e}")
        return {"error_message": f"Characteristic-polynomial check failed: {e}"}
