"""Reflection symmetry, product bound and parity checks on line chains."""

from ..evidence import (
    periodicity_check,
    product_bound_check,
    random_line_params,
    symmetry_batch,
)
from ..logging_config import get_logger
from ..state import EvidenceState, log_debug_state

logger = get_logger(__name__)

INSTANCES = 50


def symmetry_node(state: EvidenceState) -> dict:
    """Checks f(x) = f(1 - x) over the nontrivial range of every line size up to max_n."""
    max_n = state.get("max_n", 7)
    seed = state.get("seed", 0)
    logger.info(f"🪞 Checking line symmetry for n = 3..{max_n}...")
    try:
        checked = failures = 0
        worst = 0.0
        for n in range(3, max_n + 1):
            results = symmetry_batch(n, list(range(n - 1, 2 * n - 2)), INSTANCES, seed)
            checked += len(results)
            failures += sum(not r.passed for r in results)
            worst = max([worst, *(r.difference for r in results)])
            for x in random_line_params(n, INSTANCES, seed):
                product, parity = product_bound_check(x), periodicity_check(x)
                checked += 2
                failures += (not product.passed) + (not parity.passed)
        update = {
            "symmetry": {"checked": checked, "failures": failures, "max_difference": worst}
        }
        logger.info(f"    - {checked} checks, {failures} failures, max gap {worst:.2e}")
        log_debug_state("symmetry_node", {**state, **update})
        return update
    except Exception as e:
        logger.exception(f"    - ❌ ERROR in symmetry_node: {e}")
        return {"error_message": f"Symmetry check failed: {e}"}
