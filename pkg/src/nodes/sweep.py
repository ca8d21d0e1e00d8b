"""Monte Carlo uniqueness sweep node."""

from ..evidence import conjecture_sweep
from ..logging_config import get_logger
from ..state import EvidenceState, log_debug_state

logger = get_logger(__name__)


def sweep_node(state: EvidenceState) -> dict:
    """Runs the line-chain sweep for every configured (n, tau) case."""
    cases = state.get("sweep_cases", [(5, 8), (6, 8)])
    samples = state.get("samples", 5000)
    logger.info(f"🎲 Sweeping {len(cases)} line cases with {samples} samples each...")
    try:
        reports = [
            conjecture_sweep(
                n, tau, samples, state.get("seed", 0), threads=state.get("threads", 1)
            ).to_dict()
            for n, tau in cases
        ]
        for report in reports:
            logger.info(
                f"    - n={report['n']}, tau={report['tau']}: "
                f"{report['improvements']} improvements, level {report['level']}"
            )
        update = {"sweep": reports}
        log_debug_state("sweep_node", {**state, **update})
        return update
    except Exception as e:
        logger.exception(f"    - ❌ ERROR in sweep_node: {e}")
        return {"error_message": f"Sweep failed: {e}"}
