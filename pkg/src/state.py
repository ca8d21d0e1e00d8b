"""State definition and utilities for the evidence workflow."""

from typing import TypedDict

from .logging_config import get_logger

logger = get_logger(__name__)


class EvidenceState(TypedDict, total=False):
    """State object that flows through the evidence graph."""

    seed: int
    threads: int
    samples: int
    chains: int
    max_n: int
    sweep_cases: list[tuple[int, int]]
    sweep: list[dict]
    symmetry: dict
    charpoly: dict
    dominance: dict
    error_message: str


def log_debug_state(node_name: str, state: EvidenceState):
    """Logs the current state for debugging purposes."""
    logger.debug(f"--- After {node_name} ---")
    for key, value in state.items():
        if isinstance(value, list) and len(value) > 5:
            logger.debug(f"  - {key}: {len(value)} items")
        else:
            logger.debug(f"  - {key}: {value}")
    logger.debug("--- End Debug ---")


def passed(state: EvidenceState) -> bool:
    """True when every check that ran came back clean and nothing failed."""
    if state.get("error_message"):
        return False
    sweeps = state.get("sweep", [])
    checks = [state.get(key, {}) for key in ("symmetry", "charpoly", "dominance")]
    return all(s["improvements"] == 0 for s in sweeps) and all(
        c.get("failures", 0) == 0 for c in checks
    )
