"""Node implementations for the evidence workflow."""

from .charpoly import charpoly_node
from .dominance import dominance_node
from .sweep import sweep_node
from .symmetry import symmetry_node

__all__ = [
    "sweep_node",
    "symmetry_node",
    "charpoly_node",
    "dominance_node",
]
