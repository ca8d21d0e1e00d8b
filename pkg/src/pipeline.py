"""Graph construction and conditional logic for the evidence workflow."""

from langgraph.graph import END, StateGraph
from langgraph.graph.state import CompiledStateGraph

from .nodes import charpoly_node, dominance_node, sweep_node, symmetry_node
from .state import EvidenceState


def should_continue(state: EvidenceState) -> str:
    """Determines whether to run the next check or end with error."""
    return "end_with_error" if state.get("error_message") else "continue"


def create_workflow() -> CompiledStateGraph:
    """Creates and configures the LangGraph workflow."""
    workflow = StateGraph(EvidenceState)

    workflow.add_node("sweep", sweep_node)
    workflow.add_node("symmetry", symmetry_node)
    workflow.add_node("charpoly", charpoly_node)
    workflow.add_node("dominance", dominance_node)

    workflow.set_entry_point("sweep")

    for current, following in (
        ("sweep", "symmetry"),
        ("symmetry", "charpoly"),
        ("charpoly", "dominance"),
    ):
        workflow.add_conditional_edges(
            current,
            should_continue,
            {"continue": following, "end_with_error": END},
        )
    workflow.add_edge("dominance", END)

    return workflow.compile()
