"""Tests for the evidence workflow and its nodes."""

from src.nodes import charpoly_node, symmetry_node
from src.pipeline import create_workflow, should_continue
from src.state import passed


def test_should_continue():
    assert should_continue({"seed": 0}) == "continue"
    assert should_continue({"error_message": "boom"}) == "end_with_error"


def test_passed():
    assert passed({"sweep": [{"improvements": 0}], "symmetry": {"failures": 0}})
    assert not passed({"sweep": [{"improvements": 2}]})
    assert not passed({"charpoly": {"failures": 1}})
    assert not passed({"error_message": "boom"})


def test_symmetry_node_counts_every_check():
    update = symmetry_node({"seed": 1, "max_n": 4})
    # n=3: 50 draws at tau 2..3 plus 2 extra checks each; n=4: tau 3..5 plus 2 each
    assert update["symmetry"]["checked"] == 50 * 4 + 50 * 5
    assert update["symmetry"]["failures"] == 0


def test_charpoly_node():
    update = charpoly_node({"seed": 2})
    assert update["charpoly"] == {"checked": 7 * 20 * 10, "failures": 0}


def test_workflow_runs_every_check():
    final = create_workflow().invoke({"seed": 3, "samples": 200, "chains": 3, "max_n": 4})
    assert [s["n"] for s in final["sweep"]] == [5, 6]
    assert final["dominance"]["failures"] == 0
    assert "error_message" not in final
    assert passed(final)


def test_workflow_stops_on_error():
    final = create_workflow().invoke({"seed": 0, "samples": 0})
    assert final["error_message"].startswith("Sweep failed")
    assert "symmetry" not in final
    assert not passed(final)
