"""Load the bundled graph and chain fixtures from package data."""

import json
from dataclasses import dataclass
from importlib import resources

from ..chain import MarkovChain, from_matrix
from ..graph import DiGraph
from ..serialization import graph_from_dict


@dataclass(frozen=True)
class Fixture:
    name: str
    graph: DiGraph
    chain: MarkovChain
    tau: int
    expected: float | None


def _read_json(filename: str):
    return json.loads(resources.files("src.resources.fixtures").joinpath(filename).read_text())


def load_graph(filename: str) -> DiGraph:
    """Get a bundled graph, e.g. ``graph_star_4.json``."""
    return graph_from_dict(_read_json(filename), filename)


def load_fixtures() -> list[Fixture]:
    """Get every fixture listed in the manifest, in manifest order."""
    fixtures = []
    for entry in _read_json("manifest.json"):
        g = load_graph(entry["graph"])
        chain = from_matrix(g, _read_json(entry["chain"])["rows"])
        fixtures.append(
            Fixture(
                name=entry["name"],
                graph=g,
                chain=chain,
                tau=int(entry["tau"]),
                expected=entry["expected"],
            )
        )
    return fixtures
