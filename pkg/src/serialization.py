"""Reading and writing graphs, chains and reports.

Graph JSON is ``{"n": 4, "edges": [[1, 2], [2, 1], ...]}``; the edge-list
text format has one ``i j`` pair per line with ``#`` comments. Chain JSON is
``{"n": 3, "rows": [[...], ...]}``; chain CSV has one row per line. All node
labels are 1-based.
"""

import csv
import io
import json
from pathlib import Path

from .chain import MarkovChain, from_matrix, from_rows
from .errors import FormatError, PatrolError
from .graph import DiGraph
from .logging_config import get_logger

logger = get_logger(__name__)


def graph_to_dict(g: DiGraph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in sorted(g.edges)]}


def graph_from_dict(data: dict, source: str = "<data>") -> DiGraph:
    try:
        n = int(data["n"])
        edges = [(int(i), int(j)) for i, j in data["edges"]]
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(source, f"malformed graph document ({e})") from e
    try:
        return DiGraph.from_edges(n, edges)
    except PatrolError as e:
        raise FormatError(source, str(e)) from e


def parse_edge_list(text: str, source: str = "<text>") -> DiGraph:
    """Parse ``i j`` lines; the node count is the largest label seen."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(source, f"line {lineno}: expected 'i j', got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as e:
            raise FormatError(source, f"line {lineno}: {e}") from e
    if not edges:
        raise FormatError(source, "no edges")
    n = max(max(e) for e in edges)
    try:
        return DiGraph.from_edges(n, edges)
    except PatrolError as e:
        raise FormatError(source, str(e)) from e


def _load_json(path: Path):
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(str(path), f"invalid JSON ({e.msg} at line {e.lineno})") from e


def read_graph(path: str | Path) -> DiGraph:
    """Graph from a ``.json`` document or an edge-list text file."""
    path = Path(path)
    if path.suffix == ".json":
        g = graph_from_dict(_load_json(path), str(path))
    else:
        g = parse_edge_list(path.read_text(), str(path))
    logger.debug(f"Loaded graph with {g.n} nodes and {len(g.edges)} edges from {path}")
    return g


def chain_to_dict(c: MarkovChain) -> dict:
    return {"n": c.n, "rows": c.to_rows()}


def _row17(row, sep: str = ",") -> str:
    return sep.join(f"{v:.17g}" for v in row)


def chain_to_csv(c: MarkovChain) -> str:
    """One row per line with 17 significant digits."""
    return "".join(_row17(row) + "\n" for row in c.P)


def chain_to_json(c: MarkovChain) -> str:
    """Chain JSON with one row per line and 17 significant digits per entry."""
    rows = ",\n".join(f"    [{_row17(row, ', ')}]" for row in c.P)
    return f'{{\n  "n": {c.n},\n  "rows": [\n{rows}\n  ]\n}}\n'


def _rows_from_csv(text: str, source: str) -> list[list[float]]:
    try:
        return [[float(v) for v in row] for row in csv.reader(io.StringIO(text)) if row]
    except ValueError as e:
        raise FormatError(source, f"non-numeric CSV entry ({e})") from e


def read_rows(path: str | Path) -> list[list[float]]:
    """Transition rows from chain JSON or CSV."""
    path = Path(path)
    if path.suffix == ".csv":
        return _rows_from_csv(path.read_text(), str(path))
    data = _load_json(path)
    try:
        rows = [[float(v) for v in row] for row in data["rows"]]
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(str(path), f"malformed chain document ({e})") from e
    if "n" in data and int(data["n"]) != len(rows):
        raise FormatError(str(path), f"n={data['n']} but {len(rows)} rows")
    return rows


def read_chain(path: str | Path, g: DiGraph | None = None) -> MarkovChain:
    """Chain on ``g``, or on the complete graph of matching size when no graph is given."""
    rows = read_rows(path)
    return from_rows(rows) if g is None else from_matrix(g, rows)


def dumps(document) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline.

    Floats keep Python's shortest round-trip representation; standalone chain
    documents go through :func:`chain_to_json` instead.
    """
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_text(text: str, path: str | Path | None) -> None:
    """Write to ``path`` or to standard output when no path is given."""
    if path is None:
        print(text, end="")
        return
    Path(path).write_text(text)
    logger.info(f"Wrote {path}")


def rows_to_csv(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()
