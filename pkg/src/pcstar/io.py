"""Graph, statement and CPDAG file formats.

JSON is canonical. Graph files look like::

    {"n": 4, "edges": [{"from": 0, "to": 1, "weight": 2.0}, ...], "labels": ["a", ...]}

Labels are optional; when present, statement and CPDAG output uses them in
place of node ids.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import GraphError
from .graph import Dag, Pdag
from .separation import CIStatement, sorted_statements
from .tropical import WeightedDag


@dataclass(frozen=True)
class GraphFile:
    model: Dag | WeightedDag
    labels: tuple[str, ...] | None = None

    @property
    def weighted(self) -> bool:
        return isinstance(self.model, WeightedDag)

    @property
    def dag(self) -> Dag:
        return self.model.dag if self.weighted else self.model

    def label(self, v: int):
        return self.labels[v] if self.labels else v

    def node(self, label) -> int:
        if self.labels:
            try:
                return self.labels.index(str(label))
            except ValueError:
                raise GraphError(f"unknown node label {label!r}") from None
        return int(label)


def graph_from_dict(doc: dict) -> GraphFile:
    try:
        n = int(doc["n"])
        raw_edges = doc.get("edges", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed graph document: {exc}") from None
    labels = doc.get("labels")
    if labels is not None:
        labels = tuple(str(x) for x in labels)
        if len(labels) != n or len(set(labels)) != n:
            raise GraphError("labels must be n distinct strings")
    edges, weights = [], {}
    for e in raw_edges:
        try:
            u, v = int(e["from"]), int(e["to"])
            w = float(e["weight"]) if e.get("weight") is not None else None
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise GraphError(f"malformed edge {e!r}: {exc}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge {u}->{v} out of range for n={n}")
        edges.append((u, v))
        if w is not None:
            if not w > 0:
                raise GraphError(f"edge {u}->{v} has non-positive weight {w}")
            weights[(u, v)] = w
    if len(set(edges)) != len(edges):
        raise GraphError("duplicate edge in graph file")
    if weights and len(weights) != len(edges):
        raise GraphError("either every edge carries a weight or none does")
    model = WeightedDag.from_weights(n, weights) if weights else Dag(n, frozenset(edges))
    return GraphFile(model, labels)


def graph_to_dict(g: GraphFile) -> dict:
    doc: dict = {"n": g.model.n, "edges": []}
    for u, v in sorted(g.dag.edges):
        e = {"from": u, "to": v}
        if g.weighted:
            e["weight"] = float(g.model.c[u, v])
        doc["edges"].append(e)
    if g.labels:
        doc["labels"] = list(g.labels)
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def read_edgelist(text: str) -> GraphFile:
    """Plain ``u v [w]`` lines; ``#`` starts a comment; labels are arbitrary tokens."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphError(f"expected 'u v [w]', got {line!r}")
        rows.append(parts)
    labels: list[str] = []
    index: dict[str, int] = {}
    for parts in rows:
        for tok in parts[:2]:
            if tok not in index:
                index[tok] = len(labels)
                labels.append(tok)
    n = len(labels)
    weighted = any(len(p) == 3 for p in rows)
    if weighted and not all(len(p) == 3 for p in rows):
        raise GraphError("either every edge carries a weight or none does")
    if weighted:
        try:
            weights = {(index[a], index[b]): float(w) for a, b, w in rows}
        except ValueError as exc:
            raise GraphError(f"bad edge weight: {exc}") from None
        model = WeightedDag.from_weights(n, weights)
    else:
        model = Dag(n, frozenset((index[a], index[b]) for a, b in rows))
    trivial = labels == [str(i) for i in range(n)]
    return GraphFile(model, None if trivial else tuple(labels))


def read_graph(path: str | Path) -> GraphFile:
    text = Path(path).read_text()
    if str(path).endswith((".txt", ".edges", ".edgelist")):
        return read_edgelist(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: not valid JSON ({exc})") from None
    return graph_from_dict(doc)


def write_graph(path: str | Path, g: GraphFile) -> None:
    Path(path).write_text(dumps(graph_to_dict(g)))


def statements_to_list(statements, g: GraphFile | None = None) -> list[dict]:
    lab = g.label if g else (lambda v: v)
    return [
        {"i": lab(s.i), "j": lab(s.j), "K": [lab(x) for x in sorted(s.k)]}
        for s in sorted_statements(statements)
    ]


def statements_from_list(items: Sequence[dict], g: GraphFile | None = None) -> list[CIStatement]:
    node = g.node if g else int
    return [CIStatement(node(d["i"]), node(d["j"]), frozenset(node(x) for x in d["K"])) for d in items]


def pdag_to_dict(p: Pdag, g: GraphFile | None = None) -> dict:
    lab = g.label if g else (lambda v: v)
    return {
        "n": p.n,
        "directed": [[lab(u), lab(v)] for u, v in sorted(p.directed)],
        "undirected": [[lab(u), lab(v)] for u, v in sorted(p.undirected)],
        "possible_sources": [
            {"cycle": [lab(x) for x in cyc], "candidates": [lab(a), lab(b)]}
            for cyc, (a, b) in sorted(p.possible_sources)
        ],
    }


def pdag_from_dict(doc: dict, g: GraphFile | None = None) -> Pdag:
    node = g.node if g else int
    return Pdag(
        int(doc["n"]),
        frozenset((node(u), node(v)) for u, v in doc["directed"]),
        frozenset((node(u), node(v)) for u, v in doc["undirected"]),
        frozenset(
            (tuple(node(x) for x in ps["cycle"]), tuple(node(x) for x in ps["candidates"]))
            for ps in doc.get("possible_sources", [])
        ),
    )


def pdag_to_dot(p: Pdag, g: GraphFile | None = None, name: str = "cpdag") -> str:
    lab = g.label if g else (lambda v: v)

    def q(v):
        return json.dumps(str(lab(v)))

    marked = {x for _, ab in p.possible_sources for x in ab}
    lines = [f"digraph {name} {{"]
    for v in range(p.n):
        attrs = ' [shape=doublecircle, comment="possible source"]' if v in marked else ""
        lines.append(f"  {q(v)}{attrs};")
    for u, v in sorted(p.directed):
        lines.append(f"  {q(u)} -> {q(v)};")
    for u, v in sorted(p.undirected):
        lines.append(f"  {q(u)} -> {q(v)} [dir=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"
