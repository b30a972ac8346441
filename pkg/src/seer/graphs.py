"""Vertex-colored member graphs of a single class.

Nodes are class members (constructor, methods, attributes), edges are
intra-class calls or attribute accesses. Graphs are simple, undirected and
immutable after construction; matrix views use a canonical lexicographic
node ordering so downstream fixtures are reproducible.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Union

import numpy as np

from .errors import (
    DanglingEdgeError,
    DuplicateEdgeError,
    DuplicateNodeError,
    PerturbationError,
    SchemaError,
    SelfLoopError,
    UnknownFieldError,
    UnknownNodeError,
)


class MemberKind(str, Enum):
    """Role color of a member node. The set is closed."""

    CONSTRUCTOR = "constructor"
    PUBLIC_METHOD = "public_method"
    PRIVATE_METHOD = "private_method"
    ATTRIBUTE = "attribute"


class EdgeKind(str, Enum):
    """Relationship recorded on an edge. The set is closed."""

    METHOD_CALL = "method_call"
    ATTRIBUTE_ACCESS = "attribute_access"


@dataclass(frozen=True)
class MemberNode:
    id: str
    kind: MemberKind
    label: str


@dataclass(frozen=True)
class MemberEdge:
    """Undirected edge; endpoints are stored in sorted order."""

    a: str
    b: str
    kind: EdgeKind

    def __post_init__(self):
        if self.a > self.b:
            lo, hi = self.b, self.a
            object.__setattr__(self, "a", lo)
            object.__setattr__(self, "b", hi)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.a, self.b)


@dataclass(frozen=True)
class MemberGraph:
    """Validated simple undirected graph of one class's members."""

    class_name: str
    nodes: tuple[MemberNode, ...]
    edges: tuple[MemberEdge, ...]

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    def node(self, node_id: str) -> MemberNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise UnknownNodeError(f"no node {node_id!r} in {self.class_name}", element=node_id)

    def has_edge(self, a: str, b: str) -> bool:
        pair = (a, b) if a <= b else (b, a)
        return any(e.pair == pair for e in self.edges)


def build_graph(class_name: str, nodes: Iterable[MemberNode], edges: Iterable[MemberEdge]) -> MemberGraph:
    """Canonicalize (sort) and validate, returning an immutable graph.

    Raises a distinct error naming the offending element for each invariant
    violation: duplicate node id, empty label, self-loop, parallel edge,
    dangling endpoint, empty node set.
    """
    node_list = sorted(nodes, key=lambda n: n.id)
    edge_list = sorted(edges, key=lambda e: (e.a, e.b))

    if not node_list:
        raise SchemaError(f"graph {class_name!r} has no nodes", element=class_name)
    seen: set[str] = set()
    for node in node_list:
        if node.id in seen:
            raise DuplicateNodeError(f"duplicate node id {node.id!r}", element=node.id)
        if not node.label:
            raise SchemaError(f"node {node.id!r} has an empty label", element=node.id)
        seen.add(node.id)

    pairs: set[tuple[str, str]] = set()
    for edge in edge_list:
        if edge.a == edge.b:
            raise SelfLoopError(f"self-loop on {edge.a!r}", element=edge.a)
        for endpoint in edge.pair:
            if endpoint not in seen:
                raise DanglingEdgeError(f"edge endpoint {endpoint!r} is not a node", element=endpoint)
        if edge.pair in pairs:
            raise DuplicateEdgeError(f"parallel edge {edge.a!r}-{edge.b!r}", element=f"{edge.a}-{edge.b}")
        pairs.add(edge.pair)

    return MemberGraph(class_name=class_name, nodes=tuple(node_list), edges=tuple(edge_list))


# --- interchange -----------------------------------------------------------

_NODE_FIELDS = {"id", "kind", "label"}
_EDGE_FIELDS = {"a", "b", "kind"}
_GRAPH_FIELDS = {"class_name", "nodes", "edges"}

Source = Union[bytes, bytearray, str, IO[bytes]]


def _reject_unknown(obj: dict, allowed: set[str], where: str, strict: bool) -> None:
    unknown = set(obj) - allowed
    if not unknown:
        return
    name = sorted(unknown)[0]
    if strict:
        raise UnknownFieldError(f"unknown field {name!r} in {where}", element=name)
    warnings.warn(f"ignoring unknown field {name!r} in {where}", stacklevel=3)


def _parse_kind(raw, enum, where: str):
    try:
        return enum(raw)
    except ValueError:
        raise SchemaError(f"{where}: {raw!r} is not one of {[k.value for k in enum]}", element=str(raw)) from None


def load_graph(source: Source, strict: bool = True) -> MemberGraph:
    """Parse interchange JSON into a validated MemberGraph.

    `source` may be raw bytes/str or a binary stream. Unknown fields are
    rejected in strict mode and warned about otherwise.
    """
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = source
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top-level JSON value must be an object")

    _reject_unknown(doc, _GRAPH_FIELDS, "graph", strict)
    for key in ("class_name", "nodes", "edges"):
        if key not in doc:
            raise SchemaError(f"missing field {key!r}", element=key)
    if not isinstance(doc["class_name"], str):
        raise SchemaError("class_name must be a string", element="class_name")
    if not isinstance(doc["nodes"], list) or not isinstance(doc["edges"], list):
        raise SchemaError("nodes and edges must be arrays")

    nodes = []
    for raw in doc["nodes"]:
        if not isinstance(raw, dict):
            raise SchemaError("node entries must be objects")
        _reject_unknown(raw, _NODE_FIELDS, "node", strict)
        for key in _NODE_FIELDS:
            if key not in raw or not isinstance(raw[key], str):
                raise SchemaError(f"node missing string field {key!r}", element=key)
        nodes.append(MemberNode(id=raw["id"], kind=_parse_kind(raw["kind"], MemberKind, "node kind"), label=raw["label"]))

    edges = []
    for raw in doc["edges"]:
        if not isinstance(raw, dict):
            raise SchemaError("edge entries must be objects")
        _reject_unknown(raw, _EDGE_FIELDS, "edge", strict)
        for key in _EDGE_FIELDS:
            if key not in raw or not isinstance(raw[key], str):
                raise SchemaError(f"edge missing string field {key!r}", element=key)
        edges.append(MemberEdge(a=raw["a"], b=raw["b"], kind=_parse_kind(raw["kind"], EdgeKind, "edge kind")))

    return build_graph(doc["class_name"], nodes, edges)


def graph_to_dict(g: MemberGraph) -> dict:
    """Canonical interchange form (nodes/edges sorted)."""
    return {
        "class_name": g.class_name,
        "nodes": [{"id": n.id, "kind": n.kind.value, "label": n.label} for n in g.nodes],
        "edges": [{"a": e.a, "b": e.b, "kind": e.kind.value} for e in g.edges],
    }


def dump_graph(g: MemberGraph) -> bytes:
    return (json.dumps(graph_to_dict(g), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# --- matrix views ----------------------------------------------------------

def adjacency_and_degree(g: MemberGraph) -> tuple[np.ndarray, np.ndarray]:
    """Adjacency A and diagonal degree matrix D, nodes ordered by id.

    A is symmetric 0/1 with zero diagonal; D_ii = sum_j A_ij.
    """
    order = {node_id: i for i, node_id in enumerate(g.node_ids)}
    n = g.n
    A = np.zeros((n, n), dtype=np.float64)
    for e in g.edges:
        i, j = order[e.a], order[e.b]
        A[i, j] = 1.0
        A[j, i] = 1.0
    D = np.diag(A.sum(axis=1))
    return A, D


# --- perturbations ---------------------------------------------------------

class PerturbationOp(str, Enum):
    ADD_NODE = "add_node"
    REMOVE_NODE = "remove_node"
    ADD_EDGE = "add_edge"
    REMOVE_EDGE = "remove_edge"
    CHANGE_KIND = "change_kind"


@dataclass(frozen=True)
class Perturbation:
    """One structural edit; payload fields depend on `op`.

    add_node: node. remove_node: node_id. add_edge: a, b, edge_kind.
    remove_edge: a, b. change_kind: node_id, member_kind.
    """

    op: PerturbationOp
    node: MemberNode | None = None
    node_id: str | None = None
    a: str | None = None
    b: str | None = None
    edge_kind: EdgeKind | None = None
    member_kind: MemberKind | None = None

    @staticmethod
    def from_dict(raw: dict) -> "Perturbation":
        op = _parse_kind(raw.get("op"), PerturbationOp, "perturbation op")
        if op is PerturbationOp.ADD_NODE:
            node = MemberNode(
                id=raw["id"],
                kind=_parse_kind(raw.get("kind", "public_method"), MemberKind, "node kind"),
                label=raw.get("label", raw["id"]),
            )
            return Perturbation(op=op, node=node)
        if op is PerturbationOp.REMOVE_NODE:
            return Perturbation(op=op, node_id=raw["id"])
        if op is PerturbationOp.ADD_EDGE:
            return Perturbation(
                op=op, a=raw["a"], b=raw["b"],
                edge_kind=_parse_kind(raw.get("kind", "method_call"), EdgeKind, "edge kind"),
            )
        if op is PerturbationOp.REMOVE_EDGE:
            return Perturbation(op=op, a=raw["a"], b=raw["b"])
        return Perturbation(
            op=op, node_id=raw["id"],
            member_kind=_parse_kind(raw["kind"], MemberKind, "node kind"),
        )


def apply_perturbation(g: MemberGraph, p: Perturbation) -> MemberGraph:
    """Return a new graph with the edit applied; `g` itself is unchanged."""
    ids = set(g.node_ids)

    if p.op is PerturbationOp.ADD_NODE:
        assert p.node is not None
        if p.node.id in ids:
            raise DuplicateNodeError(f"node {p.node.id!r} already exists", element=p.node.id)
        return build_graph(g.class_name, g.nodes + (p.node,), g.edges)

    if p.op is PerturbationOp.REMOVE_NODE:
        if p.node_id not in ids:
            raise UnknownNodeError(f"no node {p.node_id!r}", element=p.node_id)
        if len(g.nodes) == 1:
            raise PerturbationError("cannot remove the last node", element=p.node_id)
        nodes = tuple(n for n in g.nodes if n.id != p.node_id)
        edges = tuple(e for e in g.edges if p.node_id not in e.pair)
        return build_graph(g.class_name, nodes, edges)

    if p.op is PerturbationOp.ADD_EDGE:
        assert p.a is not None and p.b is not None and p.edge_kind is not None
        if p.a == p.b:
            raise SelfLoopError(f"edge {p.a!r}-{p.b!r} would be a self-loop", element=p.a)
        for endpoint in (p.a, p.b):
            if endpoint not in ids:
                raise UnknownNodeError(f"no node {endpoint!r}", element=endpoint)
        if g.has_edge(p.a, p.b):
            raise DuplicateEdgeError(f"edge {p.a!r}-{p.b!r} already exists", element=f"{p.a}-{p.b}")
        return build_graph(g.class_name, g.nodes, g.edges + (MemberEdge(p.a, p.b, p.edge_kind),))

    if p.op is PerturbationOp.REMOVE_EDGE:
        assert p.a is not None and p.b is not None
        pair = (p.a, p.b) if p.a <= p.b else (p.b, p.a)
        kept = tuple(e for e in g.edges if e.pair != pair)
        if len(kept) == len(g.edges):
            raise UnknownNodeError(f"no edge {p.a!r}-{p.b!r}", element=f"{p.a}-{p.b}")
        return build_graph(g.class_name, g.nodes, kept)

    # CHANGE_KIND
    if p.node_id not in ids:
        raise UnknownNodeError(f"no node {p.node_id!r}", element=p.node_id)
    assert p.member_kind is not None
    nodes = tuple(
        MemberNode(n.id, p.member_kind, n.label) if n.id == p.node_id else n
        for n in g.nodes
    )
    return build_graph(g.class_name, nodes, g.edges)


def invert_perturbation(p: Perturbation, before: MemberGraph) -> tuple[Perturbation, ...]:
    """Perturbation sequence that undoes `p` when applied after it.

    `before` is the graph p was applied to (needed to restore removed
    structure). remove_node inverts to an add_node plus re-adding every
    incident edge.
    """
    if p.op is PerturbationOp.ADD_NODE:
        assert p.node is not None
        return (Perturbation(op=PerturbationOp.REMOVE_NODE, node_id=p.node.id),)
    if p.op is PerturbationOp.REMOVE_NODE:
        node = before.node(p.node_id)  # raises if unknown
        restore_edges = tuple(
            Perturbation(op=PerturbationOp.ADD_EDGE, a=e.a, b=e.b, edge_kind=e.kind)
            for e in before.edges
            if p.node_id in e.pair
        )
        return (Perturbation(op=PerturbationOp.ADD_NODE, node=node),) + restore_edges
    if p.op is PerturbationOp.ADD_EDGE:
        return (Perturbation(op=PerturbationOp.REMOVE_EDGE, a=p.a, b=p.b),)
    if p.op is PerturbationOp.REMOVE_EDGE:
        pair = (p.a, p.b) if p.a <= p.b else (p.b, p.a)
        for e in before.edges:
            if e.pair == pair:
                return (Perturbation(op=PerturbationOp.ADD_EDGE, a=e.a, b=e.b, edge_kind=e.kind),)
        raise UnknownNodeError(f"no edge {p.a!r}-{p.b!r}", element=f"{p.a}-{p.b}")
    # CHANGE_KIND
    old = before.node(p.node_id)
    return (Perturbation(op=PerturbationOp.CHANGE_KIND, node_id=p.node_id, member_kind=old.kind),)
