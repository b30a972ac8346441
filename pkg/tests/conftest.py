import json

import pytest

from seer.graphs import EdgeKind, MemberEdge, MemberGraph, MemberKind, MemberNode, build_graph

AUTHMANAGER_NODES = [
    ("__init__", "constructor"),
    ("login", "public_method"),
    ("logout", "public_method"),
    ("is_authenticated", "public_method"),
    ("_hash_password", "private_method"),
    ("_log_event", "private_method"),
    ("user_store", "attribute"),
    ("session", "attribute"),
    ("_logger", "attribute"),
]

AUTHMANAGER_EDGES = [
    ("__init__", "_log_event", "method_call"),
    ("login", "_hash_password", "method_call"),
    ("login", "_log_event", "method_call"),
    ("logout", "_log_event", "method_call"),
    ("__init__", "user_store", "attribute_access"),
    ("__init__", "session", "attribute_access"),
    ("__init__", "_logger", "attribute_access"),
    ("login", "user_store", "attribute_access"),
    ("login", "session", "attribute_access"),
    ("logout", "session", "attribute_access"),
    ("is_authenticated", "session", "attribute_access"),
    ("_log_event", "_logger", "attribute_access"),
]


def make_graph(name, nodes, edges) -> MemberGraph:
    return build_graph(
        name,
        [MemberNode(i, MemberKind(k), i) for i, k in nodes],
        [MemberEdge(a, b, EdgeKind(k)) for a, b, k in edges],
    )


@pytest.fixture
def authmanager() -> MemberGraph:
    """Member graph of the authentication-workflow fixture class, hand-derived
    from its source: one constructor, five methods, three attributes."""
    return make_graph("AuthManager", AUTHMANAGER_NODES, AUTHMANAGER_EDGES)


@pytest.fixture
def k2() -> MemberGraph:
    return make_graph(
        "K2",
        [("a1", "attribute"), ("m1", "public_method")],
        [("m1", "a1", "attribute_access")],
    )


@pytest.fixture
def p3() -> MemberGraph:
    return make_graph(
        "P3",
        [("m1", "public_method"), ("m2", "public_method"), ("m3", "public_method")],
        [("m1", "m2", "method_call"), ("m2", "m3", "method_call")],
    )


def graph_doc(g: MemberGraph) -> bytes:
    from seer.graphs import graph_to_dict

    return json.dumps(graph_to_dict(g)).encode("utf-8")
