"""Road network: edge rounding, snapping, shortest paths, matrix laws."""

import json
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from evacrec.errors import EmptyGraph, GraphViolation, UnknownNode
from evacrec.generator import grid_graph_dict
from evacrec.kb import Position
from evacrec.roadnet import (
    RoadGraph,
    build_graph,
    build_matrix,
    edge_seconds,
    graph_from_json_dict,
    haversine_m,
    load_graph,
    shortest_time,
    shortest_times_from,
    snap,
)


def bellman_ford(graph: RoadGraph, source: str) -> dict[str, int | None]:
    """Independent oracle: relax every edge |V|-1 times."""
    dist: dict[str, float] = {n: math.inf for n in graph.nodes}
    dist[source] = 0
    for _ in range(len(graph.nodes) - 1):
        changed = False
        for e in graph.edges:
            if dist[e.frm] + e.seconds < dist[e.to]:
                dist[e.to] = dist[e.frm] + e.seconds
                changed = True
        if not changed:
            break
    return {n: (None if d == math.inf else int(d)) for n, d in dist.items()}


def random_grid(rng: random.Random) -> RoadGraph:
    n = rng.randint(2, 7)  # at most 49 nodes
    return graph_from_json_dict(grid_graph_dict(n, rng=rng))


def test_edge_seconds_rounds_half_up():
    assert edge_seconds(1000, 36) == 100  # 36 km/h is 10 m/s
    assert edge_seconds(175, 36) == 18  # 17.5 rounds up
    assert edge_seconds(174, 36) == 17  # 17.4 rounds down


def test_load_graph_and_validation(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(
        json.dumps(
            {
                "nodes": {"a": [49.0, 2.0], "b": [49.01, 2.0]},
                "edges": [{"from": "a", "to": "b", "length_m": 1000, "speed_kmh": 36}],
            }
        )
    )
    graph = load_graph(path)
    assert graph.edges[0].seconds == 100
    with pytest.raises(GraphViolation):
        build_graph({"a": [0, 0]}, [{"from": "a", "to": "ghost", "length_m": 10}])
    with pytest.raises(GraphViolation):
        build_graph(
            {"a": [0, 0], "b": [0, 1]},
            [{"from": "a", "to": "b", "length_m": -5, "speed_kmh": 30}],
        )
    with pytest.raises(GraphViolation):
        build_graph(
            {"a": [0, 0], "b": [0, 1]},
            [{"from": "a", "to": "b", "length_m": 5, "speed_kmh": 0}],
        )


def test_default_speed_is_30_kmh():
    graph = build_graph({"a": [0, 0], "b": [0, 0.01]}, [{"from": "a", "to": "b", "length_m": 1000}])
    assert graph.edges[0].seconds == edge_seconds(1000, 30) == 120


def test_grid_fixture_counts():
    data = grid_graph_dict(20)
    graph = graph_from_json_dict(data)
    assert len(graph.nodes) == 400
    assert len(graph.edges) == 1520  # 2 * (2 * n * (n - 1)) directed edges


def test_snap_exact_and_tie_break():
    graph = build_graph({"n1": [0.0, 0.001], "n2": [0.0, -0.001]}, [])
    assert snap(Position(coord=(0.0, 0.001)), graph) == "n1"
    # Equidistant between n1 and n2: smallest node id wins.
    assert snap(Position(coord=(0.0, 0.0)), graph) == "n1"
    assert snap(Position(node="n2"), graph) == "n2"
    with pytest.raises(UnknownNode):
        snap(Position(node="ghost"), graph)
    with pytest.raises(EmptyGraph):
        snap(Position(coord=(0.0, 0.0)), build_graph({}, []))


def test_snap_matches_linear_scan():
    rng = random.Random(3)
    graph = graph_from_json_dict(grid_graph_dict(6))
    for _ in range(50):
        coord = (49.39 + rng.random() * 0.03, 2.79 + rng.random() * 0.03)
        expected = min(
            graph.nodes, key=lambda n: (haversine_m(coord, graph.nodes[n]), n)
        )
        assert snap(Position(coord=coord), graph) == expected


def test_line_graph_path_sum():
    nodes = {k: [0.0, i / 100] for i, k in enumerate("abcde")}
    # 30 km/h covers 1 m in 0.12 s; pick lengths giving 10, 20, 30, 40 s legs.
    legs = [("a", "b", 10), ("b", "c", 20), ("c", "d", 30), ("d", "e", 40)]
    edges = [
        {"from": f, "to": t, "length_m": s / 0.12, "speed_kmh": 30} for f, t, s in legs
    ]
    graph = build_graph(nodes, edges)
    assert [e.seconds for e in graph.edges] == [10, 20, 30, 40]
    assert shortest_time(graph, "a", "e") == 100
    assert bellman_ford(graph, "a")["e"] == 100
    assert shortest_time(graph, "a", "a") == 0
    assert shortest_time(graph, "e", "a") is None  # directed: no way back
    with pytest.raises(UnknownNode):
        shortest_time(graph, "a", "ghost")


def test_dijkstra_equals_bellman_ford_on_random_grids():
    rng = random.Random(11)
    for _ in range(8):
        graph = random_grid(rng)
        for source in graph.nodes:
            assert {
                n: d for n, d in bellman_ford(graph, source).items() if d is not None
            } == shortest_times_from(graph, source)


def test_matrix_matches_pairwise_queries():
    rng = random.Random(5)
    graph = random_grid(rng)
    nodes = sorted(graph.nodes)
    origins = [(f"o{i}", Position(node=nodes[i])) for i in range(3)]
    dests = [(f"d{i}", Position(node=nodes[-1 - i])) for i in range(2)]
    m = build_matrix(graph, origins, dests)
    for oid, opos in origins:
        for did, dpos in dests:
            assert m.get(oid, did) == shortest_time(graph, opos.node, dpos.node)


def test_matrix_diagonal_and_disconnection():
    graph = build_graph(
        {"a": [0, 0], "b": [0, 0.01], "c": [0, 5.0]},
        [{"from": "a", "to": "b", "length_m": 500, "speed_kmh": 30}],
    )
    places = [("pa", Position(node="a")), ("pb", Position(node="b"))]
    m = build_matrix(graph, places, places)
    assert m.get("pa", "pa") == 0
    assert m.get("pb", "pb") == 0
    assert m.get("pb", "pa") is None  # one-way street
    island = build_matrix(graph, [("pc", Position(node="c"))], places)
    assert island.seconds == ((None, None),)


def test_matrix_determinism_and_monotonicity():
    rng = random.Random(9)
    data = grid_graph_dict(4, rng=rng)
    g1 = graph_from_json_dict(data)
    g2 = graph_from_json_dict(json.loads(json.dumps(data)))
    nodes = sorted(g1.nodes)
    places = [(n, Position(node=n)) for n in nodes[:6]]
    m1 = build_matrix(g1, places, places)
    m2 = build_matrix(g2, places, places)
    assert json.dumps(m1.to_json_dict()) == json.dumps(m2.to_json_dict())

    # Adding a shortcut edge never increases any finite entry.
    shortcut = dict(data)
    shortcut["edges"] = data["edges"] + [
        {"from": nodes[0], "to": nodes[-1], "length_m": 40.0, "speed_kmh": 50.0}
    ]
    m3 = build_matrix(graph_from_json_dict(shortcut), places, places)
    for i in range(len(places)):
        for j in range(len(places)):
            before = m1.seconds[i][j]
            after = m3.seconds[i][j]
            if before is not None:
                assert after is not None and after <= before


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_triangle_inequality_on_random_grid(seed):
    rng = random.Random(seed)
    graph = random_grid(rng)
    nodes = sorted(graph.nodes)
    sample = rng.sample(nodes, min(5, len(nodes)))
    dist = {n: shortest_times_from(graph, n) for n in sample}
    for a in sample:
        for b in sample:
            for c in sample:
                ab = dist[a].get(b)
                bc = dist[b].get(c)
                ac = dist[a].get(c)
                if ab is not None and bc is not None and ac is not None:
                    assert ac <= ab + bc
        assert dist[a][a] == 0
