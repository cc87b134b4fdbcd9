"""Directed road graph, shortest travel times and the precomputed matrix.

Edge travel times are integer seconds, rounded half up at the edge level, so
every downstream comparison is exact integer arithmetic.  Unreachable pairs
are reported as ``None`` (a real sentinel, never a large finite number).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from heapq import heappop, heappush
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import EmptyGraph, GraphViolation, MatrixIncomplete, UnknownNode
from .kb import Coord, Position

EARTH_RADIUS_M = 6_371_000.0
DEFAULT_SPEED_KMH = 30.0


def edge_seconds(length_m: float, speed_kmh: float) -> int:
    """Travel time of one edge in integer seconds, rounded half up."""
    seconds = length_m * 3.6 / speed_kmh
    return int(math.floor(seconds + 0.5))


def haversine_m(a: Coord, b: Coord) -> float:
    """Great-circle distance in metres (mean Earth radius 6 371 000 m)."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


@dataclass(frozen=True)
class RoadEdge:
    frm: str
    to: str
    length_m: float
    speed_kmh: float
    seconds: int


@dataclass(frozen=True)
class RoadGraph:
    nodes: dict[str, Coord]
    edges: tuple[RoadEdge, ...]
    adjacency: dict[str, list[tuple[str, int]]] = field(compare=False, repr=False)
    fingerprint: str = field(compare=False, default="")


def build_graph(nodes: Mapping[str, Coord], edges: Iterable[Mapping[str, Any]]) -> RoadGraph:
    """Validate raw node/edge data and build the adjacency structure."""
    node_map: dict[str, Coord] = {}
    for node_id, coord in nodes.items():
        if not isinstance(node_id, str) or not node_id:
            raise GraphViolation(f"node id must be a non-empty string: {node_id!r}")
        if (
            not isinstance(coord, (list, tuple))
            or len(coord) != 2
            or not all(isinstance(x, (int, float)) for x in coord)
        ):
            raise GraphViolation(f"node {node_id}: coordinate must be [lat, lon]")
        node_map[node_id] = (float(coord[0]), float(coord[1]))

    edge_list: list[RoadEdge] = []
    adjacency: dict[str, list[tuple[str, int]]] = {node: [] for node in node_map}
    for raw in edges:
        frm, to = raw.get("from"), raw.get("to")
        if frm not in node_map:
            raise GraphViolation(f"edge references missing node {frm!r}")
        if to not in node_map:
            raise GraphViolation(f"edge references missing node {to!r}")
        length = raw.get("length_m")
        if not isinstance(length, (int, float)) or length <= 0:
            raise GraphViolation(f"edge {frm}->{to}: length_m must be > 0, got {length!r}")
        speed = raw.get("speed_kmh", DEFAULT_SPEED_KMH)
        if not isinstance(speed, (int, float)) or speed <= 0:
            raise GraphViolation(f"edge {frm}->{to}: speed_kmh must be > 0, got {speed!r}")
        edge = RoadEdge(frm, to, float(length), float(speed), edge_seconds(length, speed))
        edge_list.append(edge)
        adjacency[frm].append((to, edge.seconds))

    for targets in adjacency.values():
        targets.sort()
    canonical = json.dumps(
        {
            "nodes": {n: list(c) for n, c in sorted(node_map.items())},
            "edges": sorted(
                [e.frm, e.to, e.length_m, e.speed_kmh] for e in edge_list
            ),
        },
        sort_keys=True,
    )
    fingerprint = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
    return RoadGraph(
        nodes=node_map,
        edges=tuple(edge_list),
        adjacency=adjacency,
        fingerprint=fingerprint,
    )


def graph_from_json_dict(data: Mapping[str, Any]) -> RoadGraph:
    if not isinstance(data, Mapping):
        raise GraphViolation("graph file must be a JSON object")
    unknown = set(data) - {"nodes", "edges"}
    if unknown:
        raise GraphViolation(f"graph file has unknown keys: {sorted(unknown)}")
    nodes = data.get("nodes")
    if not isinstance(nodes, Mapping):
        raise GraphViolation("graph 'nodes' must be an object of id -> [lat, lon]")
    edges = data.get("edges", [])
    if not isinstance(edges, list):
        raise GraphViolation("graph 'edges' must be a list")
    return build_graph(nodes, edges)


def load_graph(path: str | Path) -> RoadGraph:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return graph_from_json_dict(data)


def snap(position: Position, graph: RoadGraph) -> str:
    """Resolve a position to its road-network node.

    Coordinates snap to the haversine-nearest node, ties broken by the
    smallest node id; positions already pinned to a node are validated only.
    """
    if not graph.nodes:
        raise EmptyGraph("cannot snap onto an empty graph")
    if position.node is not None:
        if position.node not in graph.nodes:
            raise UnknownNode(f"position references unknown node {position.node!r}")
        return position.node
    best_id = None
    best_dist = math.inf
    for node_id, coord in graph.nodes.items():
        dist = haversine_m(position.coord, coord)
        if dist < best_dist or (dist == best_dist and (best_id is None or node_id < best_id)):
            best_dist = dist
            best_id = node_id
    return best_id


def shortest_times_from(graph: RoadGraph, source: str) -> dict[str, int]:
    """Single-source shortest travel times (Dijkstra over integer seconds)."""
    if source not in graph.nodes:
        raise UnknownNode(f"unknown node {source!r}")
    dist: dict[str, int] = {source: 0}
    heap: list[tuple[int, str]] = [(0, source)]
    adjacency = graph.adjacency
    while heap:
        d, u = heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adjacency[u]:
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heappush(heap, (nd, v))
    return dist


def shortest_time(graph: RoadGraph, frm: str, to: str) -> int | None:
    """Exact shortest travel time between two nodes; None when unreachable."""
    if to not in graph.nodes:
        raise UnknownNode(f"unknown node {to!r}")
    return shortest_times_from(graph, frm).get(to)


@dataclass(frozen=True)
class TravelTimeMatrix:
    """Precomputed origin x destination travel times in integer seconds."""

    origins: tuple[str, ...]
    destinations: tuple[str, ...]
    seconds: tuple[tuple[int | None, ...], ...]
    _row_index: dict = field(init=False, repr=False, compare=False, default_factory=dict)
    _col_index: dict = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        if len(self.seconds) != len(self.origins):
            raise MatrixIncomplete("matrix rows do not match origins")
        for row in self.seconds:
            if len(row) != len(self.destinations):
                raise MatrixIncomplete("matrix row length does not match destinations")
        self._row_index.update({o: i for i, o in enumerate(self.origins)})
        self._col_index.update({d: j for j, d in enumerate(self.destinations)})

    def get(self, origin: str, destination: str) -> int | None:
        i = self._row_index.get(origin)
        j = self._col_index.get(destination)
        if i is None or j is None:
            raise MatrixIncomplete(
                f"matrix misses pair ({origin!r}, {destination!r})",
                origin=origin,
                destination=destination,
            )
        return self.seconds[i][j]

    def to_json_dict(self) -> dict:
        return {
            "origins": list(self.origins),
            "destinations": list(self.destinations),
            "seconds": [list(row) for row in self.seconds],
        }


def matrix_from_json_dict(data: Mapping[str, Any]) -> TravelTimeMatrix:
    try:
        origins = tuple(data["origins"])
        destinations = tuple(data["destinations"])
        seconds = tuple(
            tuple(None if v is None else int(v) for v in row) for row in data["seconds"]
        )
    except (KeyError, TypeError) as exc:
        raise MatrixIncomplete(f"malformed matrix payload: {exc}") from None
    return TravelTimeMatrix(origins=origins, destinations=destinations, seconds=seconds)


def build_matrix(
    graph: RoadGraph,
    origins: Sequence[tuple[str, Position]],
    destinations: Sequence[tuple[str, Position]],
) -> TravelTimeMatrix:
    """Travel-time matrix between snapped places.

    Runs one single-source shortest-path pass per distinct origin node, so
    entries agree exactly with pairwise ``shortest_time`` calls.
    """
    if (origins or destinations) and not graph.nodes:
        raise EmptyGraph("cannot build a matrix over an empty graph")
    origin_nodes = [snap(pos, graph) for _, pos in origins]
    dest_nodes = [snap(pos, graph) for _, pos in destinations]
    by_node: dict[str, dict[str, int]] = {}
    for node in origin_nodes:
        if node not in by_node:
            by_node[node] = shortest_times_from(graph, node)
    rows = tuple(
        tuple(by_node[o].get(d) for d in dest_nodes) for o in origin_nodes
    )
    return TravelTimeMatrix(
        origins=tuple(pid for pid, _ in origins),
        destinations=tuple(pid for pid, _ in destinations),
        seconds=rows,
    )
