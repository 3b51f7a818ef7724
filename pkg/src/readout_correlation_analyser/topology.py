"""
Device coupling graph and minimum connected distances between qubits.
"""

from typing import Dict, Iterable, List, Sequence

import networkx as nx
import numpy as np

from .errors import ValidationError
from .models import UNREACHABLE, DistanceMatrix, Edge, Topology


def build_topology(num_qubits: int, edges: Iterable[Sequence[int]]) -> Topology:
    """
    Validate and normalize a coupling graph.

    Args:
        num_qubits: Number of qubits n (>= 1).
        edges: Pairs (i, j) with 0 <= i, j < n and i != j. Order within a pair
            and duplicates are irrelevant.

    Returns:
        Topology with edges stored as sorted (i < j) tuples.

    Raises:
        ValidationError: Out-of-range endpoint or self-loop.
    """
    if num_qubits < 1:
        raise ValidationError(f"num_qubits must be >= 1, got {num_qubits}")

    normalized = set()
    for edge in edges:
        if len(edge) != 2:
            raise ValidationError(f"edge {list(edge)} must have exactly two endpoints")
        i, j = int(edge[0]), int(edge[1])
        if not (0 <= i < num_qubits and 0 <= j < num_qubits):
            raise ValidationError(
                f"edge ({i}, {j}) has an endpoint outside [0, {num_qubits})"
            )
        if i == j:
            raise ValidationError(f"edge ({i}, {j}) is a self-loop")
        normalized.add((min(i, j), max(i, j)))

    return Topology(num_qubits=num_qubits, edges=tuple(sorted(normalized)))


def builtin_topology(kind: str, num_qubits: int, columns: int = 0) -> Topology:
    """
    Synthetic coupling graphs for studies without a device file.

    Args:
        kind: 'path', 'ring', 'grid' or 'none'.
        num_qubits: Number of qubits.
        columns: Row width for 'grid' (defaults to ceil(sqrt(n))).
    """
    n = num_qubits
    if kind == "path":
        edges: List[Edge] = [(i, i + 1) for i in range(n - 1)]
    elif kind == "ring":
        edges = (
            [(i, (i + 1) % n) for i in range(n)]
            if n > 2
            else [(i, i + 1) for i in range(n - 1)]
        )
    elif kind == "grid":
        width = columns or int(np.ceil(np.sqrt(n)))
        edges = []
        for q in range(n):
            if (q + 1) % width and q + 1 < n:
                edges.append((q, q + 1))
            if q + width < n:
                edges.append((q, q + width))
    elif kind == "none":
        edges = []
    else:
        raise ValidationError(f"unknown builtin topology '{kind}'")
    return build_topology(n, edges)


def coupling_graph(topo: Topology) -> nx.Graph:
    """Undirected graph over every qubit, isolated ones included."""
    graph = nx.Graph()
    graph.add_nodes_from(range(topo.num_qubits))
    graph.add_edges_from(topo.edges)
    return graph


def shortest_path_lengths(topo: Topology, source: int) -> Dict[int, int]:
    """
    Dijkstra from one source with unit edge weights.

    Returns:
        Mapping of every reachable qubit to its hop count from source.
    """
    return dict(nx.single_source_dijkstra_path_length(coupling_graph(topo), source))


def min_distances(topo: Topology) -> DistanceMatrix:
    """
    All-pairs minimum number of coupling edges between qubits.

    Args:
        topo: Validated topology.

    Returns:
        DistanceMatrix with UNREACHABLE for disconnected pairs.
    """
    n = topo.num_qubits
    values = np.full((n, n), UNREACHABLE, dtype=np.int64)
    for source, lengths in nx.all_pairs_dijkstra_path_length(coupling_graph(topo)):
        for target, hops in lengths.items():
            values[source, target] = hops
    return DistanceMatrix(values)
