import logging
import os
from dataclasses import dataclass, field
from typing import Hashable, Iterable

import networkx as nx
import numpy as np

from mincond.core.errors import EmptyGraph, MalformedLine, UndecodableFile

logger = logging.getLogger(__name__)

COMMENT_PREFIXES = ("#", "%")


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Immutable undirected simple graph in compressed adjacency form.

    Vertices are the contiguous ids 0..n-1. The neighbours of v are
    ``indices[indptr[v]:indptr[v + 1]]``, sorted ascending.
    ``labels[v]`` is the label v had in the input.
    """

    n: int
    m: int
    indptr: np.ndarray
    indices: np.ndarray
    labels: tuple[str, ...]
    name: str = "graph"
    degree: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        degree = np.diff(self.indptr).astype(np.int64)
        object.__setattr__(self, "degree", degree)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        degree.setflags(write=False)
        assert int(degree.sum()) == 2 * self.m, "sum of degrees must equal 2m"
        assert len(self.labels) == self.n

    @classmethod
    def from_edges(cls, pairs: Iterable[tuple[Hashable, Hashable]], name: str = "graph") -> "Graph":
        """
        Builds a graph from label pairs.

        Labels get ids in first-appearance order. Self-loops and repeated
        edges are dropped; a self-loop does not introduce its label.
        """
        ids: dict[str, int] = {}
        edges: set[tuple[int, int]] = set()
        for a, b in pairs:
            a, b = str(a), str(b)
            if a == b:
                continue
            u = ids.setdefault(a, len(ids))
            v = ids.setdefault(b, len(ids))
            edges.add((u, v) if u < v else (v, u))
        if not edges:
            raise EmptyGraph(f"{name}: no edges left after dropping self-loops and duplicates")
        return cls._from_id_edges(len(ids), edges, tuple(ids), name)

    @classmethod
    def from_networkx(cls, nx_graph: nx.Graph, name: str = "graph") -> "Graph":
        """Node order of ``nx_graph`` becomes the vertex id order; isolated nodes are kept."""
        nodes = list(nx_graph.nodes)
        ids = {node: i for i, node in enumerate(nodes)}
        edges = set()
        for a, b in nx_graph.edges:
            u, v = ids[a], ids[b]
            if u != v:
                edges.add((u, v) if u < v else (v, u))
        if not edges:
            raise EmptyGraph(f"{name}: graph has no edges")
        return cls._from_id_edges(len(nodes), edges, tuple(str(node) for node in nodes), name)

    @classmethod
    def _from_id_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels: tuple[str, ...], name: str) -> "Graph":
        edge_array = np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)
        m = len(edge_array)
        # both orientations, grouped by source and sorted by target
        sources = np.concatenate([edge_array[:, 0], edge_array[:, 1]])
        targets = np.concatenate([edge_array[:, 1], edge_array[:, 0]])
        order = np.lexsort((targets, sources))
        indices = targets[order]
        counts = np.bincount(sources, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n=n, m=m, indptr=indptr, indices=indices, labels=labels, name=name)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = int(np.searchsorted(nbrs, v))
        return i < len(nbrs) and int(nbrs[i]) == v

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.n else 0

    @property
    def sources(self) -> np.ndarray:
        """Source vertex of every entry of ``indices``."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degree)

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges with the smaller id first, sorted."""
        src = self.sources
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges().tolist())
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and self.labels == other.labels
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None


def load_edge_list(path: str) -> Graph:
    """
    Loads an undirected graph from a whitespace-separated edge list.

    Args:
        path: UTF-8 text file, one edge per line. Lines starting with '#'
            or '%' and blank lines are skipped.

    Returns:
        The cleaned simple graph, named after the file stem.

    Raises:
        MalformedLine: a line does not hold exactly two tokens.
        EmptyGraph: no edge survives cleaning.
        UndecodableFile: the file is not valid UTF-8.
        OSError: the file cannot be read.
    """
    name = os.path.splitext(os.path.basename(path))[0]
    pairs = []
    with open(path, encoding="utf-8") as f:
        try:
            for line_number, line in enumerate(f, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith(COMMENT_PREFIXES):
                    continue
                tokens = stripped.split()
                if len(tokens) != 2:
                    raise MalformedLine(path, line_number, stripped)
                pairs.append((tokens[0], tokens[1]))
        except UnicodeDecodeError as e:
            raise UndecodableFile(path, e.reason) from e

    graph = Graph.from_edges(pairs, name=name)
    logger.info("Loaded %s: n=%d m=%d", name, graph.n, graph.m)
    return graph


def write_edge_list(graph: Graph, path: str) -> None:
    """
    Writes ``graph`` so that ``load_edge_list`` reproduces it exactly.

    Edges are ordered by (larger id, smaller id) with the smaller endpoint
    first on the line, which makes first-appearance order match the ids of
    any graph that was itself loaded from an edge list.
    """
    edges = graph.edges()
    order = np.lexsort((edges[:, 0], edges[:, 1]))
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    with open(path, "w", encoding="utf-8") as f:
        for u, v in edges[order].tolist():
            f.write(f"{graph.labels[u]} {graph.labels[v]}\n")


def is_connected(graph: Graph) -> bool:
    return nx.is_connected(graph.to_networkx())


def largest_connected_component(graph: Graph) -> Graph:
    """
    Induced subgraph on the largest component, relabelled contiguously.

    Ties go to the component holding the smallest vertex id. Vertices keep
    their relative order and their original labels.
    """
    components = list(nx.connected_components(graph.to_networkx()))
    if len(components) == 1:
        return graph

    chosen = max(components, key=lambda comp: (len(comp), -min(comp)))
    keep = np.array(sorted(chosen), dtype=np.int64)
    new_id = {int(old): new for new, old in enumerate(keep)}
    edges = [
        (new_id[u], new_id[v])
        for u, v in graph.edges().tolist()
        if u in new_id and v in new_id
    ]
    labels = tuple(graph.labels[old] for old in keep)
    logger.info(
        "%s: kept largest component with %d of %d vertices", graph.name, len(keep), graph.n
    )
    return Graph._from_id_edges(len(keep), edges, labels, graph.name)
