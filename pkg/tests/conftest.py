import os
from pathlib import Path

import networkx as nx
import pytest

from mincond.core.graph import Graph, write_edge_list

os.environ.setdefault("QT_QPA_PLATFORM", "offscreen")

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def random_connected_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p) restricted to its largest component."""
    g = nx.gnp_random_graph(n, p, seed=seed)
    component = max(nx.connected_components(g), key=len)
    return Graph.from_networkx(nx.convert_node_labels_to_integers(g.subgraph(component)), name=f"gnp{seed}")


def atlas_graphs(min_nodes: int = 2, max_nodes: int = 5):
    """Every connected graph on ``min_nodes``..``max_nodes`` vertices, up to isomorphism."""
    for g in nx.graph_atlas_g():
        if min_nodes <= g.number_of_nodes() <= max_nodes and g.number_of_edges() and nx.is_connected(g):
            yield Graph.from_networkx(g, name=g.name or "atlas")


@pytest.fixture
def triangle() -> Graph:
    return Graph.from_edges([(0, 1), (1, 2), (0, 2)], name="triangle")


@pytest.fixture
def path4() -> Graph:
    return Graph.from_edges([(0, 1), (1, 2), (2, 3)], name="path")


@pytest.fixture
def barbell() -> Graph:
    # two triangles {0, 1, 2} and {3, 4, 5} joined by the edge 2-3
    return Graph.from_networkx(nx.barbell_graph(3, 0), name="barbell")


@pytest.fixture
def k4() -> Graph:
    return Graph.from_networkx(nx.complete_graph(4), name="k4")


@pytest.fixture
def zachary() -> Graph:
    return Graph.from_networkx(nx.karate_club_graph(), name="zachary")


@pytest.fixture
def barbell_file(tmp_path: Path, barbell: Graph) -> Path:
    path = tmp_path / "barbell.txt"
    write_edge_list(barbell, str(path))
    return path


def dataset_path(name: str) -> Path:
    path = DATA_DIR / f"{name}.txt"
    if not path.exists():
        pytest.skip(f"dataset {name} not found under {DATA_DIR}")
    return path
