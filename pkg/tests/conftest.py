import pytest

from hypercomb.bicombing import BicombingEngine
from hypercomb.generators import free_group_ball, free_product_cyclic_ball, ingest_graph
from hypercomb.graph import Graph

SQUARE_TEXT = """\
base v0
radius 2
trust 2
v v0
v v1
v v2
v v3
e a v0 v1 ar
e ar v1 v0 a
e b v1 v2 br
e br v2 v1 b
e c v2 v3 cr
e cr v3 v2 c
e d v3 v0 dr
e dr v0 v3 d
"""


def cycle_graph(n):
    vertices = [f"c{i}" for i in range(n)]
    edges = [(f"c{i}", f"c{(i + 1) % n}") for i in range(n)]
    return Graph.undirected(vertices, edges)


def path_graph(n):
    vertices = [f"p{i}" for i in range(n)]
    edges = [(f"p{i}", f"p{i + 1}") for i in range(n - 1)]
    return Graph.undirected(vertices, edges)


def grid_graph(rows, cols):
    vertices = [f"g{r}_{c}" for r in range(rows) for c in range(cols)]
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((f"g{r}_{c}", f"g{r}_{c + 1}"))
            if r + 1 < rows:
                edges.append((f"g{r}_{c}", f"g{r + 1}_{c}"))
    return Graph.undirected(vertices, edges)


@pytest.fixture(scope="session")
def square_ball():
    return ingest_graph(SQUARE_TEXT)


@pytest.fixture(scope="session")
def f2_r4():
    return free_group_ball(2, 4)


@pytest.fixture(scope="session")
def f2_r6():
    return free_group_ball(2, 6)


@pytest.fixture(scope="session")
def c33_r5():
    return free_product_cyclic_ball([3, 3], 5)


@pytest.fixture(scope="session")
def line_r12():
    return free_product_cyclic_ball([2, 2], 12)


@pytest.fixture(scope="session")
def f2_engine(f2_r6):
    return BicombingEngine(f2_r6)


@pytest.fixture(scope="session")
def c33_engine(c33_r5):
    return BicombingEngine(c33_r5)


@pytest.fixture(scope="session")
def square_engine(square_ball):
    return BicombingEngine(square_ball, delta=2)
