import pytest

from src.lattice import GraphBuilder, modular_ray, quadratic_growth, rooted_tree_lattice


@pytest.fixture(scope="session")
def ray2():
    return modular_ray(2, 14)


@pytest.fixture(scope="session")
def ray2_shallow():
    """元素模式下所有群阶都不超过枚举上限"""
    return modular_ray(2, 12)


@pytest.fixture(scope="session")
def quad2():
    return quadratic_growth(2, 12)


@pytest.fixture(scope="session")
def binary8():
    return rooted_tree_lattice([2], 8, 11)


@pytest.fixture
def triangle_loop():
    """平凡群的三角形回路"""
    builder = GraphBuilder(name="triangle")
    for v in ("a", "b", "c"):
        builder.add_vertex(v)
    builder.add_edge_pair("ab", "ba", "a", "b")
    builder.add_edge_pair("bc", "cb", "b", "c")
    builder.add_edge_pair("ca", "ac", "c", "a")
    return builder.build("a")


@pytest.fixture
def single_loop():
    """一个顶点、一条几何回路、平凡群"""
    builder = GraphBuilder(name="loop")
    builder.add_vertex("o")
    builder.add_edge_pair("e", "E", "o", "o")
    return builder.build("o")


@pytest.fixture(scope="session")
def theta():
    """两个顶点之间三条边、平凡群：覆盖树 3-正则"""
    builder = GraphBuilder(name="theta")
    builder.add_vertex("a").add_vertex("b")
    for name in ("x", "y", "z"):
        builder.add_edge_pair(name, name.upper(), "a", "b")
    return builder.build("a")
