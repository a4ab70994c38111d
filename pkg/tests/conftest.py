"""Shared builders for the test corpus.

Random graphs are built as a random spanning tree (zero-index edges) plus a
unimodular pair of extra edges, plus optional random extras, loops and
parallel edges, so every draw passes validation with probability one.
"""

from __future__ import annotations

import numpy as np
import pytest

from fluxband import Edge, FundamentalGraph, OneForm, Vertex, validate
from fluxband.topology import tree_gauge


def unit_index(d: int, j: int) -> tuple[int, ...]:
    return tuple(1 if k == j else 0 for k in range(d))


def random_graph(
    rng: np.random.Generator,
    nu_max: int = 6,
    d: int = 2,
    max_extra: int = 4,
    potentials: bool = False,
    weights: bool = False,
) -> FundamentalGraph:
    nu = int(rng.integers(1, nu_max + 1))
    qvals = rng.uniform(-1.0, 1.0, size=nu) if potentials else np.zeros(nu)
    wvals = rng.uniform(0.5, 2.0, size=nu) if weights else np.ones(nu)
    vertices = tuple(
        Vertex(i, f"v{i}", float(qvals[i]), float(wvals[i])) for i in range(nu)
    )

    def rand_vertex() -> int:
        return int(rng.integers(0, nu))

    edges: list[Edge] = []

    def add(tail: int, head: int, index: tuple[int, ...]) -> None:
        w = float(rng.uniform(0.5, 2.0)) if weights else 1.0
        edges.append(Edge(len(edges), tail, head, index, w))

    for child in range(1, nu):
        add(int(rng.integers(0, child)), child, (0,) * d)
    for j in range(d):
        add(rand_vertex(), rand_vertex(), unit_index(d, j))
    for _ in range(int(rng.integers(0, max_extra + 1))):
        add(rand_vertex(), rand_vertex(), tuple(int(k) for k in rng.integers(-2, 3, size=d)))
    return validate(FundamentalGraph(d, vertices, tuple(edges)))


def random_beta_d_graph(rng: np.random.Generator, nu_max: int = 6, d: int = 2) -> FundamentalGraph:
    """Random graph whose cotree has exactly d edges, in tree-index form."""
    nu = int(rng.integers(2, nu_max + 1))
    vertices = tuple(Vertex(i, f"v{i}") for i in range(nu))
    edges: list[Edge] = []
    for child in range(1, nu):
        edges.append(Edge(len(edges), int(rng.integers(0, child)), child, (0,) * d))
    for j in range(d):
        u, v = int(rng.integers(0, nu)), int(rng.integers(0, nu))
        edges.append(Edge(len(edges), u, v, unit_index(d, j)))
    g = validate(FundamentalGraph(d, vertices, tuple(edges)))
    return validate(tree_gauge(g))


def random_one_form(rng: np.random.Generator, graph: FundamentalGraph, scale: float = np.pi) -> OneForm:
    return OneForm.from_values(rng.uniform(-scale, scale, size=len(graph.edges)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240)
