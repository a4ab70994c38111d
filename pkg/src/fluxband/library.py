"""Built-in periodic graphs with closed-form spectral data.

Each constructor returns the validated fundamental graph together with an
oracle (band intervals, flat bands, measure of the potential-free operator)
when a closed form is known.  The oracles are what the test suite holds the
sweep pipeline against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .graph import Edge, FundamentalGraph, Vertex, validate

__all__ = [
    "BadFraction",
    "BandOracle",
    "NamedGraph",
    "square_lattice",
    "harper",
    "hexagonal",
    "star_lattice",
    "figure1_graph",
]


class BadFraction(ValueError):
    """Flux fraction must be p/q with q >= 1 and gcd(|p|, q) = 1."""


@dataclass(frozen=True)
class BandOracle:
    """Closed-form band data of the potential-free operator."""

    bands: tuple[tuple[float, float], ...]
    flat_bands: tuple[tuple[float, int], ...]
    measure: float


@dataclass(frozen=True)
class NamedGraph:
    name: str
    graph: FundamentalGraph
    oracle: Optional[BandOracle] = None


def _unit_index(d: int, j: int) -> tuple[int, ...]:
    return tuple(1 if k == j else 0 for k in range(d))


def square_lattice(d: int = 2) -> NamedGraph:
    """The d-dimensional integer lattice: one vertex, d loops.

    Spectrum [0, 4d] in one band, independent of the magnetic potential
    (betti equals d).
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    vertices = (Vertex(0, "v0"),)
    edges = tuple(Edge(j, 0, 0, _unit_index(d, j)) for j in range(d))
    graph = validate(FundamentalGraph(d, vertices, edges))
    oracle = BandOracle(bands=(((0.0, 4.0 * d)),), flat_bands=(), measure=4.0 * d)
    return NamedGraph(f"square_lattice_d{d}", graph, oracle)


def harper(p: int, q: int) -> NamedGraph:
    """Uniform flux 2*pi*p/q per square-lattice plaquette, on the 2q x 2q cell.

    The symmetric-gauge potential (-B*n2/2 on horizontal hops, +B*n1/2 on
    vertical hops, B = 2*pi*p/q) is periodic with period 2q in both
    directions, so the cell holds (2q)^2 vertices and 2*(2q)^2 edges.
    """
    if q < 1 or math.gcd(abs(p), q) != 1:
        raise BadFraction(f"got p={p}, q={q}")
    flux = 2.0 * math.pi * p / q
    size = 2 * q

    def vid(x: int, y: int) -> int:
        return (x % size) + size * (y % size)

    vertices = tuple(
        Vertex(vid(x, y), f"v{x}_{y}")
        for y in range(size)
        for x in range(size)
    )
    # vertex declaration above must match vid: x fastest
    edges = []
    eid = 0
    for y in range(size):
        for x in range(size):
            ix = (1, 0) if x == size - 1 else (0, 0)
            edges.append(Edge(eid, vid(x, y), vid(x + 1, y), ix, 1.0, -flux * y / 2.0))
            eid += 1
            iy = (0, 1) if y == size - 1 else (0, 0)
            edges.append(Edge(eid, vid(x, y), vid(x, y + 1), iy, 1.0, flux * x / 2.0))
            eid += 1
    graph = validate(FundamentalGraph(2, vertices, tuple(edges)))
    oracle = None
    if p == 0:
        oracle = BandOracle(bands=((0.0, 8.0),), flat_bands=(), measure=8.0)
    return NamedGraph(f"harper_{p}_{q}", graph, oracle)


def hexagonal() -> NamedGraph:
    """Honeycomb lattice: two vertices joined by three edges.

    Regular bipartite of degree 3; spectrum [0, 6] for every magnetic
    potential (betti equals d), the two bands touching at 3.
    """
    vertices = (Vertex(0, "a"), Vertex(1, "b"))
    edges = (
        Edge(0, 0, 1, (0, 0)),
        Edge(1, 0, 1, (1, 0)),
        Edge(2, 0, 1, (0, 1)),
    )
    graph = validate(FundamentalGraph(2, vertices, edges))
    oracle = BandOracle(
        bands=((0.0, 3.0), (3.0, 6.0)),
        flat_bands=(),
        measure=6.0,
    )
    return NamedGraph("hexagonal", graph, oracle)


def star_lattice(d: int, nu: int) -> NamedGraph:
    """Integer lattice decorated with nu - 1 pendant vertices per cell.

    Vertices v1..v(nu-1) hang off the lattice vertex by single spokes; the
    lattice vertex carries the d loops.  The potential-free operator has
    two dispersing bands [0, x - sqrt(x^2 - 4d)] and [nu, x + sqrt(x^2 - 4d)]
    with x = (nu + 4d) / 2, a flat band at 1 of multiplicity nu - 2, and
    spectrum measure 4d, all independent of the magnetic potential.
    """
    if d < 1 or nu < 2:
        raise ValueError("need d >= 1 and nu >= 2")
    vertices = tuple(
        Vertex(k, f"v{k + 1}" if k < nu - 1 else "hub") for k in range(nu)
    )
    hub = nu - 1
    zero = (0,) * d
    edges = [Edge(k, k, hub, zero) for k in range(nu - 1)]
    for j in range(d):
        edges.append(Edge(nu - 1 + j, hub, hub, _unit_index(d, j)))
    graph = validate(FundamentalGraph(d, vertices, tuple(edges)))

    x = (nu + 4.0 * d) / 2.0
    root = math.sqrt(x * x - 4.0 * d)
    flats = ((1.0, nu - 2),) if nu >= 3 else ()
    oracle = BandOracle(
        bands=((0.0, x - root), (float(nu), x + root)),
        flat_bands=flats,
        measure=4.0 * d,
    )
    return NamedGraph(f"star_d{d}_nu{nu}", graph, oracle)


def figure1_graph() -> NamedGraph:
    """Five-vertex planar fundamental graph used for index bookkeeping tests.

    Four zero-index edges form a spanning tree; the three remaining edges
    carry indices (0,1), (1,1) and (1,0).  No closed-form oracle.
    """
    vertices = tuple(Vertex(k, f"v{k + 1}") for k in range(5))
    edges = (
        Edge(0, 0, 1, (0, 0)),
        Edge(1, 0, 3, (0, 0)),
        Edge(2, 0, 4, (0, 0)),
        Edge(3, 3, 2, (0, 0)),
        Edge(4, 0, 2, (0, 1)),
        Edge(5, 2, 0, (1, 1)),
        Edge(6, 3, 1, (1, 0)),
    )
    graph = validate(FundamentalGraph(2, vertices, edges))
    return NamedGraph("figure1", graph)
