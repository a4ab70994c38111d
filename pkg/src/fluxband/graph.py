"""Fundamental-domain model of a periodic multigraph.

The infinite periodic graph never appears explicitly.  A ``FundamentalGraph``
stores one vertex per translation orbit and one record per unoriented edge;
each edge carries the integer translation index of its chosen orientation,
a positive weight, and a magnetic potential value.  Loops and parallel edges
are allowed and kept as distinct records.  All types are immutable after
construction, so graphs can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "Disconnected",
    "BadIndexDimension",
    "NonpositiveWeight",
    "LatticeSpanDeficient",
    "Vertex",
    "Edge",
    "OrientedEdge",
    "OneForm",
    "FundamentalGraph",
    "validate",
    "degree",
    "weighted_degree",
]


class GraphError(ValueError):
    """Invalid fundamental-graph data."""


class Disconnected(GraphError):
    """The fundamental graph is not connected (or has an isolated vertex)."""


class BadIndexDimension(GraphError):
    """An edge index vector does not have length d."""


class NonpositiveWeight(GraphError):
    """A vertex or edge weight is not strictly positive."""


class LatticeSpanDeficient(GraphError):
    """Basis-cycle indices do not generate the full integer lattice.

    The periodic graph described by this data would be disconnected.
    """


@dataclass(frozen=True)
class Vertex:
    """One vertex orbit: label, electric potential Q(v), weight m_V(v) > 0."""

    id: int
    name: str
    potential: float = 0.0
    weight: float = 1.0


@dataclass(frozen=True)
class Edge:
    """One unoriented edge, stored with a chosen orientation tail -> head.

    ``index`` is the integer translation index of the stored orientation and
    ``alpha`` the magnetic potential on it; the reverse orientation carries
    the negated index and negated alpha and is never stored.
    """

    id: int
    tail: int
    head: int
    index: tuple[int, ...]
    weight: float = 1.0
    alpha: float = 0.0

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class OrientedEdge:
    """An edge together with a traversal direction."""

    edge: Edge
    forward: bool = True

    @property
    def id(self) -> int:
        return self.edge.id

    @property
    def tail(self) -> int:
        return self.edge.tail if self.forward else self.edge.head

    @property
    def head(self) -> int:
        return self.edge.head if self.forward else self.edge.tail

    @property
    def index(self) -> tuple[int, ...]:
        if self.forward:
            return self.edge.index
        return tuple(-k for k in self.edge.index)

    def reverse(self) -> "OrientedEdge":
        return OrientedEdge(self.edge, not self.forward)


@dataclass(frozen=True)
class OneForm:
    """Antisymmetric real function on oriented edges (a vector potential).

    Only the value on the stored orientation is kept; evaluation on the
    reversed orientation negates it.
    """

    values: tuple[float, ...]

    def value(self, edge_id: int, forward: bool = True) -> float:
        v = self.values[edge_id]
        return v if forward else -v

    def on(self, oriented: OrientedEdge) -> float:
        return self.value(oriented.id, oriented.forward)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @classmethod
    def zero(cls, graph: "FundamentalGraph") -> "OneForm":
        return cls((0.0,) * len(graph.edges))

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "OneForm":
        return cls(tuple(float(v) for v in values))


@dataclass(frozen=True)
class FundamentalGraph:
    """Finite quotient of a periodic graph, with indexed edges."""

    dimension: int
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    @property
    def nu(self) -> int:
        return len(self.vertices)

    def oriented(self, edge_id: int, forward: bool = True) -> OrientedEdge:
        return OrientedEdge(self.edges[edge_id], forward)

    def incident(self, v: int) -> Iterator[OrientedEdge]:
        """Oriented edges starting at v, in edge-id order; loops yield twice."""
        for e in self.edges:
            if e.tail == v:
                yield OrientedEdge(e, True)
            if e.head == v:
                yield OrientedEdge(e, False)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.nu, dtype=int)
        for e in self.edges:
            deg[e.tail] += 1
            deg[e.head] += 1
        return deg

    def weighted_degrees(self) -> np.ndarray:
        """Per vertex: (1/m_V(v)) * sum of m_A over oriented edges at v."""
        acc = np.zeros(self.nu, dtype=float)
        for e in self.edges:
            acc[e.tail] += e.weight
            acc[e.head] += e.weight
        return acc / self.vertex_weights()

    @property
    def kappa_plus(self) -> float:
        return float(self.weighted_degrees().max())

    def potentials(self) -> np.ndarray:
        return np.array([v.potential for v in self.vertices], dtype=float)

    def vertex_weights(self) -> np.ndarray:
        return np.array([v.weight for v in self.vertices], dtype=float)

    def edge_weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.edges], dtype=float)

    def one_form(self) -> OneForm:
        """The vector potential stored on the edge records."""
        return OneForm(tuple(e.alpha for e in self.edges))

    def with_edge_data(self, *, alphas=None, indices=None) -> "FundamentalGraph":
        """Copy with per-edge alpha and/or index columns replaced."""
        new_edges = []
        for e in self.edges:
            a = e.alpha if alphas is None else float(alphas[e.id])
            ix = e.index if indices is None else tuple(int(k) for k in indices[e.id])
            new_edges.append(Edge(e.id, e.tail, e.head, ix, e.weight, a))
        return FundamentalGraph(self.dimension, self.vertices, tuple(new_edges))


def degree(graph: FundamentalGraph, v: int) -> int:
    """Number of oriented edges starting at v; a loop counts twice."""
    return int(graph.degrees()[v])


def weighted_degree(graph: FundamentalGraph, v: int) -> float:
    """Weighted degree (1/m_V(v)) * sum m_A(e) over edges at v.

    Equals ``degree(graph, v)`` when all weights are 1.
    """
    return float(graph.weighted_degrees()[v])


def _check_connected(graph: FundamentalGraph) -> None:
    nu = graph.nu
    if nu == 0:
        raise Disconnected("graph has no vertices")
    adj: list[list[int]] = [[] for _ in range(nu)]
    for e in graph.edges:
        adj[e.tail].append(e.head)
        adj[e.head].append(e.tail)
    seen = [False] * nu
    stack = [0]
    seen[0] = True
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    if not all(seen):
        missing = [graph.vertices[i].name for i, s in enumerate(seen) if not s]
        raise Disconnected(f"vertices unreachable from {graph.vertices[0].name}: {missing}")


def validate(graph: FundamentalGraph) -> FundamentalGraph:
    """Check all structural invariants; return the graph unchanged if valid.

    Raises Disconnected, BadIndexDimension, NonpositiveWeight or
    LatticeSpanDeficient.  Pure and idempotent.
    """
    d = graph.dimension
    if d < 1:
        raise GraphError(f"dimension must be >= 1, got {d}")
    for i, v in enumerate(graph.vertices):
        if v.id != i:
            raise GraphError(f"vertex ids must be consecutive from 0, got {v.id} at {i}")
        if not v.weight > 0:
            raise NonpositiveWeight(f"vertex {v.name!r} has weight {v.weight}")
    nu = graph.nu
    for i, e in enumerate(graph.edges):
        if e.id != i:
            raise GraphError(f"edge ids must be consecutive from 0, got {e.id} at {i}")
        if not (0 <= e.tail < nu and 0 <= e.head < nu):
            raise GraphError(f"edge {e.id} references unknown vertex")
        if len(e.index) != d:
            raise BadIndexDimension(
                f"edge {e.id} has index of length {len(e.index)}, expected {d}"
            )
        if not e.weight > 0:
            raise NonpositiveWeight(f"edge {e.id} has weight {e.weight}")
    _check_connected(graph)
    if graph.degrees().min() < 1:
        raise Disconnected("graph has an isolated vertex")

    from .topology import check_span  # deferred: topology builds on this module

    if not check_span(graph):
        raise LatticeSpanDeficient(
            "basis-cycle indices do not span the full integer lattice"
        )
    return graph
