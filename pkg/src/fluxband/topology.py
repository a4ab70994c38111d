"""Spanning trees, basis cycles, magnetic fluxes and flux reductions.

Everything gauge-related lives here.  A breadth-first spanning tree fixes a
basis of cycles, one per cotree edge; the flux of a vector potential through
each basis cycle is the only gauge-invariant content of the potential, and
the modified potential supported on the cotree reproduces the same fiber
spectra.  Vertex coordinates built along the tree turn arbitrary edge-index
data into the tree-based convention (tree edges indexed zero) in which the
minimal-flux change of variables and the rank criteria are stated.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graph import FundamentalGraph, OneForm, OrientedEdge

__all__ = [
    "NotCotreeEdge",
    "RankDeficient",
    "SpanningTree",
    "FluxData",
    "MinimalFluxData",
    "spanning_tree",
    "betti",
    "flux_data",
    "cycle_for",
    "flux",
    "modified_form",
    "check_span",
    "minimal_reduction",
    "gauge_function",
    "gauge_shift",
    "tree_gauge",
    "zero_phase_point",
    "principal_flux",
    "wrap_torus",
]

TWO_PI = 2.0 * math.pi


class NotCotreeEdge(ValueError):
    """Basis cycles exist only for cotree edges."""


class RankDeficient(ValueError):
    """Could not select d independent cycle indices (should be impossible
    on a validated graph)."""


def principal_flux(x: float) -> float:
    """Reduce an angle into (-pi, pi], keeping pi rather than -pi."""
    r = x - TWO_PI * math.floor(x / TWO_PI)
    if r > math.pi:
        r -= TWO_PI
    return r


def wrap_torus(theta: np.ndarray) -> np.ndarray:
    """Wrap quasimomentum components into [-pi, pi)."""
    t = np.asarray(theta, dtype=float)
    return (t + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class SpanningTree:
    """Breadth-first spanning tree rooted at vertex 0.

    ``parent_edge[v]`` is the edge id connecting v to its parent and
    ``parent_forward[v]`` tells whether the stored orientation runs
    parent -> v.  Root entries are -1.
    """

    root: int
    tree_edges: frozenset[int]
    parent_vertex: tuple[int, ...]
    parent_edge: tuple[int, ...]
    parent_forward: tuple[bool, ...]
    depth: tuple[int, ...]


@dataclass(frozen=True)
class FluxData:
    """Tree, cotree, fluxes and the cotree-supported modified potential.

    ``coords[v]`` are integer vertex coordinates accumulated along tree
    edges from the root; ``cycle_indices[k]`` is the total index of the
    basis cycle of cotree edge ``cotree[k]``.  When tree edges carry zero
    indices the cycle index of a cotree edge equals its own index.
    """

    graph: FundamentalGraph
    tree: SpanningTree
    cotree: tuple[int, ...]
    betti: int
    fluxes: tuple[float, ...]
    alpha_star: OneForm
    coords: tuple[tuple[int, ...], ...]
    cycle_indices: tuple[tuple[int, ...], ...]

    def flux_of(self, edge_id: int) -> float:
        return self.fluxes[self.cotree.index(edge_id)]

    def cycle_index(self, edge_id: int) -> tuple[int, ...]:
        return self.cycle_indices[self.cotree.index(edge_id)]


@dataclass(frozen=True)
class MinimalFluxData:
    """Result of the minimal-flux change of variables.

    ``alpha_tilde`` vanishes on tree edges and on the d chosen independent
    cotree edges; only the ``reduced_cotree`` (betti - d edges) may carry
    nonzero values.  Fiber spectra at theta of the original potential match
    those of ``alpha_tilde`` at theta - theta0.
    """

    theta0: tuple[float, ...]
    independent_edges: tuple[int, ...]
    alpha_tilde: OneForm
    reduced_cotree: tuple[int, ...]


def spanning_tree(graph: FundamentalGraph) -> SpanningTree:
    """BFS tree rooted at vertex 0, incident edges examined in id order."""
    nu = graph.nu
    parent_vertex = [-1] * nu
    parent_edge = [-1] * nu
    parent_forward = [True] * nu
    depth = [0] * nu
    tree_edges: set[int] = set()
    seen = [False] * nu
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for oe in graph.incident(u):
            w = oe.head
            if oe.edge.is_loop or seen[w]:
                continue
            seen[w] = True
            parent_vertex[w] = u
            parent_edge[w] = oe.id
            parent_forward[w] = oe.forward
            depth[w] = depth[u] + 1
            tree_edges.add(oe.id)
            queue.append(w)
    return SpanningTree(
        root=0,
        tree_edges=frozenset(tree_edges),
        parent_vertex=tuple(parent_vertex),
        parent_edge=tuple(parent_edge),
        parent_forward=tuple(parent_forward),
        depth=tuple(depth),
    )


def betti(graph: FundamentalGraph) -> int:
    """Number of independent cycles: #edges - #vertices + 1."""
    return len(graph.edges) - graph.nu + 1


def _step_to(graph: FundamentalGraph, tree: SpanningTree, v: int) -> OrientedEdge:
    """Oriented tree edge parent(v) -> v."""
    return graph.oriented(tree.parent_edge[v], tree.parent_forward[v])


def tree_path(graph: FundamentalGraph, tree: SpanningTree, frm: int, to: int) -> list[OrientedEdge]:
    """Oriented tree edges from ``frm`` to ``to`` (possibly empty)."""
    up_from: list[OrientedEdge] = []
    down_to: list[OrientedEdge] = []
    a, b = frm, to
    while tree.depth[a] > tree.depth[b]:
        up_from.append(_step_to(graph, tree, a).reverse())
        a = tree.parent_vertex[a]
    while tree.depth[b] > tree.depth[a]:
        down_to.append(_step_to(graph, tree, b))
        b = tree.parent_vertex[b]
    while a != b:
        up_from.append(_step_to(graph, tree, a).reverse())
        a = tree.parent_vertex[a]
        down_to.append(_step_to(graph, tree, b))
        b = tree.parent_vertex[b]
    return up_from + list(reversed(down_to))


def _tree_coords(graph: FundamentalGraph, tree: SpanningTree) -> list[tuple[int, ...]]:
    """Integer vertex coordinates: root at 0, accumulated along tree edges."""
    d = graph.dimension
    coords: list[Optional[tuple[int, ...]]] = [None] * graph.nu
    coords[tree.root] = (0,) * d
    order = sorted(range(graph.nu), key=lambda v: tree.depth[v])
    for v in order:
        if v == tree.root:
            continue
        step = _step_to(graph, tree, v)
        base = coords[tree.parent_vertex[v]]
        coords[v] = tuple(b + k for b, k in zip(base, step.index))
    return coords  # type: ignore[return-value]


def _cycle_index(edge, coords) -> tuple[int, ...]:
    # total index around the basis cycle: edge index closed up by the tree path
    return tuple(
        k + ct - ch
        for k, ct, ch in zip(edge.index, coords[edge.tail], coords[edge.head])
    )


def flux_data(graph: FundamentalGraph, alpha: Optional[OneForm] = None) -> FluxData:
    """Run the whole flux pipeline for one vector potential.

    ``alpha`` defaults to the potential stored on the edge records.
    """
    if alpha is None:
        alpha = graph.one_form()
    tree = spanning_tree(graph)
    cotree = tuple(e.id for e in graph.edges if e.id not in tree.tree_edges)
    coords = _tree_coords(graph, tree)
    cycle_indices = tuple(_cycle_index(graph.edges[e], coords) for e in cotree)
    fluxes = []
    for e in cotree:
        oe = graph.oriented(e)
        cycle = [oe] + tree_path(graph, tree, oe.head, oe.tail)
        fluxes.append(principal_flux(sum(alpha.on(x) for x in cycle)))
    fluxes = tuple(fluxes)
    values = [0.0] * len(graph.edges)
    for e, f in zip(cotree, fluxes):
        values[e] = f
    return FluxData(
        graph=graph,
        tree=tree,
        cotree=cotree,
        betti=len(cotree),
        fluxes=fluxes,
        alpha_star=OneForm(tuple(values)),
        coords=tuple(coords),
        cycle_indices=cycle_indices,
    )


def cycle_for(fd: FluxData, edge_id: int) -> list[OrientedEdge]:
    """Basis cycle of a cotree edge: the edge, then the tree path closing it.

    Consecutive edges chain head to tail and the walk is closed.
    """
    if edge_id not in fd.cotree:
        raise NotCotreeEdge(f"edge {edge_id} is not a cotree edge")
    oe = fd.graph.oriented(edge_id)
    return [oe] + tree_path(fd.graph, fd.tree, oe.head, oe.tail)


def flux(alpha: OneForm, fd: FluxData, edge_id: int) -> float:
    """Sum of alpha around the basis cycle of ``edge_id``, in (-pi, pi]."""
    total = sum(alpha.on(oe) for oe in cycle_for(fd, edge_id))
    return principal_flux(total)


def modified_form(alpha: OneForm, fd: FluxData) -> OneForm:
    """Cotree-supported potential with the same fluxes as ``alpha``."""
    values = [0.0] * len(fd.graph.edges)
    for e in fd.cotree:
        values[e] = flux(alpha, fd, e)
    return OneForm(tuple(values))


class _IntBasis:
    """Incremental integer lattice basis in row-echelon form."""

    def __init__(self, dim: int):
        self.dim = dim
        self.pivot_rows: dict[int, list[int]] = {}

    def insert(self, vector: Sequence[int]) -> bool:
        """Reduce ``vector`` into the basis; True iff the rank grew."""
        v = [int(x) for x in vector]
        grew = False
        for col in range(self.dim):
            if v[col] == 0:
                continue
            row = self.pivot_rows.get(col)
            if row is None:
                self.pivot_rows[col] = v
                grew = True
                break
            # Euclid on the leading entries until one of them clears
            while v[col] != 0:
                qt = v[col] // row[col]
                if qt != 0:
                    for j in range(col, self.dim):
                        v[j] -= qt * row[j]
                if v[col] == 0:
                    break
                row, v = v, row
                self.pivot_rows[col] = row
        return grew

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def spans_full_lattice(self) -> bool:
        if self.rank != self.dim:
            return False
        det = 1
        for col, row in self.pivot_rows.items():
            det *= abs(row[col])
        return det == 1

    def copy(self) -> "_IntBasis":
        other = _IntBasis(self.dim)
        other.pivot_rows = {c: r[:] for c, r in self.pivot_rows.items()}
        return other


def check_span(graph: FundamentalGraph) -> bool:
    """True iff the basis-cycle indices generate the full integer lattice.

    This is the connectivity criterion for the periodic graph itself.
    """
    tree = spanning_tree(graph)
    coords = _tree_coords(graph, tree)
    basis = _IntBasis(graph.dimension)
    for e in graph.edges:
        if e.id in tree.tree_edges:
            continue
        basis.insert(_cycle_index(e, coords))
    return basis.spans_full_lattice()


def minimal_reduction(fd: FluxData) -> MinimalFluxData:
    """Change of variables killing d of the betti flux parameters.

    Picks the first d cotree edges (declaration order) with independent
    cycle indices, solves the d x d linear system for the momentum shift
    theta0, and returns the reduced potential: zero on tree edges and on
    the chosen edges, flux + <cycle index, theta0> on the rest.  When
    betti == d the reduced potential vanishes identically.
    """
    graph = fd.graph
    d = graph.dimension
    basis = _IntBasis(d)
    chosen: list[int] = []
    for e, idx in zip(fd.cotree, fd.cycle_indices):
        trial = basis.copy()
        if trial.insert(idx):
            basis = trial
            chosen.append(e)
            if len(chosen) == d:
                break
    if len(chosen) < d:
        raise RankDeficient(
            f"only {len(chosen)} independent cycle indices found, need {d}"
        )
    mat = np.array([fd.cycle_index(e) for e in chosen], dtype=float)
    rhs = -np.array([fd.flux_of(e) for e in chosen], dtype=float)
    theta0 = wrap_torus(np.linalg.solve(mat, rhs))

    values = [0.0] * len(graph.edges)
    reduced = tuple(e for e in fd.cotree if e not in chosen)
    for e in reduced:
        idx = np.asarray(fd.cycle_index(e), dtype=float)
        values[e] = fd.flux_of(e) + float(idx @ theta0)
    return MinimalFluxData(
        theta0=tuple(float(t) for t in theta0),
        independent_edges=tuple(chosen),
        alpha_tilde=OneForm(tuple(values)),
        reduced_cotree=reduced,
    )


def gauge_function(alpha: OneForm, fd: FluxData) -> np.ndarray:
    """Vertex function W with W(root) = 0 and, along tree edges,
    W(head) - W(tail) = alpha - alpha_star.

    Path-independence modulo 2*pi across cotree edges holds because alpha
    and alpha_star share all basis-cycle sums modulo 2*pi; conjugating a
    raw fiber matrix by exp(iW) yields the cotree-supported one.
    """
    graph, tree = fd.graph, fd.tree
    w = np.zeros(graph.nu)
    order = sorted(range(graph.nu), key=lambda v: tree.depth[v])
    for v in order:
        if v == tree.root:
            continue
        oe = _step_to(graph, tree, v)
        w[v] = w[tree.parent_vertex[v]] + alpha.on(oe) - fd.alpha_star.on(oe)
    return w


def gauge_shift(graph: FundamentalGraph, alpha: OneForm, g: Sequence[float]) -> OneForm:
    """alpha plus the exact form of the vertex function g: adds g(head)-g(tail)."""
    return OneForm(
        tuple(
            alpha.value(e.id) + float(g[e.head]) - float(g[e.tail])
            for e in graph.edges
        )
    )


def tree_gauge(graph: FundamentalGraph) -> FundamentalGraph:
    """Re-express edge indices relative to tree coordinates.

    Tree edges end up with zero index and cotree edges with their basis-cycle
    index.  This describes the same periodic graph; fiber spectra at every
    quasimomentum are unchanged.
    """
    fd = flux_data(graph, OneForm.zero(graph))
    indices = []
    for e in graph.edges:
        if e.id in fd.tree.tree_edges:
            indices.append((0,) * graph.dimension)
        else:
            indices.append(fd.cycle_index(e.id))
    return graph.with_edge_data(indices=indices)


def _det_int(rows: list[list[int]]) -> int:
    """Exact determinant of a small integer matrix (cofactor expansion)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    det = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        det += (-1) ** j * rows[0][j] * _det_int(minor)
    return det


def zero_phase_point(fd: FluxData, tol: float = 1e-9) -> Optional[np.ndarray]:
    """A quasimomentum at which every cotree phase vanishes modulo 2*pi,
    or None when no such point exists.

    Solves the d chosen cycle equations exactly, then checks the remaining
    cotree congruences over the finitely many solution cosets on the torus.
    """
    graph = fd.graph
    d = graph.dimension
    mr = minimal_reduction(fd)
    mat_int = [list(fd.cycle_index(e)) for e in mr.independent_edges]
    mat = np.array(mat_int, dtype=float)
    base = np.asarray(mr.theta0, dtype=float)
    n_cosets = abs(_det_int(mat_int))
    if n_cosets**d > 4096:
        raise ValueError("too many solution cosets to enumerate")
    inv = np.linalg.inv(mat)
    others = [e for e in fd.cotree if e not in mr.independent_edges]
    for m in itertools.product(range(n_cosets), repeat=d):
        theta = wrap_torus(base + TWO_PI * (inv @ np.asarray(m, dtype=float)))
        ok = all(
            abs(principal_flux(fd.flux_of(e) + float(np.dot(fd.cycle_index(e), theta))))
            <= tol
            for e in others
        )
        if ok:
            return theta
    return None
