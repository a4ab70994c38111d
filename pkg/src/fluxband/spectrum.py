"""Torus sampling, spectral bands, flat bands, gaps and spectrum measure.

The sweep first applies the minimal-flux change of variables (topology),
then diagonalizes the fiber matrix at every grid point.  The change of
variables only shifts the quasimomentum origin, so the union of spectra is
untouched, while graphs whose residual potential vanishes (betti == d, or
any potential after the shift lands on zero) are swept exactly as in the
zero-field case; their band extrema then sit on the grid points 0 and
(pi, ..., pi), which the grid always contains.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .fiber import assemble_flux, assemble_weighted, eigen
from .graph import FundamentalGraph, OneForm, validate
from .topology import flux_data, minimal_reduction

__all__ = [
    "TorusGrid",
    "BandStructure",
    "FlatBand",
    "PathBands",
    "default_grid",
    "sweep",
    "flat_bands",
    "measure_and_gaps",
    "merge_intervals",
    "band_path",
]

DEFAULT_FLAT_TOL = 1e-9


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on the torus containing 0 and (pi, ..., pi) exactly.

    Per dimension the points are linspace(-pi, pi, n); n must be odd (and
    >= 3) so that 0 is a grid point, and the +pi endpoint duplicates -pi on
    the torus.  Refining n -> 2n - 1 keeps every old point.
    """

    dimension: int
    points_per_dim: int

    def __post_init__(self) -> None:
        n = self.points_per_dim
        if n < 3 or n % 2 == 0:
            raise ValueError(f"points_per_dim must be odd and >= 3, got {n}")

    @property
    def size(self) -> int:
        return self.points_per_dim**self.dimension

    def axis(self) -> np.ndarray:
        return np.linspace(-math.pi, math.pi, self.points_per_dim)

    def points(self) -> np.ndarray:
        """All grid points, shape (n**d, d), lexicographic in the axis index."""
        axes = [self.axis()] * self.dimension
        pts = np.array(list(itertools.product(*axes)))
        return pts.reshape(self.size, self.dimension)

    def mirror_permutation(self) -> np.ndarray:
        """Index permutation sending each grid point to its negation."""
        n = self.points_per_dim
        out = np.zeros(self.size, dtype=int)
        for flat in range(self.size):
            digits = []
            rest = flat
            for _ in range(self.dimension):
                rest, k = divmod(rest, n)
                digits.append(k)
            mirrored = 0
            for k in reversed(digits):
                mirrored = mirrored * n + (n - 1 - k)
            out[flat] = mirrored
        return out


def default_grid(dimension: int, points_per_dim: Optional[int] = None) -> TorusGrid:
    """Default sampling: 33 points per dimension for d <= 2, 9 for d >= 3."""
    if points_per_dim is None:
        if dimension >= 3:
            points_per_dim = 9
            warnings.warn(
                f"dimension {dimension}: defaulting to a coarse 9-point-per-axis grid",
                stacklevel=2,
            )
        else:
            points_per_dim = 33
    return TorusGrid(dimension=dimension, points_per_dim=points_per_dim)


@dataclass(frozen=True)
class FlatBand:
    value: float
    multiplicity: int


@dataclass(frozen=True)
class BandStructure:
    """Sorted eigenvalue branches over a torus grid.

    ``values[n, i]`` is the (n+1)-th eigenvalue at grid point i.  Band n is
    the closed interval swept by branch n; bands are reported from the grid
    without extrapolation unless edge refinement was requested in ``sweep``.
    """

    grid: TorusGrid
    values: np.ndarray
    refined: Optional[np.ndarray] = None  # (nu, 2) refined band edges

    @property
    def nu(self) -> int:
        return self.values.shape[0]

    @property
    def bands(self) -> np.ndarray:
        """Per-branch [min, max], shape (nu, 2), ordered by branch."""
        if self.refined is not None:
            return self.refined
        return np.stack([self.values.min(axis=1), self.values.max(axis=1)], axis=1)

    @property
    def measure(self) -> float:
        return measure_and_gaps(self)[0]

    @property
    def gaps(self) -> list[tuple[float, float]]:
        return measure_and_gaps(self)[1]

    @property
    def flat(self) -> list[FlatBand]:
        return flat_bands(self)


def sweep(
    graph: FundamentalGraph,
    alpha: Optional[OneForm] = None,
    potential=None,
    grid: Optional[TorusGrid] = None,
    weighted: bool = False,
    reduce_fluxes: bool = True,
    refine_edges: bool = False,
) -> BandStructure:
    """Diagonalize the fiber matrix over the whole grid.

    ``alpha`` defaults to the potential on the edge records and ``potential``
    overrides the vertex potentials (pass 0 to strip them).  With
    ``reduce_fluxes`` the minimal-flux change of variables is applied first;
    disabling it sweeps the cotree-supported modified potential at the
    nominal quasimomenta instead.
    """
    validate(graph)
    if grid is None:
        grid = default_grid(graph.dimension)
    fd = flux_data(graph, alpha)
    if reduce_fluxes:
        form = minimal_reduction(fd).alpha_tilde
    else:
        form = fd.alpha_star
    assemble = assemble_weighted if weighted else assemble_flux

    pts = grid.points()
    vals = np.empty((graph.nu, len(pts)))
    for i, theta in enumerate(pts):
        vals[:, i] = eigen(assemble(graph, form, theta, potential)).eigenvalues
    bs = BandStructure(grid=grid, values=vals)
    if refine_edges:
        refined = _refine_band_edges(graph, form, potential, weighted, bs)
        bs = BandStructure(grid=grid, values=vals, refined=refined)
    return bs


def _refine_band_edges(graph, form, potential, weighted, bs: BandStructure) -> np.ndarray:
    """One local quadratic fit around each band edge, never shrinking bands."""
    assemble = assemble_weighted if weighted else assemble_flux
    grid = bs.grid
    pts = grid.points()
    n = grid.points_per_dim
    h = 2.0 * math.pi / (n - 1)
    refined = np.stack([bs.values.min(axis=1), bs.values.max(axis=1)], axis=1)

    for band in range(bs.nu):
        for side, pick in ((0, np.argmin), (1, np.argmax)):
            flat_idx = int(pick(bs.values[band]))
            theta0 = pts[flat_idx].copy()
            digits = []
            rest = flat_idx
            for _ in range(grid.dimension):
                rest, k = divmod(rest, n)
                digits.append(k)
            digits = digits[::-1]
            target = theta0.copy()
            for j, k in enumerate(digits):
                # periodic neighbors; the duplicate +pi column folds onto -pi
                k_minus = (k - 1) % (n - 1)
                k_plus = (k + 1) % (n - 1)
                d_minus = digits.copy()
                d_plus = digits.copy()
                d_minus[j] = k_minus
                d_plus[j] = k_plus
                fm = bs.values[band, _flat(d_minus, n)]
                f0 = bs.values[band, flat_idx]
                fp = bs.values[band, _flat(d_plus, n)]
                denom = fm - 2.0 * f0 + fp
                if abs(denom) > 1e-14:
                    delta = 0.5 * h * (fm - fp) / denom
                    target[j] = theta0[j] + float(np.clip(delta, -h, h))
            lam = eigen(assemble(graph, form, target, potential)).eigenvalues[band]
            if side == 0:
                refined[band, 0] = min(refined[band, 0], lam)
            else:
                refined[band, 1] = max(refined[band, 1], lam)
    return refined


def _flat(digits: Sequence[int], n: int) -> int:
    acc = 0
    for k in digits:
        acc = acc * n + k
    return acc


def flat_bands(bs: BandStructure, tol: float = DEFAULT_FLAT_TOL) -> list[FlatBand]:
    """Branches constant over the grid, merged by value with summed multiplicity.

    Branch n is flat when its width is at most tol * (1 + |min|).
    """
    out: list[FlatBand] = []
    bands = bs.bands
    for n in range(bs.nu):
        lo, hi = bands[n]
        if hi - lo <= tol * (1.0 + abs(lo)):
            value = 0.5 * (lo + hi)
            if out and abs(out[-1].value - value) <= tol * (1.0 + abs(value)):
                out[-1] = FlatBand(out[-1].value, out[-1].multiplicity + 1)
            else:
                out.append(FlatBand(float(value), 1))
    return out


def merge_intervals(
    intervals: Sequence[tuple[float, float]], tol: float = 0.0
) -> list[tuple[float, float]]:
    """Union of closed intervals by sweep; gaps of length <= tol are closed."""
    ordered = sorted((float(a), float(b)) for a, b in intervals)
    merged: list[list[float]] = []
    for a, b in ordered:
        if merged and a <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def measure_and_gaps(
    bs: BandStructure,
    flat_tol: float = DEFAULT_FLAT_TOL,
) -> tuple[float, list[tuple[float, float]]]:
    """Lebesgue measure of the band union and the gaps between bands.

    Flat bands carry zero measure and are not bands for gap purposes: gaps
    are the open intervals between consecutive merged non-degenerate bands,
    and a flat band sitting inside a gap leaves it whole (it is reported
    separately by ``flat_bands``).
    """
    bands = bs.bands
    scale = 1.0 + float(np.abs(bands).max(initial=0.0))
    nondeg = []
    for n in range(bs.nu):
        lo, hi = bands[n]
        if hi - lo > flat_tol * (1.0 + abs(lo)):
            nondeg.append((float(lo), float(hi)))
    merged = merge_intervals(nondeg, tol=1e-12 * scale)
    measure = sum(b - a for a, b in merged)
    gaps = [
        (merged[i][1], merged[i + 1][0])
        for i in range(len(merged) - 1)
        if merged[i + 1][0] > merged[i][1]
    ]
    return float(measure), gaps


@dataclass(frozen=True)
class PathBands:
    """Eigenvalues along a piecewise-linear quasimomentum path."""

    arclength: np.ndarray  # (m,)
    thetas: np.ndarray  # (m, d)
    values: np.ndarray  # (m, nu)


def band_path(
    graph: FundamentalGraph,
    waypoints: Sequence[Sequence[float]],
    samples_per_segment: int = 32,
    alpha: Optional[OneForm] = None,
    potential=None,
    weighted: bool = False,
) -> PathBands:
    """Sample all eigenvalue branches along a waypoint polyline.

    Unlike ``sweep`` this evaluates the cotree-supported potential at the
    quasimomenta as given, so plotted fibers match their labels.
    """
    validate(graph)
    fd = flux_data(graph, alpha)
    form = fd.alpha_star
    assemble = assemble_weighted if weighted else assemble_flux

    way = [np.atleast_1d(np.asarray(w, dtype=float)) for w in waypoints]
    for w in way:
        if w.shape != (graph.dimension,):
            raise ValueError(f"waypoint {w} does not have dimension {graph.dimension}")
    thetas: list[np.ndarray] = [way[0]]
    for a, b in zip(way, way[1:]):
        for k in range(1, samples_per_segment + 1):
            thetas.append(a + (b - a) * (k / samples_per_segment))
    if len(way) == 1:
        thetas = [way[0]]

    arc = np.zeros(len(thetas))
    for i in range(1, len(thetas)):
        arc[i] = arc[i - 1] + float(np.linalg.norm(thetas[i] - thetas[i - 1]))
    vals = np.empty((len(thetas), graph.nu))
    for i, theta in enumerate(thetas):
        vals[i] = eigen(assemble(graph, form, theta, potential)).eigenvalues
    return PathBands(arclength=arc, thetas=np.array(thetas), values=vals)
