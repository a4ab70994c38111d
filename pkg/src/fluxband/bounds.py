"""Numerical checks of the spectral estimates.

Three families of checks: total band length against the cycle count (and its
weighted version), gap totals against the spectral spread and the potential
range, band-endpoint variation under a change of magnetic potential against
the flux differences, and the effective-form bound at a band edge via finite
differences.  Each check reports lhs, rhs and slack; a violated report means
a bug in this package, not in the estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .fiber import assemble_flux, assemble_weighted, eigen
from .graph import FundamentalGraph, OneForm, validate
from .spectrum import BandStructure, TorusGrid, default_grid, sweep
from .topology import FluxData, flux_data, minimal_reduction

__all__ = [
    "GraphMismatch",
    "NotSimpleEigenvalue",
    "NotExtremum",
    "BoundReport",
    "PerturbationData",
    "EffectiveForm",
    "check_total_band_length",
    "check_weighted_band_length",
    "check_gap_bound",
    "perturbation_bounds",
    "effective_form",
    "verify_bounds",
]

REPORT_TOL = 1e-9


class GraphMismatch(ValueError):
    """The two inputs do not describe the same underlying graph."""


class NotSimpleEigenvalue(ValueError):
    """Band-edge eigenvalue is degenerate; the expansion hypothesis fails."""


class NotExtremum(ValueError):
    """The located grid point is not a band extremum."""


@dataclass(frozen=True)
class BoundReport:
    """One inequality lhs <= rhs with its slack."""

    name: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def satisfied(self) -> bool:
        return self.lhs <= self.rhs + REPORT_TOL * (1.0 + abs(self.rhs))

    def __str__(self) -> str:
        mark = "ok " if self.satisfied else "VIOLATED"
        return f"{self.name:<34} lhs={self.lhs: .9g} rhs={self.rhs: .9g} slack={self.slack: .3g} [{mark}]"


@dataclass(frozen=True)
class PerturbationData:
    """Extremes of the difference operator and per-band endpoint shifts."""

    lambda_1: float
    lambda_nu: float
    coupling: float  # flux-difference bound on |lambda_1|, |lambda_nu|
    lower_shifts: np.ndarray  # per band: shift of the lower endpoint
    upper_shifts: np.ndarray  # per band: shift of the upper endpoint


@dataclass(frozen=True)
class EffectiveForm:
    """Quadratic band-edge expansion data at a simple extremum."""

    band: int
    kind: str
    theta0: tuple[float, ...]
    matrix: np.ndarray  # d x d symmetric second-derivative matrix
    rho: float  # distance to the rest of the fiber spectrum (inf when nu == 1)
    t1: float
    t2: float
    flat: bool

    def mu(self, omega: Sequence[float]) -> float:
        w = np.asarray(omega, dtype=float)
        return 0.5 * float(w @ self.matrix @ w)

    @property
    def bound(self) -> float:
        first = 0.0 if math.isinf(self.rho) else self.t1**2 / self.rho
        return first + self.t2


def _band_sum(bs: BandStructure) -> float:
    bands = bs.bands
    return float((bands[:, 1] - bands[:, 0]).sum())


def check_total_band_length(bs: BandStructure, fd: FluxData) -> list[BoundReport]:
    """Chain: measure <= sum of band lengths <= 4 * betti."""
    total = _band_sum(bs)
    return [
        BoundReport("measure_le_band_sum", bs.measure, total),
        BoundReport("band_sum_le_4_betti", total, 4.0 * fd.betti),
    ]


def weighted_cycle_bound(graph: FundamentalGraph, fd: FluxData) -> float:
    """Weighted cotree size: sum over both cotree orientations of
    m_A(e) / sqrt(m_V(tail) m_V(head))."""
    mv = graph.vertex_weights()
    acc = 0.0
    for e_id in fd.cotree:
        e = graph.edges[e_id]
        acc += 2.0 * e.weight / math.sqrt(mv[e.tail] * mv[e.head])
    return acc


def check_weighted_band_length(
    bs: BandStructure, graph: FundamentalGraph, fd: FluxData
) -> list[BoundReport]:
    """Chain for the weighted operator: measure <= band sum <= 2 * weighted count."""
    total = _band_sum(bs)
    rhs = 2.0 * weighted_cycle_bound(graph, fd)
    return [
        BoundReport("weighted_measure_le_band_sum", bs.measure, total),
        BoundReport("weighted_band_sum_le_2_count", total, rhs),
    ]


def check_gap_bound(
    bs_full: BandStructure,
    bs_free: BandStructure,
    graph: FundamentalGraph,
    fd: FluxData,
) -> list[BoundReport]:
    """Gap-total chain for the operator with potential.

    ``bs_full`` is the band structure with the potential, ``bs_free`` the one
    with the potential stripped.  Flat bands inside gaps carry no measure and
    do not shorten the gap total.  Reports the chain
    spread - 4*betti <= gap total and |free spread - potential range| - 4*betti
    <= spread - 4*betti.
    """
    gap_total = sum(b - a for a, b in bs_full.gaps)
    bands = bs_full.bands
    spread = float(bands[-1, 1] - bands[0, 0])
    four_beta = 4.0 * fd.betti
    free = bs_free.bands
    q = graph.potentials()
    q_range = float(q.max() - q.min())
    c0 = abs(float(free[-1, 1] - free[0, 0]) - q_range)
    return [
        BoundReport("gap_total_ge_spread_minus_4betti", spread - four_beta, gap_total),
        BoundReport("spread_chain_ge_c0_minus_4betti", c0 - four_beta, spread - four_beta),
    ]


def difference_matrix(
    graph: FundamentalGraph,
    fd_a: FluxData,
    fd_b: FluxData,
    theta,
) -> np.ndarray:
    """Fiber-matrix difference H_b(theta) - H_a(theta), built entrywise.

    Supported on the cotree; each oriented cotree edge u -> v contributes
    exp(-i <cycle index, theta>) * (exp(-i flux_a) - exp(-i flux_b)) to the
    (u, v) entry.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    nu = graph.nu
    x = np.zeros((nu, nu), dtype=complex)
    for e_id, idx, fa, fb in zip(
        fd_a.cotree, fd_a.cycle_indices, fd_a.fluxes, fd_b.fluxes
    ):
        e = graph.edges[e_id]
        z = np.exp(-1j * float(np.dot(idx, theta))) * (
            np.exp(-1j * fa) - np.exp(-1j * fb)
        )
        if e.is_loop:
            x[e.tail, e.tail] += 2.0 * z.real
        else:
            x[e.tail, e.head] += z
            x[e.head, e.tail] += z.conjugate()
    return x


def flux_coupling(fd_a: FluxData, fd_b: FluxData) -> float:
    """2 * max over vertices of the summed |sin| of half flux differences
    over oriented cotree edges at the vertex."""
    graph = fd_a.graph
    per_vertex = np.zeros(graph.nu)
    for e_id, fa, fb in zip(fd_a.cotree, fd_a.fluxes, fd_b.fluxes):
        e = graph.edges[e_id]
        s = abs(math.sin(0.5 * (fb - fa)))
        per_vertex[e.tail] += s
        per_vertex[e.head] += s
    return 2.0 * float(per_vertex.max())


def perturbation_bounds(
    graph: FundamentalGraph,
    alpha: Optional[OneForm] = None,
    alpha_other: Optional[OneForm] = None,
    grid: Optional[TorusGrid] = None,
    potential=None,
) -> tuple[PerturbationData, list[BoundReport]]:
    """Band-endpoint variation between two potentials on one graph.

    Computes the extreme eigenvalues of the difference operator over the
    grid, the flux-difference coupling constant, and checks that every
    endpoint shift, width change and the extremes themselves obey them.
    """
    validate(graph)
    if alpha is None:
        alpha = graph.one_form()
    if alpha_other is None:
        alpha_other = OneForm.zero(graph)
    for form in (alpha, alpha_other):
        if len(form.values) != len(graph.edges):
            raise GraphMismatch("potential length does not match the edge count")
    if grid is None:
        grid = default_grid(graph.dimension)
    fd = flux_data(graph, alpha)
    fd_o = flux_data(graph, alpha_other)

    lam_lo = math.inf
    lam_hi = -math.inf
    for theta in grid.points():
        vals = eigen(difference_matrix(graph, fd, fd_o, theta)).eigenvalues
        lam_lo = min(lam_lo, float(vals[0]))
        lam_hi = max(lam_hi, float(vals[-1]))

    bs_a = sweep(graph, alpha, potential=potential, grid=grid)
    bs_o = sweep(graph, alpha_other, potential=potential, grid=grid)
    lower = bs_o.bands[:, 0] - bs_a.bands[:, 0]
    upper = bs_o.bands[:, 1] - bs_a.bands[:, 1]
    widths_a = bs_a.bands[:, 1] - bs_a.bands[:, 0]
    widths_o = bs_o.bands[:, 1] - bs_o.bands[:, 0]

    coupling = flux_coupling(fd, fd_o)
    data = PerturbationData(
        lambda_1=lam_lo,
        lambda_nu=lam_hi,
        coupling=coupling,
        lower_shifts=lower,
        upper_shifts=upper,
    )
    shifts = np.concatenate([lower, upper])
    reports = [
        BoundReport("shift_ge_lambda_1", lam_lo, float(shifts.min())),
        BoundReport("shift_le_lambda_nu", float(shifts.max()), lam_hi),
        BoundReport(
            "width_change_le_lambda_spread",
            float(np.abs(widths_o - widths_a).max()),
            lam_hi - lam_lo,
        ),
        BoundReport("lambda_extremes_le_coupling", max(abs(lam_lo), abs(lam_hi)), coupling),
        BoundReport("lambda_spread_le_2_coupling", lam_hi - lam_lo, 2.0 * coupling),
    ]
    return data, reports


def _index_sums(graph: FundamentalGraph, fd: FluxData, weighted: bool) -> tuple[float, float]:
    """T_1 and T_2: per-vertex sums of cycle-index norms over oriented
    cotree edges, maximized over vertices."""
    mv = graph.vertex_weights()
    acc1 = np.zeros(graph.nu)
    acc2 = np.zeros(graph.nu)
    for e_id, idx in zip(fd.cotree, fd.cycle_indices):
        e = graph.edges[e_id]
        w = e.weight / math.sqrt(mv[e.tail] * mv[e.head]) if weighted else 1.0
        norm = math.sqrt(sum(k * k for k in idx))
        for v in (e.tail, e.head):  # both orientations; loops count twice
            acc1[v] += w * norm
            acc2[v] += w * norm**2
    return float(acc1.max()), 0.5 * float(acc2.max())


def effective_form(
    graph: FundamentalGraph,
    band: int,
    grid: Optional[TorusGrid] = None,
    alpha: Optional[OneForm] = None,
    kind: str = "min",
    weighted: bool = False,
    step: float = 1e-3,
    directions: int = 64,
    seed: int = 0,
    simple_tol: float = 1e-8,
    grad_tol: float = 1e-5,
    flat_tol: float = 1e-9,
) -> tuple[EffectiveForm, BoundReport]:
    """Second-order band-edge expansion of the magnetic operator without
    potential, checked against the index-norm bound.

    Locates the grid extremum of the requested branch, requires the
    eigenvalue there to be simple and the finite-difference gradient to
    vanish, then builds the second-derivative matrix by Richardson-
    extrapolated central differences and evaluates the quadratic form on
    random unit directions plus the coordinate axes.
    """
    if kind not in ("min", "max"):
        raise ValueError("kind must be 'min' or 'max'")
    validate(graph)
    if grid is None:
        grid = default_grid(graph.dimension)
    fd = flux_data(graph, alpha)
    form = minimal_reduction(fd).alpha_tilde
    assemble = assemble_weighted if weighted else assemble_flux
    d = graph.dimension

    bs = sweep(graph, alpha, potential=0.0, grid=grid, weighted=weighted)
    branch = bs.values[band]
    pick = np.argmin if kind == "min" else np.argmax
    theta0 = grid.points()[int(pick(branch))]

    def lam(theta: np.ndarray) -> float:
        return float(eigen(assemble(graph, form, theta, 0.0)).eigenvalues[band])

    at0 = eigen(assemble(graph, form, theta0, 0.0)).eigenvalues
    gaps = np.abs(np.delete(at0, band) - at0[band])
    rho = float(gaps.min()) if len(gaps) else math.inf
    if rho <= simple_tol:
        raise NotSimpleEigenvalue(
            f"band {band} eigenvalue at the extremum has neighbor distance {rho:.3e}"
        )

    grad = np.array(
        [
            (lam(theta0 + step * _unit(d, j)) - lam(theta0 - step * _unit(d, j)))
            / (2.0 * step)
            for j in range(d)
        ]
    )
    is_flat = branch.max() - branch.min() <= flat_tol * (1.0 + abs(branch.min()))
    if np.linalg.norm(grad) > grad_tol and not is_flat:
        raise NotExtremum(
            f"gradient norm {np.linalg.norm(grad):.3e} at the grid extremum; "
            "the true extremum is off-grid"
        )

    m_h = _hessian(lam, theta0, step, d)
    m_h2 = _hessian(lam, theta0, step / 2.0, d)
    matrix = (4.0 * m_h2 - m_h) / 3.0
    matrix = 0.5 * (matrix + matrix.T)

    t1, t2 = _index_sums(graph, fd, weighted)
    eff = EffectiveForm(
        band=band,
        kind=kind,
        theta0=tuple(float(t) for t in theta0),
        matrix=matrix,
        rho=rho,
        t1=t1,
        t2=t2,
        flat=bool(is_flat),
    )

    rng = np.random.default_rng(seed)
    omegas = [_unit(d, j) for j in range(d)]
    for _ in range(directions):
        w = rng.normal(size=d)
        omegas.append(w / np.linalg.norm(w))
    worst = max(abs(eff.mu(w)) for w in omegas)
    report = BoundReport("effective_form_le_index_bound", worst, eff.bound)
    return eff, report


def _unit(d: int, j: int) -> np.ndarray:
    v = np.zeros(d)
    v[j] = 1.0
    return v


def _hessian(lam, theta0: np.ndarray, h: float, d: int) -> np.ndarray:
    m = np.zeros((d, d))
    f0 = lam(theta0)
    for j in range(d):
        ej = _unit(d, j)
        m[j, j] = (lam(theta0 + h * ej) - 2.0 * f0 + lam(theta0 - h * ej)) / h**2
        for k in range(j + 1, d):
            ek = _unit(d, k)
            m[j, k] = m[k, j] = (
                lam(theta0 + h * ej + h * ek)
                - lam(theta0 + h * ej - h * ek)
                - lam(theta0 - h * ej + h * ek)
                + lam(theta0 - h * ej - h * ek)
            ) / (4.0 * h**2)
    return m


def verify_bounds(
    graph: FundamentalGraph,
    grid: Optional[TorusGrid] = None,
    alpha: Optional[OneForm] = None,
) -> list[BoundReport]:
    """All band-length and gap reports for one graph, in a stable order."""
    validate(graph)
    if grid is None:
        grid = default_grid(graph.dimension)
    fd = flux_data(graph, alpha)
    bs_full = sweep(graph, alpha, grid=grid)
    bs_free = sweep(graph, alpha, potential=0.0, grid=grid)
    bs_weighted = sweep(graph, alpha, grid=grid, weighted=True)
    reports = check_total_band_length(bs_full, fd)
    reports += check_gap_bound(bs_full, bs_free, graph, fd)
    reports += check_weighted_band_length(bs_weighted, graph, fd)
    return reports
