"""Fiber matrices of magnetic operators at a fixed quasimomentum.

The phase of an oriented edge is its potential value plus the inner product
of its index with the quasimomentum; assembling with the raw potential or
with the cotree-supported modified potential gives unitarily equivalent
matrices.  Hermiticity is exact by construction: every off-diagonal entry is
written together with its conjugate.  The weighted variant is expressed in
the orthonormalized basis of the weighted inner product, so one Hermitian
eigensolver serves all cases, and it factorizes exactly through the discrete
gradient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .graph import FundamentalGraph, OneForm

__all__ = [
    "NotHermitian",
    "FiberMatrix",
    "Spectrum",
    "assemble_flux",
    "assemble_raw",
    "assemble_weighted",
    "gradient",
    "eigen",
]


class NotHermitian(ValueError):
    """Matrix handed to the eigensolver is not Hermitian (upstream bug)."""


@dataclass(frozen=True)
class FiberMatrix:
    """Hermitian nu x nu matrix of the operator at one quasimomentum."""

    entries: np.ndarray
    theta: np.ndarray

    @property
    def nu(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues, optionally with orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None


def _phases(graph: FundamentalGraph, form: OneForm, theta: np.ndarray) -> np.ndarray:
    if not graph.edges:
        return np.zeros(0)
    idx = np.array([e.index for e in graph.edges], dtype=float)
    return form.as_array() + idx @ theta


def _assemble(
    graph: FundamentalGraph,
    form: OneForm,
    theta,
    potential,
    weighted: bool,
) -> FiberMatrix:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape != (graph.dimension,):
        raise ValueError(f"quasimomentum must have length {graph.dimension}")
    nu = graph.nu
    if potential is None:
        q = graph.potentials()
    else:
        q = np.broadcast_to(np.asarray(potential, dtype=float), (nu,))

    if weighted:
        mv = graph.vertex_weights()
        scale = np.sqrt(mv)
        diag = q + graph.weighted_degrees()
    else:
        mv = np.ones(nu)
        scale = mv
        diag = q + graph.degrees().astype(float)

    h = np.zeros((nu, nu), dtype=complex)
    phases = _phases(graph, form, theta)
    for e in graph.edges:
        w = e.weight if weighted else 1.0
        phi = phases[e.id]
        if e.is_loop:
            # stored loop and its reverse combine into 2 w cos(phi)
            h[e.tail, e.tail] -= 2.0 * w * np.cos(phi) / mv[e.tail]
        else:
            z = w * np.exp(-1j * phi) / (scale[e.tail] * scale[e.head])
            h[e.tail, e.head] -= z
            h[e.head, e.tail] -= z.conjugate()
    h[np.diag_indices(nu)] += diag
    return FiberMatrix(entries=h, theta=theta)


def assemble_flux(
    graph: FundamentalGraph,
    alpha_star: OneForm,
    theta,
    potential=None,
) -> FiberMatrix:
    """Fiber matrix of the combinatorial operator for a cotree-supported
    potential: degree plus potential on the diagonal, minus summed edge
    phase factors off the diagonal, loops folding into cosine terms.

    ``potential`` overrides the graph's vertex potentials (0 strips them).
    """
    return _assemble(graph, alpha_star, theta, potential, weighted=False)


def assemble_raw(
    graph: FundamentalGraph,
    alpha: OneForm,
    theta,
    potential=None,
) -> FiberMatrix:
    """Same assembly for an arbitrary (not flux-reduced) vector potential.

    Unitarily equivalent to ``assemble_flux`` with the modified potential at
    the same quasimomentum; used to test exactly that.
    """
    return _assemble(graph, alpha, theta, potential, weighted=False)


def assemble_weighted(
    graph: FundamentalGraph,
    alpha_star: OneForm,
    theta,
    potential=None,
) -> FiberMatrix:
    """Weighted fiber matrix in the orthonormalized vertex basis.

    With unit weights this reproduces ``assemble_flux`` exactly.
    """
    return _assemble(graph, alpha_star, theta, potential, weighted=True)


def gradient(
    graph: FundamentalGraph,
    alpha_star: OneForm,
    theta,
) -> tuple[np.ndarray, np.ndarray]:
    """Discrete gradient at theta and its adjoint, as matrices.

    One row per stored edge, one column per vertex, scaled so that
    ``adjoint @ grad`` equals the weighted fiber matrix with the potential
    stripped.  A loop row has a single entry; the rank drops to nu - 1
    exactly when every phase vanishes modulo 2*pi.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    mv = graph.vertex_weights()
    grad = np.zeros((len(graph.edges), graph.nu), dtype=complex)
    phases = _phases(graph, alpha_star, theta)
    for e in graph.edges:
        half = phases[e.id] / 2.0
        c = np.sqrt(e.weight)
        grad[e.id, e.tail] += c * np.exp(1j * half) / np.sqrt(mv[e.tail])
        grad[e.id, e.head] -= c * np.exp(-1j * half) / np.sqrt(mv[e.head])
    return grad, grad.conj().T


def eigen(h: Union[FiberMatrix, np.ndarray], want_vectors: bool = False) -> Spectrum:
    """All eigenvalues in ascending order; vectors orthonormal on request.

    Deterministic for fixed input.  Raises NotHermitian when the input
    deviates from its conjugate transpose by more than 1e-12 of its norm;
    assembly is exactly Hermitian, so that always signals an upstream bug.
    """
    m = h.entries if isinstance(h, FiberMatrix) else np.asarray(h)
    norm = np.linalg.norm(m)
    asym = np.abs(m - m.conj().T).max()
    if asym > 1e-12 * max(norm, 1e-300):
        raise NotHermitian(f"max asymmetry {asym:.3e} exceeds 1e-12 * norm")
    if want_vectors:
        vals, vecs = np.linalg.eigh(m)
        return Spectrum(eigenvalues=vals, eigenvectors=vecs)
    return Spectrum(eigenvalues=np.linalg.eigvalsh(m))
