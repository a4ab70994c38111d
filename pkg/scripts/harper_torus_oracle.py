"""Reference diagonalization for the uniform-flux square-lattice model.

Builds the magnetic operator on a finite L x L torus (periodic boundary,
symmetric gauge) and diagonalizes it densely.  The resulting spectrum
endpoints are frozen into tests/test_acceptance.py; rerun this script to
regenerate them.

Usage: python scripts/harper_torus_oracle.py [L]
"""

from __future__ import annotations

import sys

import numpy as np


def torus_operator(p: int, q: int, size: int) -> np.ndarray:
    """Magnetic nearest-neighbor operator on the size x size torus.

    Flux per plaquette is B = 2*pi*p/q; size must be a multiple of 2*q so
    the gauge wraps consistently.
    """
    if size % (2 * q) != 0:
        raise ValueError(f"size {size} must be a multiple of 2q = {2 * q}")
    flux = 2.0 * np.pi * p / q
    n = size * size

    def site(x: int, y: int) -> int:
        return (x % size) + size * (y % size)

    ham = np.zeros((n, n), dtype=complex)
    for x in range(size):
        for y in range(size):
            s = site(x, y)
            ham[s, s] = 4.0
            # hop x -> x+1 carries phase -B*y/2, hop y -> y+1 carries +B*x/2
            t = site(x + 1, y)
            z = np.exp(1j * (-flux * y / 2.0))
            ham[s, t] += -z
            ham[t, s] += -z.conjugate()
            t = site(x, y + 1)
            z = np.exp(1j * (flux * x / 2.0))
            ham[s, t] += -z
            ham[t, s] += -z.conjugate()
    return ham


def endpoints(p: int, q: int, size: int) -> tuple[float, float]:
    vals = np.linalg.eigvalsh(torus_operator(p, q, size))
    return float(vals[0]), float(vals[-1])


def main() -> None:
    size = int(sys.argv[1]) if len(sys.argv) > 1 else 64
    for p, q in [(0, 1), (1, 2)]:
        lo, hi = endpoints(p, q, size)
        print(f"p/q = {p}/{q}  L = {size}  spectrum = [{lo:.12f}, {hi:.12f}]")


if __name__ == "__main__":
    main()
