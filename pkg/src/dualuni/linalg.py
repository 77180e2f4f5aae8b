"""Dense complex linear-algebra substrate.

All heavy lifting is delegated to numpy (LAPACK); this module pins the
conventions the rest of the package relies on: seeded Haar sampling with a
fixed PCG64 stream, descending-order Hermitian eigendecompositions, trace
norms via eigenvalues, and polar projection onto the unitary group.
"""

import numpy as np

from .errors import (
    HermiticityError,
    InvalidDimensionError,
    ShapeMismatchError,
    SingularMatrixError,
)

DEFAULT_TOL = 1e-10


def haar_unitary(d, seed):
    """Sample a Haar-random d x d unitary, reproducibly for a fixed seed.

    Ginibre matrix + QR, with the R diagonal phase-fixed so the distribution
    is exactly Haar (Mezzadri's prescription).  The RNG is numpy's PCG64,
    seeded directly, so the stream is bit-identical across runs and platforms.
    """
    if d < 1:
        raise InvalidDimensionError(f"haar_unitary needs d >= 1, got {d}")
    rng = np.random.Generator(np.random.PCG64(seed))
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def dagger(m):
    return np.asarray(m).conj().T


def max_abs(m):
    """Largest entrywise modulus; 0.0 for empty input."""
    m = np.asarray(m)
    return 0.0 if m.size == 0 else float(np.max(np.abs(m)))


def unitarity_violation(m):
    """max |M^dag M - I|."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {m.shape}")
    return max_abs(dagger(m) @ m - np.eye(m.shape[0]))


def is_unitary(m, tol=DEFAULT_TOL):
    return unitarity_violation(m) < tol


def hermitian_eig(m, herm_tol=DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns (w, v) with m = v @ diag(w) @ v^dag.  Raises HermiticityError if
    the anti-Hermitian part exceeds herm_tol (relative to nothing: entrywise).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {m.shape}")
    dev = max_abs(m - dagger(m))
    if dev >= herm_tol:
        raise HermiticityError(f"matrix is not Hermitian: max |M - M^dag| = {dev:.3e}")
    w, v = np.linalg.eigh(m)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def trace_norm(m, herm_tol=DEFAULT_TOL):
    """Schatten-1 norm of a Hermitian matrix (sum of |eigenvalues|)."""
    w, _ = hermitian_eig(m, herm_tol=herm_tol)
    return float(np.sum(np.abs(w)))


def closest_unitary(m, singular_tol=1e-12):
    """Polar factor W of M = W P (P positive): the unitary closest to M."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {m.shape}")
    u, s, vh = np.linalg.svd(m)
    if s[-1] < singular_tol * max(1.0, s[0]):
        raise SingularMatrixError(
            f"matrix is numerically singular (smallest singular value {s[-1]:.3e})"
        )
    return u @ vh


def contract(subscripts, *arrays):
    """einsum with the package's error type on inconsistent leg dimensions."""
    try:
        return np.einsum(subscripts, *arrays, optimize=True)
    except ValueError as exc:
        raise ShapeMismatchError(f"contraction '{subscripts}' failed: {exc}") from exc


def permute_axes(tensor, perm):
    """Reorder tensor axes; perm lists, per output axis, the source axis."""
    tensor = np.asarray(tensor)
    if sorted(perm) != list(range(tensor.ndim)):
        raise ShapeMismatchError(f"{perm} is not a permutation of {tensor.ndim} axes")
    return np.transpose(tensor, perm)
