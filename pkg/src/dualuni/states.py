"""Initial-state preparation: computational products, UEB/Bell pair chains,
and general two-site solvable matrix product states realized as statevectors.

Site 1 is the most significant index of the amplitude vector; two-site pairs
occupy sites (1,2), (3,4), ...; an odd chain puts the leftover (single) site
last.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateStateError,
    InvalidDimensionError,
    ShapeMismatchError,
    ValidationError,
)
from .linalg import unitarity_violation

NORM_TOL = 1e-12


@dataclass
class StateVector:
    """Full amplitude vector for n_sites q-dimensional sites."""

    n_sites: int
    q: int
    amps: np.ndarray
    prenorm: float = 1.0  # norm of the raw amplitudes before normalization

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if self.amps.size != self.q**self.n_sites:
            raise ShapeMismatchError(
                f"amplitude vector has length {self.amps.size}, expected q^N = {self.q**self.n_sites}"
            )

    @property
    def norm(self):
        return float(np.linalg.norm(self.amps))

    def copy(self):
        return StateVector(self.n_sites, self.q, self.amps.copy(), self.prenorm)

    def site_matrix(self, n_left):
        """Amplitudes reshaped to (q^n_left, q^(N-n_left))."""
        return self.amps.reshape(self.q**n_left, -1)

    def reduced_density_matrix(self, n_left):
        """RDM of the leftmost n_left sites."""
        m = self.site_matrix(n_left)
        return m @ m.conj().T

    def site_rdm(self, site):
        """One-site RDM (site is 1-based)."""
        left = self.q ** (site - 1)
        right = self.q ** (self.n_sites - site)
        t = self.amps.reshape(left, self.q, right)
        return np.einsum("aib,ajb->ij", t, t.conj())


def computational_product_state(n_sites, q, digits):
    """|z_1 z_2 ... z_N> with one unit amplitude."""
    digits = [int(z) for z in digits]
    if len(digits) != n_sites:
        raise ShapeMismatchError(f"{len(digits)} digits for {n_sites} sites")
    if any(z < 0 or z >= q for z in digits):
        raise InvalidDimensionError(f"digit out of range for q={q}: {digits}")
    idx = 0
    for z in digits:
        idx = idx * q + z
    amps = np.zeros(q**n_sites, dtype=complex)
    amps[idx] = 1.0
    return StateVector(n_sites, q, amps)


@dataclass
class SolvableMPS:
    """Two-site MPS tensors N^{(i,j)} (chi x chi matrices) plus boundary rule."""

    q: int
    chi: int
    tensors: dict  # (i, j) -> (chi, chi) ndarray
    boundary: object = "trace"  # "trace" or (left_vector, right_vector)

    def __post_init__(self):
        fixed = {}
        for key, mat in self.tensors.items():
            mat = np.asarray(mat, dtype=complex)
            if mat.shape != (self.chi, self.chi):
                raise ShapeMismatchError(f"tensor {key} has shape {mat.shape}, expected ({self.chi}, {self.chi})")
            fixed[tuple(int(k) for k in key)] = mat
        for i in range(self.q):
            for j in range(self.q):
                if (i, j) not in fixed:
                    raise ValidationError(f"missing MPS tensor for physical pair ({i}, {j})")
        self.tensors = fixed

    def pair_block(self):
        """Array T[i, j, a, b] of all tensors."""
        out = np.empty((self.q, self.q, self.chi, self.chi), dtype=complex)
        for (i, j), mat in self.tensors.items():
            out[i, j] = mat
        return out

    def pair_amplitudes(self):
        """chi = 1 only: the (q, q) two-site amplitude matrix."""
        if self.chi != 1:
            raise InvalidDimensionError("pair_amplitudes requires a chi = 1 MPS")
        return self.pair_block()[:, :, 0, 0]

    def to_json(self):
        return {
            "q": self.q,
            "chi": self.chi,
            "tensors": {
                f"{i},{j}": [[[z.real, z.imag] for z in row] for row in mat]
                for (i, j), mat in self.tensors.items()
            },
            "boundary": "trace" if isinstance(self.boundary, str) else {
                "left": [[z.real, z.imag] for z in np.asarray(self.boundary[0], dtype=complex)],
                "right": [[z.real, z.imag] for z in np.asarray(self.boundary[1], dtype=complex)],
            },
        }

    @classmethod
    def from_json(cls, obj):
        tensors = {}
        for key, mat in obj["tensors"].items():
            i, j = (int(x) for x in key.split(","))
            tensors[(i, j)] = np.array([[complex(re, im) for re, im in row] for row in mat])
        boundary = obj.get("boundary", "trace")
        if isinstance(boundary, dict):
            boundary = (
                np.array([complex(re, im) for re, im in boundary["left"]]),
                np.array([complex(re, im) for re, im in boundary["right"]]),
            )
        return cls(q=int(obj["q"]), chi=int(obj["chi"]), tensors=tensors, boundary=boundary)


def w_matrix(mps):
    """The (q chi) x (q chi) map W with <i|<a| W |j>|b> = sqrt(q) N^{(i,j)}_{ab}."""
    t = mps.pair_block()
    # row (i, a), column (j, b)
    return np.sqrt(mps.q) * t.transpose(0, 2, 1, 3).reshape(mps.q * mps.chi, mps.q * mps.chi)


def solvability_violation(mps):
    return unitarity_violation(w_matrix(mps))


def is_solvable_mps(mps, tol=1e-10):
    """True iff W(N) is unitary within tol."""
    return solvability_violation(mps) < tol


def bell_pair_mps(q):
    """N^{(i,j)} = delta_ij / sqrt(q), the chi = 1 Bell-pair chain (W = identity)."""
    eye = np.eye(q) / np.sqrt(q)
    return SolvableMPS(q=q, chi=1, tensors={(i, j): np.array([[eye[i, j]]]) for i in range(q) for j in range(q)})


def pair_state_mps(alpha):
    """chi = 1 MPS from a normalized two-site amplitude matrix (sqrt(q) alpha unitary)."""
    alpha = np.asarray(alpha, dtype=complex)
    q = alpha.shape[0]
    return SolvableMPS(q=q, chi=1, tensors={(i, j): np.array([[alpha[i, j]]]) for i in range(q) for j in range(q)})


def solvable_mps_state(mps, n_sites, leftover=None, normalize=True):
    """Statevector of the 2-site MPS on n_sites sites.

    Pairs sit on (1,2), (3,4), ...; for odd n_sites the last site carries the
    supplied leftover ket (default |0>).  Closed chains use the trace boundary;
    a (left, right) boundary-vector pair contracts l^dag (prod N) r instead.
    """
    if n_sites < 2:
        raise InvalidDimensionError(f"need at least 2 sites, got {n_sites}")
    q, chi = mps.q, mps.chi
    pairs = n_sites // 2
    block = mps.pair_block().reshape(q * q, chi, chi)
    acc = block
    for _ in range(pairs - 1):
        acc = np.einsum("pab,qbc->pqac", acc, block).reshape(-1, chi, chi)
    if isinstance(mps.boundary, str):
        amps = np.trace(acc, axis1=1, axis2=2)
    else:
        left, right = (np.asarray(v, dtype=complex) for v in mps.boundary)
        if left.shape != (chi,) or right.shape != (chi,):
            raise ShapeMismatchError("boundary vectors must have length chi")
        amps = np.einsum("a,pab,b->p", left.conj(), acc, right)
    if n_sites % 2 == 1:
        ket = np.zeros(q, dtype=complex)
        if leftover is None:
            ket[0] = 1.0
        else:
            ket[:] = np.asarray(leftover, dtype=complex)
        amps = np.kron(amps, ket)
    prenorm = float(np.linalg.norm(amps))
    if prenorm < 1e-14:
        raise DegenerateStateError("MPS contraction produced a zero-norm state")
    return StateVector(n_sites, q, amps / prenorm if normalize else amps, prenorm=prenorm)


def ueb_pair_state(alpha, pairs, tol=1e-10):
    """Product of `pairs` two-site states with amplitudes alpha_ij each.

    alpha is the normalized amplitude matrix: sqrt(q) alpha must be unitary,
    which makes every pair maximally entangled.
    """
    alpha = np.asarray(alpha, dtype=complex)
    q = alpha.shape[0]
    dev = unitarity_violation(np.sqrt(q) * alpha)
    if dev >= tol:
        raise ValidationError(f"sqrt(q) alpha is not unitary (violation {dev:.3e})")
    v = alpha.reshape(-1)
    amps = v
    for _ in range(pairs - 1):
        amps = np.kron(amps, v)
    return StateVector(2 * pairs, q, amps)
