"""Projected ensembles, k-th moments, Haar moments, and trace distances.

Measurement schemes resolve the bath into outcome groups: single sites in the
computational basis, or neighbouring pairs in a unitary-error-basis (Bell-type)
basis.  The solvable pair placement puts pairs on (j, j+1) bonds with j even,
i.e. on the bonds of an "even" first circuit layer, straddling the (1,2),
(3,4), ... initial pairs; bath sites left over at either end are measured in
the computational basis.
"""

import itertools
from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np

from .errors import CapExceededError, InvalidDimensionError, ShapeMismatchError
from .haar import permutation_operator, permutations_of, rising_factorial
from .linalg import trace_norm

P_FLOOR = 1e-14
FULL_CAP = 4096
BLOCK = 1024


# ---------------------------------------------------------------------------
# measurement schemes
# ---------------------------------------------------------------------------

@dataclass
class ComputationalScheme:
    """Single-site measurements of every bath site in the computational basis."""

    name = "computational"

    def groups(self, n_a, n_b):
        return [("single", s) for s in range(n_a + 1, n_a + n_b + 1)]

    def n_outcomes(self, q, n_b):
        return q**n_b


@dataclass
class UebScheme:
    """Two-site UEB measurements on even-left bath bonds, computational leftovers.

    pair_left_sites may override the automatic placement (1-based global left
    sites of the measured pairs; must be disjoint bonds inside the bath).
    """

    basis: object  # UnitaryErrorBasis
    pair_left_sites: list = None
    name = "ueb"

    def groups(self, n_a, n_b):
        n = n_a + n_b
        if self.pair_left_sites is None:
            pairs = [j for j in range(n_a + 1, n) if j % 2 == 0]
        else:
            pairs = sorted(self.pair_left_sites)
        covered = set()
        for j in pairs:
            if j <= n_a or j + 1 > n:
                raise ShapeMismatchError(f"measured pair ({j},{j+1}) is not inside the bath")
            if j in covered or j + 1 in covered:
                raise ShapeMismatchError("measured pairs overlap")
            covered.add(j)
            covered.add(j + 1)
        out = []
        site = n_a + 1
        while site <= n:
            if site in covered and site + 1 in covered and site in pairs:
                out.append(("pair", site))
                site += 2
            else:
                out.append(("single", site))
                site += 1
        return out

    def n_outcomes(self, q, n_b):
        return q**n_b

    def pair_basis_matrix(self, q):
        """q^2 x q^2 unitary whose columns are the pair states vec(member/sqrt(q))."""
        cols = [(m / np.sqrt(q)).reshape(-1) for m in self.basis.members]
        v = np.array(cols).T
        if v.shape != (q * q, q * q):
            raise ShapeMismatchError(f"UEB basis does not match q={q}")
        return v


# ---------------------------------------------------------------------------
# projection
# ---------------------------------------------------------------------------

@dataclass
class ProjectedEnsemble:
    """Outcome probabilities and normalized projected states (as matrix columns)."""

    d_a: int
    probs: np.ndarray
    states: np.ndarray  # d_a x n_entries, unit columns
    scheme: str
    n_a: int
    n_b: int
    dropped_mass: float = 0.0

    def __post_init__(self):
        total = float(np.sum(self.probs) + self.dropped_mass)
        if abs(total - 1.0) > 1e-8:
            raise ShapeMismatchError(f"outcome probabilities sum to {total}, not 1")

    @property
    def n_entries(self):
        return len(self.probs)


def projected_state_matrix(state, n_a, scheme):
    """d_A x d_B matrix of unnormalized projected states, one column per outcome.

    Columns are ordered by the mixed-radix outcome index over the scheme's
    groups (computational digits for singles, basis index for pairs).
    """
    n_b = state.n_sites - n_a
    if n_b < 1:
        raise ShapeMismatchError(f"no bath sites: N={state.n_sites}, N_A={n_a}")
    q = state.q
    mat = state.site_matrix(n_a)
    groups = scheme.groups(n_a, n_b)
    if isinstance(scheme, ComputationalScheme):
        return mat
    v_pair = scheme.pair_basis_matrix(q)
    dims = [q * q if kind == "pair" else q for kind, _ in groups]
    ten = mat.reshape([mat.shape[0]] + dims)
    for axis, (kind, _) in enumerate(groups, start=1):
        if kind == "pair":
            ten = np.moveaxis(np.tensordot(ten, v_pair.conj(), axes=([axis], [0])), -1, axis)
    return ten.reshape(mat.shape[0], -1)


def project_ensemble(state, n_a, scheme, p_floor=P_FLOOR):
    """Projected ensemble of the leftmost n_a sites after measuring the bath."""
    mat = projected_state_matrix(state, n_a, scheme)
    probs = np.einsum("ij,ij->j", mat.conj(), mat).real
    keep = probs > p_floor
    dropped = float(np.sum(probs[~keep]))
    kept = mat[:, keep] / np.sqrt(probs[keep])
    return ProjectedEnsemble(
        d_a=mat.shape[0], probs=probs[keep], states=kept, scheme=scheme.name,
        n_a=n_a, n_b=state.n_sites - n_a, dropped_mass=dropped,
    )


# ---------------------------------------------------------------------------
# symmetric-subspace coordinates
# ---------------------------------------------------------------------------

_SYM_CACHE = {}


def sym_basis(d, k):
    """Index matrix (D, k) of non-decreasing tuples and multinomial weights (D,)."""
    key = (d, k)
    if key not in _SYM_CACHE:
        multisets = list(itertools.combinations_with_replacement(range(d), k))
        idx = np.array(multisets, dtype=np.intp).reshape(len(multisets), k)
        coeff = np.empty(len(multisets))
        for row, ms in enumerate(multisets):
            mult = {}
            for i in ms:
                mult[i] = mult.get(i, 0) + 1
            denom = 1
            for v in mult.values():
                denom *= factorial(v)
            coeff[row] = np.sqrt(factorial(k) / denom)
        _SYM_CACHE[key] = (idx, coeff)
    return _SYM_CACHE[key]


def sym_dim(d, k):
    return comb(d + k - 1, k)


def sym_coords(psi, k):
    """Coordinates of psi^{tensor k} in the orthonormal symmetric basis."""
    psi = np.asarray(psi, dtype=complex)
    return sym_coords_block(psi.reshape(-1, 1), k)[:, 0]


def sym_coords_block(psis, k):
    """Column-wise sym_coords for a (d, B) block of vectors; returns (D, B)."""
    idx, coeff = sym_basis(psis.shape[0], k)
    out = psis[idx[:, 0], :].copy()
    for j in range(1, k):
        out *= psis[idx[:, j], :]
    out *= coeff[:, None]
    return out


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

@dataclass
class MomentOperator:
    """k-th moment, stored either on the full d^k space or the symmetric subspace."""

    d: int
    k: int
    repr: str  # "full" | "symmetric"
    matrix: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]


def moment_k(ens, k, repr="symmetric", cap=FULL_CAP, block=BLOCK):
    """rho^(k) = sum_z p(z) (|psi(z)><psi(z)|)^{tensor k} of a projected ensemble."""
    if k < 1:
        raise InvalidDimensionError(f"moment order must be >= 1, got {k}")
    d = ens.d_a
    if repr == "full":
        if d**k > cap:
            raise CapExceededError(f"full representation needs d^k = {d**k} > cap {cap}")
        dim = d**k
        rho = np.zeros((dim, dim), dtype=complex)
        for j in range(ens.n_entries):
            psik = ens.states[:, j]
            for _ in range(k - 1):
                psik = np.kron(psik, ens.states[:, j])
            rho += ens.probs[j] * np.outer(psik, psik.conj())
    elif repr == "symmetric":
        dim = sym_dim(d, k)
        rho = np.zeros((dim, dim), dtype=complex)
        for start in range(0, ens.n_entries, block):
            stop = min(start + block, ens.n_entries)
            coords = sym_coords_block(ens.states[:, start:stop], k)
            coords *= np.sqrt(ens.probs[start:stop])[None, :]
            rho += coords @ coords.conj().T
    else:
        raise InvalidDimensionError(f"unknown repr {repr!r}")
    rho = 0.5 * (rho + rho.conj().T)
    return MomentOperator(d=d, k=k, repr=repr, matrix=rho)


def haar_moment(d, k, repr="symmetric", cap=FULL_CAP):
    """Haar k-th moment: sum_pi P(pi) / d^(k rising) on the full space, or
    identity / D_sym on the symmetric subspace."""
    if repr == "symmetric":
        dim = sym_dim(d, k)
        return MomentOperator(d=d, k=k, repr=repr, matrix=np.eye(dim) / dim)
    if d**k > cap:
        raise CapExceededError(f"full representation needs d^k = {d**k} > cap {cap}")
    acc = np.zeros((d**k, d**k))
    for perm in permutations_of(k):
        acc += permutation_operator(perm, d)
    return MomentOperator(d=d, k=k, repr="full", matrix=(acc / rising_factorial(d, k)).astype(complex))


def delta_k(ens, k, repr="symmetric", cap=FULL_CAP):
    """Trace-norm distance 0.5 || rho_ens^(k) - rho_Haar^(k) ||_1."""
    mom = moment_k(ens, k, repr=repr, cap=cap)
    if repr == "symmetric":
        lam = np.linalg.eigvalsh(mom.matrix)
        return float(0.5 * np.sum(np.abs(lam - 1.0 / mom.dim)))
    haar = haar_moment(ens.d_a, k, repr="full", cap=cap)
    return float(0.5 * trace_norm(mom.matrix - haar.matrix, herm_tol=1e-8))


def rho_nk(state, n_a, scheme, n, k, cap=FULL_CAP, p_floor=P_FLOOR):
    """Replica operator sum_z p(z)^n (|psit(z)><psit(z)|)^{tensor k} with the
    unnormalized projected states psit; equals sum_z p^{n+k} (|psi><psi|)^{(x)k}."""
    if k < 1:
        raise InvalidDimensionError(f"k must be >= 1, got {k}")
    d = state.q**n_a
    if d**k > cap:
        raise CapExceededError(f"rho_nk needs d_A^k = {d**k} > cap {cap}")
    mat = projected_state_matrix(state, n_a, scheme)
    probs = np.einsum("ij,ij->j", mat.conj(), mat).real
    rho = np.zeros((d**k, d**k), dtype=complex)
    for j in range(mat.shape[1]):
        p = probs[j]
        if p <= p_floor:
            continue
        psi = mat[:, j] / np.sqrt(p)
        psik = psi
        for _ in range(k - 1):
            psik = np.kron(psik, psi)
        rho += p ** (n + k) * np.outer(psik, psik.conj())
    return 0.5 * (rho + rho.conj().T)


def permutation_sum(d, k):
    """sum_pi P(pi) on (C^d)^{tensor k} (the un-normalized Haar-moment numerator)."""
    acc = np.zeros((d**k, d**k))
    for perm in permutations_of(k):
        acc += permutation_operator(perm, d)
    return acc


def span_distance(op, target):
    """Frobenius distance between op/||op|| and its projection onto span{target}."""
    a = op / np.linalg.norm(op)
    b = target / np.linalg.norm(target)
    ov = np.vdot(b.reshape(-1), a.reshape(-1))
    return float(np.linalg.norm(a - ov * b))
