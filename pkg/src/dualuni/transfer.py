"""Space-direction transfer matrices of the folded measurement-averaged circuit.

Geometry (reconstructed numerically; see README):  two-site initial pairs sit
on (1,2), (3,4), ...; the first brick-wall layer straddles them.  One column
of the diagram contains, bottom to top: the pair tensor N, t straddling
first-layer gates (A), t aligned second-layer gates (B), and the measurement
outcome on top of B_t.

For the computational scheme the outcome projectors and the product-state kets
factorize into the column, leaving 2t-1 cut legs per copy layer.  For the
UEB scheme the initial pair straddles the cut at the bottom and the outcome
pair straddles at the top, so the cut carries 2t+1 legs per copy layer (bond
dimension 1; the bottom leg is the pair's left physical leg).

Single-outcome transfers of solvable schemes are unitary matrices divided by
q; the measurement-summed folded transfer T_m then has the m!-fold permutation
eigenoperators at eigenvalue q^{2(1-m)}.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceededError, InvalidDimensionError, ShapeMismatchError
from .gates import Gate, UnitaryErrorBasis
from .haar import Permutation, permutations_of
from .states import SolvableMPS, is_solvable_mps

OUTCOME_CAP = 256
OPERAND_CAP = 4_194_304
DENSE_CAP = 4096


# ---------------------------------------------------------------------------
# schemes
# ---------------------------------------------------------------------------

@dataclass
class ComputationalTransferScheme:
    """Fixed computational initial pair (s1, s2); outcomes are the q^2 pairs (z0, z1)."""

    ket: tuple = (0, 0)
    name = "computational"

    def n_cut_legs(self, t):
        return 2 * t - 1

    def outcomes(self, q):
        return [(z0, z1) for z0 in range(q) for z1 in range(q)]


@dataclass
class UebTransferScheme:
    """UEB pair measurements with a chi = 1 solvable pair tensor at the bottom.

    mps may be a SolvableMPS (chi = 1) or a (q, q) normalized amplitude matrix
    with sqrt(q) * matrix unitary.
    """

    basis: UnitaryErrorBasis
    mps: object
    name = "ueb"

    def pair_tensor(self, q):
        if isinstance(self.mps, SolvableMPS):
            if self.mps.chi != 1:
                raise InvalidDimensionError("transfer matrices support chi = 1 pair tensors only")
            if not is_solvable_mps(self.mps, tol=1e-8):
                raise ShapeMismatchError("initial MPS fails the solvability certificate")
            n = self.mps.pair_amplitudes()
        else:
            n = np.asarray(self.mps, dtype=complex)
        if n.shape != (q, q):
            raise ShapeMismatchError(f"pair tensor has shape {n.shape}, expected ({q}, {q})")
        return n

    def n_cut_legs(self, t):
        return 2 * t + 1

    def outcomes(self, q):
        if self.basis.q != q:
            raise ShapeMismatchError(f"UEB basis has q={self.basis.q}, expected {q}")
        return self.basis.pair_states()


@dataclass
class TransferSpec:
    """Folded transfer-matrix description: gate, time extent, scheme, replica count."""

    gate: Gate
    t: int
    scheme: object
    m: int = 1
    outcome_cap: int = OUTCOME_CAP
    operand_cap: int = OPERAND_CAP

    def __post_init__(self):
        if self.t < 1:
            raise InvalidDimensionError(f"t must be >= 1, got {self.t}")
        if self.m < 1:
            raise InvalidDimensionError(f"m must be >= 1, got {self.m}")

    @property
    def q(self):
        return self.gate.q

    @property
    def n_cut_legs(self):
        return self.scheme.n_cut_legs(self.t)

    @property
    def column_dim(self):
        return self.q**self.n_cut_legs

    @property
    def operand_dim(self):
        return self.column_dim ** (2 * self.m)

    def check_caps(self):
        if self.column_dim > self.outcome_cap:
            raise CapExceededError(
                f"single-outcome transfer dimension {self.column_dim} exceeds cap {self.outcome_cap}")
        if self.operand_dim > self.operand_cap:
            raise CapExceededError(
                f"folded operand dimension {self.operand_dim} exceeds cap {self.operand_cap}")


# ---------------------------------------------------------------------------
# column construction
# ---------------------------------------------------------------------------

def _fresh_labels():
    counter = [0]

    def new():
        counter[0] += 1
        return counter[0] - 1

    return new


def _column_ueb(tensor, t, pair, bra):
    """Full 2t+1-leg column; bra is the outcome amplitude matrix (conjugated here).

    Cut legs bottom to top: the pair's left physical leg, then alternating
    B_s.left_in / B_s.left_out rungs, ending with B_t.left_out (left side);
    the right side mirrors it one column over.
    """
    q = tensor.shape[0]
    new = _fresh_labels()
    lam = [new() for _ in range(2 * t + 1)]
    rho = [new() for _ in range(2 * t + 1)]
    n2 = new()
    alo = [new() for _ in range(t)]
    bro = [new() for _ in range(t - 1)]
    top = new()
    ops = [np.asarray(pair, dtype=complex), [lam[0], n2]]
    for s in range(t):  # first-layer gates, legs (left_out, right_out, left_in, right_in)
        left_in = n2 if s == 0 else bro[s - 1]
        ops += [tensor, [alo[s], rho[2 * s + 1], left_in, rho[2 * s]]]
    for s in range(t):  # second-layer gates
        left_out = lam[2 * s + 2]
        right_out = bro[s] if s < t - 1 else top
        ops += [tensor, [left_out, right_out, lam[2 * s + 1], alo[s]]]
    ops += [np.asarray(bra, dtype=complex).conj(), [top, rho[2 * t]]]
    out = np.einsum(*ops, lam + rho, optimize=True)
    d = q ** (2 * t + 1)
    return out.reshape(d, d)


def _column_comp(tensor, t, ket, outcome):
    """2t-1-leg column with the kets and single-site outcome bras absorbed."""
    q = tensor.shape[0]
    s1, s2 = ket
    z0, z1 = outcome
    new = _fresh_labels()
    lam = [new() for _ in range(2 * t - 1)]
    rho = [new() for _ in range(2 * t - 1)]
    n2 = new()
    ro0 = new()
    la_top = new()
    top = new()
    alo = [new() for _ in range(t)]
    bro = [new() for _ in range(t - 1)]
    e = np.eye(q)
    ops = [e[s2], [n2], e[s1], [ro0]]
    for s in range(t):
        left_in = n2 if s == 0 else bro[s - 1]
        right_in = ro0 if s == 0 else rho[2 * s - 1]
        ops += [tensor, [alo[s], rho[2 * s], left_in, right_in]]
    for s in range(t):
        left_out = lam[2 * s + 1] if s < t - 1 else la_top
        right_out = bro[s] if s < t - 1 else top
        ops += [tensor, [left_out, right_out, lam[2 * s], alo[s]]]
    ops += [e[z0], [la_top], e[z1], [top]]
    out = np.einsum(*ops, lam + rho, optimize=True)
    d = q ** (2 * t - 1)
    return out.reshape(d, d)


def single_outcome_transfer(gate, t, outcome, scheme, cap=OUTCOME_CAP):
    """Dense transfer matrix for one measurement outcome.

    outcome: a (z0, z1) digit pair for the computational scheme, or a (q, q)
    normalized pair-state amplitude matrix for the UEB scheme.
    """
    q = gate.q
    n_legs = scheme.n_cut_legs(t)
    if q**n_legs > cap:
        raise CapExceededError(f"column dimension {q**n_legs} exceeds cap {cap}")
    if isinstance(scheme, ComputationalTransferScheme):
        return _column_comp(gate.tensor, t, scheme.ket, outcome)
    return _column_ueb(gate.tensor, t, scheme.pair_tensor(q), outcome)


def outcome_transfers(spec):
    """All single-outcome transfer matrices of a spec, in outcome order."""
    spec.check_caps()
    return [single_outcome_transfer(spec.gate, spec.t, o, spec.scheme, cap=spec.outcome_cap)
            for o in spec.scheme.outcomes(spec.q)]


def proportionality_factor(m):
    """(c, dev): the least-squares c with M^dag M ~ c^2 I, and max |M^dag M - c^2 I|."""
    gram = m.conj().T @ m
    c2 = float(np.trace(gram).real / m.shape[0])
    dev = float(np.max(np.abs(gram - c2 * np.eye(m.shape[0]))))
    return np.sqrt(max(c2, 0.0)), dev


# ---------------------------------------------------------------------------
# folded application
# ---------------------------------------------------------------------------

def _slot_permutation(n_legs, n_slots):
    """Axis order mapping site-major (site, slot) layout to slot-major."""
    return [s * n_slots + c for c in range(n_slots) for s in range(n_legs)]


def folded_transfer_apply(spec, operand, transfers=None):
    """Apply T_m = sum_outcomes (T_o (x) conj T_o)^{(x) m} to a folded operand.

    The operand is indexed site-major with 2m q-dim slots per site, ordered
    (a_1, a'_1, ..., a_m, a'_m); unconjugated copies take T_o, conjugated ones
    take conj(T_o).
    """
    spec.check_caps()
    operand = np.asarray(operand, dtype=complex).reshape(-1)
    if operand.size != spec.operand_dim:
        raise ShapeMismatchError(f"operand has dimension {operand.size}, spec wants {spec.operand_dim}")
    if transfers is None:
        transfers = outcome_transfers(spec)
    q, n_legs, n_slots = spec.q, spec.n_cut_legs, 2 * spec.m
    d = spec.column_dim
    perm = _slot_permutation(n_legs, n_slots)
    x = np.transpose(operand.reshape([q] * (n_legs * n_slots)), perm).reshape([d] * n_slots)
    acc = np.zeros_like(x)
    for t_o in transfers:
        y = x
        for c in range(n_slots):
            mat = t_o if c % 2 == 0 else t_o.conj()
            y = np.moveaxis(np.tensordot(mat, y, axes=([1], [c])), 0, c)
        acc += y
    inv = np.argsort(perm)
    return np.transpose(acc.reshape([q] * (n_legs * n_slots)), inv).reshape(-1)


def dense_folded_transfer(spec, dense_cap=DENSE_CAP, transfers=None):
    """Explicit matrix of the folded transfer (reference oracle; capped)."""
    spec.check_caps()
    if spec.operand_dim > dense_cap:
        raise CapExceededError(f"dense folded transfer at dimension {spec.operand_dim} exceeds cap {dense_cap}")
    if transfers is None:
        transfers = outcome_transfers(spec)
    q, n_legs, n_slots = spec.q, spec.n_cut_legs, 2 * spec.m
    dim = spec.operand_dim
    acc = np.zeros((dim, dim), dtype=complex)
    for t_o in transfers:
        term = np.ones((1, 1), dtype=complex)
        for c in range(n_slots):
            term = np.kron(term, t_o if c % 2 == 0 else t_o.conj())
        acc += term
    # reorder both row and column multi-indices from slot-major to site-major
    perm = _slot_permutation(n_legs, n_slots)
    src = [perm.index(p) for p in range(len(perm))]
    nax = n_legs * n_slots
    ten = acc.reshape([q] * (2 * nax))
    ten = np.transpose(ten, src + [nax + a for a in src])
    return ten.reshape(dim, dim)


# ---------------------------------------------------------------------------
# permutation eigenoperators
# ---------------------------------------------------------------------------

def permutation_eigenoperator(perm, spec):
    """|pi_m): per-site pairing deltas delta_{a_i, a'_{pi(i)}} over all cut legs."""
    if isinstance(perm, tuple):
        perm = Permutation(perm)
    if perm.m != spec.m:
        raise ShapeMismatchError(f"permutation degree {perm.m} does not match m={spec.m}")
    q, m = spec.q, spec.m
    site = np.zeros([q] * (2 * m))
    # slots per site are (a_1, a'_1, ..., a_m, a'_m); pairing a_i = a'_{pi(i)}
    for a in np.ndindex(*([q] * m)):
        idx = [0] * (2 * m)
        for i in range(m):
            idx[2 * i] = a[i]
            idx[2 * perm(i) + 1] = a[i]
        site[tuple(idx)] = 1.0
    site = site.reshape(-1).astype(complex)
    out = site
    for _ in range(spec.n_cut_legs - 1):
        out = np.kron(out, site)
    return out


def verify_eigen(spec, perm, transfers=None):
    """Relative residual || T |pi) - q^{2(1-m)} |pi) || / || |pi) ||."""
    vec = permutation_eigenoperator(perm, spec)
    lam = float(spec.q) ** (2 * (1 - spec.m))
    image = folded_transfer_apply(spec, vec, transfers=transfers)
    return float(np.linalg.norm(image - lam * vec) / np.linalg.norm(vec))


# ---------------------------------------------------------------------------
# leading-eigenspace probe
# ---------------------------------------------------------------------------

def leading_eigs(spec, count=4, iterations=2000, tol=1e-8, seed=0, deflate=True,
                 transfers=None):
    """Deflated block subspace iteration on the folded transfer.

    Returns (magnitudes, converged): the `count` largest Ritz-value magnitudes
    of T_m restricted to the complement of the known permutation eigenoperators
    (which are deflated out when deflate=True), plus a convergence flag each.
    """
    spec.check_caps()
    if transfers is None:
        transfers = outcome_transfers(spec)
    dim = spec.operand_dim
    rng = np.random.Generator(np.random.PCG64(seed))
    block = rng.standard_normal((dim, count)) + 1j * rng.standard_normal((dim, count))
    known = None
    if deflate:
        cols = [permutation_eigenoperator(p, spec) for p in permutations_of(spec.m)]
        known, _ = np.linalg.qr(np.array(cols).T)
    if known is not None:
        block -= known @ (known.conj().T @ block)
    block, _ = np.linalg.qr(block)
    prev = np.full(count, np.inf)
    mags = np.zeros(count)
    converged = np.zeros(count, dtype=bool)
    for _ in range(iterations):
        image = np.column_stack([folded_transfer_apply(spec, block[:, j], transfers=transfers)
                                 for j in range(count)])
        if known is not None:
            image -= known @ (known.conj().T @ image)
        small = block.conj().T @ image
        ritz = np.linalg.eigvals(small)
        mags = np.sort(np.abs(ritz))[::-1]
        converged = np.abs(mags - prev) < tol * np.maximum(1.0, mags)
        if converged.all():
            break
        prev = mags
        block, _ = np.linalg.qr(image)
    return list(mags), list(converged)


def spectral_report(spec, count=4, iterations=2000, tol=1e-8, seed=0, degeneracy_tol=1e-6):
    """Eigen residuals for every pi in S_m plus a deflated gap probe."""
    transfers = outcome_transfers(spec)
    lam = float(spec.q) ** (2 * (1 - spec.m))
    residuals = {}
    for perm in permutations_of(spec.m):
        residuals[str(perm.images)] = verify_eigen(spec, perm, transfers=transfers)
    mags, conv = leading_eigs(spec, count=count, iterations=iterations, tol=tol,
                              seed=seed, deflate=True, transfers=transfers)
    gap = lam - mags[0]
    factors = [proportionality_factor(t_o) for t_o in transfers]
    return {
        "scheme": spec.scheme.name,
        "t": spec.t,
        "m": spec.m,
        "q": spec.q,
        "leading_eigenvalue": lam,
        "residuals": residuals,
        "deflated_magnitudes": mags,
        "converged": conv,
        "gap": gap,
        "degenerate_leading_space": bool(gap < degeneracy_tol),
        "single_outcome_factors": [c for c, _ in factors],
        "single_outcome_unitarity_dev": max(dev for _, dev in factors),
    }
