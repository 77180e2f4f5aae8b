"""Permutation-group combinatorics for Haar moment calculus.

Cycle counts, unsigned Stirling numbers of the first kind, rising factorials,
Weingarten functions obtained by inverting the permutation Gram matrix
d^{c(sigma tau^-1)}, and the m-fold Haar twirl (exact and Monte Carlo).
"""

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import CapExceededError, InvalidDimensionError, ValidationError
from .linalg import haar_unitary


@dataclass(frozen=True)
class Permutation:
    """A permutation of {0..m-1}, stored as the tuple of images."""

    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValidationError(f"{self.images} is not a bijection on 0..{len(self.images)-1}")
        object.__setattr__(self, "images", tuple(int(i) for i in self.images))

    @property
    def m(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i]

    def inverse(self):
        inv = [0] * self.m
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other):
        """self after other: (self*other)(i) = self(other(i))."""
        if self.m != other.m:
            raise ValidationError("cannot compose permutations of different degree")
        return Permutation(tuple(self.images[other.images[i]] for i in range(self.m)))

    def cycles(self):
        seen = [False] * self.m
        out = []
        for start in range(self.m):
            if seen[start]:
                continue
            cyc = []
            i = start
            while not seen[i]:
                seen[i] = True
                cyc.append(i)
                i = self.images[i]
            out.append(tuple(cyc))
        return out

    def cycle_type(self):
        """Cycle lengths, sorted descending (conjugacy-class label)."""
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))


def identity_permutation(m):
    return Permutation(tuple(range(m)))


def permutations_of(m):
    """All of S_m in lexicographic order of the image tuples."""
    return [Permutation(p) for p in itertools.permutations(range(m))]


def cycle_count(p):
    return len(p.cycles())


def stirling_first(m, ell):
    """Unsigned Stirling number of the first kind [m, ell].

    Recurrence [m, ell] = [m-1, ell-1] + (m-1) [m-1, ell]; these are the
    coefficients of the rising factorial and count m-permutations with ell
    cycles.
    """
    if ell < 0 or ell > m:
        return 0
    row = [1]  # m = 0
    for n in range(1, m + 1):
        new = [0] * (n + 1)
        for k in range(1, n + 1):
            new[k] = (row[k - 1] if k - 1 <= n - 1 else 0) + (n - 1) * (row[k] if k <= n - 1 else 0)
        row = new
    return row[ell]


def rising_factorial(d, m):
    """d (d+1) ... (d+m-1); exact integer arithmetic, m = 0 gives 1."""
    if d < 1 or m < 0:
        raise InvalidDimensionError(f"rising_factorial needs d >= 1, m >= 0, got {d}, {m}")
    out = 1
    for j in range(m):
        out *= d + j
    return out


@dataclass(frozen=True)
class WeingartenTable:
    """Weingarten values for S_m at dimension d, keyed by cycle type."""

    m: int
    d: int
    values: dict  # cycle_type tuple -> float
    representatives: dict  # cycle_type tuple -> Permutation (lexicographically least)

    def value(self, perm):
        return self.values[perm.cycle_type()]

    def sum_over_group(self):
        perms = permutations_of(self.m)
        return float(sum(self.value(p) for p in perms))


def weingarten(m, d, class_tol=1e-10):
    """Weingarten table from inverting the Gram matrix G[s,t] = d^{c(s t^-1)}.

    Requires d >= m so the Gram matrix is nonsingular.  The table records one
    value per cycle type; inversion results are checked to be constant on
    conjugacy classes within class_tol.
    """
    if d < m:
        raise InvalidDimensionError(f"weingarten requires d >= m (Gram singular otherwise), got m={m}, d={d}")
    perms = permutations_of(m)
    n = len(perms)
    gram = np.empty((n, n))
    for i, s in enumerate(perms):
        for j, t in enumerate(perms):
            gram[i, j] = float(d) ** cycle_count(s.compose(t.inverse()))
    winv = np.linalg.inv(gram)
    # Wg(sigma) = (G^-1) entry at any (i, j) with p_i p_j^-1 ~ sigma; column of identity works.
    id_idx = perms.index(identity_permutation(m))
    values, reps = {}, {}
    for i, p in enumerate(perms):
        ct = p.cycle_type()
        val = winv[i, id_idx]
        if ct in values:
            if abs(values[ct] - val) > class_tol * max(1.0, abs(val)):
                raise ValidationError(f"Weingarten value not constant on class {ct}")
        else:
            values[ct] = float(val)
            reps[ct] = p
    return WeingartenTable(m=m, d=d, values=values, representatives=reps)


def permutation_operator(perm, d):
    """P(pi) on (C^d)^{tensor m}: P|i_1..i_m> = |i_{pi(1)}..i_{pi(m)}>."""
    m = perm.m
    dim = d**m
    out = np.zeros((dim, dim))
    strides = [d ** (m - 1 - a) for a in range(m)]
    for idxs in itertools.product(range(d), repeat=m):
        col = sum(idxs[a] * strides[a] for a in range(m))
        tgt = tuple(idxs[perm(a)] for a in range(m))
        row = sum(tgt[a] * strides[a] for a in range(m))
        out[row, col] = 1.0
    return out


def haar_twirl_exact(d, m, cap=65536):
    """Matrix of X -> E[U^{(m)} X U^{(m)dag}] on vec(X), row-major vec.

    Built from the Weingarten expansion; index grouping (a_1..a_m, a'_1..a'_m)
    on rows and (b_1..b_m, b'_1..b'_m) on columns, i.e. it acts on vec(X) with
    X an operator on (C^d)^{tensor m}.
    """
    dim = d ** (2 * m)
    if dim * dim > cap * cap:
        raise CapExceededError(f"exact twirl at d={d}, m={m} needs a {dim}x{dim} matrix")
    wg = weingarten(m, d)
    perms = permutations_of(m)
    out = np.zeros((dim, dim))
    for sigma in perms:
        p_sig = permutation_operator(sigma, d)
        for tau in perms:
            p_tau = permutation_operator(tau, d)
            out += wg.value(sigma.compose(tau.inverse())) * np.kron(
                p_sig.reshape(-1, 1), p_tau.reshape(1, -1)
            ).reshape(dim, dim)
    return out


def haar_twirl_mc(d, m, samples, seed, cap=65536):
    """Monte-Carlo estimate of E[U^{tensor m} (x) conj(U)^{tensor m}].

    Same index grouping as haar_twirl_exact, so the two are directly
    comparable entrywise.
    """
    dim = d ** (2 * m)
    if dim * dim > cap * cap:
        raise CapExceededError(f"MC twirl at d={d}, m={m} needs a {dim}x{dim} matrix")
    acc = np.zeros((dim, dim), dtype=complex)
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(samples):
        u = _haar_from_rng(rng, d)
        um = u
        for _ in range(m - 1):
            um = np.kron(um, u)
        full = np.kron(um, um.conj())
        acc += full
    return acc / samples


def _haar_from_rng(rng, d):
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def twirl_apply(twirl, x):
    """Apply a twirl matrix (from haar_twirl_*) to an operator x."""
    dim = x.shape[0] * x.shape[1]
    return (twirl @ x.reshape(dim)).reshape(x.shape)
