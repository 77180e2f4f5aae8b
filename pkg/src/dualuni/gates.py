"""Biunitary building blocks and the dual-unitary gates made from them.

Index convention for a two-site gate on local dimension q: the rank-4 tensor
U[a, b, c, d] has (a, b) as the (left, right) output legs and (c, d) as the
(left, right) input legs; the matrix form acts as |out> = U |in> with row
index a*q + b and column index c*q + d.  The dual gate is the leg reshuffle
Ut[a, b, c, d] = U[d, b, c, a], exchanging the roles of space and time.
"""

import importlib.resources
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimensionError, ShapeMismatchError, ValidationError
from .linalg import closest_unitary, dagger, max_abs, unitarity_violation

DEFAULT_TOL = 1e-10


# ---------------------------------------------------------------------------
# gate container
# ---------------------------------------------------------------------------

@dataclass
class Gate:
    """Two-site gate stored as a (q, q, q, q) complex tensor plus certificates."""

    q: int
    tensor: np.ndarray
    certificates: dict = field(default_factory=dict)

    @classmethod
    def from_matrix(cls, m, q=None, validate=True):
        m = np.asarray(m, dtype=complex)
        if q is None:
            q = int(round(np.sqrt(m.shape[0])))
        if m.shape != (q * q, q * q):
            raise ShapeMismatchError(f"gate matrix must be q^2 x q^2, got {m.shape} for q={q}")
        g = cls(q=q, tensor=m.reshape(q, q, q, q))
        if validate:
            g.recertify()
        return g

    @property
    def matrix(self):
        return self.tensor.reshape(self.q**2, self.q**2)

    def recertify(self, tol=DEFAULT_TOL):
        """Recompute the (unitary, dual_unitary, kim_property) certificates."""
        self.certificates = {
            "unitary": bool(unitarity_violation(self.matrix) < tol),
            "dual_unitary": is_dual_unitary(self, tol),
            "kim_property": check_kim_property(self, tol),
            "tol": float(tol),
        }
        return self.certificates

    def to_json(self):
        entries = [[float(z.real), float(z.imag)] for z in self.tensor.reshape(-1)]
        return {"q": self.q, "entries": entries, "certificates": dict(self.certificates)}

    @classmethod
    def from_json(cls, obj, revalidate=True):
        q = int(obj["q"])
        flat = np.array([complex(re, im) for re, im in obj["entries"]])
        if flat.size != q**4:
            raise ShapeMismatchError(f"gate JSON has {flat.size} entries, expected q^4 = {q**4}")
        g = cls(q=q, tensor=flat.reshape(q, q, q, q),
                certificates=dict(obj.get("certificates", {})))
        if revalidate:
            stored = dict(g.certificates)
            fresh = g.recertify(tol=float(stored.get("tol", DEFAULT_TOL)))
            for key, val in stored.items():
                if key != "tol" and key in fresh and bool(val) != fresh[key]:
                    raise ValidationError(f"stored certificate {key}={val} fails revalidation")
        return g


def _as_tensor(gate):
    if isinstance(gate, Gate):
        return gate.tensor, gate.q
    t = np.asarray(gate, dtype=complex)
    if t.ndim == 2:
        q = int(round(np.sqrt(t.shape[0])))
        t = t.reshape(q, q, q, q)
    return t, t.shape[0]


# ---------------------------------------------------------------------------
# complex Hadamard matrices
# ---------------------------------------------------------------------------

def fourier_matrix(q):
    """Fourier matrix K[a, b] = exp(2 pi i a b / q), 0-based indices."""
    if q < 2:
        raise InvalidDimensionError(f"fourier_matrix needs q >= 2, got {q}")
    ab = np.outer(np.arange(q), np.arange(q))
    return np.exp(2j * np.pi * ab / q)


def hadamard_violation(m):
    """Worst deviation from { H^dag H = q I, |H_ab| = 1 }."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got {m.shape}")
    q = m.shape[0]
    return max(max_abs(dagger(m) @ m - q * np.eye(q)), max_abs(np.abs(m) - 1.0))


def is_complex_hadamard(m, tol=1e-12):
    return hadamard_violation(m) < tol


# ---------------------------------------------------------------------------
# unitary error bases
# ---------------------------------------------------------------------------

@dataclass
class UnitaryErrorBasis:
    """q^2 pairwise trace-orthogonal unitaries on C^q."""

    q: int
    members: list

    def pair_states(self):
        """Normalized two-site amplitude matrices alpha = member / sqrt(q)."""
        return [m / np.sqrt(self.q) for m in self.members]

    def to_json(self):
        return {"q": self.q,
                "members": [[[ [z.real, z.imag] for z in row] for row in m] for m in self.members]}

    @classmethod
    def from_json(cls, obj):
        q = int(obj["q"])
        members = [np.array([[complex(re, im) for re, im in row] for row in m]) for m in obj["members"]]
        basis = cls(q=q, members=members)
        if not is_ueb(basis):
            raise ValidationError("UEB JSON fails the orthogonality/unitarity certificate")
        return basis


def ueb_violation(basis):
    members = basis.members if isinstance(basis, UnitaryErrorBasis) else list(basis)
    q = members[0].shape[0]
    worst = 0.0 if len(members) == q * q else float("inf")
    for m in members:
        worst = max(worst, unitarity_violation(m))
    for i, a in enumerate(members):
        for j, b in enumerate(members):
            ov = np.trace(dagger(a) @ b)
            worst = max(worst, abs(ov - (q if i == j else 0.0)))
    return worst


def is_ueb(basis, tol=1e-12):
    return ueb_violation(basis) < tol


def generalized_pauli_ueb(q):
    """Shift-and-clock basis {X^j Z^k}; reduces to the Paulis (up to phase) at q=2."""
    if q < 2:
        raise InvalidDimensionError(f"generalized_pauli_ueb needs q >= 2, got {q}")
    omega = np.exp(2j * np.pi / q)
    shift = np.zeros((q, q), dtype=complex)
    for i in range(q):
        shift[(i + 1) % q, i] = 1.0
    clock = np.diag(omega ** np.arange(q))
    members = []
    for j in range(q):
        xj = np.linalg.matrix_power(shift, j)
        for k in range(q):
            members.append(xj @ np.linalg.matrix_power(clock, k))
    return UnitaryErrorBasis(q=q, members=members)


# ---------------------------------------------------------------------------
# dual-unitarity
# ---------------------------------------------------------------------------

def dual(gate):
    """Leg reshuffle Ut[a,b,c,d] = U[d,b,c,a]; an exact involution."""
    t, q = _as_tensor(gate)
    dt = np.einsum("dbca->abcd", t)
    if isinstance(gate, Gate):
        g = Gate(q=q, tensor=dt)
        g.recertify()
        return g
    return dt


def dual_unitarity_violation(gate):
    t, q = _as_tensor(gate)
    return max(unitarity_violation(t.reshape(q * q, q * q)),
               unitarity_violation(np.einsum("dbca->abcd", t).reshape(q * q, q * q)))


def is_dual_unitary(gate, tol=DEFAULT_TOL):
    return dual_unitarity_violation(gate) < tol


def kim_property_violation(gate):
    """Worst deviation from sum_c U_{z0z1,cb} U^dag_{ca,z0z1} = delta_ab / q
    (and the mirrored contraction), over all fixed (z0, z1)."""
    t, q = _as_tensor(gate)
    eye = np.eye(q)
    worst = 0.0
    for z0 in range(q):
        for z1 in range(q):
            a = t[z0, z1]  # q x q over the input legs (c, d)
            worst = max(worst, max_abs(dagger(a) @ a - eye / q))
            worst = max(worst, max_abs(a @ dagger(a) - eye / q))
    return worst


def check_kim_property(gate, tol=DEFAULT_TOL):
    return kim_property_violation(gate) < tol


# ---------------------------------------------------------------------------
# gate families
# ---------------------------------------------------------------------------

def hadamard_gate(e, f, g, h, h1=None, h2=None, tol=1e-10):
    """Dual-unitary gate U_{ab,cd} = E_ab F_bd G_dc H_ca / q from four complex
    Hadamard matrices, dressed by diagonal one-site phases exp(i(h1[a]+h2[b])/2)."""
    mats = [np.asarray(x, dtype=complex) for x in (e, f, g, h)]
    q = mats[0].shape[0]
    for name, m in zip("EFGH", mats):
        if m.shape != (q, q):
            raise ShapeMismatchError(f"{name} has shape {m.shape}, expected ({q}, {q})")
        if not is_complex_hadamard(m, tol=1e-10):
            raise ValidationError(f"{name} is not a complex Hadamard matrix "
                                  f"(violation {hadamard_violation(m):.3e})")
    h1 = np.zeros(q) if h1 is None else np.asarray(h1, dtype=float)
    h2 = np.zeros(q) if h2 is None else np.asarray(h2, dtype=float)
    if h1.shape != (q,) or h2.shape != (q,):
        raise ShapeMismatchError("phase vectors must have length q")
    e, f, g, h = mats
    t = np.einsum("ab,bd,dc,ca->abcd", e, f, g, h) / q
    phase = np.exp(0.5j * (h1[:, None] + h2[None, :]))
    gate = Gate(q=q, tensor=t * phase[:, :, None, None])
    gate.recertify(tol)
    return gate


def kim_gate(j, b, h1, h2):
    """Kicked-Ising two-site gate I (K x K) I with I = exp[i J Z1 Z2 + i(h1 Z1 + h2 Z2)/2]
    and K = exp[i b X]; dual-unitary exactly at |J| = |b| = pi/4."""
    s = np.array([1.0, -1.0])  # Z eigenvalues indexed by the computational label
    diag = np.exp(1j * (j * np.outer(s, s) + 0.5 * (h1 * s[:, None] + h2 * s[None, :])))
    ising = np.diag(diag.reshape(4))
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    kick = np.cos(b) * np.eye(2) + 1j * np.sin(b) * x
    gate = Gate.from_matrix(ising @ np.kron(kick, kick) @ ising, q=2, validate=False)
    gate.recertify()
    return gate


def cat_map_gate(q):
    """U_{ab,cd} = exp[(2 pi i / q)(ab + cd + ac - bd)] / q; equals the Hadamard
    gate built from (K, K*, K, K) with K the Fourier matrix."""
    if q < 2:
        raise InvalidDimensionError(f"cat_map_gate needs q >= 2, got {q}")
    a, b, c, d = np.meshgrid(*(np.arange(q),) * 4, indexing="ij")
    gate = Gate(q=q, tensor=np.exp(2j * np.pi / q * (a * b + c * d + a * c - b * d)) / q)
    gate.recertify()
    return gate


def ueb_gate(e, f, g, h, tol=DEFAULT_TOL):
    """Dual-unitary gate on local dimension q^2 from four unitary error bases:
    U_{ab,cd} = (1/q) sum_n (E_n)_{a2 b1} (F_n)_{b2 d2} (G_n)_{d1 c2} (H_n)_{c1 a1},
    with each q^2-dimensional leg split as a = (a1, a2)."""
    bases = [x if isinstance(x, UnitaryErrorBasis) else UnitaryErrorBasis(q=x[0].shape[0], members=list(x))
             for x in (e, f, g, h)]
    q = bases[0].q
    for name, basis in zip("EFGH", bases):
        if basis.q != q:
            raise ShapeMismatchError(f"basis {name} has q={basis.q}, expected {q}")
        if not is_ueb(basis):
            raise ValidationError(f"basis {name} fails the UEB certificate")
    em = np.array(bases[0].members)
    fm = np.array(bases[1].members)
    gm = np.array(bases[2].members)
    hm = np.array(bases[3].members)
    # legs a=(a1,a2) etc.; factors E_{a2 b1}, F_{b2 d2}, G_{d1 c2}, H_{c1 a1};
    # target axis order (a1,a2,b1,b2,c1,c2,d1,d2)
    t8 = np.einsum("nxy,nzw,nuv,nst->txyzsvuw", em, fm, gm, hm) / q
    gate = Gate(q=q * q, tensor=t8.reshape(q * q, q * q, q * q, q * q))
    gate.recertify(tol)
    return gate


def is_clifford_gate(gate, tol=DEFAULT_TOL):
    """True iff conjugating every 2-qubit Pauli string yields a phase times a
    single Pauli string (q = 2 only)."""
    t, q = _as_tensor(gate)
    if q != 2:
        raise InvalidDimensionError("the Clifford test is implemented for q = 2 only")
    u = t.reshape(4, 4)
    p1 = [np.eye(2, dtype=complex),
          np.array([[0, 1], [1, 0]], dtype=complex),
          np.array([[0, -1j], [1j, 0]]),
          np.array([[1, 0], [0, -1]], dtype=complex)]
    strings = [np.kron(a, b) for a in p1 for b in p1]
    for p in strings:
        c = u @ p @ dagger(u)
        hits = 0
        for s in strings:
            ov = np.trace(dagger(s) @ c) / 4.0
            if abs(ov) > tol:
                hits += 1
                if abs(abs(ov) - 1.0) > tol:
                    return False
        if hits != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# projection onto the dual-unitary manifold, App. C fixtures
# ---------------------------------------------------------------------------

def project_dual_unitary(m, tol=1e-13, max_iter=200):
    """Alternating polar projections onto the unitary and dual-reshuffle-unitary
    manifolds; converges to an exactly dual-unitary gate near a noisy one."""
    m = np.asarray(m, dtype=complex)
    q = int(round(np.sqrt(m.shape[0])))
    cur = m
    for _ in range(max_iter):
        cur = closest_unitary(cur)
        td = np.einsum("dbca->abcd", cur.reshape(q, q, q, q))
        td = closest_unitary(td.reshape(q * q, q * q)).reshape(q, q, q, q)
        cur = np.einsum("dbca->abcd", td).reshape(q * q, q * q)
        if dual_unitarity_violation(cur) < tol:
            return closest_unitary(cur)
    raise ValidationError("alternating projection did not reach a dual-unitary gate; "
                          f"violation {dual_unitarity_violation(cur):.3e} after {max_iter} iterations")


def _fixture_path(name):
    return importlib.resources.files("dualuni.fixtures").joinpath(name)


def list_fixtures():
    root = importlib.resources.files("dualuni.fixtures")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def load_fixture(name):
    """Load a bundled JSON fixture (gate or UEB) by file name."""
    with _fixture_path(name).open("r") as fh:
        obj = json.load(fh)
    if "members" in obj:
        return UnitaryErrorBasis.from_json(obj)
    return Gate.from_json(obj, revalidate=False)


def app_c_gate(kind="dual_unitary", project=True):
    """The 4 x 4 two-qubit fixtures printed to four decimals; with project=True
    the dual-unitary one is snapped onto the dual-unitary manifold and the
    plain unitary one onto the unitary group."""
    name = {"dual_unitary": "appc_dual_unitary.json", "unitary": "appc_unitary.json"}[kind]
    gate = load_fixture(name)
    if project:
        if kind == "dual_unitary":
            gate = Gate.from_matrix(project_dual_unitary(gate.matrix), q=2)
        else:
            gate = Gate.from_matrix(closest_unitary(gate.matrix), q=2)
    return gate
