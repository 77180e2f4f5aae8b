"""Reproducible experiment runner behind the CLI.

A run config describes one (gate, initial state, scheme) combination; presets
bundle the two runs of each figure.  Every run emits CSV rows with the fixed
schema and a JSON sidecar carrying the config hash and wall times.
"""

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np

from . import __version__
from .circuit import CircuitSpec, brickwall_evolve
from .ensemble import (
    BLOCK,
    ComputationalScheme,
    UebScheme,
    delta_k,
    project_ensemble,
    sym_dim,
)
from .errors import BudgetExceededError, ValidationError
from .gates import (
    Gate,
    UnitaryErrorBasis,
    app_c_gate,
    cat_map_gate,
    dual_unitarity_violation,
    fourier_matrix,
    generalized_pauli_ueb,
    hadamard_gate,
    hadamard_violation,
    kim_gate,
    kim_property_violation,
    load_fixture,
    project_dual_unitary,
    ueb_violation,
    unitarity_violation,
)
from .linalg import haar_unitary
from .states import (
    SolvableMPS,
    StateVector,
    computational_product_state,
    solvability_violation,
    solvable_mps_state,
    ueb_pair_state,
)

CSV_HEADER = "experiment_id,preset,gate,scheme,N_A,N_B,q,t,k,delta,dropped_mass,seed,wall_ms"
DEFAULT_BUDGET_MB = 3500.0


@dataclass
class RunConfig:
    """One gate/initial/scheme combination of an experiment."""

    label: str
    gate: dict
    initial: dict
    scheme: dict
    first_layer: str = "odd"


@dataclass
class ExperimentConfig:
    preset: str = "custom"
    n_a: int = 4
    n_b: int = 12
    q: int = 2
    t_max: int = 4
    k_max: int = 4
    seed: int = 1234
    runs: list = field(default_factory=list)
    budget_mb: float = DEFAULT_BUDGET_MB

    def to_json(self):
        obj = asdict(self)
        obj["runs"] = [asdict(r) if isinstance(r, RunConfig) else r for r in self.runs]
        return obj

    @classmethod
    def from_json(cls, obj):
        runs = [RunConfig(**r) for r in obj.get("runs", [])]
        keys = {k: v for k, v in obj.items() if k != "runs"}
        return cls(runs=runs, **keys)

    def config_hash(self):
        canon = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


def fig1_config(n_b=12, t_max=6, k_max=4, seed=1234):
    """Hadamard-circuit (KIM) vs generic-unitary Floquet dynamics, computational
    preparation and measurement."""
    return ExperimentConfig(
        preset="fig1", n_a=4, n_b=n_b, q=2, t_max=t_max, k_max=k_max, seed=seed,
        runs=[
            RunConfig(label="kim", first_layer="odd",
                      gate={"kind": "kim", "j": "pi/4", "b": "pi/4", "h1": 0.5, "h2": 0.5},
                      initial={"kind": "computational"},
                      scheme={"kind": "computational"}),
            RunConfig(label="haar", first_layer="odd",
                      gate={"kind": "haar_random"},
                      initial={"kind": "computational"},
                      scheme={"kind": "computational"}),
        ],
    )


def fig2_config(n_b=12, t_max=5, k_max=4, seed=1234):
    """One chaotic dual-unitary gate; solvable (Bell) preparation + measurement
    against computational preparation + measurement.  The first circuit layer
    straddles the (1,2),(3,4),... pairs, which is the solvable staggering."""
    return ExperimentConfig(
        preset="fig2", n_a=4, n_b=n_b, q=2, t_max=t_max, k_max=k_max, seed=seed,
        runs=[
            RunConfig(label="bell", first_layer="even",
                      gate={"kind": "app_c"},
                      initial={"kind": "bell_pairs"},
                      scheme={"kind": "ueb_pauli"}),
            RunConfig(label="comp", first_layer="even",
                      gate={"kind": "app_c"},
                      initial={"kind": "computational"},
                      scheme={"kind": "computational"}),
        ],
    )


PRESETS = {"fig1": fig1_config, "fig2": fig2_config}


# ---------------------------------------------------------------------------
# config resolution
# ---------------------------------------------------------------------------

def _parse_angle(x):
    if isinstance(x, str):
        table = {"pi/4": np.pi / 4, "-pi/4": -np.pi / 4, "pi/2": np.pi / 2, "pi": np.pi}
        return table[x]
    return float(x)


def build_gate(spec, q, seed):
    kind = spec["kind"]
    if kind == "kim":
        return kim_gate(_parse_angle(spec.get("j", "pi/4")), _parse_angle(spec.get("b", "pi/4")),
                        float(spec.get("h1", 0.5)), float(spec.get("h2", 0.5)))
    if kind == "hadamard":
        k = fourier_matrix(q)
        h1 = np.asarray(spec.get("h1", np.zeros(q)), dtype=float)
        h2 = np.asarray(spec.get("h2", np.zeros(q)), dtype=float)
        return hadamard_gate(k, k, k, k, h1, h2)
    if kind == "cat_map":
        return cat_map_gate(q)
    if kind == "app_c":
        return app_c_gate("dual_unitary", project=True)
    if kind == "haar_random":
        return Gate.from_matrix(haar_unitary(q * q, spec.get("seed", seed)), q=q)
    if kind == "gate_file":
        with open(spec["path"]) as fh:
            return Gate.from_json(json.load(fh))
    raise ValidationError(f"unknown gate kind {kind!r}")


def build_initial(spec, n_sites, q):
    kind = spec["kind"]
    if kind == "computational":
        digits = spec.get("digits", "0" * n_sites)
        return computational_product_state(n_sites, q, digits)
    if kind == "bell_pairs":
        alpha = np.eye(q) / np.sqrt(q)
        if n_sites % 2 == 0:
            return ueb_pair_state(alpha, n_sites // 2)
        paired = ueb_pair_state(alpha, n_sites // 2)
        leftover = computational_product_state(1, q, "0")
        return StateVector(n_sites, q, np.kron(paired.amps, leftover.amps))
    if kind == "mps_file":
        with open(spec["path"]) as fh:
            mps = SolvableMPS.from_json(json.load(fh))
        return solvable_mps_state(mps, n_sites)
    raise ValidationError(f"unknown initial-state kind {kind!r}")


def build_scheme(spec, q):
    kind = spec["kind"]
    if kind == "computational":
        return ComputationalScheme()
    if kind == "ueb_pauli":
        return UebScheme(basis=generalized_pauli_ueb(q))
    if kind == "ueb_file":
        with open(spec["path"]) as fh:
            return UebScheme(basis=UnitaryErrorBasis.from_json(json.load(fh)))
    raise ValidationError(f"unknown scheme kind {kind!r}")


# ---------------------------------------------------------------------------
# memory plan
# ---------------------------------------------------------------------------

def memory_plan(cfg):
    """Rough peak-bytes estimate for the dominant arrays of a run."""
    n = cfg.n_a + cfg.n_b
    d_a, d_b = cfg.q**cfg.n_a, cfg.q**cfg.n_b
    d_sym = sym_dim(d_a, cfg.k_max)
    bytes_state = 3 * (cfg.q**n) * 16
    bytes_proj = 2 * d_a * d_b * 16
    bytes_moment = 2 * d_sym * d_sym * 16 + d_sym * min(BLOCK, d_b) * 16
    total = bytes_state + bytes_proj + bytes_moment
    return {
        "statevector_mb": bytes_state / 1e6,
        "projection_mb": bytes_proj / 1e6,
        "moment_mb": bytes_moment / 1e6,
        "total_mb": total / 1e6,
        "budget_mb": cfg.budget_mb,
        "d_sym": d_sym,
    }


def check_budget(cfg):
    plan = memory_plan(cfg)
    if plan["total_mb"] > cfg.budget_mb:
        raise BudgetExceededError(
            f"estimated {plan['total_mb']:.0f} MB exceeds budget {cfg.budget_mb:.0f} MB; "
            f"reduce N_B (currently {cfg.n_b}) or k_max (currently {cfg.k_max})")
    return plan


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def run_experiment(cfg, out_dir, monotonicity_tol=1e-10):
    """Execute all runs of a config; returns (csv_path, sidecar_path)."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    plan = check_budget(cfg)
    exp_id = cfg.config_hash()
    rows = []
    wall_total = time.perf_counter()
    for run in cfg.runs:
        rows.extend(_execute_run(cfg, run, exp_id, monotonicity_tol))
    wall_total = (time.perf_counter() - wall_total) * 1000.0
    csv_path = f"{out_dir}/{cfg.preset}_{exp_id}.csv"
    with open(csv_path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    sidecar = {
        "config": cfg.to_json(),
        "config_hash": exp_id,
        "version": __version__,
        "memory_plan": plan,
        "wall_ms_total": wall_total,
    }
    sidecar_path = f"{out_dir}/{cfg.preset}_{exp_id}.json"
    with open(sidecar_path, "w") as fh:
        json.dump(sidecar, fh, indent=2)
    return csv_path, sidecar_path


def _execute_run(cfg, run, exp_id, monotonicity_tol):
    n = cfg.n_a + cfg.n_b
    gate = build_gate(run.gate, cfg.q, cfg.seed)
    state = build_initial(run.initial, n, cfg.q)
    scheme = build_scheme(run.scheme, cfg.q)
    ts = [0] if cfg.t_max == 0 else list(range(1, cfg.t_max + 1))
    rows = []
    current = state
    reached_t = 0
    for t in ts:
        while reached_t < t:
            current = brickwall_evolve(
                current,
                CircuitSpec(n_sites=n, q=cfg.q, t=1, gates=gate, first_layer=run.first_layer),
            )
            reached_t += 1
        t0 = time.perf_counter()
        ens = project_ensemble(current, cfg.n_a, scheme)
        deltas = {}
        for k in range(1, cfg.k_max + 1):
            deltas[k] = delta_k(ens, k)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        for k in range(1, cfg.k_max + 1):
            if k > 1 and deltas[k] < deltas[k - 1] - monotonicity_tol:
                raise RuntimeError(
                    f"trace-distance monotonicity violated at gate={run.label}, t={t}: "
                    f"Delta({k}) = {deltas[k]:.6e} < Delta({k-1}) = {deltas[k-1]:.6e}")
            if not (-1e-10 <= deltas[k] <= 1.0 + 1e-10):
                raise RuntimeError(f"Delta({k}) = {deltas[k]} outside [0, 1]")
            rows.append((
                exp_id, cfg.preset, run.label, scheme.name,
                str(cfg.n_a), str(cfg.n_b), str(cfg.q), str(t), str(k),
                f"{deltas[k]:.12e}", f"{ens.dropped_mass:.6e}", str(cfg.seed),
                f"{wall_ms:.3f}",
            ))
    return rows


# ---------------------------------------------------------------------------
# validation reports
# ---------------------------------------------------------------------------

def validate_file(path):
    """Certificate table for a gate / UEB / MPS / Hadamard JSON file."""
    with open(path) as fh:
        obj = json.load(fh)
    rows = []
    if "entries" in obj:
        gate = Gate.from_json(obj, revalidate=False)
        rows.append(("unitary", unitarity_violation(gate.matrix)))
        rows.append(("dual_unitary", dual_unitarity_violation(gate)))
        rows.append(("kim_property", kim_property_violation(gate)))
        projected = Gate.from_matrix(project_dual_unitary(gate.matrix), q=gate.q, validate=False) \
            if dual_unitarity_violation(gate) < 1e-2 else None
        if projected is not None:
            rows.append(("dual_unitary_post_polar", dual_unitarity_violation(projected)))
        kind = "gate"
    elif "members" in obj:
        basis = UnitaryErrorBasis(q=int(obj["q"]),
                                  members=[np.array([[complex(re, im) for re, im in r] for r in m])
                                           for m in obj["members"]])
        rows.append(("ueb", ueb_violation(basis)))
        kind = "ueb"
    elif "tensors" in obj:
        mps = SolvableMPS.from_json(obj)
        rows.append(("solvable", solvability_violation(mps)))
        kind = "mps"
    elif "matrix" in obj:
        mat = np.array([[complex(re, im) for re, im in row] for row in obj["matrix"]])
        rows.append(("hadamard", hadamard_violation(mat)))
        rows.append(("unitary_over_sqrt_q", unitarity_violation(mat / np.sqrt(mat.shape[0]))))
        kind = "hadamard"
    else:
        raise ValidationError(f"{path}: unrecognized JSON schema")
    return {"path": path, "kind": kind, "violations": rows}
