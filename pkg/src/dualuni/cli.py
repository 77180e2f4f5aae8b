"""Command-line interface: experiment runner, validators, transfer probes.

Subcommands: run, validate, probe-transfer, fixtures.  Thread count for the
BLAS backend can be pinned with the DUALUNI_THREADS environment variable.
Exit codes: 0 ok, 2 validation failure, 3 budget exceeded.
"""

import argparse
import json
import sys


def _build_parser():
    parser = argparse.ArgumentParser(prog="dualuni",
                                     description="dual-unitary circuit state-design experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment preset or a custom config")
    run.add_argument("--preset", choices=("fig1", "fig2", "custom"), default="custom")
    run.add_argument("--config", help="JSON config file (flags override its fields)")
    run.add_argument("--na", type=int, help="system sites")
    run.add_argument("--nb", type=int, help="bath sites")
    run.add_argument("--t-max", type=int, dest="t_max")
    run.add_argument("--k-max", type=int, dest="k_max")
    run.add_argument("--seed", type=int)
    run.add_argument("--full", action="store_true", help="use the paper-scale bath N_B = 16")
    run.add_argument("--budget-mb", type=float, dest="budget_mb")
    run.add_argument("--plan-only", action="store_true", help="print the memory plan and exit")
    run.add_argument("--out", default="runs", help="output directory")

    val = sub.add_parser("validate", help="print certificate tables for JSON files")
    val.add_argument("files", nargs="+")

    probe = sub.add_parser("probe-transfer", help="verify transfer eigenoperators, probe the gap")
    probe.add_argument("--gate", choices=("kim", "app_c", "cat_map", "hadamard"), default="kim")
    probe.add_argument("--j", default="pi/4")
    probe.add_argument("--b", default="pi/4")
    probe.add_argument("--h1", type=float, default=0.5)
    probe.add_argument("--h2", type=float, default=0.5)
    probe.add_argument("--q", type=int, default=2)
    probe.add_argument("--scheme", choices=("computational", "ueb"), default="computational")
    probe.add_argument("--t", type=int, default=2)
    probe.add_argument("--m", type=int, default=2)
    probe.add_argument("--count", type=int, default=4)
    probe.add_argument("--iterations", type=int, default=2000)
    probe.add_argument("--seed", type=int, default=0)
    probe.add_argument("--out", help="write the spectral report JSON here instead of stdout")

    fix = sub.add_parser("fixtures", help="bundled fixture files")
    fix.add_argument("action", choices=("list",))
    return parser


def _cmd_run(args):
    from .errors import BudgetExceededError
    from .experiments import ExperimentConfig, PRESETS, check_budget, memory_plan, run_experiment

    if args.config:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_json(json.load(fh))
    elif args.preset in PRESETS:
        cfg = PRESETS[args.preset]()
    else:
        print("custom runs need --config", file=sys.stderr)
        return 2
    if args.preset != "custom":
        cfg.preset = args.preset
    if args.full:
        cfg.n_b = 16
    for arg_name, cfg_name in (("na", "n_a"), ("nb", "n_b"), ("t_max", "t_max"),
                               ("k_max", "k_max"), ("seed", "seed"), ("budget_mb", "budget_mb")):
        val = getattr(args, arg_name)
        if val is not None:
            setattr(cfg, cfg_name, val)
    plan = memory_plan(cfg)
    print("memory plan: " + ", ".join(f"{k}={v:.1f}" if isinstance(v, float) else f"{k}={v}"
                                      for k, v in plan.items()))
    if args.plan_only:
        return 0
    try:
        check_budget(cfg)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    csv_path, sidecar_path = run_experiment(cfg, args.out)
    print(f"wrote {csv_path}")
    print(f"wrote {sidecar_path}")
    return 0


def _cmd_validate(args):
    from .errors import DualuniError
    from .experiments import validate_file

    status = 0
    for path in args.files:
        try:
            report = validate_file(path)
        except (DualuniError, OSError, json.JSONDecodeError, KeyError) as exc:
            print(f"{path}: PARSE ERROR: {exc}", file=sys.stderr)
            status = 2
            continue
        print(f"{path} ({report['kind']}):")
        for name, violation in report["violations"]:
            print(f"  {name:26s} max violation {violation:.3e}")
    return status


def _cmd_probe(args):
    import numpy as np

    from .experiments import _parse_angle
    from .gates import app_c_gate, cat_map_gate, fourier_matrix, generalized_pauli_ueb, hadamard_gate, kim_gate
    from .states import bell_pair_mps
    from .transfer import ComputationalTransferScheme, TransferSpec, UebTransferScheme, spectral_report

    if args.gate == "kim":
        gate = kim_gate(_parse_angle(args.j), _parse_angle(args.b), args.h1, args.h2)
    elif args.gate == "app_c":
        gate = app_c_gate("dual_unitary", project=True)
    elif args.gate == "cat_map":
        gate = cat_map_gate(args.q)
    else:
        k = fourier_matrix(args.q)
        gate = hadamard_gate(k, k, k, k, np.full(args.q, args.h1), np.full(args.q, args.h2))
    if args.scheme == "computational":
        scheme = ComputationalTransferScheme()
    else:
        scheme = UebTransferScheme(basis=generalized_pauli_ueb(gate.q),
                                   mps=bell_pair_mps(gate.q))
    spec = TransferSpec(gate=gate, t=args.t, scheme=scheme, m=args.m)
    report = spectral_report(spec, count=args.count, iterations=args.iterations, seed=args.seed)
    payload = json.dumps(report, indent=2, default=float)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
        print(f"wrote {args.out}")
    else:
        print(payload)
    return 0


def _cmd_fixtures(args):
    from .gates import list_fixtures

    for name in list_fixtures():
        print(name)
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    from .errors import CapExceededError, DualuniError

    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "probe-transfer":
            return _cmd_probe(args)
        if args.command == "fixtures":
            return _cmd_fixtures(args)
    except CapExceededError as exc:
        print(f"cap exceeded (plan-only exit): {exc}", file=sys.stderr)
        return 3
    except DualuniError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
