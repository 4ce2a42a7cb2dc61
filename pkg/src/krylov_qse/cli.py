"""Command-line client for the experiment engine.

Subcommands mirror the engine operations: ``moments``, ``qse``, ``tqse``,
``pqse``, ``sweep`` and ``hist``.  All solving happens in-process; output
files are byte-deterministic for a fixed configuration and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional

from .harness import (
    ExperimentConfig,
    PauliFile,
    SpinRing,
    System,
    aggregate,
    emit_histograms,
    histograms_to_csv,
    histograms_to_json,
    parse_records_csv,
    records_to_csv,
    records_to_json,
    resolve_system,
    run_experiment,
    summary_to_csv,
)
from .subspace import MomentOverflowError, compute_moments


def _parse_spin_ring(text: str) -> SpinRing:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("--spin-ring expects n,J,h,seed")
    return SpinRing(n=int(parts[0]), J=float(parts[1]), h=float(parts[2]), seed=int(parts[3]))


def _parse_deltas(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _parse_a_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--a-grid expects lo,hi,count")
    return (float(parts[0]), float(parts[1]), int(parts[2]))


def _add_system_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spin-ring", type=_parse_spin_ring, metavar="n,J,h,seed")
    parser.add_argument("--hamiltonian", metavar="FILE", help="Pauli-sum file")
    parser.add_argument("--ref", metavar="BITSTRING", help="reference state bits")
    parser.add_argument("--rescale", action="store_true", help="rescale H by its spectral norm")


def _add_run_args(parser: argparse.ArgumentParser) -> None:
    _add_system_args(parser)
    parser.add_argument("--basis", choices=("power", "rte"), default="power")
    parser.add_argument("--dt", default="auto", help="RTE timestep: auto or a float")
    parser.add_argument("--rmin", type=int, default=1)
    parser.add_argument("--rmax", type=int, required=True)
    parser.add_argument("--delta", type=_parse_deltas, default=(0.0,), metavar="LIST")
    parser.add_argument("--instances", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--criterion", choices=("variance", "energy2"), default="variance")
    parser.add_argument("--a-grid", type=_parse_a_grid, default=(-0.5, 5.0, 50))
    parser.add_argument("--fidelity", action="store_true")
    parser.add_argument("--out", metavar="PATH")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def _system_from_args(args: argparse.Namespace) -> System:
    if args.spin_ring is not None and args.hamiltonian is not None:
        raise SystemExit("give either --spin-ring or --hamiltonian, not both")
    if args.spin_ring is not None:
        return args.spin_ring
    if args.hamiltonian is not None:
        return PauliFile(path=args.hamiltonian, ref_bits=args.ref)
    raise SystemExit("a system is required: --spin-ring or --hamiltonian")


def _config_from_args(args: argparse.Namespace, methods: tuple[str, ...]) -> ExperimentConfig:
    dt: Optional[float] = None if args.dt == "auto" else float(args.dt)
    criterion = "energy_squared" if args.criterion == "energy2" else "variance"
    return ExperimentConfig(
        system=_system_from_args(args),
        r_values=tuple(range(args.rmin, args.rmax + 1)),
        deltas=args.delta,
        basis=args.basis,
        dt=dt,
        methods=methods,
        instances=args.instances,
        master_seed=args.seed,
        a_grid=args.a_grid,
        criterion=criterion,
        rescale=args.rescale,
        fidelity=args.fidelity,
    )


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _sidecar(path: Optional[str], suffix: str) -> Optional[str]:
    if path is None:
        return None
    return f"{path}.{suffix}"


def _run_and_emit(args: argparse.Namespace, methods: tuple[str, ...]) -> None:
    config = _config_from_args(args, methods)
    result = run_experiment(config)
    summary, xi = aggregate(result.records)
    if args.format == "csv":
        _write(args.out, records_to_csv(result.records))
        summary_csv, xi_csv = summary_to_csv(summary, xi)
        if args.out is not None:
            _write(_sidecar(args.out, "summary.csv"), summary_csv)
            _write(_sidecar(args.out, "xi.csv"), xi_csv)
    else:
        payload = {
            "truth": result.truth,
            "records": json.loads(records_to_json(result.records)),
            "summary": [row.__dict__ for row in summary],
            "xi": [row.__dict__ for row in xi],
        }
        _write(args.out, json.dumps(payload, indent=2) + "\n")


def cmd_moments(args: argparse.Namespace) -> None:
    system = resolve_system(_system_from_args(args), rescale=args.rescale)
    kmax = args.kmax if args.kmax is not None else 4 * args.rmax
    moments = compute_moments(system.operator, system.reference, kmax)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("k", "mu_k"))
        for k, value in enumerate(moments.values):
            writer.writerow((k, f"{value:.17g}"))
        _write(args.out, buf.getvalue())
    else:
        _write(args.out, json.dumps({"mu": list(moments.values)}, indent=2) + "\n")


def cmd_hist(args: argparse.Namespace) -> None:
    with open(args.records, "r", encoding="utf-8") as fh:
        records = parse_records_csv(fh.read())
    tables = emit_histograms(records)
    if args.format == "json":
        _write(args.out, histograms_to_json(tables))
    else:
        for name, text in histograms_to_csv(tables).items():
            _write(_sidecar(args.out, f"{name}.csv") if args.out else None, text)


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="krylov-qse",
        description="Subspace-expansion ground-state estimation with simulated sampling noise",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_moments = sub.add_parser("moments", help="clean Hamiltonian moments of the reference state")
    _add_system_args(p_moments)
    p_moments.add_argument("--kmax", type=int, default=None)
    p_moments.add_argument("--rmax", type=int, default=8)
    p_moments.add_argument("--out", metavar="PATH")
    p_moments.add_argument("--format", choices=("csv", "json"), default="csv")
    p_moments.set_defaults(func=cmd_moments)

    for name, methods, help_text in (
        ("qse", ("qse",), "plain subspace expansion"),
        ("tqse", ("tqse",), "thresholded subspace expansion with an a-scan"),
        ("pqse", ("pqse",), "partitioned subspace expansion"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_run_args(p)
        p.set_defaults(func=lambda a, m=methods: _run_and_emit(a, m))

    p_sweep = sub.add_parser("sweep", help="run several methods over (R, delta, instance)")
    _add_run_args(p_sweep)
    p_sweep.add_argument(
        "--methods",
        default="qse,tqse,pqse",
        help="comma list from qse,tqse,pqse,pqse_alt",
    )
    p_sweep.set_defaults(func=lambda a: _run_and_emit(a, tuple(a.methods.split(","))))

    p_hist = sub.add_parser("hist", help="partition/dimension histograms from a records CSV")
    p_hist.add_argument("--records", required=True, metavar="FILE")
    p_hist.add_argument("--out", metavar="PATH")
    p_hist.add_argument("--format", choices=("csv", "json"), default="json")
    p_hist.set_defaults(func=cmd_hist)

    args = parser.parse_args(argv)
    try:
        args.func(args)
    except MomentOverflowError as exc:
        parser.exit(2, f"error: {exc}\n")
    except (ValueError, OSError) as exc:
        parser.exit(2, f"error: {exc}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
