"""Experiment engine: parameter sweeps, metrics and deterministic emission.

A sweep walks (method, R, delta, instance), building clean data once per
(system, basis) at the maximal order and slicing per R; each instance then
perturbs and solves.  Every row is reproducible from (config, master seed)
alone, and serialization is byte-deterministic: floats are written with 17
significant digits, LF endings, no timestamps.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .gevp import (
    ScanFailedError,
    SubspaceCollapseError,
    scaled_threshold,
    solve_gevp,
)
from .noise import NoiseSpec, perturb_moments, perturb_rte_tensors
from .pauli import (
    DisorderSpec,
    PauliSum,
    build_spin_ring,
    field_only_ground_bits,
    load_pauli_file,
    resolve_fields,
)
from .pqse import DegenerateCandidateError, PqseError, pqse_run, reconstruct_state
from .simulator import StateVector, basis_state, exact_ground, state_overlap
from .subspace import (
    MomentSequence,
    RteTensors,
    compute_moments,
    default_timestep,
    hankel_matrices,
    rte_tensors,
)

METHODS = ("qse", "tqse", "pqse", "pqse_alt")

_SOLVER_ERRORS = (
    SubspaceCollapseError,
    ScanFailedError,
    PqseError,
    DegenerateCandidateError,
)


@dataclass(frozen=True)
class SpinRing:
    n: int
    J: float
    h: float
    seed: int


@dataclass(frozen=True)
class PauliFile:
    path: str
    ref_bits: Optional[str] = None


System = Union[SpinRing, PauliFile]


@dataclass(frozen=True)
class ExperimentConfig:
    system: System
    r_values: tuple[int, ...]
    deltas: tuple[float, ...]
    basis: str = "power"
    dt: Optional[float] = None  # None = pi / ||H||
    methods: tuple[str, ...] = ("qse", "tqse", "pqse")
    instances: int = 1
    master_seed: int = 0
    a_grid: tuple[float, float, int] = (-0.5, 5.0, 50)
    criterion: str = "variance"
    rescale: bool = False
    fidelity: bool = False

    def __post_init__(self) -> None:
        if not self.r_values:
            raise ValueError("R range is empty")
        if any(r < 1 for r in self.r_values):
            raise ValueError("every R must be >= 1")
        if not self.deltas:
            raise ValueError("delta list is empty")
        if any(d < 0 for d in self.deltas):
            raise ValueError("every delta must be >= 0")
        if self.instances < 1:
            raise ValueError("instances must be >= 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")
        if self.basis not in ("power", "rte"):
            raise ValueError(f"unknown basis {self.basis!r}")
        if self.criterion not in ("variance", "energy_squared"):
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if self.a_grid[2] < 1:
            raise ValueError("a-grid needs at least one point")


@dataclass
class ExperimentRecord:
    method: str
    R: int
    delta: float
    instance: int
    e_g: Optional[float] = None
    eps_rel: Optional[float] = None
    retained_dim: Optional[int] = None
    sequence: Optional[tuple[int, ...]] = None
    order: Optional[int] = None
    best_a: Optional[float] = None
    fidelity: Optional[float] = None
    error: str = ""
    # Wall time is kept in memory only; serializing it would break the
    # byte-determinism contract of the output files.
    wall_time: float = 0.0
    # Reconstruction coefficients of the solution state (diagnostics).
    _b: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.error == ""


@dataclass(frozen=True, eq=False)
class ResolvedSystem:
    operator: PauliSum
    reference: StateVector
    ref_bits: str
    truth: float
    spectral_norm: float
    label: str


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    truth: float
    dt: Optional[float]
    records: list[ExperimentRecord]


def relative_error(e_g: float, truth: float) -> float:
    """|(E_g - truth) / truth|."""
    if truth == 0:
        raise ValueError("relative error undefined for zero true energy")
    return abs((e_g - truth) / truth)


def resolve_system(system: System, rescale: bool = False) -> ResolvedSystem:
    """Build the operator and reference state; optionally rescale H -> H/||H||."""
    if isinstance(system, SpinRing):
        spec = DisorderSpec(J=system.J, h=system.h, seed=system.seed)
        fields = resolve_fields(spec, system.n)
        operator = build_spin_ring(system.n, DisorderSpec(J=system.J, h=system.h, fields=fields))
        ref_bits = field_only_ground_bits(fields)
        label = f"spin_ring(n={system.n},J={system.J},h={system.h},seed={system.seed})"
    else:
        operator, file_ref = load_pauli_file(system.path)
        ref_bits = system.ref_bits or file_ref
        if ref_bits is None:
            raise ValueError(f"{system.path} carries no reference state; pass ref bits")
        if len(ref_bits) != operator.n:
            raise ValueError(
                f"reference bitstring length {len(ref_bits)} != {operator.n} qubits"
            )
        label = f"pauli_file({system.path})"
    if rescale:
        norm = exact_ground(operator).spectral_norm
        operator = PauliSum.from_terms(
            operator.n, [(c / norm, s.letters) for c, s in operator.terms]
        )
        label += "/rescaled"
    spectrum = exact_ground(operator)
    return ResolvedSystem(
        operator=operator,
        reference=basis_state(ref_bits),
        ref_bits=ref_bits,
        truth=spectrum.ground_energy,
        spectral_norm=spectrum.spectral_norm,
        label=label,
    )


def _fidelity(recon: StateVector, ground: StateVector) -> float:
    norm_sq = np.vdot(recon.amplitudes, recon.amplitudes).real
    return float(abs(state_overlap(recon, ground)) ** 2 / norm_sq)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute the sweep; solver failures become failed rows, not aborts."""
    system = resolve_system(config.system, rescale=config.rescale)
    operator, phi0 = system.operator, system.reference
    r_max = max(config.r_values)
    a_grid = np.linspace(*config.a_grid)
    ground = exact_ground(operator).ground_state if config.fidelity else None

    # Clean data once per (system, basis, R_max); instances only perturb.
    dt: Optional[float] = None
    if config.basis == "power":
        mu_clean = compute_moments(operator, phi0, 4 * r_max)
        tensors_clean = None
    else:
        dt = config.dt if config.dt is not None else default_timestep(operator)
        tensors_clean = rte_tensors(operator, phi0, r_max, dt)
        mu_clean = compute_moments(operator, phi0, 2)

    records: list[ExperimentRecord] = []
    for method in config.methods:
        for R in config.r_values:
            clean_problem = None
            t_R = None
            if config.basis == "power":
                clean_problem = hankel_matrices(mu_clean, R)
            else:
                assert tensors_clean is not None
                t_R = tensors_clean.leading(R)
            for delta in config.deltas:
                if method == "tqse":
                    group = _tqse_group(
                        R, delta, mu_clean, clean_problem, t_R, system, config, a_grid
                    )
                    if config.fidelity:
                        for record in group:
                            if record.ok and record._b is not None:
                                recon = reconstruct_state(
                                    record._b, operator, phi0, basis=config.basis, dt=dt
                                )
                                record.fidelity = _fidelity(recon, ground)
                    records.extend(group)
                    continue
                for instance in range(config.instances):
                    spec = NoiseSpec(delta=delta, master_seed=config.master_seed, instance=instance)
                    record = ExperimentRecord(method=method, R=R, delta=delta, instance=instance)
                    start = time.perf_counter()
                    try:
                        if config.basis == "power":
                            noisy_mu = perturb_moments(mu_clean, 2 * R, spec)
                            _solve_power(record, method, noisy_mu, R, system, config)
                        else:
                            noisy_t = perturb_rte_tensors(
                                t_R, mu_clean.values[1], mu_clean.values[2], spec
                            )
                            _solve_rte(record, method, noisy_t, R, system, config)
                        if config.fidelity and record.ok and record._b is not None:
                            recon = reconstruct_state(
                                record._b, operator, phi0, basis=config.basis, dt=dt
                            )
                            record.fidelity = _fidelity(recon, ground)
                    except _SOLVER_ERRORS as exc:
                        record.error = f"{type(exc).__name__}: {exc}"
                    record.wall_time = time.perf_counter() - start
                    records.append(record)
    return ExperimentResult(config=config, truth=system.truth, dt=dt, records=records)


def _tqse_group(R, delta, mu_clean, clean_problem, clean_tensors, system, config, a_grid):
    """All instances of one thresholded experiment, tuned together.

    One threshold scale ``a`` is chosen per (R, delta) group: the value
    minimising the group's mean relative error (fewest failures first),
    with each instance's tau derived from its own perturbation norms.
    Mirrors the protocol of tuning an experiment against the exact ground
    energy rather than tuning every noise realisation separately.
    """
    start = time.perf_counter()
    problems = []
    base_taus = []  # sqrt(eta_H^2 + eta_S^2) per instance; tau = 10^-a * base
    for instance in range(config.instances):
        spec = NoiseSpec(delta=delta, master_seed=config.master_seed, instance=instance)
        if config.basis == "power":
            noisy_mu = perturb_moments(mu_clean, 2 * R, spec)
            problem = hankel_matrices(noisy_mu, R)
            delta_h = problem.hmat - clean_problem.hmat
            delta_s = problem.smat - clean_problem.smat
        else:
            noisy_t = perturb_rte_tensors(
                clean_tensors, mu_clean.values[1], mu_clean.values[2], spec
            )
            problem = _rte_problem(noisy_t)
            delta_h = noisy_t.h1 - clean_tensors.h1
            delta_s = noisy_t.s - clean_tensors.s
        problems.append(problem)
        base_taus.append(scaled_threshold(delta_h, delta_s, 0.0))

    best: Optional[tuple[int, float, float, list]] = None
    for a in a_grid:
        solutions = []
        errors = []
        failures = 0
        for problem, base in zip(problems, base_taus):
            tau = float(10.0 ** (-float(a)) * base)
            try:
                sol = solve_gevp(problem, tau)
            except SubspaceCollapseError as exc:
                solutions.append(exc)
                failures += 1
                continue
            solutions.append(sol)
            errors.append(relative_error(sol.ground_energy, system.truth))
        if not errors:
            continue
        mean = float(np.mean(errors))
        key = (failures, mean)
        if best is None or key < (best[0], best[1]):
            best = (failures, mean, float(a), solutions)

    elapsed = time.perf_counter() - start
    records = []
    for instance in range(config.instances):
        record = ExperimentRecord(method="tqse", R=R, delta=delta, instance=instance)
        record.wall_time = elapsed / config.instances
        if best is None:
            record.error = "ScanFailedError: every grid point unsolvable"
            records.append(record)
            continue
        _, _, best_a, solutions = best
        outcome = solutions[instance]
        record.best_a = best_a
        if isinstance(outcome, Exception):
            record.error = f"{type(outcome).__name__}: {outcome}"
        else:
            record.e_g = outcome.ground_energy
            record.retained_dim = outcome.retained_dim
            record.eps_rel = relative_error(outcome.ground_energy, system.truth)
            record._b = outcome.ground_coeffs
        records.append(record)
    return records


def _solve_power(record, method, noisy_mu, R, system, config):
    record._b = None
    if method == "qse":
        noisy_problem = hankel_matrices(noisy_mu, R)
        sol = solve_gevp(noisy_problem, 0.0)
        record.e_g = sol.ground_energy
        record.retained_dim = sol.retained_dim
        record._b = sol.ground_coeffs
    else:
        criterion = "energy_squared" if method == "pqse_alt" else config.criterion
        result = pqse_run(noisy_mu, R, criterion=criterion)
        record.e_g = result.e_g
        record.sequence = result.sequence
        record.order = result.order
        record._b = result.b
    record.eps_rel = relative_error(record.e_g, system.truth)


def _solve_rte(record, method, noisy_t, R, system, config):
    record._b = None
    if method == "qse":
        problem = _rte_problem(noisy_t)
        sol = solve_gevp(problem, 0.0)
        record.e_g = sol.ground_energy
        record.retained_dim = sol.retained_dim
        record._b = sol.ground_coeffs
    else:
        criterion = "energy_squared" if method == "pqse_alt" else config.criterion
        result = pqse_run(noisy_t, R, criterion=criterion)
        record.e_g = result.e_g
        record.sequence = result.sequence
        record.order = result.order
        record._b = result.b
    record.eps_rel = relative_error(record.e_g, system.truth)


def _rte_problem(tensors: RteTensors):
    from .subspace import SubspaceProblem

    return SubspaceProblem(hmat=tensors.h1.copy(), smat=tensors.s.copy(), dim=tensors.order)


# ---------------------------------------------------------------------------
# Aggregation


@dataclass(frozen=True)
class SummaryRow:
    method: str
    R: int
    delta: float
    mean_eps_rel: float
    stderr: float
    n_ok: int
    n_failed: int


@dataclass(frozen=True)
class XiRow:
    method: str
    delta: float
    xi: float
    arg_r: int


def aggregate(records: Sequence[ExperimentRecord]) -> tuple[list[SummaryRow], list[XiRow]]:
    """Per-(method, R, delta) mean and standard error of eps_rel, and the
    per-(method, delta) minimum over R.  Failed rows are excluded but counted."""
    if not records:
        raise ValueError("no records to aggregate")
    groups: dict[tuple[str, int, float], list[ExperimentRecord]] = {}
    for rec in records:
        groups.setdefault((rec.method, rec.R, rec.delta), []).append(rec)
    summary: list[SummaryRow] = []
    for key in sorted(groups):
        rows = groups[key]
        values = np.array([r.eps_rel for r in rows if r.ok], dtype=np.float64)
        n_failed = sum(1 for r in rows if not r.ok)
        if values.size == 0:
            summary.append(SummaryRow(key[0], key[1], key[2], float("nan"), float("nan"), 0, n_failed))
            continue
        mean = float(values.mean())
        stderr = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
        summary.append(SummaryRow(key[0], key[1], key[2], mean, stderr, int(values.size), n_failed))
    xi_rows: list[XiRow] = []
    by_md: dict[tuple[str, float], list[SummaryRow]] = {}
    for row in summary:
        if row.n_ok > 0:
            by_md.setdefault((row.method, row.delta), []).append(row)
    for key in sorted(by_md):
        rows = sorted(by_md[key], key=lambda r: r.R)
        best = min(rows, key=lambda r: (r.mean_eps_rel, r.R))
        xi_rows.append(XiRow(key[0], key[1], best.mean_eps_rel, best.R))
    return summary, xi_rows


# ---------------------------------------------------------------------------
# Histograms


@dataclass(frozen=True)
class HistogramTables:
    # (method, R, delta, order O, count); O runs 1..R so the right edge is R.
    order_counts: list[tuple[str, int, float, int, int]]
    # (method, R, delta, partition count P, count)
    partition_counts: list[tuple[str, int, float, int, int]]
    # (method, R, delta, rank, sequence, count)
    top_sequences: list[tuple[str, int, float, int, str, int]]
    # (R, delta, retained dimension, count)
    retained_counts: list[tuple[int, float, int, int]]


def sequence_string(sequence: Optional[Sequence[int]]) -> str:
    if sequence is None:
        return ""
    return "+".join(str(r) for r in sequence)


def emit_histograms(records: Sequence[ExperimentRecord]) -> HistogramTables:
    """Partition/dimension statistics of PQSE-family and TQSE records."""
    order_counts = []
    partition_counts = []
    top_sequences = []
    retained_counts = []

    pqse_groups: dict[tuple[str, int, float], list[ExperimentRecord]] = {}
    tqse_groups: dict[tuple[int, float], list[ExperimentRecord]] = {}
    for rec in records:
        if not rec.ok:
            continue
        if rec.method in ("pqse", "pqse_alt") and rec.order is not None:
            pqse_groups.setdefault((rec.method, rec.R, rec.delta), []).append(rec)
        elif rec.method == "tqse" and rec.retained_dim is not None:
            tqse_groups.setdefault((rec.R, rec.delta), []).append(rec)

    for key in sorted(pqse_groups):
        method, R, delta = key
        rows = pqse_groups[key]
        counts = {o: 0 for o in range(1, R + 1)}
        for rec in rows:
            counts[rec.order] += 1
        for o in range(1, R + 1):
            order_counts.append((method, R, delta, o, counts[o]))
        length_counts: dict[int, int] = {}
        seq_counts: dict[str, int] = {}
        for rec in rows:
            p = len(rec.sequence) if rec.sequence else 0
            length_counts[p] = length_counts.get(p, 0) + 1
            seq = sequence_string(rec.sequence)
            seq_counts[seq] = seq_counts.get(seq, 0) + 1
        for p in sorted(length_counts):
            partition_counts.append((method, R, delta, p, length_counts[p]))
        ranked = sorted(seq_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
        for rank, (seq, count) in enumerate(ranked, start=1):
            top_sequences.append((method, R, delta, rank, seq, count))

    for key in sorted(tqse_groups):
        R, delta = key
        dim_counts: dict[int, int] = {}
        for rec in tqse_groups[key]:
            dim_counts[rec.retained_dim] = dim_counts.get(rec.retained_dim, 0) + 1
        for dim in sorted(dim_counts):
            retained_counts.append((R, delta, dim, dim_counts[dim]))

    return HistogramTables(
        order_counts=order_counts,
        partition_counts=partition_counts,
        top_sequences=top_sequences,
        retained_counts=retained_counts,
    )


# ---------------------------------------------------------------------------
# Serialization (byte-deterministic: %.17g floats, LF endings)

RECORD_FIELDS = (
    "method",
    "R",
    "delta",
    "instance",
    "E_g",
    "eps_rel",
    "retained_dim",
    "sequence",
    "order",
    "best_a",
    "fidelity",
    "error",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def record_row(rec: ExperimentRecord) -> list[str]:
    return [
        rec.method,
        str(rec.R),
        _fmt(rec.delta),
        str(rec.instance),
        _fmt(rec.e_g),
        _fmt(rec.eps_rel),
        _fmt(rec.retained_dim),
        sequence_string(rec.sequence),
        _fmt(rec.order),
        _fmt(rec.best_a),
        _fmt(rec.fidelity),
        rec.error,
    ]


def records_to_csv(records: Sequence[ExperimentRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for rec in records:
        writer.writerow(record_row(rec))
    return buf.getvalue()


def record_dict(rec: ExperimentRecord) -> dict:
    return {
        "method": rec.method,
        "R": rec.R,
        "delta": rec.delta,
        "instance": rec.instance,
        "E_g": rec.e_g,
        "eps_rel": rec.eps_rel,
        "retained_dim": rec.retained_dim,
        "sequence": list(rec.sequence) if rec.sequence is not None else None,
        "order": rec.order,
        "best_a": rec.best_a,
        "fidelity": rec.fidelity,
        "error": rec.error,
    }


def records_to_json(records: Sequence[ExperimentRecord]) -> str:
    return json.dumps([record_dict(r) for r in records], indent=2) + "\n"


def summary_to_csv(summary: Sequence[SummaryRow], xi_rows: Sequence[XiRow]) -> tuple[str, str]:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("method", "R", "delta", "mean_eps_rel", "stderr", "n_ok", "n_failed"))
    for row in summary:
        writer.writerow(
            (row.method, row.R, _fmt(row.delta), _fmt(row.mean_eps_rel), _fmt(row.stderr), row.n_ok, row.n_failed)
        )
    buf2 = io.StringIO()
    writer2 = csv.writer(buf2, lineterminator="\n")
    writer2.writerow(("method", "delta", "xi", "arg_R"))
    for row in xi_rows:
        writer2.writerow((row.method, _fmt(row.delta), _fmt(row.xi), row.arg_r))
    return buf.getvalue(), buf2.getvalue()


def histograms_to_json(tables: HistogramTables) -> str:
    payload = {
        "order_counts": [
            {"method": m, "R": r, "delta": d, "order": o, "count": c}
            for (m, r, d, o, c) in tables.order_counts
        ],
        "partition_counts": [
            {"method": m, "R": r, "delta": d, "partitions": p, "count": c}
            for (m, r, d, p, c) in tables.partition_counts
        ],
        "top_sequences": [
            {"method": m, "R": r, "delta": d, "rank": k, "sequence": s, "count": c}
            for (m, r, d, k, s, c) in tables.top_sequences
        ],
        "retained_counts": [
            {"R": r, "delta": d, "retained_dim": dim, "count": c}
            for (r, d, dim, c) in tables.retained_counts
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def histograms_to_csv(tables: HistogramTables) -> dict[str, str]:
    out: dict[str, str] = {}

    def table(name: str, header: tuple, rows) -> None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
        out[name] = buf.getvalue()

    table("order", ("method", "R", "delta", "order", "count"), tables.order_counts)
    table("partitions", ("method", "R", "delta", "partitions", "count"), tables.partition_counts)
    table("sequences", ("method", "R", "delta", "rank", "sequence", "count"), tables.top_sequences)
    table("retained", ("R", "delta", "retained_dim", "count"), tables.retained_counts)
    return out


def parse_records_csv(text: str) -> list[ExperimentRecord]:
    """Read back a records CSV produced by :func:`records_to_csv`."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != RECORD_FIELDS:
        raise ValueError(f"unexpected header {header}")
    records = []
    for row in reader:
        (method, r, delta, instance, e_g, eps, dim, seq, order, best_a, fid, error) = row
        records.append(
            ExperimentRecord(
                method=method,
                R=int(r),
                delta=float(delta),
                instance=int(instance),
                e_g=float(e_g) if e_g else None,
                eps_rel=float(eps) if eps else None,
                retained_dim=int(dim) if dim else None,
                sequence=tuple(int(x) for x in seq.split("+")) if seq else None,
                order=int(order) if order else None,
                best_a=float(best_a) if best_a else None,
                fidelity=float(fid) if fid else None,
                error=error,
            )
        )
    return records
