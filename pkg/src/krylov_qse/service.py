"""HTTP service wrapping the experiment engine.

Exposes the same operations as the CLI for programmatic and multi-client
use: system preview, clean moments, single-method solves, sweeps and
histogram tables.  Request/response schemas are pydantic models; solver
failures inside a sweep surface as failed rows exactly as they do in CSV
output, while configuration errors map to 422/400 responses.

Run with:  uvicorn krylov_qse.service:app
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from . import __version__
from .harness import (
    ExperimentConfig,
    ExperimentRecord,
    PauliFile,
    SpinRing,
    aggregate,
    emit_histograms,
    record_dict,
    records_to_csv,
    resolve_system,
    run_experiment,
)
from .subspace import MomentOverflowError, compute_moments


class SpinRingModel(BaseModel):
    n: int = Field(ge=3)
    J: float
    h: float
    seed: int = 0


class PauliFileModel(BaseModel):
    path: str
    ref_bits: Optional[str] = None


class SystemModel(BaseModel):
    spin_ring: Optional[SpinRingModel] = None
    pauli_file: Optional[PauliFileModel] = None

    @model_validator(mode="after")
    def exactly_one(self) -> "SystemModel":
        if (self.spin_ring is None) == (self.pauli_file is None):
            raise ValueError("give exactly one of spin_ring or pauli_file")
        return self

    def to_system(self):
        if self.spin_ring is not None:
            sr = self.spin_ring
            return SpinRing(n=sr.n, J=sr.J, h=sr.h, seed=sr.seed)
        pf = self.pauli_file
        return PauliFile(path=pf.path, ref_bits=pf.ref_bits)


class SystemInfoResponse(BaseModel):
    n_qubits: int
    n_terms: int
    reference_bits: str
    ground_energy: float
    spectral_norm: float
    label: str


class MomentsRequest(BaseModel):
    system: SystemModel
    kmax: int = Field(ge=0)
    rescale: bool = False


class MomentsResponse(BaseModel):
    mu: list[float]


class SweepRequest(BaseModel):
    system: SystemModel
    r_min: int = Field(default=1, ge=1)
    r_max: int = Field(ge=1)
    deltas: list[float] = Field(default=[0.0])
    basis: Literal["power", "rte"] = "power"
    dt: Optional[float] = None
    methods: list[Literal["qse", "tqse", "pqse", "pqse_alt"]] = Field(
        default=["qse", "tqse", "pqse"]
    )
    instances: int = Field(default=1, ge=1)
    master_seed: int = 0
    a_grid: tuple[float, float, int] = (-0.5, 5.0, 50)
    criterion: Literal["variance", "energy_squared"] = "variance"
    rescale: bool = False
    fidelity: bool = False

    def to_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            system=self.system.to_system(),
            r_values=tuple(range(self.r_min, self.r_max + 1)),
            deltas=tuple(self.deltas),
            basis=self.basis,
            dt=self.dt,
            methods=tuple(self.methods),
            instances=self.instances,
            master_seed=self.master_seed,
            a_grid=self.a_grid,
            criterion=self.criterion,
            rescale=self.rescale,
            fidelity=self.fidelity,
        )


class RecordModel(BaseModel):
    method: str
    R: int
    delta: float
    instance: int
    E_g: Optional[float] = None
    eps_rel: Optional[float] = None
    retained_dim: Optional[int] = None
    sequence: Optional[list[int]] = None
    order: Optional[int] = None
    best_a: Optional[float] = None
    fidelity: Optional[float] = None
    error: str = ""


class SummaryModel(BaseModel):
    method: str
    R: int
    delta: float
    mean_eps_rel: float
    stderr: float
    n_ok: int
    n_failed: int


class XiModel(BaseModel):
    method: str
    delta: float
    xi: float
    arg_r: int


class SweepResponse(BaseModel):
    truth: float
    dt: Optional[float]
    records: list[RecordModel]
    summary: list[SummaryModel]
    xi: list[XiModel]
    csv: str


class HistogramRequest(BaseModel):
    records: list[RecordModel]


class HistogramResponse(BaseModel):
    order_counts: list[dict]
    partition_counts: list[dict]
    top_sequences: list[dict]
    retained_counts: list[dict]


app = FastAPI(
    title="krylov-qse",
    version=__version__,
    description="Subspace-expansion ground-state estimation with simulated sampling noise",
)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/system", response_model=SystemInfoResponse)
def system_info(request: SystemModel) -> SystemInfoResponse:
    try:
        system = resolve_system(request.to_system())
    except (ValueError, OSError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return SystemInfoResponse(
        n_qubits=system.operator.n,
        n_terms=system.operator.num_terms,
        reference_bits=system.ref_bits,
        ground_energy=system.truth,
        spectral_norm=system.spectral_norm,
        label=system.label,
    )


@app.post("/moments", response_model=MomentsResponse)
def moments(request: MomentsRequest) -> MomentsResponse:
    try:
        system = resolve_system(request.system.to_system(), rescale=request.rescale)
        values = compute_moments(system.operator, system.reference, request.kmax)
    except MomentOverflowError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    except (ValueError, OSError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return MomentsResponse(mu=list(values.values))


@app.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest) -> SweepResponse:
    try:
        config = request.to_config()
        result = run_experiment(config)
    except MomentOverflowError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    except (ValueError, OSError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    summary, xi = aggregate(result.records)
    return SweepResponse(
        truth=result.truth,
        dt=result.dt,
        records=[RecordModel(**record_dict(r)) for r in result.records],
        summary=[SummaryModel(**row.__dict__) for row in summary],
        xi=[XiModel(**row.__dict__) for row in xi],
        csv=records_to_csv(result.records),
    )


@app.post("/histograms", response_model=HistogramResponse)
def histograms(request: HistogramRequest) -> HistogramResponse:
    records = [
        ExperimentRecord(
            method=m.method,
            R=m.R,
            delta=m.delta,
            instance=m.instance,
            e_g=m.E_g,
            eps_rel=m.eps_rel,
            retained_dim=m.retained_dim,
            sequence=tuple(m.sequence) if m.sequence else None,
            order=m.order,
            best_a=m.best_a,
            fidelity=m.fidelity,
            error=m.error,
        )
        for m in request.records
    ]
    tables = emit_histograms(records)
    return HistogramResponse(
        order_counts=[
            {"method": m, "R": r, "delta": d, "order": o, "count": c}
            for (m, r, d, o, c) in tables.order_counts
        ],
        partition_counts=[
            {"method": m, "R": r, "delta": d, "partitions": p, "count": c}
            for (m, r, d, p, c) in tables.partition_counts
        ],
        top_sequences=[
            {"method": m, "R": r, "delta": d, "rank": k, "sequence": s, "count": c}
            for (m, r, d, k, s, c) in tables.top_sequences
        ],
        retained_counts=[
            {"R": r, "delta": d, "retained_dim": dim, "count": c}
            for (r, d, dim, c) in tables.retained_counts
        ],
    )
