"""Finite-sampling noise, simulated.

Power basis: one Gaussian draw per moment index (not per matrix entry),
which is what makes the H and S perturbations Hankel and mutually
consistent -- the S perturbation is the sub-block of H's index range, and
mu_0 stays exactly 1.  Width of the k-th draw: delta * sqrt(mu_{2k} - mu_k^2).

RTE basis: element-wise Hermitian perturbations.  H-type elements get
width delta * sqrt(<H^2> - <H>^2) in the reference state; overlap elements
get width delta; complex off-diagonal noise is split N(0, sigma/sqrt(2))
per quadrature (a convention -- the split is not pinned by the model).

Randomness: Philox-4x64 counter-based bit generator (numpy), normal
variates via numpy's Generator (ziggurat).  Streams are keyed as
counter = [0, variant, stream, instance] with the master seed as the
Philox key, so instances are independent and runs parallelize with no
shared state.  Power-basis draws are a prefix sequence: the same instance
yields the same epsilon_k regardless of how many moments are requested.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .subspace import MomentSequence, RteTensors

STREAM_MOMENTS = 0
STREAM_RTE_S = 1
STREAM_RTE_H1 = 2
STREAM_RTE_H2 = 3


@dataclass(frozen=True)
class NoiseSpec:
    """Dimensionless noise strength plus the (master_seed, instance) identity
    that fully determines every draw."""

    delta: float
    master_seed: int
    instance: int

    def __post_init__(self) -> None:
        if self.delta < 0:
            raise ValueError("noise strength must be >= 0")
        if self.instance < 0:
            raise ValueError("instance index must be >= 0")


def _stream(spec: NoiseSpec, stream: int, variant: int = 0) -> np.random.Generator:
    counter = np.array([0, variant, stream, spec.instance], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=np.uint64(spec.master_seed), counter=counter))


def perturb_moments(mu_clean: MomentSequence, K: int, spec: NoiseSpec) -> MomentSequence:
    """Noisy moments mu~_0..mu~_K; needs clean moments through index 2K.

    mu~_0 = 1 exactly; per index k >= 1 a single draw
    epsilon_k ~ N(0, delta * sqrt(max(mu_{2k} - mu_k^2, 0))).
    Negative width estimates (float cancellation at huge moments) clamp to 0.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    if mu_clean.max_power < 2 * K:
        raise ValueError(
            f"need clean moments through index {2 * K}, have {mu_clean.max_power}"
        )
    mu = mu_clean.values
    noisy = mu[: K + 1].copy()
    if K >= 1:
        k = np.arange(1, K + 1)
        widths = spec.delta * np.sqrt(np.maximum(mu[2 * k] - mu[k] ** 2, 0.0))
        draws = _stream(spec, STREAM_MOMENTS).normal(size=K)
        noisy[1:] += widths * draws
    noisy[0] = 1.0
    return MomentSequence(values=noisy)


def _perturb_hermitian(
    mat: np.ndarray, sigma: float, gen: np.random.Generator, skip_00: bool = False
) -> np.ndarray:
    """Add Hermitian element-wise noise: real N(0, sigma) on the diagonal,
    complex N(0, sigma/sqrt(2)) per quadrature above it, mirrored below.

    Draw order is fixed (row-major over i <= j) so outputs are reproducible.
    """
    out = mat.astype(np.complex128).copy()
    dim = mat.shape[0]
    for i in range(dim):
        for j in range(i, dim):
            if i == j:
                if skip_00 and i == 0:
                    continue
                out[i, i] += gen.normal() * sigma
            else:
                re, im = gen.normal(size=2) * (sigma / np.sqrt(2.0))
                out[i, j] += re + 1j * im
                out[j, i] += re - 1j * im
    return out


def perturb_rte_tensors(
    tensors: RteTensors, mu1: float, mu2: float, spec: NoiseSpec
) -> RteTensors:
    """Noisy RTE tensors; S[0,0] stays exactly 1.

    ``mu1``, ``mu2`` are <H> and <H^2> in the reference state; they set the
    common width for H and H^2 elements.  The three tensors draw from
    independent streams (a convention: correlations between them are not
    pinned by the model).
    """
    sigma_h = spec.delta * np.sqrt(max(mu2 - mu1**2, 0.0))
    sigma_s = spec.delta
    R = tensors.order
    s = _perturb_hermitian(tensors.s, sigma_s, _stream(spec, STREAM_RTE_S, variant=R), skip_00=True)
    h1 = _perturb_hermitian(tensors.h1, sigma_h, _stream(spec, STREAM_RTE_H1, variant=R))
    h2 = _perturb_hermitian(tensors.h2, sigma_h, _stream(spec, STREAM_RTE_H2, variant=R))
    return RteTensors(s=s, h1=h1, h2=h2, dt=tensors.dt, order=R)
