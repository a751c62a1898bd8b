"""Ray ensembles, the density-matrix correspondence, and seeded Monte Carlo.

A hidden mixed state is a weighted mixture of rays, each carrying the
uniform hidden-parameter law of its line.  Its density matrix is the
weighted sum of ray projectors; means of observable functions against
the mixture equal operator traces against that matrix, exactly for the
finite sums computed here and statistically for the sampling paths.

Sampling follows a counter-based contract: sample i consumes exactly
the four 64-bit words at counter block i of a Philox stream keyed by
the seed, and reductions walk fixed-size blocks in index order with
compensated summation.  Serial and worker-parallel runs therefore
produce bit-identical results for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np
from numpy.random import Generator, Philox

from .errors import DimensionMismatch, EigensolverFailure
from .kernel import (
    GammaModel,
    HiddenObservable,
    HiddenPoint,
    HiddenProposition,
    _bulk_line_weights,
    _values_on_spectrum,
    proposition_measure_on_line,
    u_from_words,
)
from .spectral import DensityMatrix, StateVector

__all__ = [
    "Ensemble",
    "HiddenMixedState",
    "SampleStream",
    "McEstimate",
    "ensemble_from_density",
    "density_from_ensemble",
    "exact_classical_mean",
    "hidden_state_measure",
    "sample_hidden",
    "mc_estimate",
    "dump_samples_csv",
]

WEIGHT_DROP_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12
WORDS_PER_SAMPLE = 4  # one Philox counter block per sample


@dataclass(frozen=True)
class Ensemble:
    """Positive weights summing to one over normalized rays."""

    weights: np.ndarray
    rays: np.ndarray  # shape (k, d), rows normalized

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        r = np.array(self.rays, dtype=complex)
        if w.ndim != 1 or r.ndim != 2 or w.shape[0] != r.shape[0] or w.size == 0:
            raise ValueError("ensemble needs matching, non-empty weights and rays")
        if np.any(w <= 0.0):
            raise ValueError("ensemble weights must be strictly positive")
        if abs(float(np.sum(w)) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"ensemble weights sum to {float(np.sum(w))!r}, not 1")
        norms = np.linalg.norm(r, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("ensemble rays must be nonzero")
        r = r / norms[:, None]
        w.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "rays", r)

    @classmethod
    def of(cls, components: Sequence[tuple[float, StateVector]]) -> "Ensemble":
        weights = np.array([w for w, _ in components], dtype=float)
        rays = np.array([psi.normalized() for _, psi in components], dtype=complex)
        return cls(weights=weights, rays=rays)

    @property
    def dim(self) -> int:
        return self.rays.shape[1]

    @property
    def size(self) -> int:
        return self.rays.shape[0]

    def component_states(self) -> list[StateVector]:
        return [StateVector(components=row) for row in self.rays]


@dataclass(frozen=True)
class HiddenMixedState:
    ensemble: Ensemble
    gamma: GammaModel

    @property
    def dim(self) -> int:
        return self.ensemble.dim


def ensemble_from_density(D: DensityMatrix) -> Ensemble:
    """Canonical eigen-ensemble of D; zero-weight eigenvectors are dropped."""
    try:
        w, v = np.linalg.eigh(D.entries)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    keep = w > WEIGHT_DROP_TOL
    w = w[keep]
    return Ensemble(weights=w / np.sum(w), rays=v[:, keep].T)


def density_from_ensemble(ens: Ensemble) -> DensityMatrix:
    """The density matrix sum of w_k times the projector onto ray k.

    Orthogonality of the rays is not required; the correspondence is
    linear in the mixture.
    """
    entries = np.einsum("k,ka,kb->ab", ens.weights, ens.rays, ens.rays.conj())
    return DensityMatrix(entries=entries)


def exact_classical_mean(f: HiddenObservable, b, mu: HiddenMixedState) -> float:
    """Mean of b(f) against the mixture, as an exact finite sum.

    Equals Trace[b(T) delta(mu)] up to rounding, which is the identity
    the workbench exists to verify.
    """
    if f.dim != mu.dim:
        raise DimensionMismatch(f"dimension mismatch: {f.dim} vs {mu.dim}")
    weights = _bulk_line_weights(f.decomposition, mu.ensemble.rays)
    vals = _values_on_spectrum(b, f.decomposition.eigenvalues)
    return float(np.dot(mu.ensemble.weights, weights @ vals))


def hidden_state_measure(L: HiddenProposition, mu: HiddenMixedState) -> float:
    """mu(L): the mixture-weighted exact per-line measure of the event."""
    if L.dim != mu.dim:
        raise DimensionMismatch(f"dimension mismatch: {L.dim} vs {mu.dim}")
    per_line = [proposition_measure_on_line(L, psi) for psi in mu.ensemble.component_states()]
    return float(np.dot(mu.ensemble.weights, per_line))


# ---------------------------------------------------------------------------
# Counter-based sampling


@dataclass(frozen=True)
class SampleStream:
    """Reproducible sample randomness keyed by a 64-bit seed.

    Sample i reads the Philox counter block i, so any contiguous range
    of samples can be generated independently of how the range is
    partitioned across workers.
    """

    seed: int
    block_size: int = 65536

    def raw_words(self, start: int, count: int) -> np.ndarray:
        """Uniform [0,1) words for samples [start, start+count), shape (count, 4)."""
        bg = Philox(key=self.seed)
        bg.advance(start)
        return Generator(bg).random((count, WORDS_PER_SAMPLE))

    def blocks(self, n: int):
        """The fixed partition plan: [start, stop) slices of block_size."""
        for start in range(0, n, self.block_size):
            yield start, min(self.block_size, n - start)


def _draw_block(mu: HiddenMixedState, stream: SampleStream, start: int, count: int):
    """Component indices and hidden parameters for one sample range."""
    words = stream.raw_words(start, count)
    cum = np.minimum(np.cumsum(mu.ensemble.weights), 1.0)
    k = np.searchsorted(cum, words[:, 0], side="right")
    k = np.minimum(k, mu.ensemble.size - 1)
    u = u_from_words(mu.gamma, words[:, 1], words[:, 2])
    return k, u


def _block_values(
    f: HiddenObservable, mu: HiddenMixedState, stream: SampleStream, start: int, count: int
):
    k, u = _draw_block(mu, stream, start, count)
    values = np.empty(count, dtype=float)
    for comp, psi in enumerate(mu.ensemble.component_states()):
        mask = k == comp
        if np.any(mask):
            values[mask] = f.values_on_line(psi, u[mask])
    return k, u, values


def sample_hidden(mu: HiddenMixedState, stream: SampleStream, n: int) -> list[HiddenPoint]:
    """n hidden points drawn from the mixture; deterministic per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    states = mu.ensemble.component_states()
    points: list[HiddenPoint] = []
    for start, count in stream.blocks(n):
        k, u = _draw_block(mu, stream, start, count)
        points.extend(HiddenPoint(ray=states[ki], u=ui) for ki, ui in zip(k, u))
    return points


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int


def _kahan_add(total: float, comp: float, x: float) -> tuple[float, float]:
    y = x - comp
    t = total + y
    return t, (t - total) - y


def mc_estimate(
    f: HiddenObservable,
    b,
    mu: HiddenMixedState,
    stream: SampleStream,
    n: int,
    *,
    workers: int = 1,
) -> McEstimate:
    """Sample mean and CLT standard error of b(f) over n draws from mu.

    Block partial sums are reduced in block order with compensated
    summation, so the result does not depend on the worker count.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if f.dim != mu.dim:
        raise DimensionMismatch(f"dimension mismatch: {f.dim} vs {mu.dim}")

    def block_sums(block):
        start, count = block
        _, _, values = _block_values(f, mu, stream, start, count)
        x = np.asarray(b(values), dtype=float)
        if x.shape != values.shape:  # constant callables may collapse the shape
            x = np.broadcast_to(x, values.shape)
        return float(np.sum(x)), float(np.sum(x * x))

    blocks = list(stream.blocks(n))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(block_sums, blocks))
    else:
        partials = [block_sums(block) for block in blocks]

    s1 = c1 = s2 = c2 = 0.0
    for part1, part2 in partials:
        s1, c1 = _kahan_add(s1, c1, part1)
        s2, c2 = _kahan_add(s2, c2, part2)
    mean = s1 / n
    variance = max(0.0, (s2 - n * mean * mean) / (n - 1))
    return McEstimate(mean=mean, std_error=math.sqrt(variance / n), n_samples=n)


def dump_samples_csv(
    f: HiddenObservable,
    mu: HiddenMixedState,
    stream: SampleStream,
    n: int,
    out: IO[str],
    *,
    workers: int = 1,
) -> None:
    """Write `component_index,u,value` rows, 17 significant digits.

    Blocks may be computed by several workers but are always written in
    block order, so output bytes do not depend on the worker count.
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    def compute(block):
        start, count = block
        return _block_values(f, mu, stream, start, count)

    blocks = list(stream.blocks(n))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            computed = list(pool.map(compute, blocks))
    else:
        computed = [compute(block) for block in blocks]

    out.write("component_index,u,value\n")
    for k, u, values in computed:
        for ki, ui, vi in zip(k, u, values):
            out.write(f"{ki},{ui:.17g},{vi:.17g}\n")
