"""Hidden parameter spaces over rays and quantile-built observable functions.

A hidden point is a ray of the Hilbert space plus a parameter u drawn
uniformly from (0, 1).  For a Hermitian operator T the associated
observable function evaluates, on each line, the quasi-inverse of the
step CDF

    F_psi(r) = sum of ||P_i psi||^2 / ||psi||^2 over eigenvalues <= r

at u, i.e. the smallest eigenvalue whose cumulative spectral weight
reaches u.  Every per-line integral here is a finite sum over spectral
weights, so the defining mean-value identities hold to rounding error,
not to sampling error.

The alternative parameter model ("arg") realizes u as the normalized
argument of a rotation-invariant complex Gaussian point on the line;
its pushforward to (0, 1) is uniform, which is checkable with the
Kolmogorov-Smirnov helper below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EvaluationError,
    NonQuadraticFirstMoment,
    NotAProjector,
    ZeroInput,
)
from .spectral import (
    HermitianOperator,
    SpectralDecomposition,
    StateVector,
    expectation,
    spectral_decompose,
)

__all__ = [
    "GammaModel",
    "HiddenPoint",
    "HiddenObservable",
    "HiddenProposition",
    "SharedParameterSum",
    "LineSteps",
    "gamma_from_complex",
    "cdf",
    "quantile",
    "build_hidden_observable",
    "evaluate",
    "line_weights",
    "line_integral_exact",
    "line_mean",
    "moments_check",
    "orthodoxy_reconstruct",
    "orthodoxy_second_moment_gap",
    "proposition_from_projector",
    "proposition_measure_on_line",
    "statistical_equivalence_check",
    "spectral_support_check",
    "pushforward_ks",
    "random_ray",
    "draw_u",
    "u_from_words",
    "merge_distribution",
]

_TINY = np.nextafter(0.0, 1.0)  # smallest positive double; open-interval remap
_TINY_NORMAL = 2.2250738585072014e-308

PROJECTOR_TOL = 1e-10
WEIGHT_TOL = 1e-12


# ---------------------------------------------------------------------------
# Hidden parameter models


@dataclass(frozen=True)
class GammaModel:
    """How the hidden parameter u in (0,1) is produced on each line.

    kind "uniform": u is drawn uniformly, the canonical model.
    kind "arg": a point z != 0 is drawn on the line from a
    rotation-invariant atomless law (standard complex Gaussian) and
    u = arg(z)/2pi wrapped into (0,1).  Both push forward to the
    uniform law, which is what the quantile construction needs.
    """

    kind: str
    eta_kind: str = "complex-gaussian"

    def __post_init__(self):
        if self.kind not in ("uniform", "arg"):
            raise ValueError(f"unknown gamma kind {self.kind!r}")
        if self.kind == "arg" and self.eta_kind != "complex-gaussian":
            raise ValueError(f"unsupported line law {self.eta_kind!r}")

    @classmethod
    def uniform(cls) -> "GammaModel":
        return cls(kind="uniform")

    @classmethod
    def complex_arg(cls) -> "GammaModel":
        return cls(kind="arg")


def gamma_from_complex(z: complex) -> float:
    """Normalized argument of z, wrapped into the open interval (0, 1).

    arg(z)/2pi lies in (-1/2, 1/2]; negative values wrap up by one and
    the boundary 0 (positive real axis) maps to the smallest positive
    double, a measure-zero remap that keeps the value interior.
    """
    z = complex(z)
    if z == 0:
        raise ZeroInput("argument of 0 is undefined")
    t = math.atan2(z.imag, z.real) / (2.0 * math.pi)
    if t < 0.0:
        t += 1.0
    if t == 0.0:
        t = _TINY
    return t


def _gamma_from_complex_arrays(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    t = np.arctan2(im, re) / (2.0 * math.pi)
    t = np.where(t < 0.0, t + 1.0, t)
    return np.where(t == 0.0, _TINY, t)


def u_from_words(gamma: GammaModel, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """Map raw uniform words in [0, 1) to hidden parameters in (0, 1).

    This is the single place the two parameter models touch raw
    randomness, so counter-based streams and ordinary generators
    produce identical values from identical words.
    """
    if gamma.kind == "uniform":
        return np.where(w1 == 0.0, _TINY, w1)
    # Box-Muller point of the standard complex Gaussian; the radius is
    # guarded away from 0 so the sampled line point is never the origin.
    r = np.sqrt(-2.0 * np.log1p(-w1))
    r = np.where(r == 0.0, _TINY_NORMAL, r)
    theta = 2.0 * math.pi * w2
    return _gamma_from_complex_arrays(r * np.cos(theta), r * np.sin(theta))


def draw_u(gamma: GammaModel, rng: np.random.Generator, n: int) -> np.ndarray:
    """n hidden parameters from an ordinary numpy generator."""
    words = rng.random((n, 2))
    return u_from_words(gamma, words[:, 0], words[:, 1])


def random_ray(rng: np.random.Generator, dim: int) -> StateVector:
    """A Haar-uniform ray representative on the unit sphere."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    while not np.any(v):  # pragma: no cover - probability zero
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(components=v / np.linalg.norm(v))


@dataclass(frozen=True)
class HiddenPoint:
    """A ray representative (normalized on construction) plus u in (0,1)."""

    ray: StateVector
    u: float

    def __post_init__(self):
        if not (0.0 < self.u < 1.0):
            raise ValueError(f"hidden parameter {self.u!r} outside (0, 1)")
        object.__setattr__(self, "ray", StateVector(self.ray.components / np.linalg.norm(self.ray.components)))


# ---------------------------------------------------------------------------
# Per-line spectral weights, CDF, quantile


def line_weights(S: SpectralDecomposition, psi: StateVector) -> np.ndarray:
    """Spectral weights p_i = ||P_i psi||^2 / ||psi||^2 on the line of psi."""
    if S.dim != psi.dim:
        raise DimensionMismatch(f"dimension mismatch: {S.dim} vs {psi.dim}")
    v = psi.components
    p = np.einsum("a,iab,b->i", v.conj(), S.projectors, v).real
    p = np.maximum(p, 0.0)
    return p / np.vdot(v, v).real


def _bulk_line_weights(S: SpectralDecomposition, rays: np.ndarray) -> np.ndarray:
    """Weights for a batch of unit rays, shape (n_rays, m)."""
    p = np.einsum("ra,iab,rb->ri", rays.conj(), S.projectors, rays).real
    return np.maximum(p, 0.0)


def _piece_index(cumulative: np.ndarray, u) -> np.ndarray:
    """First index with cumulative weight >= u (the quasi-inverse tie rule)."""
    idx = np.searchsorted(cumulative, u, side="left")
    return np.minimum(idx, len(cumulative) - 1)


def _cumulative(weights: np.ndarray) -> np.ndarray:
    # clip before pinning the top so the array stays sorted even when
    # rounding pushes a partial sum a few ulp past 1
    c = np.minimum(np.cumsum(weights), 1.0)
    c[-1] = 1.0
    return c


def cdf(S: SpectralDecomposition, psi: StateVector, r: float) -> float:
    """F_psi(r): total spectral weight at or below r.

    Right-continuous step function; 0 below the spectrum, 1 at and
    above its top.
    """
    p = line_weights(S, psi)
    return float(np.sum(p[S.eigenvalues <= r]))


def quantile(S: SpectralDecomposition, psi: StateVector, u: float) -> float:
    """Smallest eigenvalue whose cumulative weight reaches u in (0, 1).

    At a jump, u equal to the cumulative weight selects the lower
    eigenvalue (the infimum rule); zero-weight eigenvalues are never
    returned.
    """
    if not (0.0 < u < 1.0):
        raise ValueError(f"u={u!r} outside (0, 1)")
    c = _cumulative(line_weights(S, psi))
    return float(S.eigenvalues[_piece_index(c, u)])


# ---------------------------------------------------------------------------
# Step profiles along a line: the exact integration backbone


@dataclass(frozen=True)
class LineSteps:
    """A step function of u on one line: values[i] on (edges[i], edges[i+1]].

    Edges start at 0.0, end at 1.0, and increase strictly.
    """

    edges: np.ndarray
    values: np.ndarray

    @property
    def right_edges(self) -> np.ndarray:
        return self.edges[1:]

    def value_at(self, u) -> np.ndarray:
        """Value of the piece containing u, for u in (0, 1]."""
        return self.values[_piece_index(self.right_edges, u)]

    def integral(self, transform=None) -> float:
        vals = self.values if transform is None else np.asarray(transform(self.values), dtype=float)
        return float(np.dot(np.diff(self.edges), vals))


class HiddenFunction(Protocol):
    """Anything evaluable on hidden points with an exact per-line step profile."""

    @property
    def dim(self) -> int: ...

    def evaluate(self, point: HiddenPoint) -> float: ...

    def line_steps(self, psi: StateVector) -> LineSteps: ...


# ---------------------------------------------------------------------------
# The quantile-built observable


@dataclass(frozen=True)
class HiddenObservable:
    """The observable function of T: per-line quantile of the spectral CDF.

    Values always lie in the (merged) eigenvalue list, the per-line
    pushforward of u equals the spectral weights exactly, and the
    function is non-decreasing in u on every line.
    """

    operator: HermitianOperator
    decomposition: SpectralDecomposition
    gamma: GammaModel

    @property
    def dim(self) -> int:
        return self.operator.dim

    def evaluate(self, point: HiddenPoint) -> float:
        return quantile(self.decomposition, point.ray, point.u)

    def line_steps(self, psi: StateVector) -> LineSteps:
        p = line_weights(self.decomposition, psi)
        keep = p > 0.0
        right = _cumulative(p)[keep]
        edges = np.concatenate(([0.0], right))
        return LineSteps(edges=edges, values=self.decomposition.eigenvalues[keep])

    def line_distribution(self, psi: StateVector) -> tuple[np.ndarray, np.ndarray]:
        """Per-line value distribution as (support, weights)."""
        return np.array(self.decomposition.eigenvalues), line_weights(self.decomposition, psi)

    def values_on_line(self, psi: StateVector, u: np.ndarray) -> np.ndarray:
        """Vectorized evaluate for many parameters on one line."""
        c = _cumulative(line_weights(self.decomposition, psi))
        return self.decomposition.eigenvalues[_piece_index(c, u)]


def build_hidden_observable(T: HermitianOperator, gamma: GammaModel) -> HiddenObservable:
    """The observable function of T for the given parameter model."""
    return HiddenObservable(operator=T, decomposition=spectral_decompose(T), gamma=gamma)


def evaluate(f: HiddenFunction, point: HiddenPoint) -> float:
    """Evaluate a hidden function at a hidden point."""
    if f.dim != point.ray.dim:
        raise DimensionMismatch(f"dimension mismatch: {f.dim} vs {point.ray.dim}")
    return f.evaluate(point)


@dataclass(frozen=True)
class SharedParameterSum:
    """Pointwise sum of hidden functions fed by one shared hidden point.

    Sharing u across summands is a modeling convention, not a
    consequence of the construction; reports built on it carry that
    caveat.
    """

    parts: tuple

    def __post_init__(self):
        dims = {p.dim for p in self.parts}
        if len(self.parts) == 0 or len(dims) != 1:
            raise DimensionMismatch("summands must be nonempty and share one dimension")

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def evaluate(self, point: HiddenPoint) -> float:
        return float(sum(p.evaluate(point) for p in self.parts))

    def line_steps(self, psi: StateVector) -> LineSteps:
        profiles = [p.line_steps(psi) for p in self.parts]
        right = np.unique(np.concatenate([s.right_edges for s in profiles]))
        values = profiles[0].value_at(right).astype(float).copy()
        for s in profiles[1:]:
            values += s.value_at(right)
        return LineSteps(edges=np.concatenate(([0.0], right)), values=values)


# ---------------------------------------------------------------------------
# Exact per-line integrals and the moment characterization


def _values_on_spectrum(b, eigenvalues: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(b(eigenvalues), dtype=float)
        if vals.shape != eigenvalues.shape:
            raise TypeError("not vectorized")
    except Exception:
        try:
            vals = np.array([float(b(lam)) for lam in eigenvalues], dtype=float)
        except Exception as exc:
            raise EvaluationError(f"function undefined on the spectrum: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("function takes a non-finite value on the spectrum")
    return vals


def line_integral_exact(f: HiddenObservable, b, psi: StateVector) -> float:
    """Exact mean of b(f) over one line: the finite sum of p_i * b(lambda_i)."""
    p = line_weights(f.decomposition, psi)
    vals = _values_on_spectrum(b, f.decomposition.eigenvalues)
    return float(np.dot(p, vals))


def line_mean(h: HiddenFunction, psi: StateVector, transform=None) -> float:
    """Exact mean over one line of any step-profiled hidden function."""
    return h.line_steps(psi).integral(transform)


@dataclass(frozen=True)
class MomentReport:
    orders: tuple[int, ...]
    line_moments: tuple[float, ...]
    operator_moments: tuple[float, ...]
    errors: tuple[float, ...]
    scales: tuple[float, ...]  # max(1, ||T||_2^n), the per-order error scale
    tolerance: float
    passed: bool


def moments_check(f: HiddenObservable, psi: StateVector, n_max: int, tol: float) -> MomentReport:
    """Compare exact per-line moments of f with <T^n>_psi for n <= n_max.

    Passes when every per-order error is at most tol * max(1, ||T||_2^n).
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    p = line_weights(f.decomposition, psi)
    lams = f.decomposition.eigenvalues
    norm = f.decomposition.source_norm
    orders, lhs, rhs, errs, scales = [], [], [], [], []
    power = np.eye(f.dim, dtype=complex)
    for n in range(n_max + 1):
        left = float(np.dot(p, lams**n))
        right = expectation(HermitianOperator(entries=(power + power.conj().T) / 2.0), psi)
        orders.append(n)
        lhs.append(left)
        rhs.append(right)
        errs.append(abs(left - right))
        scales.append(max(1.0, norm**n))
        power = power @ f.operator.entries
    passed = all(e <= tol * s for e, s in zip(errs, scales))
    return MomentReport(
        orders=tuple(orders),
        line_moments=tuple(lhs),
        operator_moments=tuple(rhs),
        errors=tuple(errs),
        scales=tuple(scales),
        tolerance=tol,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# Orthodoxy: recovering the unique operator behind per-line first moments


def _basis_state(dim: int, j: int) -> StateVector:
    v = np.zeros(dim, dtype=complex)
    v[j] = 1.0
    return StateVector(components=v)


def _mixed_state(dim: int, j: int, k: int, phase: complex) -> StateVector:
    v = np.zeros(dim, dtype=complex)
    v[j] = 1.0 / math.sqrt(2.0)
    v[k] = phase / math.sqrt(2.0)
    return StateVector(components=v)


def orthodoxy_reconstruct(
    h: HiddenFunction,
    *,
    validation_rays: int = 32,
    tol: float = 1e-8,
    rng: np.random.Generator | None = None,
) -> HermitianOperator:
    """The unique Hermitian candidate behind the per-line first moments of h.

    Polarization over the d^2 probe family {e_j, (e_j+e_k)/sqrt2,
    (e_j+i e_k)/sqrt2} pins every matrix entry; held-out random rays
    then certify that the first-moment map is the quadratic form of
    that candidate at all, which fails exactly when h has no orthodox
    mean values even at first order.
    """
    dim = h.dim
    rng = rng if rng is not None else np.random.default_rng(0)
    T = np.zeros((dim, dim), dtype=complex)
    diag = np.array([line_mean(h, _basis_state(dim, j)) for j in range(dim)])
    np.fill_diagonal(T, diag)
    for j in range(dim):
        for k in range(j + 1, dim):
            half = (diag[j] + diag[k]) / 2.0
            re = line_mean(h, _mixed_state(dim, j, k, 1.0)) - half
            im = half - line_mean(h, _mixed_state(dim, j, k, 1.0j))
            T[j, k] = re + 1.0j * im
            T[k, j] = re - 1.0j * im
    candidate = HermitianOperator(entries=T)
    scale = max(1.0, float(np.linalg.norm(T, 2)))
    for _ in range(validation_rays):
        psi = random_ray(rng, dim)
        gap = abs(line_mean(h, psi) - expectation(candidate, psi))
        if gap > tol * scale:
            raise NonQuadraticFirstMoment(
                f"first moments deviate from any quadratic form by {gap:.3e} on a held-out ray"
            )
    return candidate


def orthodoxy_second_moment_gap(
    h: HiddenFunction, T_candidate: HermitianOperator, psi: StateVector
) -> float:
    """|integral of h^2 over the line - <T_candidate^2>_psi|, both exact."""
    second = line_mean(h, psi, transform=lambda v: v * v)
    squared = HermitianOperator(entries=T_candidate.entries @ T_candidate.entries)
    return abs(second - expectation(squared, psi))


# ---------------------------------------------------------------------------
# Hidden propositions


@dataclass(frozen=True)
class HiddenProposition:
    """The event {indicator = 1} of the observable function of a projector."""

    projector: np.ndarray
    underlying: HiddenObservable

    @property
    def dim(self) -> int:
        return self.underlying.dim

    def evaluate(self, point: HiddenPoint) -> float:
        return self.underlying.evaluate(point)

    def line_steps(self, psi: StateVector) -> LineSteps:
        return self.underlying.line_steps(psi)


def proposition_from_projector(E, gamma: GammaModel) -> HiddenProposition:
    """Build the proposition realizing a projector E.

    The spectral data is pinned to the exact eigenvalues {0, 1} (with
    projectors I-E and E), so the indicator takes exactly those values.
    """
    E = np.array(E, dtype=complex)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise NotAProjector(f"expected a square matrix, got shape {E.shape}")
    scale = max(1.0, float(np.linalg.norm(E)))
    if np.linalg.norm(E - E.conj().T) > PROJECTOR_TOL * scale:
        raise NotAProjector("matrix is not Hermitian within tolerance")
    E = (E + E.conj().T) / 2.0
    if np.linalg.norm(E @ E - E) > PROJECTOR_TOL * scale:
        raise NotAProjector("matrix is not idempotent within tolerance")
    dim = E.shape[0]
    rank = int(round(np.trace(E).real))
    complement = np.eye(dim, dtype=complex) - E
    if rank == 0:
        S = SpectralDecomposition(eigenvalues=np.array([0.0]), projectors=np.array([np.eye(dim, dtype=complex)]))
    elif rank == dim:
        S = SpectralDecomposition(eigenvalues=np.array([1.0]), projectors=np.array([np.eye(dim, dtype=complex)]))
    else:
        S = SpectralDecomposition(eigenvalues=np.array([0.0, 1.0]), projectors=np.array([complement, E]))
    underlying = HiddenObservable(operator=HermitianOperator(entries=E), decomposition=S, gamma=gamma)
    return HiddenProposition(projector=underlying.operator.entries, underlying=underlying)


def proposition_measure_on_line(L: HiddenProposition, psi: StateVector) -> float:
    """Exact u-measure of the event on the line of psi; equals <E>_psi."""
    values, weights = L.underlying.line_distribution(psi)
    return float(np.sum(weights[values == 1.0]))


# ---------------------------------------------------------------------------
# Statistical equivalence of per-line distributions


def merge_distribution(values: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort the support and pool weights of exactly equal values."""
    support, inverse = np.unique(np.asarray(values, dtype=float), return_inverse=True)
    pooled = np.zeros_like(support)
    np.add.at(pooled, inverse, np.asarray(weights, dtype=float))
    return support, pooled


def _cluster_distribution(
    values: np.ndarray, weights: np.ndarray, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Pool sorted support values whose gaps are within tol.

    Aligns supports whose entries agree only to rounding, e.g. transfer
    tables against independently decomposed eigenvalue lists.
    """
    out_v: list[float] = []
    out_w: list[float] = []
    start = 0
    for stop in range(1, len(values) + 1):
        if stop == len(values) or values[stop] - values[stop - 1] > tol:
            chunk_w = weights[start:stop]
            total = float(np.sum(chunk_w))
            out_v.append(float(np.dot(values[start:stop], chunk_w) / total) if total > 0 else float(values[start]))
            out_w.append(total)
            start = stop
    return np.array(out_v), np.array(out_w)


@dataclass(frozen=True)
class EquivalenceReport:
    n_rays: int
    passed: bool
    max_weight_error: float
    failures: tuple[str, ...]


def statistical_equivalence_check(
    f1,
    f2,
    rays: Sequence[StateVector],
    *,
    weight_tol: float = WEIGHT_TOL,
    value_tol: float | None = None,
) -> EquivalenceReport:
    """Compare per-line value distributions of two hidden observables.

    Passes when, on every probe ray, the two (value, weight) lists have
    matching supports (within value_tol after dropping weights below
    weight_tol) and weights equal within weight_tol.
    """
    if f1.dim != f2.dim:
        raise DimensionMismatch(f"dimension mismatch: {f1.dim} vs {f2.dim}")
    failures: list[str] = []
    max_weight_error = 0.0
    for idx, psi in enumerate(rays):
        v1, w1 = merge_distribution(*f1.line_distribution(psi))
        v2, w2 = merge_distribution(*f2.line_distribution(psi))
        vtol = value_tol
        if vtol is None:
            top = max(np.max(np.abs(v1), initial=0.0), np.max(np.abs(v2), initial=0.0))
            vtol = 1e-9 * max(1.0, top)
        v1, w1 = _cluster_distribution(v1, w1, vtol)
        v2, w2 = _cluster_distribution(v2, w2, vtol)
        keep1, keep2 = w1 > weight_tol, w2 > weight_tol
        v1, w1, v2, w2 = v1[keep1], w1[keep1], v2[keep2], w2[keep2]
        if len(v1) != len(v2):
            failures.append(f"ray {idx}: support sizes {len(v1)} vs {len(v2)}")
            continue
        if np.max(np.abs(v1 - v2), initial=0.0) > vtol:
            failures.append(f"ray {idx}: supports differ beyond {vtol:.3e}")
            continue
        err = float(np.max(np.abs(w1 - w2), initial=0.0))
        max_weight_error = max(max_weight_error, err)
        if err > weight_tol:
            failures.append(f"ray {idx}: weight error {err:.3e}")
    return EquivalenceReport(
        n_rays=len(list(rays)),
        passed=not failures,
        max_weight_error=max_weight_error,
        failures=tuple(failures),
    )


# ---------------------------------------------------------------------------
# Spectral support and pushforward checks


@dataclass(frozen=True)
class SupportReport:
    n_evaluations: int
    n_outside: int
    passed: bool


def spectral_support_check(
    f: HiddenObservable,
    *,
    n_rays: int,
    samples_per_ray: int,
    rng: np.random.Generator,
) -> SupportReport:
    """Sampled evaluations must land exactly in the eigenvalue list."""
    lams = f.decomposition.eigenvalues
    outside = 0
    total = 0
    for _ in range(n_rays):
        psi = random_ray(rng, f.dim)
        u = draw_u(f.gamma, rng, samples_per_ray)
        vals = f.values_on_line(psi, u)
        outside += int(np.sum(~np.isin(vals, lams)))
        total += samples_per_ray
    return SupportReport(n_evaluations=total, n_outside=outside, passed=outside == 0)


@dataclass(frozen=True)
class KsReport:
    n_samples: int
    statistic: float
    critical_value: float
    significance: float
    passed: bool


def pushforward_ks(
    gamma: GammaModel, n: int, rng: np.random.Generator, significance: float = 1e-3
) -> KsReport:
    """Kolmogorov-Smirnov check of the u distribution against uniform(0,1).

    Uses the asymptotic critical value sqrt(-ln(alpha/2)/2)/sqrt(n).
    """
    u = np.sort(draw_u(gamma, rng, n))
    grid = np.arange(1, n + 1) / n
    d_plus = float(np.max(grid - u))
    d_minus = float(np.max(u - (grid - 1.0 / n)))
    statistic = max(d_plus, d_minus)
    critical = math.sqrt(-0.5 * math.log(significance / 2.0)) / math.sqrt(n)
    return KsReport(
        n_samples=n,
        statistic=statistic,
        critical_value=critical,
        significance=significance,
        passed=statistic < critical,
    )
