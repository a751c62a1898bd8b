"""Command-line front end: file loading, verification suites, JSON/CSV reports.

File formats
    matrix  JSON array of rows, each entry a [re, im] pair of doubles
    vector  JSON array of [re, im] pairs
    report  JSON object with lexicographically sorted keys
    samples CSV `component_index,u,value`, 17 significant digits

Exit codes: 0 pass, 1 verification fail, 2 input error, 3 internal
numeric failure.  Reports contain no timestamps; identical inputs and
seed produce byte-identical output for any worker count.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import expr
from .contexts import SHARED_U_CAVEAT, homomorphism_check, joint_diagonalize, nogo_witness
from .errors import (
    DegeneracyResolutionFailure,
    EigensolverFailure,
    HobsError,
    NonQuadraticFirstMoment,
    NotCommuting,
)
from .kernel import GammaModel, build_hidden_observable, spectral_support_check
from .mixed import (
    Ensemble,
    HiddenMixedState,
    SampleStream,
    dump_samples_csv,
    ensemble_from_density,
    exact_classical_mean,
    mc_estimate,
)
from .spectral import DensityMatrix, HermitianOperator, trace_expectation, validate_hermitian

FINITE_DIM_CAVEAT = (
    "verification runs at a fixed finite matrix dimension; the identities "
    "checked are dimension-agnostic but only desk-scale instances are exercised"
)
EIGEN_ENSEMBLE_CAVEAT = (
    "the hidden mixed state uses the eigen-ensemble of the density matrix; "
    "the correspondence from mixtures to matrices is many-to-one"
)


@dataclass(frozen=True)
class RunConfig:
    seed: int
    samples: int
    tolerance: float
    gamma_kind: str
    output_path: str | None
    workers: int = 1

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise click.UsageError("--tol must be positive")
        if not 0 <= self.seed < 2**64:
            raise click.UsageError("--seed must fit in 64 unsigned bits")
        if self.workers < 1:
            raise click.UsageError("--workers must be >= 1")

    @property
    def gamma(self) -> GammaModel:
        return GammaModel(kind=self.gamma_kind)


class _InputError(click.ClickException):
    exit_code = 2


def _load_json(path: str):
    try:
        text = Path(path).read_text()
        return json.loads(text)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _InputError(f"{path} is not valid JSON: {exc}") from exc


def _parse_complex_entries(obj, path: str) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 3 and arr.shape[2] == 2:  # matrix of [re, im]
        return arr[..., 0] + 1.0j * arr[..., 1]
    if arr.ndim == 2 and arr.shape[1] == 2:  # vector of [re, im]
        return arr[:, 0] + 1.0j * arr[:, 1]
    raise _InputError(f"{path}: expected [re, im] pairs (vector) or rows of pairs (matrix)")


def _load_complex(path: str) -> np.ndarray:
    try:
        return _parse_complex_entries(_load_json(path), path)
    except (ValueError, TypeError) as exc:
        raise _InputError(f"{path}: malformed numeric data: {exc}") from exc


def _load_operator(path: str) -> HermitianOperator:
    entries = _load_complex(path)
    if entries.ndim != 2:
        raise _InputError(f"{path}: expected a matrix, got a vector")
    try:
        return validate_hermitian(entries)
    except HobsError as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _load_density(path: str) -> DensityMatrix:
    entries = _load_complex(path)
    if entries.ndim != 2:
        raise _InputError(f"{path}: expected a matrix, got a vector")
    try:
        return DensityMatrix(entries=entries)
    except (HobsError, ValueError) as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _parse_expression(text: str) -> expr.BorelExpr:
    try:
        return expr.parse(text)
    except HobsError as exc:
        raise _InputError(f"bad expression: {exc}") from exc


def _digest(file_paths: list[str], extra: dict) -> str:
    """SHA-256 over canonicalized input bytes plus the governing config."""
    h = hashlib.sha256()
    for path in file_paths:
        canonical = json.dumps(_load_json(path), sort_keys=True, separators=(",", ":"))
        piece = canonical.encode()
        h.update(len(piece).to_bytes(8, "big"))
        h.update(piece)
    config = json.dumps(extra, sort_keys=True, separators=(",", ":")).encode()
    h.update(len(config).to_bytes(8, "big"))
    h.update(config)
    return h.hexdigest()


def _jsonable(value):
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return [[float(z.real), float(z.imag)] for z in value]
        return [float(x) for x in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit_report(command: str, digest: str, results: dict, passed: bool, caveats: list[str], out: str | None) -> None:
    report = {
        "command": command,
        "inputs_digest": digest,
        "results": _jsonable(results),
        "pass": passed,
        "caveats": list(caveats),
    }
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    if not passed:
        sys.exit(1)


def _numeric_guard(fn):
    try:
        return fn()
    except (EigensolverFailure, DegeneracyResolutionFailure, NonQuadraticFirstMoment, np.linalg.LinAlgError) as exc:
        click.echo(f"internal numeric failure: {exc}", err=True)
        sys.exit(3)


def _common_options(fn):
    fn = click.option("--seed", type=int, default=0, show_default=True, help="64-bit RNG seed.")(fn)
    fn = click.option("--tol", "tolerance", type=float, default=1e-8, show_default=True, help="Pass/fail tolerance.")(fn)
    fn = click.option(
        "--gamma",
        "gamma_kind",
        type=click.Choice(["uniform", "arg"]),
        default="uniform",
        show_default=True,
        help="Hidden parameter model.",
    )(fn)
    fn = click.option("--out", "output_path", type=click.Path(), default=None, help="Write output here instead of stdout.")(fn)
    return fn


@click.group()
def cli():
    """Workbench for observable functions with orthodox mean values.

    Verifies, exactly and by seeded Monte Carlo, that operator traces
    against density matrices equal classical means of quantile-built
    observable functions against ray mixtures, and probes the
    commutative-context dichotomy.
    """


@cli.command("verify-trace")
@click.argument("t_file", type=click.Path(exists=True))
@click.argument("d_file", type=click.Path(exists=True))
@click.argument("b_expr")
@click.option("--samples", type=int, default=100000, show_default=True, help="Monte Carlo sample count.")
@click.option("--workers", type=int, default=1, show_default=True, help="Worker threads for sampling.")
@_common_options
def cmd_verify_trace(t_file, d_file, b_expr, samples, workers, seed, tolerance, gamma_kind, output_path):
    """Check Trace[b(T) D] against the classical mean, exactly and by sampling."""
    config = RunConfig(seed=seed, samples=samples, tolerance=tolerance, gamma_kind=gamma_kind, output_path=output_path, workers=workers)
    if samples < 2:
        raise click.UsageError("--samples must be >= 2 for Monte Carlo verification")
    T = _load_operator(t_file)
    D = _load_density(d_file)
    if T.dim != D.dim:
        raise _InputError(f"dimension mismatch: {t_file} is {T.dim}x{T.dim}, {d_file} is {D.dim}x{D.dim}")
    b = _parse_expression(b_expr)
    digest = _digest(
        [t_file, d_file],
        {"b": b_expr, "command": "verify-trace", "gamma": gamma_kind, "samples": samples, "seed": seed, "tol": tolerance},
    )

    def run():
        from .spectral import apply_borel

        f = build_hidden_observable(T, config.gamma)
        mu = HiddenMixedState(ensemble=ensemble_from_density(D), gamma=config.gamma)
        trace_value = trace_expectation(apply_borel(f.decomposition, b), D)
        exact = exact_classical_mean(f, b, mu)
        estimate = mc_estimate(f, b, mu, SampleStream(seed=config.seed), samples, workers=config.workers)
        exact_gap = abs(trace_value - exact)
        mc_gap = abs(estimate.mean - trace_value)
        if estimate.std_error > 0.0:
            z = mc_gap / estimate.std_error
        else:
            z = 0.0 if mc_gap <= config.tolerance else math.inf
        passed = exact_gap <= config.tolerance and z <= 4.0
        results = {
            "dimension": T.dim,
            "exact_classical_mean": exact,
            "exact_gap": exact_gap,
            "expression": b_expr,
            "mc_mean": estimate.mean,
            "mc_std_error": estimate.std_error,
            "mc_z_score": z,
            "samples": samples,
            "tolerance": config.tolerance,
            "trace": trace_value,
        }
        return results, passed

    results, passed = _numeric_guard(run)
    _emit_report("verify-trace", digest, results, passed, [FINITE_DIM_CAVEAT, EIGEN_ENSEMBLE_CAVEAT], output_path)


@cli.command("support")
@click.argument("t_file", type=click.Path(exists=True))
@click.option("--samples", type=int, default=100000, show_default=True, help="Total sampled evaluations.")
@click.option("--rays", type=int, default=100, show_default=True, help="Random rays to spread samples over.")
@_common_options
def cmd_support(t_file, samples, rays, seed, tolerance, gamma_kind, output_path):
    """Check sampled values of the observable function land in the spectrum."""
    config = RunConfig(seed=seed, samples=samples, tolerance=tolerance, gamma_kind=gamma_kind, output_path=output_path)
    if samples < 1 or rays < 1:
        raise click.UsageError("--samples and --rays must be >= 1")
    T = _load_operator(t_file)
    digest = _digest(
        [t_file],
        {"command": "support", "gamma": gamma_kind, "rays": rays, "samples": samples, "seed": seed, "tol": tolerance},
    )

    def run():
        f = build_hidden_observable(T, config.gamma)
        per_ray = max(1, samples // rays)
        report = spectral_support_check(
            f, n_rays=rays, samples_per_ray=per_ray, rng=np.random.default_rng(config.seed)
        )
        results = {
            "eigenvalues": list(f.decomposition.eigenvalues),
            "n_evaluations": report.n_evaluations,
            "n_outside_spectrum": report.n_outside,
            "rays": rays,
            "samples_per_ray": per_ray,
        }
        return results, report.passed

    results, passed = _numeric_guard(run)
    _emit_report("support", digest, results, passed, [FINITE_DIM_CAVEAT], output_path)


@cli.command("context")
@click.argument("family_files", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--trials", type=int, default=16, show_default=True, help="Random closure trials.")
@_common_options
def cmd_context(family_files, trials, seed, tolerance, gamma_kind, output_path):
    """Joint-diagonalize a commuting family and verify algebra closure."""
    config = RunConfig(seed=seed, samples=2, tolerance=tolerance, gamma_kind=gamma_kind, output_path=output_path)
    family = [_load_operator(path) for path in family_files]
    digest = _digest(
        list(family_files),
        {"command": "context", "gamma": gamma_kind, "seed": seed, "tol": tolerance, "trials": trials},
    )

    def run():
        rng = np.random.default_rng(config.seed)
        try:
            ctx = joint_diagonalize(family, config.gamma, rng=rng)
        except NotCommuting as exc:
            return {"branch": "not-commuting", "detail": str(exc)}, False
        report = homomorphism_check(ctx, trials=trials, rng=rng)
        tables = {f"member_{i}": m.transfer_table() for i, m in enumerate(ctx.members)}
        results = {
            "branch": "context",
            "max_operator_error": report.max_operator_error,
            "max_pointwise_additive_deviation": report.max_additive_deviation,
            "max_pointwise_multiplicative_deviation": report.max_multiplicative_deviation,
            "n_labels": ctx.n_labels,
            "transfer_tables": tables,
            "trials": trials,
        }
        return results, report.passed

    results, passed = _numeric_guard(run)
    _emit_report("context", digest, results, passed, [FINITE_DIM_CAVEAT], output_path)


@cli.command("nogo")
@click.argument("a_file", type=click.Path(exists=True))
@click.argument("b_file", type=click.Path(exists=True))
@click.option("--search", type=int, default=4096, show_default=True, help="Random witness rays to try.")
@_common_options
def cmd_nogo(a_file, b_file, search, seed, tolerance, gamma_kind, output_path):
    """Resolve the dichotomy for a pair: context, or a second-moment witness."""
    config = RunConfig(seed=seed, samples=2, tolerance=tolerance, gamma_kind=gamma_kind, output_path=output_path)
    A = _load_operator(a_file)
    B = _load_operator(b_file)
    digest = _digest(
        [a_file, b_file],
        {"command": "nogo", "gamma": gamma_kind, "search": search, "seed": seed, "tol": tolerance},
    )

    def run():
        report = nogo_witness(
            A, B, config.gamma, search=search, rng=np.random.default_rng(config.seed), tolerance=config.tolerance
        )
        results = {
            "branch": report.branch,
            "gap": report.gap,
            "gap_threshold": report.gap_threshold,
            "reconstruction_error": report.reconstruction_error,
        }
        if report.witness_ray is not None:
            results["witness_ray"] = report.witness_ray
        if report.context is not None:
            results["n_labels"] = report.context.n_labels
            results["transfer_tables"] = {
                f"member_{i}": m.transfer_table() for i, m in enumerate(report.context.members)
            }
        passed = report.branch in ("commuting", "witness")
        return results, passed

    results, passed = _numeric_guard(run)
    _emit_report("nogo", digest, results, passed, [FINITE_DIM_CAVEAT, SHARED_U_CAVEAT], output_path)


def _sample_inputs(path: str, observable_path: str | None):
    """Interpret the sample input: a state vector, a density, or an operator.

    A vector gives the pure mixture on its ray; a density matrix gives
    its eigen-ensemble; a Hermitian non-density matrix is taken as the
    observable over the maximally mixed state.  --observable overrides
    the observable in all cases (default: the input reread as operator).
    """
    entries = _load_complex(path)
    if entries.ndim == 1:
        ensemble = Ensemble(weights=np.array([1.0]), rays=entries[None, :] / np.linalg.norm(entries))
        default_op = validate_hermitian(np.outer(entries, entries.conj()) / np.vdot(entries, entries).real)
    else:
        operator = _load_operator(path)
        try:
            density = DensityMatrix(entries=operator.entries)
            ensemble = ensemble_from_density(density)
        except (HobsError, ValueError):
            dim = operator.dim
            density = DensityMatrix(entries=np.eye(dim, dtype=complex) / dim)
            ensemble = ensemble_from_density(density)
        default_op = operator
    observable = _load_operator(observable_path) if observable_path else default_op
    if observable.dim != ensemble.dim:
        raise _InputError(f"observable dimension {observable.dim} != state dimension {ensemble.dim}")
    return ensemble, observable


@cli.command("sample")
@click.argument("input_file", type=click.Path(exists=True))
@click.option("--observable", "observable_path", type=click.Path(exists=True), default=None, help="Operator whose observable function fills the value column.")
@click.option("--samples", type=int, default=1000, show_default=True, help="Rows to draw.")
@click.option("--workers", type=int, default=1, show_default=True, help="Worker threads.")
@_common_options
def cmd_sample(input_file, observable_path, samples, workers, seed, tolerance, gamma_kind, output_path):
    """Dump hidden samples as CSV: component_index,u,value."""
    config = RunConfig(seed=seed, samples=max(2, samples), tolerance=tolerance, gamma_kind=gamma_kind, output_path=output_path, workers=workers)
    if samples < 1:
        raise click.UsageError("--samples must be >= 1")
    ensemble, observable = _sample_inputs(input_file, observable_path)

    def run():
        f = build_hidden_observable(observable, config.gamma)
        mu = HiddenMixedState(ensemble=ensemble, gamma=config.gamma)
        buffer = io.StringIO()
        dump_samples_csv(f, mu, SampleStream(seed=config.seed), samples, buffer, workers=config.workers)
        return buffer.getvalue()

    text = _numeric_guard(run)
    if output_path:
        Path(output_path).write_text(text)
    else:
        click.echo(text, nl=False)


def main():
    cli()


if __name__ == "__main__":
    main()
