"""Shared test fixtures: random instances and independent oracles."""

from __future__ import annotations

import numpy as np

from hobs import (
    DensityMatrix,
    HermitianOperator,
    HiddenPoint,
    StateVector,
    validate_hermitian,
)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def op(entries) -> HermitianOperator:
    return validate_hermitian(np.array(entries, dtype=complex))


def state(*components) -> StateVector:
    return StateVector(components=np.array(components, dtype=complex))


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> HermitianOperator:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return validate_hermitian(scale * (m + m.conj().T) / 2.0)


def random_density(rng: np.random.Generator, dim: int) -> DensityMatrix:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return DensityMatrix(entries=rho / np.trace(rho).real)


def random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_projector(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(m)
    cols = q[:, :rank]
    return cols @ cols.conj().T


def riemann_line_mean(h, psi: StateVector, n: int = 20001, transform=None) -> float:
    """Independent midpoint-grid oracle for per-line means of step functions.

    Error is bounded by (number of breakpoints) * sup|h| / n.
    """
    u = (np.arange(n) + 0.5) / n
    vals = np.array([h.evaluate(HiddenPoint(ray=psi, u=float(ui))) for ui in u])
    if transform is not None:
        vals = transform(vals)
    return float(np.mean(vals))


def random_expression_text(rng: np.random.Generator, depth: int = 4) -> str:
    """A random expression drawn from the surface grammar."""

    def number() -> str:
        v = round(float(rng.uniform(-3.0, 3.0)), 3)
        # negative literals (including -0.0) only parse at expression
        # heads; parenthesize
        text = repr(v)
        return f"({text})" if text.startswith("-") else text

    def atom(d: int) -> str:
        if d <= 0:
            return "x" if rng.random() < 0.6 else number()
        roll = rng.random()
        if roll < 0.25:
            return "x"
        if roll < 0.4:
            return number()
        if roll < 0.5:
            return f"({expr(d - 1)})"
        kind = rng.choice(["abs", "min", "max", "step", "ind", "clamp"])
        if kind == "abs":
            return f"abs({expr(d - 1)})"
        if kind in ("min", "max"):
            return f"{kind}({expr(d - 1)}, {expr(d - 1)})"
        if kind == "step":
            return f"step({number()})"
        a, b = sorted((float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3))))
        return f"{kind}({round(a, 3)!r}, {round(b, 3)!r})"

    def factor(d: int) -> str:
        base = atom(d)
        if rng.random() < 0.3:
            return f"{base}^{int(rng.integers(0, 4))}"
        return base

    def term(d: int) -> str:
        parts = [factor(d) for _ in range(1 + (rng.random() < 0.4))]
        return " * ".join(parts)

    def expr(d: int) -> str:
        parts = [term(d)]
        while rng.random() < 0.4 and len(parts) < 3:
            parts.append(term(d))
        out = parts[0]
        for p in parts[1:]:
            out += (" + " if rng.random() < 0.5 else " - ") + p
        return out

    return expr(depth)
