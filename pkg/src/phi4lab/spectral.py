"""Ground states and shifted Hermitian solves on operator handles.

The eigensolver is a restarted Lanczos iteration with full
reorthogonalization: each restart builds a fresh Krylov block from the current
best Ritz vector, keeping every basis vector and reorthogonalizing twice per
step.  At desk-scale dimensions this is both robust and cheap, and with a
fixed seed the whole computation is deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IndefiniteShift,
    NearDegenerateWarning,
    NoConvergence,
    ZeroVector,
)
from .fock import OperatorHandle

DEFAULT_BLOCK = 40
DEGENERACY_RTOL = 1e-8


@dataclass
class SpectralResult:
    """Converged extremal eigenpair with convergence diagnostics."""

    e0: float
    vector: np.ndarray
    residual: float
    iterations: int
    gap_estimate: float
    near_degenerate: bool = False
    top_grade_weight: float | None = None
    kappa: float | None = None
    extras: dict = field(default_factory=dict)


def _lanczos_block(h: OperatorHandle, start: np.ndarray, steps: int):
    """One full-reorthogonalization Lanczos block from ``start``.

    Returns (ritz values, ritz vectors in the ambient space, matvec count).
    """
    dim = start.shape[0]
    steps = min(steps, dim)
    vecs = [start / np.linalg.norm(start)]
    alphas: list[float] = []
    betas: list[float] = []
    matvecs = 0
    w = h(vecs[0])
    matvecs += 1
    for j in range(steps):
        alpha = float(np.real(np.vdot(vecs[j], w)))
        alphas.append(alpha)
        w = w - alpha * vecs[j]
        if j > 0:
            w = w - betas[-1] * vecs[j - 1]
        # full reorthogonalization, twice for numerical safety
        for _ in range(2):
            for q in vecs:
                w = w - np.vdot(q, w) * q
        beta = float(np.linalg.norm(w))
        if j == steps - 1 or beta < 1e-14:
            break
        betas.append(beta)
        vecs.append(w / beta)
        w = h(vecs[-1])
        matvecs += 1
    m = len(alphas)
    tmat = np.diag(np.array(alphas))
    if m > 1:
        off = np.array(betas[: m - 1])
        tmat += np.diag(off, 1) + np.diag(off, -1)
    theta, y = np.linalg.eigh(tmat)
    basis_mat = np.array(vecs).T
    ritz = basis_mat @ y
    return theta, ritz, matvecs


def ground_state(
    h: OperatorHandle,
    dim: int,
    tol: float = 1e-10,
    max_iter: int = 20_000,
    seed: int = 0,
    block: int = DEFAULT_BLOCK,
    degeneracy_rtol: float = DEGENERACY_RTOL,
) -> SpectralResult:
    """Lowest eigenpair of a Hermitian handle by restarted Lanczos.

    Converges when the explicit residual ||H v - e v|| drops below ``tol``.
    The returned vector is unit norm with its vacuum (index 0) coefficient
    rotated to the nonnegative real axis, so overlaps with the vacuum are
    reproducible across runs.  If the two lowest Ritz values are closer than
    ``degeneracy_rtol * max(1, |e0|)`` a NearDegenerateWarning is issued and
    flagged on the result; simplicity of the ground state is detected, not
    assumed.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(h, OperatorHandle) and not h.hermitian:
        raise ValueError(f"ground_state needs a Hermitian handle, got {h.descriptor!r}")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    total_matvecs = 0
    gap = np.inf
    while True:
        theta, ritz, used = _lanczos_block(h, x, block)
        total_matvecs += used
        e0 = float(theta[0])
        x = ritz[:, 0]
        x /= np.linalg.norm(x)
        if len(theta) > 1:
            gap = float(theta[1] - theta[0])
        hx = h(x)
        total_matvecs += 1
        residual = float(np.linalg.norm(hx - e0 * x))
        if residual <= tol:
            break
        if total_matvecs >= max_iter:
            raise NoConvergence(
                f"ground state not converged after {total_matvecs} matvecs "
                f"(residual {residual:.3e}, tol {tol:.3e})"
            )
    # fix the phase: vacuum coefficient real and nonnegative
    anchor = x[0]
    if abs(anchor) < 1e-12:
        anchor = x[np.argmax(np.abs(x))]
    if abs(anchor) > 0:
        x = x * (np.conj(anchor) / abs(anchor))
    near = gap <= degeneracy_rtol * max(1.0, abs(e0))
    if near:
        warnings.warn(
            f"two lowest Ritz values within {gap:.3e} of each other; "
            "ground state may not be simple",
            NearDegenerateWarning,
        )
    return SpectralResult(
        e0=e0,
        vector=x,
        residual=residual,
        iterations=total_matvecs,
        gap_estimate=gap,
        near_degenerate=near,
    )


def solve_shifted(
    h: OperatorHandle,
    shift: float,
    rhs: np.ndarray,
    tol: float = 1e-12,
    max_iter: int | None = None,
    emin: float | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Solve (H + shift) x = rhs by conjugate gradients.

    Requires H + shift positive definite, i.e. shift > -min spec(H); the
    minimum is estimated with a coarse ground-state run unless ``emin`` is
    supplied by the caller (solvers in this package always know it already).
    Convergence is ||(H + shift) x - rhs|| <= tol * ||rhs||.
    """
    dim = rhs.shape[0]
    if emin is None:
        est = ground_state(h, dim, tol=1e-8, max_iter=5000, seed=seed)
        emin = est.e0
    floor = emin + shift
    if floor <= 1e-14 * max(1.0, abs(emin)):
        raise IndefiniteShift(
            f"shift {shift} leaves the operator indefinite (min eigenvalue estimate {emin})"
        )
    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0.0:
        return np.zeros_like(rhs)
    if max_iter is None:
        max_iter = max(1000, 20 * dim)
    x = np.zeros_like(rhs)
    r = rhs.copy()
    p = r.copy()
    rs = np.vdot(r, r)
    for _ in range(max_iter):
        ap = h(p) + shift * p
        alpha = rs / np.vdot(p, ap)
        x = x + alpha * p
        r = r - alpha * ap
        rs_new = np.vdot(r, r)
        if np.sqrt(abs(rs_new)) <= tol * rhs_norm:
            return x
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise NoConvergence(
        f"shifted solve not converged after {max_iter} iterations "
        f"(residual {np.sqrt(abs(rs)):.3e}, target {tol * rhs_norm:.3e})"
    )


def rayleigh_quotient(h: OperatorHandle, v: np.ndarray) -> float:
    """<v, H v> / <v, v>; real up to roundoff for Hermitian handles."""
    nrm2 = float(np.real(np.vdot(v, v)))
    if nrm2 == 0.0:
        raise ZeroVector("Rayleigh quotient of the zero vector")
    q = np.vdot(v, h(v)) / nrm2
    return float(np.real(q))


def estimate_operator_norm(h: OperatorHandle, dim: int, iters: int = 30, seed: int = 1) -> float:
    """Largest |eigenvalue| estimate by power iteration (Hermitian handles)."""
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    u /= np.linalg.norm(u)
    est = 0.0
    for _ in range(iters):
        w = h(u)
        est = float(np.linalg.norm(w))
        if est == 0.0:
            return 0.0
        u = w / est
    return est
