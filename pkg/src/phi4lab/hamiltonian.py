"""Field operator, quartic interaction, and total Hamiltonian.

The interaction is applied as four successive field applications per
quadrature node (exactly Hermitian by construction, since the truncated Segal
field is self-adjoint); nodes where ``u * chi`` vanishes are skipped.  No
normal-ordered expansion is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from .errors import BasisTooLarge, ConfigError
from .fock import (
    FockBasis,
    OperatorHandle,
    apply_dgamma_omega,
    apply_smeared,
    free_energies,
)
from .grid import ModeGrid, SpatialQuadrature

DEFAULT_ASSEMBLY_CAP = 20_000


@dataclass(frozen=True)
class FieldOperator:
    """Hermitian field at a spatial point: Segal field of rho * exp(-i k.x)."""

    x: np.ndarray
    smearing: np.ndarray
    handle: OperatorHandle


def build_field(basis: FockBasis, grid: ModeGrid, x) -> FieldOperator:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    smearing = grid.smearing_at(x)
    handle = OperatorHandle(
        apply=lambda v: apply_smeared(basis, grid, smearing, v, "segal"),
        dim=basis.dim,
        hermitian=True,
        descriptor=f"phi(x={np.round(x, 12).tolist()})",
    )
    return FieldOperator(x=x, smearing=smearing, handle=handle)


def apply_interaction(
    basis: FockBasis, grid: ModeGrid, quad: SpatialQuadrature, v: np.ndarray
) -> np.ndarray:
    """Quartic interaction: sum_j u_j chi(x_j) phi(x_j)^4 v (grade reach 4)."""
    out = np.zeros(basis.dim, dtype=complex)
    coef = quad.weights * quad.chi_values
    for j in np.nonzero(coef)[0]:
        f = grid.smearing_at(quad.nodes[j])
        w = v
        for _ in range(4):
            w = apply_smeared(basis, grid, f, w, "segal")
        out += coef[j] * w
    return out


def apply_total(
    basis: FockBasis,
    grid: ModeGrid,
    quad: SpatialQuadrature,
    kappa: float,
    v: np.ndarray,
) -> np.ndarray:
    """Total Hamiltonian action: free part plus kappa times the interaction."""
    if kappa < 0:
        raise ConfigError("coupling kappa must be nonnegative")
    out = apply_dgamma_omega(basis, grid, v)
    if kappa != 0.0:
        out = out + kappa * apply_interaction(basis, grid, quad, v)
    return out


class HamiltonianSet:
    """Cached handles for the free, interaction, and total Hamiltonians.

    Precomputes the diagonal free energies and the per-node smearings so the
    eigen- and linear solvers pay only the ladder scatters per matvec.
    """

    def __init__(self, basis: FockBasis, grid: ModeGrid, quad: SpatialQuadrature):
        self.basis = basis
        self.grid = grid
        self.quadrature = quad
        self._esum = free_energies(basis, grid)
        coef = quad.weights * quad.chi_values
        active = np.nonzero(coef)[0]
        self._node_coef = coef[active]
        self._node_smearing = [grid.smearing_at(quad.nodes[j]) for j in active]
        self.h0 = OperatorHandle(
            apply=lambda v: self._esum * v, dim=basis.dim, hermitian=True, descriptor="H0"
        )
        self.hi = OperatorHandle(
            apply=self._apply_hi, dim=basis.dim, hermitian=True, descriptor="HI"
        )

    def _apply_hi(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(self.basis.dim, dtype=complex)
        for coef, f in zip(self._node_coef, self._node_smearing):
            w = v
            for _ in range(4):
                w = apply_smeared(self.basis, self.grid, f, w, "segal")
            out += coef * w
        return out

    def hkappa(self, kappa: float) -> OperatorHandle:
        if kappa < 0:
            raise ConfigError("coupling kappa must be nonnegative")
        if kappa == 0.0:
            return OperatorHandle(
                apply=lambda v: self._esum * v,
                dim=self.basis.dim,
                hermitian=True,
                descriptor="H(kappa=0)",
            )
        return OperatorHandle(
            apply=lambda v: self._esum * v + kappa * self._apply_hi(v),
            dim=self.basis.dim,
            hermitian=True,
            descriptor=f"H(kappa={kappa!r})",
        )


def assemble_sparse(
    handle: OperatorHandle, basis: FockBasis, cap: int = DEFAULT_ASSEMBLY_CAP
) -> scipy.sparse.csc_matrix:
    """Explicit sparse matrix of a handle, column by column on unit vectors."""
    if basis.dim > cap:
        raise BasisTooLarge(basis.dim, cap)
    cols = []
    e = np.zeros(basis.dim, dtype=complex)
    for j in range(basis.dim):
        e[j] = 1.0
        cols.append(scipy.sparse.csc_matrix(handle(e).reshape(-1, 1)))
        e[j] = 0.0
    return scipy.sparse.hstack(cols, format="csc")
