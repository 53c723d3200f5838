import numpy as np
import pytest

from oracles import DenseModel

from phi4lab import (
    IndefiniteShift,
    NearDegenerateWarning,
    NoConvergence,
    ZeroVector,
    ground_state,
    rayleigh_quotient,
    solve_shifted,
)
from phi4lab.fock import OperatorHandle



def diag_handle(values):
    values = np.asarray(values, dtype=float)
    return OperatorHandle(apply=lambda v: values * v, dim=len(values), descriptor="diag")


class TestGroundState:
    def test_free_hamiltonian_ground_is_vacuum(self, reference_model):
        grid, quad, basis, ham = reference_model
        res = ground_state(ham.hkappa(0.0), basis.dim, tol=1e-10, seed=3)
        assert res.e0 == pytest.approx(0.0, abs=1e-10)
        assert abs(res.vector[0]) == pytest.approx(1.0, abs=1e-9)
        assert res.residual <= 1e-10

    def test_single_mode_matches_dense_diagonalization(self, single_mode_model):
        grid, quad, basis, ham = single_mode_model
        dense = DenseModel(grid, quad, basis.n_max)
        e_dense, _, _ = dense.ground(0.1)
        res = ground_state(ham.hkappa(0.1), basis.dim, tol=1e-12, seed=0)
        assert res.e0 == pytest.approx(e_dense, abs=1e-10)

    def test_reference_matches_dense(self, reference_model):
        grid, quad, basis, ham = reference_model
        dense = DenseModel(grid, quad, basis.n_max)
        for kappa in (0.05, 0.2):
            e_dense, _, _ = dense.ground(kappa)
            res = ground_state(ham.hkappa(kappa), basis.dim, tol=1e-11, seed=1)
            assert res.e0 == pytest.approx(e_dense, abs=1e-10)

    def test_energy_monotone_in_coupling(self, single_mode_model):
        grid, quad, basis, ham = single_mode_model
        energies = [
            ground_state(ham.hkappa(k), basis.dim, tol=1e-11, seed=2).e0
            for k in (0.0, 0.05, 0.1, 0.2, 0.4)
        ]
        assert all(a <= b + 1e-12 for a, b in zip(energies, energies[1:]))

    def test_determinism(self, reference_model):
        grid, quad, basis, ham = reference_model
        a = ground_state(ham.hkappa(0.1), basis.dim, tol=1e-10, seed=42)
        b = ground_state(ham.hkappa(0.1), basis.dim, tol=1e-10, seed=42)
        assert a.e0 == b.e0
        assert np.array_equal(a.vector, b.vector)

    def test_phase_convention(self, reference_model):
        grid, quad, basis, ham = reference_model
        res = ground_state(ham.hkappa(0.1), basis.dim, tol=1e-10, seed=11)
        assert res.vector[0].imag == pytest.approx(0.0, abs=1e-12)
        assert res.vector[0].real > 0

    def test_near_degenerate_warning(self):
        handle = diag_handle([1.0, 1.0 + 1e-12, 3.0])
        with pytest.warns(NearDegenerateWarning):
            res = ground_state(handle, 3, tol=1e-10, seed=0)
        assert res.near_degenerate

    def test_no_convergence(self, reference_model):
        grid, quad, basis, ham = reference_model
        with pytest.raises(NoConvergence):
            ground_state(ham.hkappa(0.1), basis.dim, tol=1e-14, max_iter=3, seed=0)

    def test_gap_estimate(self):
        handle = diag_handle([0.0, 2.5, 7.0])
        res = ground_state(handle, 3, tol=1e-12, seed=4)
        assert res.gap_estimate == pytest.approx(2.5, rel=1e-9)


class TestSolveShifted:
    def test_free_vacuum_fixed_point(self, reference_model):
        grid, quad, basis, ham = reference_model
        out = solve_shifted(ham.h0, 1.0, basis.vacuum(), tol=1e-13, emin=0.0)
        assert np.linalg.norm(out - basis.vacuum()) < 1e-12

    def test_diagonal_oracle(self):
        values = np.array([0.5, 1.0, 2.0, 5.0])
        handle = diag_handle(values)
        rng = np.random.default_rng(8)
        rhs = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        out = solve_shifted(handle, 0.7, rhs, tol=1e-14, emin=0.5)
        assert np.allclose(out, rhs / (values + 0.7), atol=1e-12)

    def test_round_trip_residual(self, reference_model):
        grid, quad, basis, ham = reference_model
        kappa = 0.05
        hk = ham.hkappa(kappa)
        state = ground_state(hk, basis.dim, tol=1e-11, seed=5)
        rng = np.random.default_rng(9)
        rhs = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
        shift = grid.omega.min() - state.e0
        out = solve_shifted(hk, shift, rhs, tol=1e-12, emin=state.e0)
        back = hk(out) + shift * out
        assert np.linalg.norm(back - rhs) <= 1e-11 * np.linalg.norm(rhs)

    def test_indefinite_shift_rejected(self):
        handle = diag_handle([1.0, 2.0])
        with pytest.raises(IndefiniteShift):
            solve_shifted(handle, -1.5, np.ones(2, dtype=complex), emin=1.0)

    def test_zero_rhs(self):
        handle = diag_handle([1.0, 2.0])
        out = solve_shifted(handle, 0.5, np.zeros(2, dtype=complex), emin=1.0)
        assert np.all(out == 0.0)


class TestRayleigh:
    def test_vacuum_quotient_is_first_order_energy(self, reference_model):
        grid, quad, basis, ham = reference_model
        from phi4lab.theory import first_order_coefficient

        kappa = 0.07
        q = rayleigh_quotient(ham.hkappa(kappa), basis.vacuum())
        assert q == pytest.approx(kappa * first_order_coefficient(grid, quad), rel=1e-12)

    def test_ground_vector_quotient(self, reference_model):
        grid, quad, basis, ham = reference_model
        hk = ham.hkappa(0.1)
        res = ground_state(hk, basis.dim, tol=1e-11, seed=6)
        assert rayleigh_quotient(hk, res.vector) == pytest.approx(res.e0, abs=1e-10)

    def test_variational_principle(self, reference_model):
        grid, quad, basis, ham = reference_model
        hk = ham.hkappa(0.1)
        e0 = ground_state(hk, basis.dim, tol=1e-11, seed=7).e0
        rng = np.random.default_rng(10)
        for _ in range(100):
            v = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
            assert rayleigh_quotient(hk, v) >= e0 - 1e-10

    def test_zero_vector_rejected(self, reference_model):
        grid, quad, basis, ham = reference_model
        with pytest.raises(ZeroVector):
            rayleigh_quotient(ham.h0, np.zeros(basis.dim, dtype=complex))
