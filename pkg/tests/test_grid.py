import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phi4lab import (
    ConfigError,
    CutoffSpec,
    NegativeSpatialCutoff,
    NonpositiveWeight,
    ZeroFrequencyMode,
    build_grid,
    build_spatial_quadrature,
    cutoff_norm,
    load_cutoff_table,
)


def test_single_mode_at_rest():
    grid = build_grid(1, 1.0, modes=np.array([[0.0]]), weights=np.array([1.0]))
    assert grid.omega.tolist() == [1.0]
    assert grid.rho.tolist() == [1.0]


def test_massless_grid_with_zero_mode_rejected():
    with pytest.raises(ZeroFrequencyMode):
        build_grid(1, 0.0, modes=np.array([[-1.0], [0.0], [1.0]]))


def test_symmetric_pair_dispersion():
    grid = build_grid(1, 1.0, modes=np.array([[-1.0], [1.0]]))
    assert np.allclose(grid.omega, math.sqrt(2.0))


def test_nonpositive_weight_rejected():
    with pytest.raises(NonpositiveWeight):
        build_grid(1, 1.0, modes=np.array([[1.0]]), weights=np.array([0.0]))


def test_duplicate_modes_rejected():
    with pytest.raises(ConfigError):
        build_grid(1, 1.0, modes=np.array([[1.0], [1.0]]))


def test_mode_order_is_lexicographic():
    grid = build_grid(2, 1.0, kmax=2.0, modes_per_axis=2)
    assert grid.num_modes == 4
    modes = [tuple(m) for m in grid.modes]
    assert modes == sorted(modes)


def test_uniform_rule_matches_reference_cells():
    grid = build_grid(1, 1.0, kmax=3.0, modes_per_axis=3)
    assert grid.modes.ravel().tolist() == [-2.0, 0.0, 2.0]
    assert grid.weights.tolist() == [2.0, 2.0, 2.0]


def test_cutoff_norm_unity():
    grid = build_grid(1, 1.0, modes=np.array([[0.0]]), weights=np.array([1.0]))
    for p in (0.0, 0.5, 1.0, 1.5):
        assert cutoff_norm(grid, p) == pytest.approx(1.0, abs=1e-15)


def test_cutoff_norm_two_modes():
    # omega = {1, 4} via masses is awkward; build explicit dispersion instead:
    # k = 0 (m=1) gives omega 1; k = sqrt(15), m = 1 gives omega 4.
    grid = build_grid(
        1, 1.0, modes=np.array([[0.0], [math.sqrt(15.0)]]), weights=np.array([1.0, 1.0])
    )
    assert np.allclose(sorted(grid.omega), [1.0, 4.0])
    assert cutoff_norm(grid, 1.0) == pytest.approx(math.sqrt(1.0 + 1.0 / 16.0), rel=1e-12)


def test_cutoff_norm_against_fine_quadrature():
    # fine uniform grid vs an independent 10x finer trapezoid quadrature
    uv = CutoffSpec("gaussian", (1.0,))
    mass = 0.5
    kmax = 8.0
    grid = build_grid(1, mass, uv, kmax=kmax, modes_per_axis=400)
    for p in (0.0, 0.5, 1.0, 1.5):
        val = cutoff_norm(grid, p)
        xs = np.linspace(-kmax, kmax, 4001)
        integrand = np.exp(-xs.reshape(-1, 1) ** 2 / 2.0).ravel() ** 2 / (
            np.sqrt(xs**2 + mass**2) ** (2 * p)
        )
        ref = math.sqrt(np.trapezoid(integrand, xs))
        assert val == pytest.approx(ref, rel=1e-6)


@given(scale=st.floats(min_value=1.0, max_value=50.0))
@settings(max_examples=25, deadline=None)
def test_cutoff_norm_monotone_in_exponent_for_heavy_modes(scale):
    # all omega >= 1: larger exponent can only shrink the norm
    grid = build_grid(1, scale, kmax=2.0, modes_per_axis=5)
    assert grid.omega.min() >= 1.0
    norms = [cutoff_norm(grid, p) for p in (0.0, 0.5, 1.0, 1.5)]
    assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))


@given(mass=st.floats(min_value=0.01, max_value=0.1))
@settings(max_examples=25, deadline=None)
def test_cutoff_norm_monotone_in_exponent_for_light_modes(mass):
    # all omega <= 1: larger exponent can only grow the norm
    grid = build_grid(1, mass, kmax=0.5, modes_per_axis=4)
    assert grid.omega.max() <= 1.0
    norms = [cutoff_norm(grid, p) for p in (0.0, 0.5, 1.0, 1.5)]
    assert all(a <= b + 1e-12 for a, b in zip(norms, norms[1:]))


def test_indicator_evaluates_to_exactly_zero_or_one():
    cut = CutoffSpec("indicator", (-1.0, 1.0))
    vals = cut(np.array([[-2.0], [-1.0], [0.0], [1.0], [1.5]]))
    assert vals.tolist() == [0.0, 1.0, 1.0, 1.0, 0.0]


def test_trapezoid_indicator_three_nodes():
    quad = build_spatial_quadrature(1, CutoffSpec("indicator", (-1.0, 1.0)), 3)
    assert quad.nodes.ravel().tolist() == [-1.0, 0.0, 1.0]
    assert quad.weights.tolist() == [0.5, 1.0, 0.5]
    assert quad.chi_l1 == pytest.approx(2.0, abs=1e-15)


def test_zero_spatial_cutoff():
    cut = CutoffSpec("tabulated", table=((0.0, 0.0), (1.0, 0.0)))
    quad = build_spatial_quadrature(1, cut, 5)
    assert quad.chi_l1 == 0.0
    assert np.all(quad.chi_values == 0.0)


def test_gaussian_quadrature_matches_closed_form():
    sigma, amp = 0.7, 1.3
    quad = build_spatial_quadrature(1, CutoffSpec("gaussian", (amp, sigma)), 33)
    exact = amp * sigma * math.sqrt(2.0 * math.pi)
    assert quad.chi_l1 == pytest.approx(exact, rel=1e-8)
    assert 0 < quad.truncation_error < 1e-8 * exact


def test_doubling_nodes_changes_little_for_smooth_cutoff():
    cut = CutoffSpec("gaussian", (1.0,))
    coarse = build_spatial_quadrature(1, cut, 33)
    fine = build_spatial_quadrature(1, cut, 65)
    assert abs(coarse.chi_l1 - fine.chi_l1) < 1e-8 * fine.chi_l1


def test_negative_spatial_cutoff_rejected():
    cut = CutoffSpec("tabulated", table=((0.0, 1.0), (1.0, -0.5)))
    with pytest.raises(NegativeSpatialCutoff):
        build_spatial_quadrature(1, cut, 5)


def test_tabulated_cutoff_from_file(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("# radial profile\n0.0 1.0\n1.0 0.5\n2.0 0.0\n")
    cut = load_cutoff_table(path)
    assert cut.kind == "tabulated"
    vals = cut(np.array([[0.0], [0.5], [1.0], [3.0]]))
    assert vals.tolist() == [1.0, 0.75, 0.5, 0.0]


def test_tabulated_file_bad_columns(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0.0 1.0 2.0\n")
    with pytest.raises(ConfigError):
        load_cutoff_table(path)


def test_dispersion_dominates_mass():
    for mass in (0.0, 0.5, 2.0):
        grid = build_grid(1, mass, modes=np.array([[-1.5], [1.0]]))
        assert grid.omega.min() >= mass
        assert grid.omega.min() > 0


def test_massless_grid_excluding_zero_mode_allowed():
    grid = build_grid(1, 0.0, modes=np.array([[-1.0], [1.0]]))
    assert np.allclose(grid.omega, 1.0)
    assert np.allclose(grid.rho, 1.0)


def test_grid_arrays_immutable(reference_model):
    grid, _, _, _ = reference_model
    with pytest.raises(ValueError):
        grid.omega[0] = 5.0
