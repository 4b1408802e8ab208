import numpy as np
import pytest

from src.core.errors import DomainError, UnsupportedModelError
from src.models import AngularBasis, BasisKind, MomentVector, Multipliers, ScanMode, SCAN_HEADER
from src.services import (ClosureService, EigenService, eigenvalues_sorted, flux_jacobian, get_eigen_service,
                          jacobian_from_matrices, margins, sample_realizable)

REFERENCE_ALPHA = (0.1, -0.4, 0.25, -0.3)


@pytest.fixture
def eigen(tight_closure: ClosureService) -> EigenService:
    return EigenService(closure=tight_closure)


def test_identity_spectrum() -> None:
    result = eigenvalues_sorted(np.eye(4))
    np.testing.assert_array_equal(result.eigenvalues, [1.0, 1.0, 1.0, 1.0])
    assert result.min_adjacent_gap == 0.0
    assert result.max_adjacent_gap == 0.0
    assert result.max_imag_residual == 0.0


def test_diagonal_spectrum_is_sorted() -> None:
    result = eigenvalues_sorted(np.diag([0.9, -0.1, 0.2, -0.5]))
    np.testing.assert_allclose(result.eigenvalues, [-0.5, -0.1, 0.2, 0.9])
    assert result.min_adjacent_gap == pytest.approx(0.3)
    assert result.max_adjacent_gap == pytest.approx(0.7)


def test_non_square_matrix_is_rejected() -> None:
    with pytest.raises(DomainError):
        eigenvalues_sorted(np.ones((2, 3)))


def test_jacobian_structure_at_zero(closure: ClosureService) -> None:
    jacobian = flux_jacobian(closure.closure_moments(Multipliers.of(np.zeros(4))), closure)
    np.testing.assert_allclose(jacobian[0], [0.0, 1.0, 0.0, 0.0], atol=1e-10)
    np.testing.assert_allclose(jacobian[1], [0.0, 0.0, 1.0, 1.0], atol=1e-10)


def test_jacobian_structure_at_random_points(closure: ClosureService, rng: np.random.Generator) -> None:
    for _ in range(10):
        jacobian = flux_jacobian(closure.closure_moments(Multipliers.of(rng.uniform(-3.0, 3.0, size=4))), closure)
        np.testing.assert_allclose(jacobian[0], [0.0, 1.0, 0.0, 0.0], atol=1e-10)
        np.testing.assert_allclose(jacobian[1], [0.0, 0.0, 1.0, 1.0], atol=1e-10)


def finite_difference_jacobian(closure: ClosureService, basis: AngularBasis, u: np.ndarray,
                               step: float = 1e-5) -> np.ndarray:
    columns = []
    for j in range(len(u)):
        shift = np.eye(len(u))[j] * step
        plus = closure.solve_dual(MomentVector(basis=basis, values=u + shift)).flux_moments
        minus = closure.solve_dual(MomentVector(basis=basis, values=u - shift)).flux_moments
        columns.append((plus - minus) / (2 * step))
    return np.column_stack(columns)


def test_third_moment_rows_match_finite_differences(tight_closure: ClosureService, dmm2: AngularBasis) -> None:
    u = tight_closure.moments_of(np.array(REFERENCE_ALPHA))[0]
    jacobian = flux_jacobian(tight_closure.solve_dual(MomentVector(basis=dmm2, values=u)), tight_closure)
    np.testing.assert_allclose(finite_difference_jacobian(tight_closure, dmm2, u)[2:], jacobian[2:], atol=1e-6)


def test_third_moment_rows_at_sampled_points(tight_closure: ClosureService, dmm2: AngularBasis) -> None:
    checked = 0
    for sample in sample_realizable(11, 12, dmm2):
        u = sample.values / sample.density
        if margins(dmm2, u)[0] <= 1e-3:
            continue
        jacobian = flux_jacobian(tight_closure.solve_dual(MomentVector(basis=dmm2, values=u)), tight_closure)
        np.testing.assert_allclose(finite_difference_jacobian(tight_closure, dmm2, u)[2:], jacobian[2:], atol=1e-6)
        checked += 1
    assert checked >= 3


def test_first_rows_over_sampled_realizable_moments(closure: ClosureService, dmm2: AngularBasis) -> None:
    moments = np.array([sample.values for sample in sample_realizable(7, 1000, dmm2)])
    moments /= moments[:, :1]
    batch = closure.solve_batch(moments)
    hessians, jacobians = closure.dual_matrices_batch(batch.alpha)
    for hessian, jacobian in zip(hessians, jacobians):
        rows = jacobian_from_matrices(hessian, jacobian)
        np.testing.assert_allclose(rows[0], [0.0, 1.0, 0.0, 0.0], atol=1e-10)
        np.testing.assert_allclose(rows[1], [0.0, 0.0, 1.0, 1.0], atol=1e-10)


def test_mirror_negates_spectrum(eigen: EigenService, dmm2: AngularBasis) -> None:
    u0, u1, u2p, u2m = eigen.closure.moments_of(np.array(REFERENCE_ALPHA))[0]
    spectrum = eigen.spectrum(MomentVector(basis=dmm2, values=(u0, u1, u2p, u2m)))
    mirrored = eigen.spectrum(MomentVector(basis=dmm2, values=(u0, -u1, u2m, u2p)))
    np.testing.assert_allclose(mirrored.eigenvalues, -spectrum.eigenvalues[::-1], atol=1e-8)


def test_isotropic_spectrum_is_symmetric(eigen: EigenService, dmm2: AngularBasis) -> None:
    result = eigen.spectrum(MomentVector(basis=dmm2, values=(2.0, 0.0, 1 / 3, 1 / 3)))
    lam = result.eigenvalues
    np.testing.assert_allclose(lam, -lam[::-1], atol=1e-8)
    assert 0 < lam[2] < lam[3] <= 1.0
    assert result.max_imag_residual <= 1e-8


def test_grid_order() -> None:
    assert EigenService.grid(3) == [(0.0, 0.0), (0.0, 0.5), (0.0, 1.0), (0.5, 0.0), (0.5, 0.5), (1.0, 0.0)]
    with pytest.raises(DomainError):
        EigenService.grid(1)


def test_mean_cut_scan(eigen: EigenService, dmm2: AngularBasis) -> None:
    table = eigen.scan(ScanMode.MEAN_CUT, resolution=7)
    assert len(table.rows) == 28
    assert table.regularization == 0.0
    assert [(row.phi2p, row.phi2m) for row in table.rows] == EigenService.grid(7)

    centre = table.rows[7 + 1]
    assert (centre.phi2p, centre.phi2m) == (1 / 6, 1 / 6)
    assert centre.phi1 == 0.0

    converged = [row for row in table.rows if not row.failed]
    assert converged
    for row in converged:
        assert np.all(np.abs(row.eigen.eigenvalues) <= 1 + 1e-8)
        assert np.all(np.diff(row.eigen.eigenvalues) >= 0)
    for row in table.rows:
        assert len(row.as_record()) == len(SCAN_HEADER)
        if row.failed:
            assert np.isnan(row.regularization)


def assert_mirror_antisymmetric(table, dmm2: AngularBasis, resolution: int) -> None:
    steps = resolution - 1
    rows = {(round(row.phi2p * steps), round(row.phi2m * steps)): row for row in table.rows}
    for (i, j), row in rows.items():
        mirror = rows[(j, i)]
        moments = np.array([[1.0, row.phi1, row.phi2p, row.phi2m]])
        if row.failed or mirror.failed or row.regularization > 0 or margins(dmm2, moments)[0] <= 1e-3:
            continue
        assert mirror.phi1 == pytest.approx(-row.phi1, abs=1e-14)
        np.testing.assert_allclose(mirror.eigen.eigenvalues, -row.eigen.eigenvalues[::-1], atol=1e-8)


def test_mean_cut_mirror_antisymmetry(eigen: EigenService, dmm2: AngularBasis) -> None:
    assert_mirror_antisymmetric(eigen.scan(ScanMode.MEAN_CUT, resolution=7), dmm2, 7)


def test_boundary_scan_rows_are_realizable(eigen: EigenService, dmm2: AngularBasis) -> None:
    table = eigen.scan(ScanMode.BOUNDARY, resolution=6, r=0.05)
    assert len(table.rows) == 2 * 21
    assert table.regularization == 0.05
    moments = np.array([[1.0, row.phi1, row.phi2p, row.phi2m] for row in table.rows])
    assert np.all(margins(dmm2, moments) > 0)
    lower, upper = table.rows[0].source[2], table.rows[1].source[2]
    assert lower <= upper
    for row in table.rows:
        if not row.failed:
            assert np.all(np.abs(row.eigen.eigenvalues) <= 1 + 1e-8)


def test_scan_arguments_are_validated(eigen: EigenService) -> None:
    with pytest.raises(DomainError):
        eigen.scan(ScanMode.BOUNDARY, resolution=5, r=0.0)
    with pytest.raises(UnsupportedModelError):
        get_eigen_service(AngularBasis(kind=BasisKind.MIXED, order=2)).scan(ScanMode.MEAN_CUT, resolution=3)


@pytest.mark.slow
def test_mean_cut_at_full_resolution(dmm2: AngularBasis) -> None:
    table = get_eigen_service().scan(ScanMode.MEAN_CUT, resolution=101)
    assert_mirror_antisymmetric(table, dmm2, 101)
    for row in table.rows:
        if row.failed:
            continue
        assert row.eigen.max_imag_residual <= 1e-8
        assert np.all(np.abs(row.eigen.eigenvalues) <= 1 + 1e-8)
        if row.eigen.max_adjacent_gap < 1e-3:
            assert abs(row.phi1) + row.phi2p + row.phi2m < 0.05


@pytest.mark.slow
def test_boundary_scan_minimum_gap_on_the_cap(dmm2: AngularBasis) -> None:
    table = get_eigen_service().scan(ScanMode.BOUNDARY, resolution=101, r=0.05)
    moments = np.array([[1.0, row.phi1, row.phi2p, row.phi2m] for row in table.rows])
    assert np.all(margins(dmm2, moments) > 0)
    converged = [row for row in table.rows if not row.failed]
    on_cap = [row.eigen.min_adjacent_gap for row in converged if row.source[0] + row.source[1] >= 1 - 1e-12]
    inside = [row.eigen.min_adjacent_gap for row in converged if row.source[0] + row.source[1] < 1 - 1e-12]
    assert min(inside) > 0
    assert min(on_cap) <= min(inside)
    for row in converged:
        assert np.all(np.abs(row.eigen.eigenvalues) <= 1 + 1e-8)
