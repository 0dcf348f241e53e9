import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from eit_mimic import (
    CemLayout,
    ConcentricConductivity,
    TrigCoeffs,
    demean,
    discrepancy_opnorm,
    dtn_coefficient,
    electrode_integral,
    err_rel,
    evaluate,
    hat_upsilon_M,
    mimic_pipeline,
    nodes,
    pem_measure,
    relative_eigenvalue,
    solve_cem,
    sobolev_norm,
    upsilon_CEM,
)
from eit_mimic.bench import fit_loglog_slope
from eit_mimic.cem import default_truncation, mean_free_basis

HOMOG = ConcentricConductivity(1.0, 0.5)
C55 = ConcentricConductivity(0.5, 0.5)


def test_dtn_homogeneous():
    n = np.arange(-6, 7)
    assert np.array_equal(dtn_coefficient(n, HOMOG), np.abs(n).astype(float))
    assert dtn_coefficient(0, C55) == 0


def test_dtn_eigenvalue_identity():
    c = ConcentricConductivity(0.5, 0.9)
    for n in range(1, 9):
        assert abs(1 / dtn_coefficient(n, c) - 1 / n - relative_eigenvalue(n, c)) < 1e-14


def test_dtn_insulating_limit():
    # kappa -> infinity, mu -> -1
    c = ConcentricConductivity(1e15, 0.9)
    assert dtn_coefficient(1, c) == pytest.approx((1 + 0.81) / (1 - 0.81), rel=1e-12)
    assert dtn_coefficient(1, c) == pytest.approx(9.5263, abs=5e-5)


def test_electrode_integral_zero_mode():
    assert electrode_integral(0, 1.3, 0.2) == pytest.approx(0.2)


def test_electrode_integral_phase_sum():
    M = 5
    d = 2 * np.pi / (2 * M + 1) * (1 - 1e-9)
    assert abs(np.sum(electrode_integral(1, nodes(M), d))) < 1e-12


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("n", [1, 2, 7, 50, 123, 200, -77])
@pytest.mark.parametrize("center,width", [(0.0, 0.1), (2.5, 0.31), (-1.2, 0.013)])
def test_electrode_integral_quadrature(n, center, width):
    a, b = center - width / 2, center + width / 2
    re = quad(lambda t: 1.0, a, b, weight="cos", wvar=n, epsabs=1e-15, epsrel=1e-14)[0]
    im = quad(lambda t: 1.0, a, b, weight="sin", wvar=n, epsabs=1e-15, epsrel=1e-14)[0]
    assert abs(electrode_integral(n, center, width) - (re + 1j * im)) < 1e-13


def test_layout_validation():
    CemLayout.equiangular(4, 0.6)
    with pytest.raises(ValueError):
        CemLayout.equiangular(4, 2 * np.pi / 9)
    with pytest.raises(ValueError):
        CemLayout.equiangular(4, 0.0)
    with pytest.raises(ValueError):
        CemLayout.equiangular(4, 0.1, z=-1.0)
    with pytest.raises(ValueError):
        CemLayout.equiangular(4, 0.1, z=0.5j)
    lay = CemLayout([0.0, 1.0, 4.0], 0.3, z=[1, 2, 3])
    assert lay.n_electrodes == 3 and lay.z[2] == 3


def test_zero_current():
    sol = solve_cem(np.zeros(9), CemLayout.equiangular(4, 0.1), C55)
    assert np.all(sol.b == 0) and np.all(sol.U == 0)


def test_rejects_small_truncation_and_bad_current():
    lay = CemLayout.equiangular(4, 0.1)
    with pytest.raises(ValueError):
        solve_cem(demean(np.arange(9.0)), lay, C55, N=15)
    with pytest.raises(ValueError):
        solve_cem(np.ones(9), lay, C55)
    with pytest.raises(ValueError):
        solve_cem(demean(np.arange(7.0)), lay, C55)


def test_default_truncation():
    assert default_truncation(4) == 256 and default_truncation(64) == 512


@pytest.mark.parametrize("z", [1.0, 0.3 + 0.2j])
def test_current_equations_by_quadrature(z, rng):
    M, d = 4, 0.3
    lay = CemLayout.equiangular(M, d, z)
    I = demean(rng.standard_normal(2 * M + 1))
    sol = solve_cem(I, lay, C55, N=64)
    trace = sol.trace
    # z^-1 int_{E_m} (U_m - u) = I_m, the integral done by Gauss-Legendre on each arc
    x, w = np.polynomial.legendre.leggauss(200)
    recovered = []
    for m, th in enumerate(nodes(M)):
        t = th + d / 2 * x
        integral = d / 2 * np.sum(w * evaluate(trace, t))
        recovered.append((sol.U[m] * d - integral) / z)
    np.testing.assert_allclose(recovered, I, atol=1e-10)
    assert abs(np.sum(recovered)) < 1e-10
    assert sol.residual < 1e-12


def test_grounding_exact(rng):
    sol = solve_cem(demean(rng.standard_normal(11)), CemLayout.equiangular(5, 0.2), C55)
    assert abs(sol.U.sum()) <= 1e-15 * np.linalg.norm(sol.U)


@pytest.mark.parametrize("c", [C55, HOMOG, ConcentricConductivity(4.0, 0.8)])
def test_reciprocity(c):
    M = 4
    L = 2 * M + 1
    P = np.eye(L) - 1.0 / L
    A = solve_cem(P, CemLayout.equiangular(M, 0.25, 1.7), c).U
    assert np.max(np.abs(A - A.T)) < 1e-10


def test_homogeneous_opposite_electrodes():
    lay = CemLayout([0.0, np.pi], 0.3)
    sol = solve_cem(np.array([1.0, -1.0]), lay, HOMOG, N=64)
    assert abs(sol.U[1] + sol.U[0]) < 1e-10
    # u(theta + pi) = -u(theta): only odd modes
    even = np.abs(sol.b[(np.arange(-sol.N, sol.N + 1) % 2) == 0])
    assert np.max(even) < 1e-12


def test_homogeneous_four_electrode_reflection():
    lay = CemLayout(np.pi / 2 * np.arange(4), 0.2)
    sol = solve_cem(np.array([1.0, 0.3, -1.0, -0.3]), lay, HOMOG, N=128)
    np.testing.assert_allclose(np.roll(sol.U, 2), -sol.U, atol=1e-10)


@pytest.mark.parametrize("M,d", [(4, 0.01), (4, 0.1), (8, 0.05)])
def test_galerkin_self_convergence(M, d, rng):
    """Doubling N from 4M to 8M should move each U_m by < 1e-10 relative."""
    I = demean(rng.standard_normal(2 * M + 1))
    lay = CemLayout.equiangular(M, d)
    coarse = solve_cem(I, lay, C55, N=4 * M).U
    fine = solve_cem(I, lay, C55, N=8 * M).U
    assert np.max(np.abs(coarse - fine)) / np.max(np.abs(fine)) < 1e-10


@pytest.mark.parametrize("M,d", [(4, 0.01), (4, 0.1), (16, 0.02)])
def test_relative_map_self_convergence(M, d):
    B = mean_free_basis(M)
    lay = CemLayout.equiangular(M, d)
    a = upsilon_CEM(B, lay, C55, N=256)
    b = upsilon_CEM(B, lay, C55, N=512)
    assert np.linalg.norm(a - b, 2) / np.linalg.norm(b, 2) < 1e-6


def test_relative_map_without_contrast(rng):
    I = demean(rng.standard_normal(9))
    assert np.all(upsilon_CEM(I, CemLayout.equiangular(4, 0.1), HOMOG) == 0)


def test_relative_map_zero_mean(rng):
    I = demean(rng.standard_normal((9, 3)))
    U = upsilon_CEM(I, CemLayout.equiangular(4, 0.1), C55)
    assert np.max(np.abs(U.sum(axis=0))) < 1e-15


def test_small_electrodes_approach_point_electrodes():
    M = 4
    B = mean_free_basis(M)
    pem = pem_measure(B, C55)
    gaps = [np.linalg.norm(upsilon_CEM(B, CemLayout.equiangular(M, d), C55) - pem, 2)
            for d in (0.1, 0.05, 0.025)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert fit_loglog_slope([0.1, 0.05, 0.025], gaps, (0.025, 0.1)) == pytest.approx(2.0, abs=0.2)


def test_smeared_point_electrode_oracle():
    """Electrode averaging of the PEM kernel, lambda_k sinc^2(k d / 2), matches the CEM to O(d^3)."""
    M = 4
    B = mean_free_basis(M)
    th = nodes(M)
    k = np.arange(1, 4000)
    pem = pem_measure(B, C55)
    ds = [0.1, 0.05, 0.025]
    smeared_gap, pem_gap = [], []
    for d in ds:
        lam = C55.eigenvalues(k) * np.sinc(k * d / (2 * np.pi)) ** 2
        kernel = np.cos(np.subtract.outer(th, th)[..., None] * k) @ lam / np.pi
        cem = upsilon_CEM(B, CemLayout.equiangular(M, d), C55)
        smeared_gap.append(np.linalg.norm(cem - demean(kernel @ B), 2))
        pem_gap.append(np.linalg.norm(cem - pem, 2))
    assert fit_loglog_slope(ds, smeared_gap, (0.025, 0.1)) > 2.8
    assert all(a < 0.25 * b for a, b in zip(smeared_gap, pem_gap))


def test_contact_impedance_scaling():
    M, d = 4, 0.01
    B = mean_free_basis(M)
    a = upsilon_CEM(B, CemLayout.equiangular(M, d, 1.0), C55)
    b = upsilon_CEM(B, CemLayout.equiangular(M, d, 2.0), C55)
    full_a = solve_cem(B, CemLayout.equiangular(M, d, 1.0), C55).U
    full_b = solve_cem(B, CemLayout.equiangular(M, d, 2.0), C55).U
    assert np.linalg.norm(full_a - full_b, 2) > 0.1 * np.linalg.norm(full_a, 2)
    assert np.linalg.norm(a - b, 2) < 0.1 * np.linalg.norm(a, 2)


def test_relative_map_small_against_full_map():
    M = 4
    B = mean_free_basis(M)
    lay = CemLayout.equiangular(M, 0.1, 1.0)
    ratio = np.linalg.norm(upsilon_CEM(B, lay, C55), 2) / np.linalg.norm(solve_cem(B, lay, C55).U, 2)
    assert ratio < 0.2


def test_hat_upsilon_limits(rng):
    f = TrigCoeffs.from_dict({1: 1.0, -2: 0.5j, 3: 0.2})
    M = 6
    assert sobolev_norm(hat_upsilon_M(f, M, 0.05, HOMOG), 0) == 0
    pem = mimic_pipeline(f, M, C55)
    gaps = [sobolev_norm(hat_upsilon_M(f, M, d, C55) - pem, 0) for d in (0.08, 0.04, 0.02)]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-3 * sobolev_norm(pem, 0)


def test_hat_upsilon_with_identity_map_is_default(rng):
    from eit_mimic import MobiusMap

    f = TrigCoeffs.monomial(2)
    a = hat_upsilon_M(f, 5, 0.1, C55)
    b = hat_upsilon_M(f, 5, 0.1, C55, phi=MobiusMap())
    assert np.array_equal(a.coeffs, b.coeffs)


def test_half_coverage_rate():
    c = ConcentricConductivity(0.5, 0.9)
    Ms = [16, 22, 32]
    errs = [err_rel(1, M, c, "cem", width=np.pi / (2 * M + 1)) for M in Ms]
    assert fit_loglog_slope(Ms, errs, (16, 32)) == pytest.approx(-2.0, abs=0.3)


def test_discrepancy_examples():
    assert discrepancy_opnorm(4, 0.1, HOMOG) < 1e-12
    ds = [0.2, 0.1, 0.05, 0.025]
    vals = [discrepancy_opnorm(4, d, C55) for d in ds]
    assert fit_loglog_slope(ds, vals, (0.025, 0.2)) == pytest.approx(2.0, abs=0.2)


def test_discrepancy_at_most_linear_in_M():
    dM = 0.4
    Ms = [4, 8, 16, 32]
    vals = [discrepancy_opnorm(M, dM / M, C55) for M in Ms]
    # upper envelope C * M * d^2 fitted on the first point
    C = vals[0] / (Ms[0] * (dM / Ms[0]) ** 2)
    scaled = [v / (dM / M) ** 2 for v, M in zip(vals, Ms)]
    assert fit_loglog_slope(Ms, scaled, (4, 32)) <= 1.2
    assert all(v <= 1.5 * C * M * (dM / M) ** 2 for v, M in zip(vals, Ms))


@given(st.floats(0.05, 0.6), st.floats(0.01, 0.3))
def test_discrepancy_nonnegative(R, d):
    assert discrepancy_opnorm(3, d, ConcentricConductivity(2.0, R)) >= 0


def test_inverse_M_squared_rate_is_fourth_order_asymptotically():
    c = ConcentricConductivity(0.5, 0.9)
    Ms = [64, 90, 128]
    errs = [err_rel(1, M, c, "cem", width=np.pi / (M * (2 * M + 1))) for M in Ms]
    assert fit_loglog_slope(Ms, errs, (64, 128)) == pytest.approx(-4.0, abs=0.1)
