import numpy as np
import pytest

from specshift import funcat, shift
from specshift import doi_engine as doi
from specshift.campaigns import random_pair, trial_seed
from specshift.linalg import DomainError, eigh, random_hermitian, schatten_norm, trace


def test_xi_single_eigenvalue_pair():
    xi = shift.xi_from_eigs([0.0], [1.0])
    np.testing.assert_array_equal(xi.breakpoints, [0.0, 1.0])
    np.testing.assert_array_equal(xi.values, [0.0, -1.0, 0.0])
    assert xi(0.5) == -1.0 and xi(-0.5) == 0.0 and xi(1.5) == 0.0


def test_xi_equal_spectra_vanishes():
    xi = shift.xi_from_eigs([0.3, 1.2, 2.0], [0.3, 1.2, 2.0])
    assert np.abs(xi.values).max() == 0.0


def test_xi_two_level_example():
    xi = shift.xi_from_eigs([0.0, 2.0], [1.0, 3.0])
    np.testing.assert_array_equal(xi.breakpoints, [0.0, 1.0, 2.0, 3.0])
    np.testing.assert_array_equal(xi.values, [0.0, -1.0, 0.0, -1.0, 0.0])
    assert xi.integral() == pytest.approx((0.0 + 2.0) - (1.0 + 3.0))


def test_xi_length_mismatch():
    with pytest.raises(ValueError):
        shift.xi_from_eigs([0.0], [1.0, 2.0])


def test_xi_zeroth_moment_seeded():
    for trial in range(100):
        A, K, B = random_pair(trial, 2 + trial % 10)
        xi = shift.xi_from_eigs(eigh(A).eigenvalues, eigh(B).eigenvalues)
        assert xi.integral() == pytest.approx(trace(A - B).real, abs=1e-10)


def test_xi_sign_convention_swap():
    A, K, B = random_pair(31, 6)
    xi_ab = shift.xi_from_eigs(eigh(A).eigenvalues, eigh(B).eigenvalues)
    xi_ba = shift.xi_from_eigs(eigh(B).eigenvalues, eigh(A).eigenvalues)
    np.testing.assert_array_equal(xi_ab.breakpoints, xi_ba.breakpoints)
    np.testing.assert_array_equal(xi_ab.values, -xi_ba.values)


def test_xi_rank_one_positive_perturbation_interlacing():
    for seed in range(20):
        A = random_hermitian(seed, 6, scale=0.4)
        rng = np.random.default_rng(seed + 100)
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        v /= np.linalg.norm(v)
        B = A + 0.5 * np.outer(v, v.conj())
        xi = shift.xi_from_eigs(eigh(A).eigenvalues, eigh(B).eigenvalues)
        assert np.all(xi.values <= 0)
        assert np.all(xi.values >= -1)  # interlacing bounds the jump depth


def test_trace_formula_rhs_identity():
    xi = shift.xi_from_eigs([0.0], [1.0])
    val = shift.trace_formula_rhs(funcat.get_function("identity"), xi, 4)
    assert val == pytest.approx(-1.0, abs=1e-14)


def test_trace_formula_rhs_square():
    xi = shift.xi_from_eigs([0.0], [1.0])
    val = shift.trace_formula_rhs(funcat.get_function("x2"), xi, 4)
    assert val == pytest.approx(-1.0, abs=1e-14)


def test_trace_formula_rhs_sin_16_nodes():
    xi = shift.xi_from_eigs([0.0], [1.0])
    val = shift.trace_formula_rhs(funcat.get_function("sin"), xi, 16)
    assert val == pytest.approx(np.sin(0.0) - np.sin(1.0), abs=1e-12)


def test_trace_formula_check_identity():
    A, K, B = random_pair(2, 6)
    rep = shift.trace_formula_check(funcat.get_function("identity"), A, B, 8)
    assert rep.abs_error <= 1e-12
    assert rep.lhs_imag <= 1e-10


def test_trace_formula_check_x3_seed5():
    A, K, B = random_pair(5, 8)
    rep = shift.trace_formula_check(funcat.get_function("x3"), A, B, 32)
    assert rep.abs_error <= 1e-9


def test_trace_formula_polynomial_exactness_seeded():
    for name in ("identity", "x2", "x3", "x4"):
        f = funcat.get_function(name)
        for trial in range(50):
            A, K, B = random_pair(trial_seed(50, trial), 2 + trial % 15)
            rep = shift.trace_formula_check(f, A, B, 16)
            assert rep.abs_error <= 1e-9 * (1 + abs(rep.lhs)), (name, trial)


def test_trace_formula_oscillatory_on_shifted_domain():
    f = funcat.restrict(funcat.get_function("x2sin1x"), 0.1, 2.0)
    A, K, B = random_pair(9, 8, domain=f.domain)
    rep = shift.trace_formula_check(f, A, B, 64)
    assert rep.abs_error <= 1e-6


def test_nu_t_zero_perturbation():
    A = random_hermitian(4, 5)
    mu = shift.nu_t(A, np.zeros((5, 5)), 0.5)
    assert np.abs(mu.weights).max() == 0.0


def test_nu_t_diagonal_case():
    A = np.diag([0.0, 1.0, 2.0])
    K = np.diag([0.5, -0.25, 0.125])
    mu = shift.nu_t(A, K, 0.0)
    np.testing.assert_allclose(mu.locations, [0.0, 1.0, 2.0])
    np.testing.assert_allclose(mu.weights, [0.5, -0.25, 0.125])


def test_nu_t_mass_is_trace_K():
    A, K, B = random_pair(6, 6)
    for t in (0.0, 0.3, 0.77, 1.0):
        mu = shift.nu_t(A, K, t)
        assert mu.total_weight == pytest.approx(trace(K).real, abs=1e-10)


def test_hellmann_feynman_zero_and_commuting():
    A = np.diag([0.0, 1.0, 2.5])
    rep = shift.hellmann_feynman_check(A, np.zeros((3, 3)), 0.5, 1e-4)
    assert rep.skipped or rep.max_error == 0.0
    K = np.diag([0.2, -0.1, 0.3])
    rep = shift.hellmann_feynman_check(A, K, 0.5, 1e-4)
    assert not rep.skipped
    assert rep.max_error <= 1e-12


def test_hellmann_feynman_order_two():
    # the perturbation is O(1) so the quadratic term dominates rounding noise
    A = random_hermitian(13, 5, scale=0.3)
    K = random_hermitian(14, 5, scale=0.5)
    r1 = shift.hellmann_feynman_check(A, K, 0.5, 1e-4)
    r2 = shift.hellmann_feynman_check(A, K, 0.5, 5e-5)
    assert not (r1.skipped or r2.skipped)
    assert r1.max_error / r2.max_error == pytest.approx(4.0, rel=0.2)


def test_hellmann_feynman_gap_guard():
    A = np.diag([0.0, 1e-9, 1.0])
    K = random_hermitian(8, 3, scale=0.1)
    rep = shift.hellmann_feynman_check(A, K, 0.0, 1e-4)
    assert rep.skipped


def test_nu_integrated_zero_perturbation():
    A = random_hermitian(3, 4)
    dens = shift.nu_integrated(A, np.zeros((4, 4)), 4, 16)
    assert np.abs(dens.densities).max() == 0.0


def test_nu_integrated_one_dimensional_sweep():
    dens = shift.nu_integrated(np.array([[0.0]]), np.array([[1.0]]), 10, 24)
    edges = dens.bin_edges
    assert edges[0] == pytest.approx(-1.0) and edges[-1] == pytest.approx(2.0)
    inner = [d for i, d in enumerate(dens.densities)
             if edges[i] >= 0.05 and edges[i + 1] <= 0.95]
    assert inner and np.abs(np.array(inner) - 1.0).max() <= 0.05
    outer = [d for i, d in enumerate(dens.densities) if edges[i + 1] <= -0.05 or edges[i] >= 1.05]
    assert np.abs(np.array(outer)).max() == 0.0


def test_nu_integrated_mass():
    A, K, B = random_pair(17, 4)
    dens = shift.nu_integrated(A, K, 6, 64)
    assert dens.mass() == pytest.approx(trace(K).real, abs=1e-8)


def test_nu_vs_xi_equal_operators():
    A, K, B = random_pair(18, 4)
    rep = shift.nu_vs_xi_check(A, A, 4, 16)
    assert rep.l1_error <= 1e-12


def test_nu_vs_xi_one_dimensional_refinement():
    A = np.array([[0.0]])
    B = np.array([[1.0]])
    coarse = shift.nu_vs_xi_check(A, B, 6, 20).l1_error
    fine = shift.nu_vs_xi_check(A, B, 12, 80).l1_error
    assert fine < coarse


def test_nu_vs_xi_random_seed19():
    A, K, B = random_pair(19, 6)
    rep = shift.nu_vs_xi_check(A, B, 10, 256)
    assert rep.l1_error <= 0.05 * schatten_norm(K, 1)


def test_translation_scan_identity_constant():
    A, K, B = random_pair(24, 5)
    vals = shift.translation_scan(funcat.get_function("identity"), A, B, np.linspace(-0.1, 0.1, 9))
    assert np.abs(vals - trace(A - B).real).max() <= 1e-10


def test_translation_scan_square_affine():
    A, K, B = random_pair(25, 6)
    ts = np.linspace(-0.15, 0.15, 7)
    vals = shift.translation_scan(funcat.get_function("x2"), A, B, ts)
    expected = trace(A @ A - B @ B).real - 2.0 * ts * trace(A - B).real
    assert np.abs(vals - expected).max() <= 1e-9


def test_translation_scan_matches_matrix_route():
    A, K, B = random_pair(26, 4)
    f = funcat.get_function("sin")
    ts = np.linspace(-0.1, 0.1, 5)
    vals = shift.translation_scan(f, A, B, ts)
    for t, v in zip(ts, vals):
        direct = trace(doi.delta_f(f, A - t * np.eye(4), B - t * np.eye(4))).real
        assert v == pytest.approx(direct, abs=1e-10)


def test_translation_scan_cross_check_against_xi_quadrature():
    A, K, B = random_pair(27, 5)
    f = funcat.get_function("x3")
    xi = shift.xi_from_eigs(eigh(A).eigenvalues, eigh(B).eigenvalues)
    ts = np.linspace(-0.12, 0.12, 5)
    vals = shift.translation_scan(f, A, B, ts)
    for t, v in zip(ts, vals):
        shifted = funcat.ScalarFunction(
            "x3shift", lambda x, t=t: f.eval(x - t), lambda x, t=t: f.deriv(x - t),
            domain=(xi.breakpoints[0] - 1, xi.breakpoints[-1] + 1))
        rhs = shift.trace_formula_rhs(shifted, xi, 16)
        assert v == pytest.approx(rhs, abs=1e-8)


def test_translation_scan_modulus_of_continuity():
    A, K, B = random_pair(28, 6)
    f = funcat.get_function("sin")
    prev = None
    for count in (11, 41, 161):
        vals = shift.translation_scan(f, A, B, np.linspace(-0.1, 0.1, count))
        step = np.abs(np.diff(vals)).max()
        if prev is not None:
            assert step < prev
        prev = step


def test_translation_scan_domain_violation_names_t():
    A, K, B = random_pair(29, 4)
    with pytest.raises(DomainError, match="t=1.7"):
        shift.translation_scan(funcat.get_function("sin"), A, B, [0.0, 1.7])
