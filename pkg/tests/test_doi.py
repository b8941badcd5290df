import numpy as np
import pytest

from specshift import funcat, linalg
from specshift import doi_engine as doi
from specshift.campaigns import random_pair, trial_seed
from specshift.linalg import eigh, random_general, random_hermitian, schatten_norm


def test_doi_constant_kernel_is_identity_transformer():
    A, K, B = random_pair(0, 5)
    ea, eb = eigh(A), eigh(B)
    T = random_general(2, 5)
    out = doi.doi(np.ones((5, 5)), ea, T, eb)
    assert np.abs(out - T).max() <= 1e-12 * np.abs(T).max()


def test_doi_left_multiplier_on_diagonal_operator():
    lam = np.array([-1.0, 0.2, 0.8, 1.5])
    A = np.diag(lam)
    e = eigh(A)
    T = random_general(3, 4)
    phi = np.tile(e.eigenvalues[:, None], (1, 4))
    out = doi.doi(phi, e, T, e)
    assert np.abs(out - A @ T).max() <= 1e-12


def test_doi_loewner_square_reproduces_difference_of_squares():
    A, K, B = random_pair(40, 4)
    ea, eb = eigh(A), eigh(B)
    kern = funcat.loewner_matrix(funcat.get_function("x2"), ea.eigenvalues, eb.eigenvalues)
    out = doi.doi(kern, ea, A - B, eb)
    assert schatten_norm(out - (A @ A - B @ B), 2) <= 1e-9


def test_doi_shape_mismatch():
    A, K, B = random_pair(0, 4)
    with pytest.raises(ValueError):
        doi.doi(np.ones((4, 4)), eigh(A), np.ones((3, 3)), eigh(B))
    with pytest.raises(ValueError):
        doi.doi(np.ones((3, 4)), eigh(A), np.ones((4, 4)), eigh(B))


def test_doi_kernel_sample_points_validated():
    A, K, B = random_pair(1, 4)
    ea, eb = eigh(A), eigh(B)
    kern = funcat.loewner_matrix(funcat.get_function("x2"), ea.eigenvalues + 0.1, eb.eigenvalues)
    with pytest.raises(ValueError, match="sample points"):
        doi.doi(kern, ea, A - B, eb)


def test_doi_s2_contractivity_seeded():
    rng = np.random.default_rng(77)
    for trial in range(1000):
        n = 2 + trial % 7
        A = random_hermitian(trial, n)
        B = random_hermitian(trial + 5000, n)
        ea, eb = eigh(A), eigh(B)
        phi = rng.uniform(-1.0, 1.0, size=(n, n))
        T = random_general(trial + 10000, n)
        lhs = schatten_norm(doi.doi(phi, ea, T, eb), 2)
        assert lhs <= np.abs(phi).max() * schatten_norm(T, 2) + 1e-9


def test_delta_f_basics():
    A, K, B = random_pair(3, 5)
    f2 = funcat.get_function("x2")
    assert np.abs(doi.delta_f(f2, A, A)).max() <= 1e-12
    d = doi.delta_f(funcat.get_function("identity"), A, B)
    assert np.abs(d - (A - B)).max() <= 1e-12
    Ad = np.diag([1.0, 0.0])
    Bd = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(doi.delta_f(f2, Ad, Bd), np.diag([0.0, -1.0]), atol=1e-14)


def test_representation_identity_trivial_kernel():
    A, K, B = random_pair(8, 6)
    rep = doi.doi_representation_check(funcat.get_function("identity"), A, B)
    assert rep.error_s2 <= 1e-12


def test_representation_x3_seed7():
    A, K, B = random_pair(7, 6)
    rep = doi.doi_representation_check(funcat.get_function("x3"), A, B)
    assert rep.error_s2 <= 1e-8


def test_representation_abs_spectra_off_zero():
    A, K, B = random_pair(7, 6, domain=(0.25, 1.95))
    rep = doi.doi_representation_check(funcat.get_function("abs"), A, B)
    assert rep.error_s2 <= 1e-8


def test_representation_all_differentiable_catalog():
    fns = [f for f in funcat.catalog() if f.differentiable_everywhere]
    assert len(fns) >= 6
    for f in fns:
        for trial in range(25):
            A, K, B = random_pair(trial_seed(21, trial), 2 + trial % 15, f.domain)
            rep = doi.doi_representation_check(f, A, B)
            assert rep.error_s2 <= 1e-8 * (1.0 + schatten_norm(A - B, 2)), f.name


def test_representation_report_bounds():
    A, K, B = random_pair(12, 5)
    f = funcat.get_function("sin")
    rep = doi.doi_representation_check(f, A, B, with_bounds=True)
    assert schatten_norm(rep.lhs, 2) <= rep.lip_bound_s2 * (1 + 1e-6)
    assert schatten_norm(rep.lhs, 1) <= rep.ol_bound_s1 * (1 + 1e-3)
    rec = rep.to_record()
    assert {"lhs_trace", "rhs_trace", "error_s2", "error_s1"} <= rec.keys()


def test_derivative_q_identity_and_zero():
    A, K, B = random_pair(5, 5)
    Q = doi.derivative_Q(funcat.get_function("identity"), A, K, 0.3)
    assert np.abs(Q - K).max() <= 1e-12
    Q0 = doi.derivative_Q(funcat.get_function("sin"), A, 0.0 * K, 0.3)
    assert np.abs(Q0).max() <= 1e-14


def test_derivative_q_square_anticommutator():
    for seed in (1, 2, 3):
        A, K, B = random_pair(seed, 4)
        for t in (0.0, 0.4, 1.0):
            At = A + t * K
            Q = doi.derivative_Q(funcat.get_function("x2"), A, K, t)
            assert np.abs(Q - (At @ K + K @ At)).max() <= 1e-9


def test_hs_derivative_quadratic_exact():
    A, K, B = random_pair(9, 5)
    for h in (1e-2, 1e-3, 1e-4):
        rep = doi.hs_derivative_check(funcat.get_function("x2"), A, K, 0.5, h)
        assert rep.fd_error <= 1e-10


def test_hs_derivative_identity_zero():
    # exact in exact arithmetic; the bound is rounding noise amplified by 1/2h
    A, K, B = random_pair(10, 4)
    rep = doi.hs_derivative_check(funcat.get_function("identity"), A, K, 0.5, 1e-3)
    assert rep.fd_error <= 1e-11


def test_hs_derivative_order_two_sin_seed3():
    A, K, B = random_pair(3, 5)
    f = funcat.get_function("sin")
    e1 = doi.hs_derivative_check(f, A, K, 0.5, 1e-3).fd_error
    e2 = doi.hs_derivative_check(f, A, K, 0.5, 5e-4).fd_error
    assert e1 / e2 == pytest.approx(4.0, rel=0.15)


def test_first_order_expansion_at_zero():
    A, K, B = random_pair(14, 5)
    f = funcat.get_function("sin")
    Q0 = doi.derivative_Q(f, A, K, 0.0)
    fa = linalg.apply_function(f, A)
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        fb = linalg.apply_function(f, A + h * K)
        errs.append(schatten_norm(fb - fa - h * Q0, 2))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.3)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.3)


def test_bochner_identity_function_any_depth():
    A, K, B = random_pair(16, 4)
    for depth in (0, 1, 3):
        out = doi.bochner_integral(funcat.get_function("identity"), A, K, depth)
        assert np.abs(out - K).max() <= 1e-12


def test_bochner_square_exact_at_depth_one():
    A, K, B = random_pair(17, 5)
    f = funcat.get_function("x2")
    out = doi.bochner_integral(f, A, K, 1)
    resid = schatten_norm(doi.delta_f(f, A, B) + out, 1)
    assert resid <= 1e-10


def test_bochner_sin_depth10_residual():
    A, K, B = random_pair(11, 6)
    f = funcat.get_function("sin")
    resid = schatten_norm(doi.delta_f(f, A, B) + doi.bochner_integral(f, A, K, 10), 1)
    assert resid <= 1e-5


def test_trace_of_doi_constant_kernel():
    A, K, B = random_pair(20, 5)
    e = eigh(A)
    T = random_general(21, 5)
    val = doi.trace_of_doi(np.ones((5, 5)), e, T)
    assert val == pytest.approx(complex(np.trace(T)), abs=1e-12)


def test_trace_of_doi_left_kernel():
    A, K, B = random_pair(22, 5)
    e = eigh(A)
    T = random_general(23, 5)
    g = np.cos(e.eigenvalues)
    phi = np.tile(g[:, None], (1, 5))
    gA = (e.vectors * g) @ e.vectors.conj().T
    assert doi.trace_of_doi(phi, e, T) == pytest.approx(complex(np.trace(gA @ T)), abs=1e-10)


def test_trace_of_doi_matches_assembled_doi():
    rng = np.random.default_rng(9)
    A = random_hermitian(9, 5)
    e = eigh(A)
    T = random_general(90, 5)
    phi = rng.uniform(-1, 1, size=(5, 5))
    direct = doi.trace_of_doi(phi, e, T)
    assembled = complex(np.trace(doi.doi(phi, e, T, e)))
    assert direct == pytest.approx(assembled, abs=1e-10)
