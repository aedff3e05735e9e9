import numpy as np
import pytest

from shiftlab import (DiagnosticThresholds, Verdict, Window, ap_witness,
                      convergence_diagnostic, coordinate_shift,
                      decay_exponent_fit, schatten_norm, self_commutator,
                      singular_values, trace)
from shiftlab.shift_operators import RestrictedSpace, TruncatedOperator

from conftest import random_weight_set


def _wrap(M, max_degree=0):
    import scipy.sparse as sp
    n = M.shape[0]
    space = RestrictedSpace(dimension=n, degrees=np.zeros(n, dtype=np.int64),
                            max_degree=max_degree, graded=False)
    return TruncatedOperator(space, sp.csr_matrix(M), interior_degree=max_degree,
                             degree_raise=0)


def _random_matrix(rng, n, complex_=True):
    M = rng.normal(size=(n, n))
    if complex_:
        M = M + 1j * rng.normal(size=(n, n))
    return M


def test_singular_values_against_numpy(rng):
    for _ in range(20):
        n = int(rng.integers(2, 30))
        M = _random_matrix(rng, n)
        s = singular_values(_wrap(M))
        assert np.allclose(s, np.linalg.svd(M, compute_uv=False), atol=1e-12)


def test_singular_values_equal_sqrt_eigs_of_gram(rng):
    # independent oracle: sigma_k^2 = eigenvalues of M* M
    M = _random_matrix(rng, 25)
    s = singular_values(_wrap(M))
    lam = np.sort(np.linalg.eigvalsh(M.conj().T @ M))[::-1]
    assert np.allclose(s ** 2, lam, atol=1e-10)


def test_diagonal_specialization(rng):
    for _ in range(30):
        d = rng.normal(size=int(rng.integers(1, 40)))
        T = _wrap(np.diag(d))
        for p in (1.0, 2.0, 3.0, np.inf):
            if p == np.inf:
                expected = np.abs(d).max()
            else:
                expected = np.sum(np.abs(d) ** p) ** (1 / p)
            assert schatten_norm(T, p) == pytest.approx(expected, rel=1e-12)


def test_norm_monotone_in_p(rng):
    for _ in range(30):
        M = _random_matrix(rng, int(rng.integers(2, 25)))
        T = _wrap(M)
        ps = [1.0, 1.5, 2.0, 3.0, 6.0, np.inf]
        norms = [schatten_norm(T, p) for p in ps]
        for a, b in zip(norms, norms[1:]):
            assert b <= a * (1 + 1e-12)


def test_triangle_inequality(rng):
    for _ in range(30):
        n = int(rng.integers(2, 20))
        A, B = _random_matrix(rng, n), _random_matrix(rng, n)
        for p in (1.0, 2.0, np.inf):
            lhs = schatten_norm(_wrap(A + B), p)
            rhs = schatten_norm(_wrap(A), p) + schatten_norm(_wrap(B), p)
            assert lhs <= rhs * (1 + 1e-12)


def test_unitary_invariance(rng):
    for _ in range(20):
        n = int(rng.integers(2, 20))
        M = _random_matrix(rng, n)
        U = np.linalg.qr(_random_matrix(rng, n))[0]
        V = np.linalg.qr(_random_matrix(rng, n))[0]
        for p in (1.0, 2.0, 3.7, np.inf):
            assert schatten_norm(_wrap(U @ M @ V), p) == pytest.approx(
                schatten_norm(_wrap(M), p), rel=1e-10)


def test_p_below_one_rejected(rng):
    with pytest.raises(ValueError):
        schatten_norm(_wrap(np.eye(3)), 0.5)


def test_trace_of_commutator_vanishes(rng):
    for _ in range(30):
        m = int(rng.integers(1, 4))
        w = random_weight_set(rng, m, int(rng.integers(3, 7)))
        C = self_commutator(coordinate_shift(w, int(rng.integers(1, m + 1))))
        assert abs(trace(C)) < 1e-12


def test_ap_witness_split(rng):
    w = random_weight_set(rng, 2, 6)
    C = self_commutator(coordinate_shift(w, 1))
    wit = ap_witness(C, p=2.0)
    M = C.dense()
    assert np.abs(wit.positive_part + wit.compact_part - M).max() < 1e-10
    assert np.linalg.eigvalsh(wit.positive_part).min() > -1e-10
    assert np.linalg.eigvalsh(wit.compact_part).max() < 1e-10
    neg = np.linalg.eigvalsh(M)
    expected = np.sum(np.minimum(neg, 0.0) ** 2) ** 0.5
    assert wit.p_norm_of_c == pytest.approx(expected, abs=1e-12)


def test_ap_witness_requires_self_adjoint(rng):
    w = random_weight_set(rng, 2, 5)
    Z = coordinate_shift(w, 1)
    with pytest.raises(ValueError):
        ap_witness(Z, p=1.0)


def test_decay_fit_recovers_exact_power_law():
    k = np.arange(1, 2001, dtype=float)
    fit = decay_exponent_fit(k ** -0.5)
    assert fit.beta == pytest.approx(0.5, abs=1e-10)
    assert fit.critical_exponent == pytest.approx(2.0, abs=1e-9)
    assert fit.residual < 1e-10


def test_decay_fit_short_input_returns_none():
    assert decay_exponent_fit(np.ones(10)) is None


@pytest.mark.parametrize("seq,expected", [
    # geometric saturation: increments decay fast
    ([(n, 2.0 - 2.0 ** -n) for n in range(4, 16)], Verdict.CONVERGING),
    # exactly constant
    ([(n, 1.0) for n in range(4, 12)], Verdict.CONVERGING),
    # partial sums of a convergent p-series
    ([(n, sum(k ** -2.0 for k in range(1, n + 1))) for n in (8, 12, 16, 20, 28, 40)],
     Verdict.CONVERGING),
    ([(n, sum(k ** -1.5 for k in range(1, n + 1))) for n in (8, 12, 16, 20, 28, 40)],
     Verdict.CONVERGING),
    # harmonic partial sums grow without bound
    ([(n, sum(1.0 / k for k in range(1, n + 1)))
      for n in (4, 8, 16, 32, 64, 128, 256)], Verdict.DIVERGING),
    # cube-root growth
    ([(n, n ** (1 / 3)) for n in range(4, 65, 4)], Verdict.DIVERGING),
    # too few points
    ([(1, 1.0), (2, 2.0), (3, 2.1)], Verdict.INCONCLUSIVE),
])
def test_convergence_diagnostic_scenarios(seq, expected):
    verdict, details = convergence_diagnostic(seq)
    assert verdict is expected, details


def test_diagnostic_reports_thresholds():
    th = DiagnosticThresholds(stall_rel=1e-5)
    seq = [(n, 1.0 + 1e-7 * n) for n in range(4, 16)]
    verdict, details = convergence_diagnostic(seq, th)
    assert details["thresholds"]["stall_rel"] == 1e-5
    assert "reason" in details


def test_windowed_norm_excludes_truncation_boundary(rng):
    # the full-window 1-norm of the truncated self-commutator includes the
    # spurious boundary row; the interior window must be strictly smaller
    w = random_weight_set(rng, 2, 10)
    C = self_commutator(coordinate_shift(w, 1))
    full = schatten_norm(C, 1, window=Window.FULL)
    interior = schatten_norm(C, 1, window=Window.INTERIOR)
    assert interior < full
