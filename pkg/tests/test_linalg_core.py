import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from wishart_shocks.errors import InputDomainError
from wishart_shocks.linalg_core import (
    Spectrum,
    batch_singular_values,
    characteristic_value,
    svd,
    svd_singular_values,
    wishart_spectra,
    wishart_spectrum,
)


def random_complex(rng, m, n):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def charpoly_eigenvalues(h):
    """Eigenvalues of a Hermitian matrix via Faddeev-LeVerrier and polynomial roots."""
    n = h.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(h)
    eye = np.eye(n)
    for k in range(1, n + 1):
        m = h @ m + coeffs[-1] * eye
        coeffs.append(-np.trace(h @ m) / k)
    roots = np.roots(np.array(coeffs))
    return np.sort(roots.real)


def test_diagonal_example():
    assert_allclose(svd_singular_values([[3, 0], [0, 4], [0, 0]]), [4.0, 3.0], atol=1e-15)
    s = wishart_spectrum([[3, 0], [0, 4], [0, 0]], tau=0.5)
    assert_allclose(s.values, [9.0, 16.0], atol=1e-13)
    assert s.time_tau == 0.5


def test_zero_matrix():
    assert_array_equal(svd_singular_values(np.zeros((4, 3))), np.zeros(3))
    assert_array_equal(wishart_spectrum(np.zeros((4, 3))).values, np.zeros(3))


def test_frobenius_8x5():
    rng = np.random.default_rng(1)
    a = random_complex(rng, 8, 5)
    s = svd_singular_values(a)
    assert abs(np.sum(s ** 2) - np.linalg.norm(a) ** 2) <= 1e-12 * np.linalg.norm(a) ** 2


def test_trace_identity():
    rng = np.random.default_rng(2)
    k = random_complex(rng, 12, 7)
    lam = wishart_spectrum(k).values
    tr = np.trace(k.conj().T @ k).real
    assert abs(lam.sum() - tr) <= 1e-12 * tr


def test_matches_lapack():
    rng = np.random.default_rng(3)
    for m, n in [(1, 1), (5, 5), (9, 4), (40, 17), (64, 48)]:
        a = random_complex(rng, m, n)
        assert_allclose(svd_singular_values(a), np.linalg.svd(a, compute_uv=False), rtol=1e-12, atol=1e-12)


def test_wide_matrix_transposed():
    rng = np.random.default_rng(4)
    a = random_complex(rng, 3, 7)
    assert_allclose(svd_singular_values(a), np.linalg.svd(a, compute_uv=False), rtol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_spectrum_vs_charpoly_roots(n):
    rng = np.random.default_rng(10 + n)
    k = random_complex(rng, n + 2, n)
    h = k.conj().T @ k
    assert_allclose(wishart_spectrum(k).values, charpoly_eigenvalues(h), atol=1e-9)


def test_full_svd_reconstruction():
    rng = np.random.default_rng(5)
    for shape in [(6, 4), (4, 6), (5, 5)]:
        a = random_complex(rng, *shape)
        u, s, vh = svd(a)
        rec = u @ np.diag(s) @ vh
        assert np.linalg.norm(rec - a) <= 1e-12 * np.linalg.norm(a)
        assert_allclose(u.conj().T @ u, np.eye(len(s)), atol=1e-12)


def test_input_not_mutated():
    rng = np.random.default_rng(6)
    a = random_complex(rng, 1, 1)
    keep = a.copy()
    svd_singular_values(a)
    assert_array_equal(a, keep)


def test_batch_independent_of_neighbours():
    rng = np.random.default_rng(7)
    stack = random_complex(rng, 6, 5).reshape(1, 6, 5).repeat(3, axis=0)
    stack[1] *= 100
    one = batch_singular_values(stack[:1])
    assert_array_equal(batch_singular_values(stack)[0], one[0])
    assert_allclose(wishart_spectra(stack)[0], np.sort(one[0] ** 2))


def test_non_finite_rejected():
    with pytest.raises(InputDomainError):
        svd_singular_values([[np.nan, 0], [0, 1]])
    with pytest.raises(InputDomainError):
        wishart_spectrum(np.ones((2, 3)))


def test_characteristic_value():
    assert characteristic_value(0, Spectrum([1.0, 2.0])) == 2
    assert characteristic_value(1.0, Spectrum([1.0, 2.0])) == 0
    assert characteristic_value(1, Spectrum([9.0, 16.0])) == 120


def test_spectrum_invariants():
    with pytest.raises(InputDomainError):
        Spectrum([2.0, 1.0])
    with pytest.raises(InputDomainError):
        Spectrum([-1.0, 1.0])


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 64), n=st.integers(1, 48), seed=st.integers(0, 2 ** 32 - 1))
def test_svd_properties(m, n, seed):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, m, n)
    s = svd_singular_values(a)
    assert np.all(s >= 0)
    assert np.all(np.diff(s) <= 0)
    fro = np.linalg.norm(a) ** 2
    assert abs(np.sum(s ** 2) - fro) <= 1e-12 * fro
