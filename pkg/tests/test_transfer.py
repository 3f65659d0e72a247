import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbpsat.errors import ConfigurationError
from sbpsat.transfer import (build_transfer_M, build_transfer_N, build_transfer_pair,
                             verify_transfer_pair)


def test_N_rows_n8():
    T = build_transfer_N(8).toarray()
    np.testing.assert_array_equal(T[4], np.eye(8)[2])
    np.testing.assert_array_equal(T[5, 1:5], [-1 / 16, 9 / 16, 9 / 16, -1 / 16])
    assert np.count_nonzero(T[5]) == 4


def test_M_rows_n8():
    T = build_transfer_M(8).toarray()
    np.testing.assert_array_equal(T[4, 1:4], [5 / 32, 15 / 16, -3 / 32])
    np.testing.assert_array_equal(T[5, 1:4], [-3 / 32, 15 / 16, 5 / 32])


def test_periodic_wrap():
    T = build_transfer_N(8).toarray()
    np.testing.assert_array_equal(T[15, [6, 7, 0, 1]], [-1 / 16, 9 / 16, 9 / 16, -1 / 16])


def test_column_sums_are_two():
    for T in (build_transfer_N(12), build_transfer_M(12)):
        np.testing.assert_allclose(T.toarray().sum(axis=0), 2.0, rtol=0, atol=1e-15)


def test_restriction_is_scaled_transpose():
    pair = build_transfer_pair(8, 16, 0.2, 0.1)
    np.testing.assert_array_equal(pair.tN_f2c.toarray(), 0.5 * pair.tN_c2f.toarray().T)
    assert pair.adjoint_residual() <= 1e-15


def test_exactness_on_polynomials():
    nc, hc = 16, 1 / 16
    xc_N = np.arange(nc) * hc
    xf_N = np.arange(2 * nc) * hc / 2
    xc_M = xc_N + hc / 2
    xf_M = xf_N + hc / 4
    TN, TM = build_transfer_N(nc), build_transfer_M(nc)
    inner = slice(8, 24)
    np.testing.assert_allclose((TN @ (xc_N - 0.5) ** 3)[inner], ((xf_N - 0.5) ** 3)[inner],
                               atol=1e-14)
    np.testing.assert_allclose((TM @ (xc_M - 0.5) ** 2)[inner], ((xf_M - 0.5) ** 2)[inner],
                               atol=1e-14)
    # the M operator is not cubic-exact
    assert np.max(np.abs((TM @ (xc_M - 0.5) ** 3)[inner] - ((xf_M - 0.5) ** 3)[inner])) > 1e-8


def test_identity_pair():
    pair = build_transfer_pair(8, 8, 0.1, 0.1)
    assert pair.ratio == (1, 1)
    np.testing.assert_array_equal(pair.tM_f2c.toarray(), np.eye(8))


@pytest.mark.parametrize("args", [(3, 6, 0.2, 0.1), (8, 12, 0.2, 0.1), (8, 16, 0.3, 0.1),
                                  (8, 8, 0.2, 0.1)])
def test_invalid_pairs(args):
    with pytest.raises(ConfigurationError):
        build_transfer_pair(*args)


@given(st.integers(4, 64), st.floats(1e-3, 10.0))
@settings(max_examples=30, deadline=None)
def test_pair_invariants(nc, dxf):
    pair = build_transfer_pair(nc, 2 * nc, 2 * dxf, dxf)
    checks = verify_transfer_pair(pair)
    assert all(checks.values()), checks


@given(st.integers(4, 32), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20, deadline=None)
def test_norm_adjoint_pairing(nc, seed):
    # dxf <T uc, uf> = dxc <uc, T' uf> for the interpolation/restriction pair
    rng = np.random.default_rng(seed)
    pair = build_transfer_pair(nc, 2 * nc, 0.2, 0.1)
    uc, uf = rng.standard_normal(nc), rng.standard_normal(2 * nc)
    for c2f, f2c in ((pair.tN_c2f, pair.tN_f2c), (pair.tM_c2f, pair.tM_f2c)):
        lhs = 0.1 * np.dot(c2f @ uc, uf)
        rhs = 0.2 * np.dot(uc, f2c @ uf)
        assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-13)
