"""Interface transfer operators between periodic traces of different spacing.

Only the nested 1:2 ratio and the trivial 1:1 ratio are provided.  Coarse to
fine interpolation is given by repeating row patterns; fine to coarse
restriction is its norm adjoint, ``dxf * T_c2f = (dxc * T_f2c)^T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from sbpsat.errors import ConfigurationError

# (fine offset within a coarse cell, coarse offsets, weights)
N_PATTERN = (
    (0, (0,), (Fraction(1),)),
    (1, (-1, 0, 1, 2), (Fraction(-1, 16), Fraction(9, 16), Fraction(9, 16), Fraction(-1, 16))),
)
M_PATTERN = (
    (0, (-1, 0, 1), (Fraction(5, 32), Fraction(15, 16), Fraction(-3, 32))),
    (1, (-1, 0, 1), (Fraction(-3, 32), Fraction(15, 16), Fraction(5, 32))),
)

MIN_COARSE_POINTS = 4


def _pattern_matrix(nc: int, pattern) -> sp.csr_array:
    rows, cols, data = [], [], []
    for i in range(nc):
        for offset, coarse, weights in pattern:
            for c, w in zip(coarse, weights):
                rows.append(2 * i + offset)
                cols.append((i + c) % nc)
                data.append(float(w))
    mat = sp.coo_array((data, (rows, cols)), shape=(2 * nc, nc)).tocsr()
    mat.sum_duplicates()
    return mat


def _check_counts(nc: int, nf: int | None) -> None:
    if nc < MIN_COARSE_POINTS:
        raise ConfigurationError(
            f"transfer operators need at least {MIN_COARSE_POINTS} coarse points, got {nc}")
    if nf is not None and nf != 2 * nc:
        raise ConfigurationError(
            f"1:2 transfer requires nf = 2 nc, got nf={nf}, nc={nc}")


def build_transfer_N(nc: int, nf: int | None = None) -> sp.csr_array:
    """Coarse to fine interpolation for traces living on N lines.

    Fine point ``2i`` coincides with coarse point ``i``; fine point ``2i + 1``
    is the cubic midpoint interpolant of coarse points ``i-1 .. i+2``.
    """
    _check_counts(nc, nf)
    return _pattern_matrix(nc, N_PATTERN)


def build_transfer_M(nc: int, nf: int | None = None) -> sp.csr_array:
    """Coarse to fine interpolation for traces living on M lines.

    The two fine M points inside coarse cell ``i`` sit a quarter coarse
    spacing either side of coarse M point ``i``.
    """
    _check_counts(nc, nf)
    return _pattern_matrix(nc, M_PATTERN)


def derive_adjoints(tN_c2f, tM_c2f, dxf: float, dxc: float):
    """Fine to coarse operators from the norm-adjoint relation."""
    if not np.isclose(dxc, 2.0 * dxf, rtol=1e-12, atol=0.0) and not np.isclose(dxc, dxf):
        raise ConfigurationError(f"unsupported spacing pair dxf={dxf}, dxc={dxc}")
    scale = dxf / dxc
    return (scale * tN_c2f.T).tocsr(), (scale * tM_c2f.T).tocsr()


@dataclass(frozen=True)
class TransferPair:
    """Transfers across one interface line; ``ratio`` is (coarse, fine) spacing units."""

    ratio: tuple[int, int]
    nc: int
    nf: int
    dxc: float
    dxf: float
    tN_c2f: sp.csr_array
    tM_c2f: sp.csr_array
    tN_f2c: sp.csr_array
    tM_f2c: sp.csr_array

    def adjoint_residual(self) -> float:
        """Relative residual of ``dxf T_c2f - (dxc T_f2c)^T`` over both line types."""
        worst = 0.0
        for c2f, f2c in ((self.tN_c2f, self.tN_f2c), (self.tM_c2f, self.tM_f2c)):
            lhs = self.dxf * c2f.toarray()
            rhs = (self.dxc * f2c.toarray()).T
            worst = max(worst, float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs))))
        return worst


def build_transfer_pair(nc: int, nf: int, dxc: float, dxf: float) -> TransferPair:
    if nf == nc:
        if not np.isclose(dxc, dxf, rtol=1e-12, atol=0.0):
            raise ConfigurationError("equal point counts require equal spacings")
        eye = sp.identity(nc, format="csr")
        return TransferPair(ratio=(1, 1), nc=nc, nf=nf, dxc=dxc, dxf=dxf,
                            tN_c2f=eye, tM_c2f=eye, tN_f2c=eye, tM_f2c=eye)
    _check_counts(nc, nf)
    if not np.isclose(dxc, 2.0 * dxf, rtol=1e-12, atol=0.0):
        raise ConfigurationError(
            f"1:2 transfer requires dxc = 2 dxf, got dxc={dxc}, dxf={dxf}")
    tN = build_transfer_N(nc, nf)
    tM = build_transfer_M(nc, nf)
    tN_f2c, tM_f2c = derive_adjoints(tN, tM, dxf, dxc)
    return TransferPair(ratio=(2, 1), nc=nc, nf=nf, dxc=dxc, dxf=dxf,
                        tN_c2f=tN, tM_c2f=tM, tN_f2c=tN_f2c, tM_f2c=tM_f2c)


def _row_exactness(op, h_src: float, h_dst: float, src_off: float, dst_off: float,
                   degree: int) -> float:
    """Max error of ``op`` on local monomials up to ``degree``, unwrapped per row."""
    dense = op.toarray()
    L = dense.shape[1] * h_src
    xs = (np.arange(dense.shape[1]) + src_off) * h_src
    xd = (np.arange(dense.shape[0]) + dst_off) * h_dst
    rel = (xs[None, :] - xd[:, None] + 0.5 * L) % L - 0.5 * L
    worst = 0.0
    for k in range(degree + 1):
        got = np.sum(dense * (rel / h_src) ** k, axis=1)
        worst = max(worst, float(np.max(np.abs(got - (1.0 if k == 0 else 0.0)))))
    return worst


def verify_transfer_pair(pair: TransferPair) -> dict[str, bool]:
    """Invariant checks for one transfer pair.

    Adjointness, constant preservation in both directions, cubic exactness of
    the N interpolation and quadratic exactness of the M interpolation.
    """
    ones_c, ones_f = np.ones(pair.nc), np.ones(pair.nf)
    checks = {"adjoint": pair.adjoint_residual() <= 1e-15}
    for name, c2f, f2c in (("N", pair.tN_c2f, pair.tN_f2c), ("M", pair.tM_c2f, pair.tM_f2c)):
        checks[f"{name}_constant_c2f"] = bool(np.allclose(c2f @ ones_c, ones_f, rtol=0, atol=1e-15))
        checks[f"{name}_constant_f2c"] = bool(np.allclose(f2c @ ones_f, ones_c, rtol=0, atol=1e-15))
    if pair.ratio == (2, 1):
        hc, hf = pair.dxc, pair.dxf
        checks["N_cubic_exact"] = _row_exactness(pair.tN_c2f, hc, hf, 0.0, 0.0, 3) < 1e-13
        checks["M_quadratic_exact"] = _row_exactness(pair.tM_c2f, hc, hf, 0.5, 0.5, 2) < 1e-13
    return checks
