r"""
One-dimensional staggered difference operators.

Two grids share each axis: the *N* grid holds points aligned with the
boundaries and the *M* grid holds the half-cell offset points.  ``dM`` maps
M-grid samples to derivative approximations on the N grid, ``dN`` maps N-grid
samples to derivatives on the M grid.

Periodic family (x axis)
    Circulant operators built from the fourth-order staggered stencil
    ``[1/24, -9/8, 9/8, -1/24] / dx`` with the norm ``dx * I`` on both grids,
    so that ``dx dM + (dx dN)^T = 0``.

Bounded family (y axis)
    Interior rows use the same stencil; ``b = 4`` boundary rows at each end are
    closed with coefficients derived here in exact rational arithmetic such that

    .. math::

        A_N D_M + (A_M D_N)^T = e_R p_R^T - e_L p_L^T,

    where ``e_L, e_R`` select the first/last N-grid value and ``p_L, p_R``
    extrapolate M-grid values to the boundary ordinates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from sbpsat.errors import ConfigurationError, DerivationError

log = logging.getLogger(__name__)

STENCIL = (Fraction(1, 24), Fraction(-9, 8), Fraction(9, 8), Fraction(-1, 24))

BLOCK = 4
PROJECTION_WIDTH = 4
DEFAULT_LADDER = ((2, 2), (2, 1), (1, 1))

MIN_PERIODIC_POINTS = 5
MIN_BOUNDED_POINTS = 2 * BLOCK + 1


# {{{ periodic family


@dataclass(frozen=True)
class PeriodicOps:
    """Periodic staggered operators on ``n`` points per grid with spacing ``dx``."""

    n: int
    dx: float
    dM: sp.csr_array
    dN: sp.csr_array

    @property
    def norm(self) -> float:
        return self.dx

    @property
    def length(self) -> float:
        return self.n * self.dx


def _circulant(n: int, offsets: Sequence[int], values: Sequence[float]) -> sp.csr_array:
    rows = np.repeat(np.arange(n), len(offsets))
    cols = (rows + np.tile(np.asarray(offsets), n)) % n
    data = np.tile(np.asarray(values, dtype=np.float64), n)
    # duplicates cannot occur for n >= 4, sum_duplicates keeps it safe anyway
    mat = sp.coo_array((data, (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    return mat


def build_periodic_ops(n: int, dx: float) -> PeriodicOps:
    """Build the wrapped-around fourth-order staggered operators.

    M point ``j`` sits at ``(j + 1/2) dx`` and N point ``i`` at ``i dx``.
    """
    if n < MIN_PERIODIC_POINTS:
        raise ConfigurationError(
            f"periodic operators need n >= {MIN_PERIODIC_POINTS} points, got {n}")
    if not dx > 0:
        raise ConfigurationError(f"grid spacing must be positive, got {dx}")

    coeffs = [float(c) / dx for c in STENCIL]
    # N point i uses M points i-2 .. i+1
    dM = _circulant(n, (-2, -1, 0, 1), coeffs)
    # M point i uses N points i-1 .. i+2
    dN = _circulant(n, (-1, 0, 1, 2), coeffs)
    return PeriodicOps(n=n, dx=float(dx), dM=dM, dN=dN)


# }}}


# {{{ bounded family: rational derivation


@dataclass(frozen=True)
class BoundedTables:
    """Left-boundary closure of the bounded family at unit spacing.

    ``dM_rows[i][j]`` is the coefficient of M point ``j`` in N row ``i``;
    ``dN_rows[j][i]`` the coefficient of N point ``i`` in M row ``j``.  The
    right closure is the mirror image with negated difference coefficients.
    """

    block: int
    width: int
    q_b: int
    q_p: int
    dM_rows: tuple[tuple[Fraction, ...], ...]
    dN_rows: tuple[tuple[Fraction, ...], ...]
    aN: tuple[Fraction, ...]
    aM: tuple[Fraction, ...]
    pL: tuple[Fraction, ...]
    ladder: tuple[tuple[int, int, str], ...] = ()

    @property
    def fallback_used(self) -> bool:
        return len(self.ladder) > 1


def _ladder(q_b: int, q_p: int) -> list[tuple[int, int]]:
    rungs = [(q_b, q_p)]
    for rung in DEFAULT_LADDER:
        if rung not in rungs and rung[0] <= q_b and rung[1] <= q_p:
            rungs.append(rung)
    if len(rungs) == 1 and (q_b, q_p) not in DEFAULT_LADDER:
        rungs.extend(r for r in DEFAULT_LADDER if r[0] <= max(q_b, 1))
    return rungs


def _closure_system(q_b: int, q_p: int, block: int, width: int):
    """Unknowns and linear constraints for the left closure at unit spacing."""
    import sympy

    b, w = block, width
    stencil = [sympy.Rational(c.numerator, c.denominator) for c in STENCIL]
    q = sympy.Matrix(b, b, lambda i, j: sympy.Symbol(f"q_{i}_{j}"))
    aN = [sympy.Symbol(f"aN_{i}") for i in range(b)]
    aM = [sympy.Symbol(f"aM_{j}") for j in range(b)]
    pL = [sympy.Symbol(f"p_{j}") for j in range(w)]

    def pl(j):
        return pL[j] if j < w else 0

    # QM = A_N D_M, QN = A_M D_N; the SBP identity ties QM[i, j] to QN[j, i]
    def QM(i, j):
        if j < 0:
            return 0
        if i >= b:
            k = j - (i - 2)
            return stencil[k] if 0 <= k < 4 else 0
        if j < b:
            return q[i, j]
        return -QN(j, i) - (pl(j) if i == 0 else 0)

    def QN(j, i):
        if i < 0:
            return 0
        if j >= b:
            k = i - (j - 1)
            return stencil[k] if 0 <= k < 4 else 0
        return -QM(i, j) - (pl(j) if i == 0 else 0)

    span = b + 4
    yN = [sympy.Integer(i) for i in range(span)]
    yM = [sympy.Rational(2 * j + 1, 2) for j in range(span)]

    eqs = []
    for i in range(b):
        for k in range(q_b + 1):
            lhs = sum(QM(i, j) * yM[j] ** k for j in range(span))
            rhs = k * aN[i] * yN[i] ** (k - 1) if k else 0
            eqs.append(sympy.expand(lhs - rhs))
    for j in range(b):
        for k in range(q_b + 1):
            lhs = sum(QN(j, i) * yN[i] ** k for i in range(span))
            rhs = k * aM[j] * yM[j] ** (k - 1) if k else 0
            eqs.append(sympy.expand(lhs - rhs))
    for k in range(q_p + 1):
        eqs.append(sum(pL[j] * yM[j] ** k for j in range(w)) - (1 if k == 0 else 0))
    # quadrature consistency: boundary weights absorb the half cells
    eqs.append(sum(aN) - sympy.Rational(2 * b - 1, 2))
    eqs.append(sum(aM) - b)

    unknowns = list(q) + aN + aM + pL
    return eqs, unknowns, QM, QN, span, (list(q), aN, aM, pL)


def _least_norm(A, r, groups):
    """Solve ``A x = r`` choosing free parameters by staged least squares.

    Stage one minimizes the sum of squared boundary-block entries; any
    directions left undetermined are fixed by pulling norm weights towards
    the interior value 1 and projection entries towards 0.
    """
    import sympy

    sol, params = A.gauss_jordan_solve(r)
    params = list(params)
    if not params:
        return sol
    n = A.shape[1]
    nq, na = groups
    x0 = sol.subs({p: 0 for p in params})
    N = sol.jacobian(sympy.Matrix(params))

    stage1 = sympy.diag(*([1] * nq + [0] * (n - nq)))
    ref2 = sympy.Matrix([0] * nq + [1] * na + [0] * (n - nq - na))
    stage2 = sympy.diag(*([0] * nq + [1] * (n - nq)))

    for weight, ref in ((stage1, sympy.zeros(n, 1)), (stage2, ref2)):
        H = N.T * weight * N
        g = N.T * weight * (x0 - ref)
        tsol, tpar = H.gauss_jordan_solve(-g)
        tpar = list(tpar)
        # re-parametrize remaining freedom for the next stage
        x0 = x0 + N * tsol.subs({p: 0 for p in tpar})
        N = N * tsol.jacobian(sympy.Matrix(tpar)) if tpar else sympy.zeros(n, 0)
        if N.shape[1] == 0:
            break
    # leftover freedom, if any, is set to zero
    return x0


@lru_cache(maxsize=None)
def derive_bounded_tables(q_b: int = 2, q_p: int = 2,
                          block: int = BLOCK, width: int = PROJECTION_WIDTH) -> BoundedTables:
    """Derive the left boundary closure in exact rational arithmetic.

    Rungs of the accuracy ladder starting at ``(q_b, q_p)`` are tried in order
    until one admits a consistent solution with positive norm weights.
    """
    import sympy

    if q_b < 1 or q_p < 1:
        raise ConfigurationError("accuracy targets must be at least 1")

    attempts: list[tuple[int, int, str]] = []
    for rung_b, rung_p in _ladder(q_b, q_p):
        eqs, unknowns, QM, QN, span, (qs, aN, aM, pL) = _closure_system(
            rung_b, rung_p, block, width)
        A, r = sympy.linear_eq_to_matrix(eqs, unknowns)
        if A.rank() != A.row_join(r).rank():
            attempts.append((rung_b, rung_p, "inconsistent"))
            log.info("closure (%d, %d) infeasible: inconsistent constraints", rung_b, rung_p)
            continue
        x = _least_norm(A, r, (len(qs), len(aN) + len(aM)))
        values = dict(zip(unknowns, x))
        norms = [values[s] for s in aN + aM]
        if any(v <= 0 for v in norms):
            attempts.append((rung_b, rung_p, "non-positive norm"))
            log.info("closure (%d, %d) rejected: non-positive norm weight", rung_b, rung_p)
            continue
        attempts.append((rung_b, rung_p, "ok"))

        def frac(e) -> Fraction:
            e = sympy.Rational(sympy.nsimplify(e).subs(values))
            return Fraction(int(e.p), int(e.q))

        an = [frac(s) for s in aN]
        am = [frac(s) for s in aM]
        dM_rows = []
        for i in range(block):
            row = [frac(QM(i, j)) / an[i] for j in range(span)]
            dM_rows.append(tuple(_trim(row)))
        dN_rows = []
        for j in range(block):
            row = [frac(QN(j, i)) / am[j] for i in range(span)]
            dN_rows.append(tuple(_trim(row)))
        return BoundedTables(
            block=block, width=width, q_b=rung_b, q_p=rung_p,
            dM_rows=tuple(dM_rows), dN_rows=tuple(dN_rows),
            aN=tuple(an), aM=tuple(am), pL=tuple(frac(s) for s in pL),
            ladder=tuple(attempts))

    raise DerivationError(
        "no boundary closure on the accuracy ladder is feasible: "
        + "; ".join(f"(q_b={b}, q_p={p}): {why}" for b, p, why in attempts))


def _trim(row: list[Fraction]) -> list[Fraction]:
    while row and row[-1] == 0:
        row.pop()
    return row


# }}}


# {{{ bounded family: assembly


@dataclass(frozen=True)
class BoundedOps:
    """Bounded staggered SBP operators on ``[0, (nN - 1) dy]``."""

    nN: int
    nM: int
    dy: float
    dM: sp.csr_array
    dN: sp.csr_array
    aN: np.ndarray
    aM: np.ndarray
    eL: np.ndarray
    eR: np.ndarray
    pL: np.ndarray
    pR: np.ndarray
    tables: BoundedTables = field(repr=False)

    @property
    def length(self) -> float:
        return (self.nN - 1) * self.dy

    @property
    def q_b(self) -> int:
        return self.tables.q_b

    @property
    def q_p(self) -> int:
        return self.tables.q_p


def _bounded_triplets(tables: BoundedTables, nN: int):
    """Unit-spacing (row, col, Fraction) entries of dM and dN plus norms."""
    nM = nN - 1
    b = tables.block
    dM: dict[tuple[int, int], Fraction] = {}
    dN: dict[tuple[int, int], Fraction] = {}

    for i in range(nN):
        if i < b:
            for j, c in enumerate(tables.dM_rows[i]):
                dM[i, j] = c
        elif i >= nN - b:
            for j, c in enumerate(tables.dM_rows[nN - 1 - i]):
                dM[i, nM - 1 - j] = -c
        else:
            for j, c in zip(range(i - 2, i + 2), STENCIL):
                dM[i, j] = c
    for j in range(nM):
        if j < b:
            for i, c in enumerate(tables.dN_rows[j]):
                dN[j, i] = c
        elif j >= nM - b:
            for i, c in enumerate(tables.dN_rows[nM - 1 - j]):
                dN[j, nN - 1 - i] = -c
        else:
            for i, c in zip(range(j - 1, j + 3), STENCIL):
                dN[j, i] = c

    aN = [Fraction(1)] * nN
    aM = [Fraction(1)] * nM
    for k in range(b):
        aN[k] = aN[nN - 1 - k] = tables.aN[k]
        aM[k] = aM[nM - 1 - k] = tables.aM[k]
    pL = [Fraction(0)] * nM
    for k, c in enumerate(tables.pL):
        pL[k] = c
    pR = pL[::-1]
    return dM, dN, aN, aM, pL, pR


def _to_csr(entries: dict[tuple[int, int], Fraction], shape, scale: float) -> sp.csr_array:
    rows = np.fromiter((k[0] for k in entries), dtype=np.int64, count=len(entries))
    cols = np.fromiter((k[1] for k in entries), dtype=np.int64, count=len(entries))
    data = np.fromiter((float(v) for v in entries.values()), dtype=np.float64,
                       count=len(entries))
    mat = sp.coo_array((data * scale, (rows, cols)), shape=shape).tocsr()
    mat.eliminate_zeros()
    return mat


def derive_bounded_ops(nN: int, dy: float, q_b: int = 2, q_p: int = 2) -> BoundedOps:
    """Assemble the bounded operator set for ``nN`` boundary-aligned points."""
    if nN < MIN_BOUNDED_POINTS:
        raise ConfigurationError(
            f"bounded operators need nN >= {MIN_BOUNDED_POINTS} so the boundary "
            f"closures do not overlap, got {nN}")
    if not dy > 0:
        raise ConfigurationError(f"grid spacing must be positive, got {dy}")

    tables = derive_bounded_tables(q_b, q_p)
    dM, dN, aN, aM, pL, pR = _bounded_triplets(tables, nN)
    nM = nN - 1
    eL = np.zeros(nN)
    eL[0] = 1.0
    eR = eL[::-1].copy()
    return BoundedOps(
        nN=nN, nM=nM, dy=float(dy),
        dM=_to_csr(dM, (nN, nM), 1.0 / dy),
        dN=_to_csr(dN, (nM, nN), 1.0 / dy),
        aN=np.array([float(a) for a in aN]) * dy,
        aM=np.array([float(a) for a in aM]) * dy,
        eL=eL, eR=eR,
        pL=np.array([float(p) for p in pL]),
        pR=np.array([float(p) for p in pR]),
        tables=tables)


def rational_identity_residual(tables: BoundedTables, nN: int) -> Fraction:
    """Largest entry of ``A_N D_M + (A_M D_N)^T - (e_R p_R^T - e_L p_L^T)``.

    Evaluated in exact arithmetic at unit spacing; the family is SBP iff this
    is exactly zero.
    """
    dM, dN, aN, aM, pL, pR = _bounded_triplets(tables, nN)
    nM = nN - 1
    residual: dict[tuple[int, int], Fraction] = {}
    for (i, j), c in dM.items():
        residual[i, j] = residual.get((i, j), Fraction(0)) + aN[i] * c
    for (j, i), c in dN.items():
        residual[i, j] = residual.get((i, j), Fraction(0)) + aM[j] * c
    for j in range(nM):
        residual[nN - 1, j] = residual.get((nN - 1, j), Fraction(0)) - pR[j]
        residual[0, j] = residual.get((0, j), Fraction(0)) + pL[j]
    return max((abs(v) for v in residual.values()), default=Fraction(0))


def rational_norm_sums(tables: BoundedTables, nN: int) -> tuple[Fraction, Fraction]:
    """Exact sums of the N and M norm weights at unit spacing."""
    _, _, aN, aM, _, _ = _bounded_triplets(tables, nN)
    return sum(aN, Fraction(0)), sum(aM, Fraction(0))


def dump_rational_tables(tables: BoundedTables) -> str:
    """Plain-text table of the left closure, one matrix row per line."""
    def fmt(values: Iterable[Fraction]) -> str:
        return " ".join(f"{v.numerator}/{v.denominator}" for v in values)

    lines = [
        f"# bounded staggered SBP closure: block={tables.block} width={tables.width} "
        f"q_b={tables.q_b} q_p={tables.q_p} (unit spacing)",
        "# ladder: " + ", ".join(f"({b},{p}):{why}" for b, p, why in tables.ladder),
        "[dM] N rows 0.., M columns 0..",
    ]
    lines += [fmt(row) for row in tables.dM_rows]
    lines.append("[dN] M rows 0.., N columns 0..")
    lines += [fmt(row) for row in tables.dN_rows]
    lines.append("[aN]")
    lines.append(fmt(tables.aN))
    lines.append("[aM]")
    lines.append(fmt(tables.aM))
    lines.append("[pL]")
    lines.append(fmt(tables.pL))
    return "\n".join(lines) + "\n"


def parse_rational_tables(text: str) -> dict[str, list[list[Fraction]]]:
    """Inverse of :func:`dump_rational_tables` (sections to rows of fractions)."""
    out: dict[str, list[list[Fraction]]] = {}
    current = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            current = line[1:line.index("]")]
            out[current] = []
            continue
        if current is None:
            raise ValueError(f"row outside a section: {line!r}")
        out[current].append([Fraction(tok) for tok in line.split()])
    return out


# }}}


# {{{ verification


@dataclass
class OperatorReport:
    kind: str
    n: int
    spacing: float
    identity_residual: float
    identity_tolerance: float
    checks: dict[str, bool]
    exactness: dict[str, int]
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "n": self.n,
            "spacing": self.spacing,
            "identity_residual": self.identity_residual,
            "identity_tolerance": self.identity_tolerance,
            "checks": dict(self.checks),
            "exactness": dict(self.exactness),
            "details": self.details,
            "all_pass": self.all_pass,
        }


def _exactness(D: np.ndarray, rel: np.ndarray, h: float, max_degree: int = 6,
               rtol: float = 1e-10) -> np.ndarray:
    """Highest degree ``k`` for which each row differentiates ``rel^k`` exactly.

    ``rel[i, j]`` is the offset of input point ``j`` from output point ``i``.
    """
    Dh = D * h
    degree = np.full(D.shape[0], -1)
    alive = np.ones(D.shape[0], dtype=bool)
    for k in range(max_degree + 1):
        powk = (rel / h) ** k
        got = np.sum(Dh * powk, axis=1)
        want = 1.0 if k == 1 else 0.0
        scale = np.sum(np.abs(Dh * powk), axis=1) + 1.0
        alive &= np.abs(got - want) <= rtol * scale
        degree[alive] = k
    return degree


def verify_ops(ops: PeriodicOps | BoundedOps) -> OperatorReport:
    """Identity residuals, polynomial exactness and norm positivity."""
    if isinstance(ops, PeriodicOps):
        return _verify_periodic(ops)
    return _verify_bounded(ops)


def _verify_periodic(ops: PeriodicOps) -> OperatorReport:
    dx, n = ops.dx, ops.n
    dM, dN = ops.dM.toarray(), ops.dN.toarray()
    residual = float(np.max(np.abs(dx * dM + (dx * dN).T)))
    tol = 1e-14 / dx
    row_sums = max(float(np.max(np.abs(dM.sum(axis=1)))), float(np.max(np.abs(dN.sum(axis=1)))))

    # polynomial exactness in local coordinates, unwrapped across the period
    xN = np.arange(n) * dx
    xM = (np.arange(n) + 0.5) * dx
    period = n * dx
    degs = []
    for D, x_out, x_in in ((dM, xN, xM), (dN, xM, xN)):
        rel = x_in[None, :] - x_out[:, None]
        rel = (rel + 0.5 * period) % period - 0.5 * period
        degs.append(int(_exactness(D, rel, dx).min()))
    checks = {
        "identity": residual <= tol,
        "row_sums_zero": row_sums <= 1e-12 / dx,
        "interior_order": min(degs) >= 3,
    }
    return OperatorReport(
        kind="periodic", n=n, spacing=dx, identity_residual=residual,
        identity_tolerance=tol, checks=checks,
        exactness={"dM": degs[0], "dN": degs[1]},
        details={"row_sum_max": row_sums})


def _verify_bounded(ops: BoundedOps) -> OperatorReport:
    dy, nN, nM = ops.dy, ops.nN, ops.nM
    b = ops.tables.block
    dM, dN = ops.dM.toarray(), ops.dN.toarray()
    B = np.outer(ops.eR, ops.pR) - np.outer(ops.eL, ops.pL)
    lhs = ops.aN[:, None] * dM + (ops.aM[:, None] * dN).T
    residual = float(np.max(np.abs(lhs - B)))
    tol = 1e-13 / dy

    yN = np.arange(nN) * dy
    yM = (np.arange(nM) + 0.5) * dy
    degM = _exactness(dM, yM[None, :] - yN[:, None], dy)
    degN = _exactness(dN, yN[None, :] - yM[:, None], dy)
    bdM = np.r_[degM[:b], degM[nN - b:]]
    bdN = np.r_[degN[:b], degN[nM - b:]]
    idM = degM[b:nN - b]
    idN = degN[b:nM - b]

    def proj_degree(p, y0):
        deg = -1
        for k in range(7):
            got = float(np.dot(p, ((yM - y0) / dy) ** k))
            want = 1.0 if k == 0 else 0.0
            if abs(got - want) > 1e-10 * (1.0 + float(np.dot(np.abs(p), np.abs((yM - y0) / dy) ** k))):
                break
            deg = k
        return deg

    qpL = proj_degree(ops.pL, 0.0)
    qpR = proj_degree(ops.pR, ops.length)

    # y -> L - y maps the set to itself with negated differences
    mirror = max(
        float(np.max(np.abs(dM + dM[::-1, ::-1]))),
        float(np.max(np.abs(dN + dN[::-1, ::-1]))),
        float(np.max(np.abs(ops.aN - ops.aN[::-1]))) / dy,
        float(np.max(np.abs(ops.aM - ops.aM[::-1]))) / dy,
        float(np.max(np.abs(ops.pL - ops.pR[::-1]))),
    )
    sums = (float(ops.aN.sum()), float(ops.aM.sum()))
    length = ops.length
    exact_residual = rational_identity_residual(ops.tables, nN) if nN <= 257 else None
    exact_sums = rational_norm_sums(ops.tables, nN) if nN <= 257 else None

    exactness = {
        "dM_interior": int(idM.min()) if idM.size else 99,
        "dN_interior": int(idN.min()) if idN.size else 99,
        "dM_boundary": int(bdM.min()),
        "dN_boundary": int(bdN.min()),
        "pL": qpL,
        "pR": qpR,
    }
    checks = {
        "identity": residual <= tol,
        "norm_positive": bool(np.all(ops.aN > 0) and np.all(ops.aM > 0)),
        "norm_sums": abs(sums[0] - length) <= 1e-12 * length
        and abs(sums[1] - length) <= 1e-12 * length,
        "interior_order": min(exactness["dM_interior"], exactness["dN_interior"]) >= 3,
        "boundary_order": min(exactness["dM_boundary"], exactness["dN_boundary"]) >= ops.q_b,
        "projection_order": min(qpL, qpR) >= ops.q_p,
        "mirror": mirror <= 1e-12 / dy,
    }
    details: dict[str, Any] = {
        "q_b": ops.q_b,
        "q_p": ops.q_p,
        "ladder": [list(r) for r in ops.tables.ladder],
        "fallback_used": ops.tables.fallback_used,
        "norm_sums": list(sums),
        "length": length,
        "mirror_residual": mirror,
        "min_norm_weight": float(min(ops.aN.min(), ops.aM.min())),
    }
    if exact_residual is not None:
        checks["identity_exact"] = exact_residual == 0
        checks["norm_sums_exact"] = exact_sums == (Fraction(nN - 1), Fraction(nN - 1))
        details["rational_identity_residual"] = str(exact_residual)
    return OperatorReport(
        kind="bounded", n=nN, spacing=dy, identity_residual=residual,
        identity_tolerance=tol, checks=checks, exactness=exactness, details=details)


# }}}
