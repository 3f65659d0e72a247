"""Discrete energy, energy rate, receivers and CSV output."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from sbpsat.domain import FIELD_SUBGRIDS, Layout, Region
from sbpsat.errors import ConfigurationError
from sbpsat.semidiscrete import Fields, State

COMPONENTS = ("vx", "vy", "sxx", "sxy", "syy")


@dataclass
class EnergyBreakdown:
    e_kin: float
    e_pot: float
    per_region: list[tuple[float, float]] = field(default_factory=list)

    @property
    def e_total(self) -> float:
        return self.e_kin + self.e_pot


def _weights(region: Region, name: str) -> np.ndarray:
    """Quadrature weights (x weight times y weight) on the subgrid of ``name``."""
    yo = region.yops
    wy = yo.aN if FIELD_SUBGRIDS[name].y_grid == "N" else yo.aM
    return region.xops.dx * wy[None, :]


def _pairing(region: Region, f: Fields, g: Fields) -> tuple[float, float]:
    """Kinetic and potential parts of the energy bilinear form ``f^T H g``."""
    m = region.media
    kin = (np.sum(_weights(region, "vx") * m.rho_vx * f.vx * g.vx)
           + np.sum(_weights(region, "vy") * m.rho_vy * f.vy * g.vy))
    wn = _weights(region, "sxx")
    pot = np.sum(wn * (m.cA * (f.sxx * g.sxx + f.syy * g.syy)
                       - m.cB * (f.sxx * g.syy + f.syy * g.sxx)))
    pot += np.sum(_weights(region, "sxy") * 2.0 * m.cS * f.sxy * g.sxy)
    return float(kin), float(pot)


def discrete_energy(state: State, layout: Layout) -> EnergyBreakdown:
    """Kinetic plus compliance-weighted potential energy per unit thickness."""
    parts = []
    for region, f in zip(layout.regions, state):
        kin, pot = _pairing(region, f, f)
        parts.append((0.5 * kin, 0.5 * pot))
    return EnergyBreakdown(e_kin=math.fsum(p[0] for p in parts),
                           e_pot=math.fsum(p[1] for p in parts), per_region=parts)


def staggered_energy(state: State, previous: State | None, layout: Layout) -> EnergyBreakdown:
    """Energy conserved by leapfrog at an integer time level.

    ``state`` carries ``v^{n+1/2}`` and ``sigma^n``, ``previous`` carries
    ``v^{n-1/2}``; the kinetic part is the product of the two velocity levels.
    Without ``previous`` this is :func:`discrete_energy`.
    """
    if previous is None:
        return discrete_energy(state, layout)
    parts = []
    for region, f, p in zip(layout.regions, state, previous):
        kin, _ = _pairing(region, p, f)
        _, pot = _pairing(region, f, f)
        parts.append((0.5 * kin, 0.5 * pot))
    return EnergyBreakdown(e_kin=math.fsum(p[0] for p in parts),
                           e_pot=math.fsum(p[1] for p in parts), per_region=parts)


def energy_rate(state: State, deriv: State, layout: Layout) -> float:
    """``dE/dt`` given the time derivative ``deriv`` of ``state``."""
    terms = []
    for region, f, d in zip(layout.regions, state, deriv):
        terms.extend(_pairing(region, f, d))
    return math.fsum(terms)


def energy_rate_scale(state: State, deriv: State, layout: Layout) -> float:
    """Sum of magnitudes entering :func:`energy_rate`, a round-off yardstick."""
    total = 0.0
    for region, f, d in zip(layout.regions, state, deriv):
        absf = Fields(**{n: np.abs(a) for n, a in f.items()})
        absd = Fields(**{n: np.abs(a) for n, a in d.items()})
        m = region.media
        kin, _ = _pairing(region, absf, absd)
        wn = _weights(region, "sxx")
        pot = np.sum(wn * (np.abs(m.cA) * (absf.sxx * absd.sxx + absf.syy * absd.syy)
                           + np.abs(m.cB) * (absf.sxx * absd.syy + absf.syy * absd.sxx)))
        pot += np.sum(_weights(region, "sxy") * 2.0 * m.cS * absf.sxy * absd.sxy)
        total += kin + float(pot)
    return total


def edge_flux(f: Fields, region: Region, side: str) -> float:
    """Energy flux through one horizontal edge of a region, without penalties.

    For the top edge this is ``vx_R . (dx sxy_R) + syy_R . (dx vy_R)`` where
    ``_R`` denotes selection on the N grid or projection from the M grid; the
    bottom edge enters with the opposite sign.
    """
    yo, dx = region.yops, region.xops.dx
    if side == "top":
        p, row, sign = yo.pR, -1, 1.0
    elif side == "bottom":
        p, row, sign = yo.pL, 0, -1.0
    else:
        raise ValueError(side)
    sxy_edge = f.sxy @ p
    vy_edge = f.vy @ p
    return sign * dx * math.fsum(np.concatenate([f.vx[:, row] * sxy_edge,
                                                 f.syy[:, row] * vy_edge]))


def boundary_terms(state: State, layout: Layout, free_surface: bool = True,
                   interfaces: bool = True) -> float:
    """Sum of edge fluxes over the selected edges of every region.

    With all penalties disabled this equals ``dE/dt`` of the bare
    semi-discretization; it is evaluated from traces only.
    """
    terms = []
    last = len(layout.regions) - 1
    for k, (region, f) in enumerate(zip(layout.regions, state)):
        top_is_surface = k == 0
        bottom_is_surface = k == last
        if (free_surface and top_is_surface) or (interfaces and not top_is_surface):
            terms.append(edge_flux(f, region, "top"))
        if (free_surface and bottom_is_surface) or (interfaces and not bottom_is_surface):
            terms.append(edge_flux(f, region, "bottom"))
    return math.fsum(terms)


# {{{ receivers


@dataclass(frozen=True)
class ReceiverSpec:
    x: float
    y: float
    component: str = "vy"

    def __post_init__(self):
        if self.component not in COMPONENTS:
            raise ConfigurationError(
                f"receiver component must be one of {COMPONENTS}, got {self.component!r}")


@dataclass
class Seismogram:
    spec: ReceiverSpec
    times: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)

    def append(self, t: float, value: float) -> None:
        self.times.append(t)
        self.values.append(value)

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.times, self.values])


@dataclass(frozen=True)
class ReceiverStencil:
    """Precomputed bilinear weights of one receiver on its owning subgrid."""

    region: int
    component: str
    ix: tuple[int, int]
    wx: tuple[float, float]
    # nonzero rows of the vertical interpolation weights
    y_rows: np.ndarray
    y_weights: np.ndarray

    def sample(self, state: State) -> float:
        arr = state[self.region][self.component]
        col = sum(w * arr[i] for i, w in zip(self.ix, self.wx))
        return float(np.dot(self.y_weights, col[self.y_rows]))

    def sample_centred(self, state: State, previous: State | None) -> float:
        """Sample at an integer time level, averaging staggered velocity levels."""
        value = self.sample(state)
        if previous is not None and self.component in ("vx", "vy"):
            value = 0.5 * (value + self.sample(previous))
        return value


def locate_receiver(spec: ReceiverSpec, layout: Layout) -> ReceiverStencil:
    """Bilinear stencil for a receiver on its component's own staggered points.

    M-grid values between the last M point and a region edge are interpolated
    against the boundary value given by the projection vector.
    """
    k = layout.owner(spec.y)
    region = layout.regions[k]
    s = region.spec
    sub = FIELD_SUBGRIDS[spec.component]

    xs = s.x_coords(sub.x_grid)
    # periodic in x
    u = ((spec.x - xs[0]) / s.h) % s.nx
    i0 = int(math.floor(u)) % s.nx
    tx = u - math.floor(u)
    ix = (i0, (i0 + 1) % s.nx)
    wx = (1.0 - tx, tx)

    yo = region.yops
    if sub.y_grid == "N":
        ny = s.nyN
        v = (spec.y - s.y_bottom) / s.h
        j0 = min(max(int(math.floor(v)), 0), ny - 2)
        ty = min(max(v - j0, 0.0), 1.0)
        weights = np.zeros(ny)
        weights[j0] = 1.0 - ty
        weights[j0 + 1] = ty
    else:
        ny = s.nyM
        # extended ordinates: bottom edge, M points, top edge
        ys = np.concatenate([[s.y_bottom], s.y_coords("M"), [s.y_top]])
        j0 = int(np.clip(np.searchsorted(ys, spec.y, side="right") - 1, 0, len(ys) - 2))
        ty = float(np.clip((spec.y - ys[j0]) / (ys[j0 + 1] - ys[j0]), 0.0, 1.0))
        ext = np.zeros(len(ys))
        ext[j0] = 1.0 - ty
        ext[j0 + 1] = ty
        weights = ext[1:-1] + ext[0] * yo.pL + ext[-1] * yo.pR
    rows = np.flatnonzero(weights)
    return ReceiverStencil(region=k, component=spec.component, ix=ix, wx=wx,
                           y_rows=rows, y_weights=weights[rows])


def record_receiver(state: State, spec: ReceiverSpec, layout: Layout) -> float:
    return locate_receiver(spec, layout).sample(state)


# }}}


# {{{ output


def _fmt(v: float) -> str:
    return "%.17g" % v


def write_csv(path: str | os.PathLike, header: Sequence[str],
              rows: Iterable[Sequence[float]]) -> None:
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_outputs(out_dir: str | os.PathLike, energy: Sequence[Sequence[float]],
                  seismograms: Sequence[Seismogram]) -> list[Path]:
    """Write ``energy.csv`` and, when receivers exist, ``seismogram.csv``.

    ``energy`` rows are ``(t, e_total, e_kin, e_pot)``.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = [out / "energy.csv"]
    write_csv(written[0], ("t", "e_total", "e_kin", "e_pot"), energy)
    if seismograms:
        times = seismograms[0].times
        for s in seismograms[1:]:
            if len(s.times) != len(times):
                raise ValueError("seismograms have different sample counts")
        header = ["t"] + [f"rec{i}_{s.spec.component}" for i, s in enumerate(seismograms)]
        rows = ([t] + [s.values[k] for s in seismograms] for k, t in enumerate(times))
        written.append(out / "seismogram.csv")
        write_csv(written[1], header, rows)
    return written


def read_csv(path: str | os.PathLike) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader]
    return header, np.array(data, dtype=np.float64).reshape(len(data), len(header))


# }}}


# {{{ audit

RATE_TOLERANCE = 1e-12
ORACLE_TOLERANCE = 1e-12

AUDIT_CASES = (
    ("all_sats", True, True),
    ("no_interface_sats", True, False),
    ("no_free_surface_sats", False, True),
    ("no_sats", False, False),
)


@dataclass
class AuditCase:
    name: str
    free_surface_sats: bool
    interface_sats: bool
    max_rate: float = 0.0
    max_oracle_mismatch: float = 0.0

    @property
    def conserving(self) -> bool:
        return self.free_surface_sats and self.interface_sats

    def passed(self) -> bool:
        if self.conserving:
            return self.max_rate <= RATE_TOLERANCE
        return self.max_oracle_mismatch <= ORACLE_TOLERANCE


def audit_energy(layout: Layout, n_random: int, rng: np.random.Generator) -> list[AuditCase]:
    """Energy rate of the semi-discretization on seeded random states.

    ``max_rate`` is ``|dE/dt| / max(1, E)``.  With some penalties disabled the
    rate is compared against the flux through the unpenalized edges instead,
    relative to the larger of that flux and the round-off yardstick.
    """
    from sbpsat.semidiscrete import ElasticProblem

    states = [State.random(layout, rng) for _ in range(n_random)]
    cases = []
    for name, fs, it in AUDIT_CASES:
        case = AuditCase(name, fs, it)
        problem = ElasticProblem(layout, free_surface_sats=fs, interface_sats=it)
        for state in states:
            deriv = problem.rhs(state)
            rate = energy_rate(state, deriv, layout)
            e = discrete_energy(state, layout).e_total
            case.max_rate = max(case.max_rate, abs(rate) / max(1.0, e))
            flux = boundary_terms(state, layout, free_surface=not fs, interfaces=not it)
            scale = max(abs(flux), 1e-3 * energy_rate_scale(state, deriv, layout), 1e-300)
            case.max_oracle_mismatch = max(case.max_oracle_mismatch, abs(rate - flux) / scale)
        cases.append(case)
    return cases


# }}}
