"""Matrix-free right-hand side of the velocity-stress system.

Derivatives are applied with the 1D operators along one array axis at a time.
Boundary and interface penalty terms are applied in "modified derivative"
form: the norm matrices have been divided out, so each penalty only touches
the rows reached by its selection or projection vector.

Stress penalties are derived for the compliance form of the equations and
are mapped back to the stiffness form by the local stiffness: the normal
stress penalty enters through ``d(vy)/dy`` and the shear penalty is scaled
by ``2 mu``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields
from typing import Callable, Iterator, Sequence

import numpy as np

from sbpsat.domain import Interface, Layout, Region
from sbpsat.errors import ConfigurationError

FIELD_NAMES = ("vx", "vy", "sxx", "sxy", "syy")
VELOCITY_NAMES = ("vx", "vy")
STRESS_NAMES = ("sxx", "sxy", "syy")


@dataclass
class Fields:
    """The five staggered fields of one region."""

    vx: np.ndarray
    vy: np.ndarray
    sxx: np.ndarray
    sxy: np.ndarray
    syy: np.ndarray

    def __getitem__(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def __setitem__(self, name: str, value: np.ndarray) -> None:
        setattr(self, name, value)

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        for f in dc_fields(self):
            yield f.name, getattr(self, f.name)

    @classmethod
    def zeros(cls, region: Region) -> "Fields":
        return cls(**{name: np.zeros(region.shape(name)) for name in FIELD_NAMES})

    def copy(self) -> "Fields":
        return Fields(**{name: arr.copy() for name, arr in self.items()})


@dataclass
class State:
    """Fields of every region at one time level."""

    regions: list[Fields]

    @classmethod
    def zeros(cls, layout: Layout) -> "State":
        return cls([Fields.zeros(r) for r in layout.regions])

    @classmethod
    def random(cls, layout: Layout, rng: np.random.Generator) -> "State":
        return cls([Fields(**{name: rng.standard_normal(r.shape(name)) for name in FIELD_NAMES})
                    for r in layout.regions])

    def copy(self) -> "State":
        return State([f.copy() for f in self.regions])

    def __iter__(self):
        return iter(self.regions)

    def __getitem__(self, k: int) -> Fields:
        return self.regions[k]

    def __len__(self) -> int:
        return len(self.regions)

    def _combine(self, other: "State", op) -> "State":
        return State([Fields(**{n: op(a[n], b[n]) for n in FIELD_NAMES})
                      for a, b in zip(self.regions, other.regions)])

    def __add__(self, other: "State") -> "State":
        return self._combine(other, np.add)

    def __sub__(self, other: "State") -> "State":
        return self._combine(other, np.subtract)

    def __mul__(self, c: float) -> "State":
        return State([Fields(**{n: c * a[n] for n in FIELD_NAMES}) for a in self.regions])

    __rmul__ = __mul__

    def axpy(self, c: float, other: "State", names: Sequence[str] = FIELD_NAMES) -> None:
        """In place ``self += c * other`` restricted to ``names``."""
        for a, b in zip(self.regions, other.regions):
            for n in names:
                a[n] += c * b[n]

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(a))) for f in self.regions for _, a in f.items())

    def is_finite(self) -> bool:
        return all(np.isfinite(a.sum()) for f in self.regions for _, a in f.items())


@dataclass(frozen=True)
class PenaltyConstants:
    top: float = -1.0
    bottom: float = 1.0
    upper: float = 0.5
    lower: float = -0.5


PENALTIES = PenaltyConstants()


@dataclass(frozen=True)
class SourceTerm:
    """Space-time separable source added to both normal stress rates."""

    weights: tuple[np.ndarray | None, ...]
    wavelet: Callable[[float], float]
    t_off: float = np.inf

    def value(self, t: float) -> float:
        return 0.0 if t > self.t_off else float(self.wavelet(t))


# {{{ axis helpers


def _dx(op, f: np.ndarray) -> np.ndarray:
    return op @ f


def _dy(op, f: np.ndarray) -> np.ndarray:
    return (op @ f.T).T


# }}}


def apply_derivatives(f: Fields, region: Region, part: str = "all") -> Fields:
    """Unpenalized rates of all five fields for one region.

    ``part`` selects ``"velocity"``, ``"stress"`` or ``"all"``; unrequested
    rates are returned as zeros.
    """
    xo, yo, m = region.xops, region.yops, region.media
    out = Fields.zeros(region)
    if part in ("all", "velocity"):
        out.vx = (_dx(xo.dN, f.sxx) + _dy(yo.dM, f.sxy)) / m.rho_vx
        out.vy = (_dx(xo.dM, f.sxy) + _dy(yo.dN, f.syy)) / m.rho_vy
    if part in ("all", "stress"):
        ex = _dx(xo.dM, f.vx)
        ey = _dy(yo.dM, f.vy)
        out.sxx = m.lam2mu * ex + m.lam * ey
        out.syy = m.lam * ex + m.lam2mu * ey
        out.sxy = m.mu_xy * (_dx(xo.dN, f.vy) + _dy(yo.dN, f.vx))
    return out


def apply_free_surface_sats(d: Fields, f: Fields, region: Region, side: str,
                            penalties: PenaltyConstants = PENALTIES) -> None:
    """Add the traction-free penalties on the ``"top"`` or ``"bottom"`` edge in place."""
    yo, m = region.yops, region.media
    if side == "top":
        eta, row, p = penalties.top, -1, yo.pR
        aN_edge = yo.aN[-1]
    elif side == "bottom":
        eta, row, p = penalties.bottom, 0, yo.pL
        aN_edge = yo.aN[0]
    else:
        raise ValueError(f"side must be 'top' or 'bottom', got {side!r}")
    # vx is selected on the edge row, fed by the projected shear traction
    d.vx[:, row] += eta * (f.sxy @ p) / (m.rho_vx[:, row] * aN_edge)
    # vy is spread through the projection vector, fed by the selected normal traction
    d.vy += eta * np.outer(f.syy[:, row], p / yo.aM) / m.rho_vy


def interface_traces(f: Fields, region: Region, side: str) -> dict[str, np.ndarray]:
    """Edge values of the four coupled quantities on ``side`` of ``region``.

    ``side="bottom"`` is the upper region's edge on an interface, ``"top"`` the
    lower region's.  sxy and vy are extrapolated from the M grid, syy and vx
    are selected on the N grid.
    """
    yo = region.yops
    if side == "bottom":
        p, row = yo.pL, 0
    else:
        p, row = yo.pR, -1
    return {
        "sxy": f.sxy @ p,
        "syy": f.syy[:, row].copy(),
        "vx": f.vx[:, row].copy(),
        "vy": f.vy @ p,
    }


_TRACE_GRID = {"sxy": "M", "vx": "M", "syy": "N", "vy": "N"}


def _apply_edge_penalties(d: Fields, region: Region, side: str, eta: float,
                          residual: dict[str, np.ndarray], part: str) -> None:
    yo, m = region.yops, region.media
    if side == "bottom":
        p, row, aN_edge = yo.pL, 0, yo.aN[0]
    else:
        p, row, aN_edge = yo.pR, -1, yo.aN[-1]
    if part in ("all", "velocity"):
        d.vx[:, row] += eta * residual["sxy"] / (m.rho_vx[:, row] * aN_edge)
        d.vy += eta * np.outer(residual["syy"], p / yo.aM) / m.rho_vy
    if part in ("all", "stress"):
        # compliance-form factor 1/2 times stiffness 2 mu
        d.sxy += eta * m.mu_xy * np.outer(residual["vx"], p / yo.aM)
        ey = eta * residual["vy"] / aN_edge
        d.sxx[:, row] += m.lam[:, row] * ey
        d.syy[:, row] += m.lam2mu[:, row] * ey


def apply_interface_sats(d_up: Fields, d_lo: Fields, f_up: Fields, f_lo: Fields,
                         iface: Interface, up: Region, lo: Region, part: str = "all",
                         penalties: PenaltyConstants = PENALTIES) -> None:
    """Add the eight coupling penalties of one interface in place."""
    t_up = interface_traces(f_up, up, "bottom")
    t_lo = interface_traces(f_lo, lo, "top")
    for name, grid in _TRACE_GRID.items():
        n_up, n_lo = iface.lower_to_upper_shape(grid)
        if t_up[name].shape[0] != n_up or t_lo[name].shape[0] != n_lo:
            raise ConfigurationError(
                f"trace length mismatch for {name} between regions {iface.upper} and {iface.lower}")
    res_up = {n: t_up[n] - iface.lower_to_upper(_TRACE_GRID[n], t_lo[n]) for n in _TRACE_GRID}
    res_lo = {n: t_lo[n] - iface.upper_to_lower(_TRACE_GRID[n], t_up[n]) for n in _TRACE_GRID}
    _apply_edge_penalties(d_up, up, "bottom", penalties.upper, res_up, part)
    _apply_edge_penalties(d_lo, lo, "top", penalties.lower, res_lo, part)


class ElasticProblem:
    """Semi-discretization of the elastic system on a region stack.

    ``free_surface_sats`` and ``interface_sats`` exist for verification runs;
    switching them off breaks energy conservation by exactly the edge fluxes.
    """

    def __init__(self, layout: Layout, source: SourceTerm | None = None,
                 free_surface_sats: bool = True, interface_sats: bool = True,
                 penalties: PenaltyConstants = PENALTIES):
        self.layout = layout
        self.source = source
        self.free_surface_sats = free_surface_sats
        self.interface_sats = interface_sats
        self.penalties = penalties

    @property
    def regions(self) -> tuple[Region, ...]:
        return self.layout.regions

    def zeros(self) -> State:
        return State.zeros(self.layout)

    def rates(self, state: State, t: float | None = None, part: str = "all") -> State:
        regions = self.layout.regions
        out = State([apply_derivatives(f, r, part) for f, r in zip(state, regions)])
        if self.free_surface_sats and part in ("all", "velocity"):
            apply_free_surface_sats(out[0], state[0], regions[0], "top", self.penalties)
            apply_free_surface_sats(out[-1], state[-1], regions[-1], "bottom", self.penalties)
        if self.interface_sats:
            for iface in self.layout.interfaces:
                u, l = iface.upper, iface.lower
                apply_interface_sats(out[u], out[l], state[u], state[l], iface,
                                     regions[u], regions[l], part, self.penalties)
        if t is not None and self.source is not None and part in ("all", "stress"):
            self.add_source(out, t)
        return out

    def add_source(self, out: State, t: float) -> None:
        s = self.source.value(t)
        if s == 0.0:
            return
        for d, w in zip(out, self.source.weights):
            if w is not None:
                d.sxx += s * w
                d.syy += s * w

    def rhs(self, state: State, t: float | None = None) -> State:
        """Time derivative of every field; the source is included when ``t`` is given."""
        return self.rates(state, t, "all")
