"""Region layout, staggered subgrids and media sampling.

Regions are horizontal strips listed top to bottom, periodic in x with a
common width.  Each region carries five staggered subgrids::

    vx   on  Mx (x) Ny
    vy   on  Nx (x) My
    sxx  on  Nx (x) Ny   (shared with syy)
    sxy  on  Mx (x) My

Arrays are indexed ``[ix, iy]`` with ``iy = 0`` at the bottom of the region.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from sbpsat.errors import ConfigurationError, MediaError
from sbpsat.operators1d import (
    MIN_BOUNDED_POINTS, BoundedOps, PeriodicOps, build_periodic_ops, derive_bounded_ops)
from sbpsat.transfer import TransferPair, build_transfer_pair

RASTER_MAGIC = "ELMEDIA1"


class SubgridId(enum.Enum):
    VX = ("M", "N")
    VY = ("N", "M")
    SXX = ("N", "N")
    SYY = ("N", "N")
    SXY = ("M", "M")

    @property
    def x_grid(self) -> str:
        return self.value[0]

    @property
    def y_grid(self) -> str:
        return self.value[1]


FIELD_SUBGRIDS = {
    "vx": SubgridId.VX,
    "vy": SubgridId.VY,
    "sxx": SubgridId.SXX,
    "sxy": SubgridId.SXY,
    "syy": SubgridId.SYY,
}


def _as_count(length: float, h: float, what: str) -> int:
    ratio = length / h
    n = int(round(ratio))
    if n <= 0 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise ConfigurationError(f"{what} = {length} is not a whole multiple of h = {h}")
    return n


@dataclass(frozen=True)
class RegionSpec:
    """Geometry of one uniform region."""

    Lx: float
    Ly: float
    h: float
    y_bottom: float = 0.0

    def __post_init__(self):
        if not (self.Lx > 0 and self.Ly > 0 and self.h > 0):
            raise ConfigurationError(
                f"region sizes must be positive (Lx={self.Lx}, Ly={self.Ly}, h={self.h})")
        _as_count(self.Lx, self.h, "Lx")
        _as_count(self.Ly, self.h, "Ly")

    @property
    def nx(self) -> int:
        return _as_count(self.Lx, self.h, "Lx")

    @property
    def nyN(self) -> int:
        return _as_count(self.Ly, self.h, "Ly") + 1

    @property
    def nyM(self) -> int:
        return self.nyN - 1

    @property
    def y_top(self) -> float:
        return self.y_bottom + self.Ly

    def x_coords(self, grid: str) -> np.ndarray:
        offset = 0.5 if grid == "M" else 0.0
        return (np.arange(self.nx) + offset) * self.h

    def y_coords(self, grid: str) -> np.ndarray:
        if grid == "M":
            return self.y_bottom + (np.arange(self.nyM) + 0.5) * self.h
        return self.y_bottom + np.arange(self.nyN) * self.h

    def shape(self, sub: SubgridId) -> tuple[int, int]:
        ny = self.nyN if sub.y_grid == "N" else self.nyM
        return (self.nx, ny)

    def coords(self, sub: SubgridId) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid of point coordinates for ``sub``, shaped ``(nx, ny)``."""
        return np.meshgrid(self.x_coords(sub.x_grid), self.y_coords(sub.y_grid), indexing="ij")

    def contains_y(self, y: float) -> bool:
        tol = 1e-12 * max(1.0, abs(self.y_top), abs(self.y_bottom))
        return self.y_bottom - tol <= y <= self.y_top + tol


# {{{ media


def lame_from_speeds(rho, cp, cs):
    """Lame parameters ``(lam, mu)`` from density and wave speeds."""
    rho = np.asarray(rho, dtype=np.float64)
    cp = np.asarray(cp, dtype=np.float64)
    cs = np.asarray(cs, dtype=np.float64)
    lam = rho * (cp ** 2 - 2.0 * cs ** 2)
    mu = rho * cs ** 2
    _check_lame(lam, mu)
    return lam, mu


def _check_lame(lam, mu, coords=None) -> None:
    bad = ~((mu > 0) & (lam + mu > 0))
    if np.any(bad):
        idx = np.flatnonzero(np.ravel(bad))[0]
        where = ""
        if coords is not None:
            x, y = (np.ravel(c)[idx] for c in coords)
            where = f" at (x={x:.6g}, y={y:.6g})"
        lam_b, mu_b = np.broadcast_arrays(lam, mu)
        l_, m_ = np.ravel(lam_b)[idx], np.ravel(mu_b)[idx]
        raise MediaError(
            f"media not positive definite{where}: lambda={l_:.6g}, mu={m_:.6g} "
            "(need mu > 0 and lambda + mu > 0)")


def compliance_from_lame(lam, mu):
    """Plane compliance coefficients ``(cA, cB, cS)``.

    Normal strains are ``exx = cA sxx - cB syy`` and ``eyy = cA syy - cB sxx``;
    shear strain is ``exy = cS sxy``.
    """
    lam = np.asarray(lam, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    _check_lame(lam, mu)
    denom = 4.0 * mu * (lam + mu)
    return (lam + 2.0 * mu) / denom, lam / denom, 1.0 / (2.0 * mu)


@dataclass(frozen=True)
class HomogeneousMedia:
    rho: float
    cp: float
    cs: float

    def sample(self, x, y):
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        return (np.full(shape, float(self.rho)), np.full(shape, float(self.cp)),
                np.full(shape, float(self.cs)))

    @property
    def cp_max(self) -> float:
        return float(self.cp)


@dataclass(frozen=True)
class MediaRaster:
    """Gridded media; node ``(i, j)`` sits at ``(x0 + i dx, y0 + j dy)``.

    Arrays are stored row-major with shape ``(ny, nx)``.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float
    y0: float
    rho: np.ndarray
    cp: np.ndarray
    cs: np.ndarray

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ConfigurationError(f"raster must have positive counts, got {self.nx}x{self.ny}")
        if not (self.dx > 0 and self.dy > 0):
            raise ConfigurationError("raster spacings must be positive")
        for name in ("rho", "cp", "cs"):
            arr = getattr(self, name)
            if arr.shape != (self.ny, self.nx):
                raise ConfigurationError(
                    f"raster field {name} has shape {arr.shape}, expected {(self.ny, self.nx)}")
        if np.any(self.rho <= 0) or np.any(self.cp <= 0) or np.any(self.cs < 0):
            raise MediaError("raster requires rho > 0, cp > 0 and cs >= 0")

    def _axis(self, q, q0, dq, n):
        f = np.clip((np.asarray(q, dtype=np.float64) - q0) / dq, 0.0, n - 1)
        i0 = np.minimum(np.floor(f).astype(np.int64), max(n - 2, 0))
        return i0, f - i0

    def sample(self, x, y):
        """Bilinear interpolation of (rho, cp, cs), clamped to the raster edges."""
        x, y = np.broadcast_arrays(np.asarray(x, dtype=np.float64),
                                   np.asarray(y, dtype=np.float64))
        i0, tx = self._axis(x, self.x0, self.dx, self.nx)
        j0, ty = self._axis(y, self.y0, self.dy, self.ny)
        i1 = np.minimum(i0 + 1, self.nx - 1)
        j1 = np.minimum(j0 + 1, self.ny - 1)
        out = []
        for arr in (self.rho, self.cp, self.cs):
            v = ((1 - tx) * (1 - ty) * arr[j0, i0] + tx * (1 - ty) * arr[j0, i1]
                 + (1 - tx) * ty * arr[j1, i0] + tx * ty * arr[j1, i1])
            out.append(v)
        return tuple(out)

    @property
    def cp_max(self) -> float:
        return float(self.cp.max())


def layered_raster(width: float, height: float, spacing: float, y0: float = 0.0,
                   cp_range: tuple[float, float] = (1600.0, 3600.0),
                   vp_vs: float = 1.9, n_layers: int = 4) -> MediaRaster:
    """Smooth synthetic layered model, slower at the top, with gently dipping layers.

    Density follows Gardner's relation ``rho = 310 cp^0.25``; every point has
    ``cs = cp / vp_vs > 0``.
    """
    nx = int(round(width / spacing)) + 1
    ny = int(round(height / spacing)) + 1
    x = np.arange(nx) * spacing
    y = y0 + np.arange(ny) * spacing
    X, Y = np.meshgrid(x, y)
    depth = (y0 + height - Y) / height + 0.05 * np.sin(2 * np.pi * X / width)
    steps = sum(0.5 * (1 + np.tanh((depth - (k + 0.5) / n_layers) * 12 * n_layers))
                for k in range(n_layers))
    lo, hi = cp_range
    cp = lo + (hi - lo) * (0.25 * depth + 0.75 * steps / n_layers)
    cp = np.clip(cp, lo, hi)
    return MediaRaster(nx=nx, ny=ny, dx=spacing, dy=spacing, x0=0.0, y0=y0,
                       rho=310.0 * cp ** 0.25, cp=cp, cs=cp / vp_vs)


def write_raster(path: str | os.PathLike, raster: MediaRaster) -> None:
    header = (f"{RASTER_MAGIC} {raster.nx} {raster.ny} {raster.dx!r} {raster.dy!r} "
              f"{raster.x0!r} {raster.y0!r}\n")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        for arr in (raster.rho, raster.cp, raster.cs):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_raster(path: str | os.PathLike) -> MediaRaster:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise ConfigurationError(f"cannot read media raster {path}: {exc}") from exc
    end = blob.find(b"\n")
    if end < 0:
        raise ConfigurationError(f"{path}: missing raster header line")
    tokens = blob[:end].decode("ascii", errors="replace").split()
    if len(tokens) != 7 or tokens[0] != RASTER_MAGIC:
        raise ConfigurationError(
            f"{path}: header must read '{RASTER_MAGIC} nx ny dx dy x0 y0', got {blob[:end]!r}")
    try:
        nx, ny = int(tokens[1]), int(tokens[2])
        dx, dy, x0, y0 = (float(t) for t in tokens[3:])
    except ValueError as exc:
        raise ConfigurationError(f"{path}: malformed header: {exc}") from exc
    count = nx * ny
    payload = blob[end + 1:]
    if len(payload) != 3 * 8 * count:
        raise ConfigurationError(
            f"{path}: expected {3 * 8 * count} bytes of data for {nx}x{ny}, got {len(payload)}")
    data = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    rho, cp, cs = (data[k * count:(k + 1) * count].reshape(ny, nx) for k in range(3))
    return MediaRaster(nx=nx, ny=ny, dx=dx, dy=dy, x0=x0, y0=y0, rho=rho, cp=cp, cs=cs)


@dataclass(frozen=True)
class RegionMedia:
    """Coefficients sampled at the points of the field that uses them."""

    rho_vx: np.ndarray
    rho_vy: np.ndarray
    lam: np.ndarray
    lam2mu: np.ndarray
    mu_xy: np.ndarray
    cA: np.ndarray
    cB: np.ndarray
    cS: np.ndarray
    cp_max: float


def sample_media(media: HomogeneousMedia | MediaRaster, region: RegionSpec) -> RegionMedia:
    """Sample (rho, cp, cs) at each staggered point, then convert pointwise."""
    def at(sub: SubgridId):
        coords = region.coords(sub)
        rho, cp, cs = media.sample(*coords)
        return coords, rho, cp, cs

    _, rho_vx, cp_vx, _ = at(SubgridId.VX)
    _, rho_vy, cp_vy, _ = at(SubgridId.VY)
    cn, rho_n, cp_n, cs_n = at(SubgridId.SXX)
    cm, rho_m, cp_m, cs_m = at(SubgridId.SXY)

    lam_n, mu_n = rho_n * (cp_n ** 2 - 2 * cs_n ** 2), rho_n * cs_n ** 2
    _check_lame(lam_n, mu_n, cn)
    lam_m, mu_m = rho_m * (cp_m ** 2 - 2 * cs_m ** 2), rho_m * cs_m ** 2
    _check_lame(lam_m, mu_m, cm)

    cA, cB, _ = compliance_from_lame(lam_n, mu_n)
    _, _, cS = compliance_from_lame(lam_m, mu_m)
    cp_max = float(max(cp_vx.max(), cp_vy.max(), cp_n.max(), cp_m.max()))
    return RegionMedia(
        rho_vx=rho_vx, rho_vy=rho_vy, lam=lam_n, lam2mu=lam_n + 2 * mu_n, mu_xy=mu_m,
        cA=cA, cB=cB, cS=cS, cp_max=cp_max)


# }}}


# {{{ layout


@dataclass(frozen=True)
class Region:
    index: int
    spec: RegionSpec
    media: RegionMedia
    xops: PeriodicOps
    yops: BoundedOps

    def shape(self, name: str) -> tuple[int, int]:
        return self.spec.shape(FIELD_SUBGRIDS[name])


@dataclass(frozen=True)
class Interface:
    """Horizontal interface between ``upper`` (bottom edge) and ``lower`` (top edge)."""

    upper: int
    lower: int
    y: float
    pair: TransferPair
    upper_is_fine: bool

    def lower_to_upper(self, kind: str, trace: np.ndarray) -> np.ndarray:
        return self._op(kind, to_upper=True) @ trace

    def upper_to_lower(self, kind: str, trace: np.ndarray) -> np.ndarray:
        return self._op(kind, to_upper=False) @ trace

    def lower_to_upper_shape(self, kind: str) -> tuple[int, int]:
        """(upper, lower) trace lengths expected on ``kind`` lines."""
        return self._op(kind, to_upper=True).shape

    def _op(self, kind: str, to_upper: bool):
        p = self.pair
        c2f, f2c = (p.tN_c2f, p.tN_f2c) if kind == "N" else (p.tM_c2f, p.tM_f2c)
        # into the fine side uses interpolation, into the coarse side restriction
        return c2f if to_upper == self.upper_is_fine else f2c


@dataclass(frozen=True)
class Layout:
    regions: tuple[Region, ...]
    interfaces: tuple[Interface, ...] = field(default=())

    @property
    def Lx(self) -> float:
        return self.regions[0].spec.Lx

    @property
    def y_top(self) -> float:
        return self.regions[0].spec.y_top

    @property
    def y_bottom(self) -> float:
        return self.regions[-1].spec.y_bottom

    def owner(self, y: float) -> int:
        """Index of the region containing ordinate ``y``; the upper one wins ties."""
        for region in self.regions:
            if region.spec.contains_y(y):
                return region.index
        raise ConfigurationError(
            f"y = {y} lies outside the model [{self.y_bottom}, {self.y_top}]")


def stack_specs(sizes: Sequence[tuple[float, float, float]], y_bottom: float = 0.0) -> list[RegionSpec]:
    """Region specs from top-down ``(Lx, Ly, h)`` triples with the stack bottom at ``y_bottom``."""
    specs = []
    y = y_bottom
    for Lx, Ly, h in reversed(list(sizes)):
        specs.append(RegionSpec(Lx=Lx, Ly=Ly, h=h, y_bottom=y))
        y += Ly
    return specs[::-1]


def build_regions(specs: Sequence[RegionSpec], media: HomogeneousMedia | MediaRaster,
                  q_b: int = 2, q_p: int = 2) -> Layout:
    """Validate a top-down region stack, sample media and build operators."""
    if not specs:
        raise ConfigurationError("at least one region is required")
    Lx = specs[0].Lx
    for k, s in enumerate(specs):
        if not np.isclose(s.Lx, Lx, rtol=1e-12, atol=0.0):
            raise ConfigurationError(f"region {k} width {s.Lx} differs from region 0 width {Lx}")
        if s.nyN < MIN_BOUNDED_POINTS:
            raise ConfigurationError(
                f"region {k} has {s.nyN} N points vertically, need >= {MIN_BOUNDED_POINTS}")

    regions = []
    for k, s in enumerate(specs):
        try:
            rm = sample_media(media, s)
        except MediaError as exc:
            raise MediaError(f"region {k}: {exc}") from exc
        regions.append(Region(index=k, spec=s, media=rm,
                              xops=build_periodic_ops(s.nx, s.h),
                              yops=derive_bounded_ops(s.nyN, s.h, q_b, q_p)))

    interfaces = []
    for k in range(len(specs) - 1):
        up, lo = specs[k], specs[k + 1]
        tol = 1e-9 * max(1.0, abs(up.y_bottom))
        if abs(up.y_bottom - lo.y_top) > tol:
            raise ConfigurationError(
                f"regions {k} and {k + 1} are misaligned: {up.y_bottom} vs {lo.y_top}")
        ratio = lo.h / up.h
        if np.isclose(ratio, 1.0, rtol=1e-12):
            pair = build_transfer_pair(up.nx, up.nx, up.h, up.h)
            upper_fine = True
        elif np.isclose(ratio, 2.0, rtol=1e-12):
            pair = build_transfer_pair(lo.nx, up.nx, lo.h, up.h)
            upper_fine = True
        elif np.isclose(ratio, 0.5, rtol=1e-12):
            pair = build_transfer_pair(up.nx, lo.nx, up.h, lo.h)
            upper_fine = False
        else:
            raise ConfigurationError(
                f"unsupported spacing ratio between regions {k} and {k + 1}: "
                f"h={up.h} over h={lo.h} (only 1:1 and 1:2 are available)")
        interfaces.append(Interface(upper=k, lower=k + 1, y=up.y_bottom, pair=pair,
                                    upper_is_fine=upper_fine))
    return Layout(regions=tuple(regions), interfaces=tuple(interfaces))


# }}}
