"""Staggered leapfrog and RK4 integration of the semi-discrete system."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from sbpsat.domain import Layout
from sbpsat.errors import ConfigurationError, NumericalError
from sbpsat.semidiscrete import (STRESS_NAMES, VELOCITY_NAMES, ElasticProblem, SourceTerm,
                                 State)

log = logging.getLogger(__name__)

CFL_SAFETY = 0.6


def ricker(t, f0: float, t0: float, amplitude: float = 1.0):
    """Ricker wavelet with peak frequency ``f0`` centred at ``t0``."""
    arg = (math.pi * f0 * (np.asarray(t, dtype=float) - t0)) ** 2
    out = amplitude * (1.0 - 2.0 * arg) * np.exp(-arg)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SourceSpec:
    """Explosive source; ``width > 0`` spreads it as a Gaussian instead of a point."""

    x: float
    y: float
    f0: float
    t0: float
    amplitude: float = 1.0
    width: float = 0.0

    def __post_init__(self):
        if not self.f0 > 0:
            raise ConfigurationError(f"source f0 must be positive, got {self.f0}")
        if self.width < 0:
            raise ConfigurationError(f"source width must be >= 0, got {self.width}")

    @property
    def t_off(self) -> float:
        """Time after which the wavelet is switched off."""
        return self.t0 + 2.0 / self.f0


def build_source(spec: SourceSpec, layout: Layout) -> SourceTerm:
    """Spatial weights of ``spec`` on the normal-stress grid of each region.

    A point source lands on the nearest normal-stress point of the owning
    region.  A Gaussian source is sampled in every region and normalised so
    that its discrete integral is one.
    """
    owner = layout.owner(spec.y)
    weights: list[np.ndarray | None] = []
    if spec.width == 0.0:
        for region in layout.regions:
            if region.index != owner:
                weights.append(None)
                continue
            s = region.spec
            ix = int(round(((spec.x % s.Lx) / s.h))) % s.nx
            iy = int(np.clip(round((spec.y - s.y_bottom) / s.h), 0, s.nyN - 1))
            w = np.zeros((s.nx, s.nyN))
            w[ix, iy] = 1.0
            weights.append(w)
    else:
        total = 0.0
        for region in layout.regions:
            s = region.spec
            X, Y = np.meshgrid(s.x_coords("N"), s.y_coords("N"), indexing="ij")
            dxp = (X - spec.x + 0.5 * s.Lx) % s.Lx - 0.5 * s.Lx
            w = np.exp(-(dxp ** 2 + (Y - spec.y) ** 2) / spec.width ** 2)
            total += float(np.sum(w * (region.xops.dx * region.yops.aN)[None, :]))
            weights.append(w)
        weights = [w / total for w in weights]
    return SourceTerm(
        weights=tuple(weights),
        wavelet=lambda t: ricker(t, spec.f0, spec.t0, spec.amplitude),
        t_off=spec.t_off)


@dataclass(frozen=True)
class TimeGrid:
    dt: float
    n_steps: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 0:
            raise ConfigurationError(f"n_steps must be >= 0, got {self.n_steps}")

    @classmethod
    def from_end(cls, dt: float, t_end: float) -> "TimeGrid":
        if not dt > 0:
            raise ConfigurationError(f"dt must be positive, got {dt}")
        return cls(dt=dt, n_steps=int(round(t_end / dt)))

    @property
    def t_end(self) -> float:
        return self.dt * self.n_steps


@dataclass(frozen=True)
class CflReport:
    dt: float
    dt_max: float
    safety: float

    @property
    def ok(self) -> bool:
        return self.dt <= self.dt_max

    def message(self) -> str:
        if self.ok:
            return f"dt = {self.dt:g} within CFL bound {self.dt_max:g}"
        return (f"dt = {self.dt:g} exceeds the CFL estimate; "
                f"suggest dt <= {self.dt_max:g} (safety {self.safety:g})")


def cfl_check(layout: Layout, dt: float, safety: float = CFL_SAFETY) -> CflReport:
    """Compare ``dt`` with ``safety * min(h / cp_max)`` over the regions."""
    dt_max = safety * min(r.spec.h / r.media.cp_max for r in layout.regions)
    report = CflReport(dt=dt, dt_max=dt_max, safety=safety)
    if not report.ok:
        log.warning(report.message())
    return report


@dataclass
class StepView:
    """Wavefield at integer time level ``n`` as seen by hooks.

    ``state`` holds the stresses at ``t_n``.  For leapfrog its velocities are
    ``v^{n+1/2}`` and ``previous`` holds ``v^{n-1/2}``; for one-step methods
    ``previous`` is ``None`` and every field lives at ``t_n``.
    """

    n: int
    t: float
    state: State
    previous: State | None = None

    def centred(self) -> State:
        """State with velocities averaged to ``t_n`` when they are staggered."""
        if self.previous is None:
            return self.state
        out = self.state.copy()
        for f, p in zip(out, self.previous):
            f.vx = 0.5 * (f.vx + p.vx)
            f.vy = 0.5 * (f.vy + p.vy)
        return out


Hook = Callable[[StepView], None]


# blow-up is reported through _check_finite rather than floating point warnings
_QUIET = dict(over="ignore", invalid="ignore")


def _check_finite(state: State, step: int) -> None:
    if not state.is_finite():
        raise NumericalError(f"non-finite values in the wavefield at step {step}", step=step)


def run_leapfrog(problem: ElasticProblem, state0: State, time: TimeGrid,
                 hooks: Sequence[Hook] = ()) -> State:
    """Velocities at half steps, stresses at whole steps.

    ``state0`` holds ``v^{-1/2}`` and ``sigma^0``; the returned state holds
    ``v^{N-1/2}`` and ``sigma^N``.  Hooks run once per level ``n = 0 .. N``
    after the velocity update, so they see both velocity levels around ``t_n``.
    """
    with np.errstate(**_QUIET):
        return _leapfrog_loop(problem, state0, time, hooks)


def _leapfrog_loop(problem, state0, time, hooks) -> State:
    state = state0.copy()
    dt = time.dt
    for n in range(time.n_steps + 1):
        t = n * dt
        previous = State([f.copy() for f in state]) if hooks or n == time.n_steps else None
        state.axpy(dt, problem.rates(state, part="velocity"), VELOCITY_NAMES)
        _check_finite(state, n)
        if hooks:
            view = StepView(n=n, t=t, state=state, previous=previous)
            for hook in hooks:
                hook(view)
        if n == time.n_steps:
            # the last half step only serves the time-centred output
            return previous
        state.axpy(dt, problem.rates(state, t + 0.5 * dt, part="stress"), STRESS_NAMES)
    return state


def run_rk4(problem: ElasticProblem, state0: State, time: TimeGrid,
            hooks: Sequence[Hook] = ()) -> State:
    """Classical fourth-order Runge-Kutta on the full first-order system."""
    with np.errstate(**_QUIET):
        return _rk4_loop(problem, state0, time, hooks)


def _rk4_loop(problem, state0, time, hooks) -> State:
    state = state0.copy()
    dt = time.dt
    for n in range(time.n_steps + 1):
        t = n * dt
        if hooks:
            view = StepView(n=n, t=t, state=state)
            for hook in hooks:
                hook(view)
        if n == time.n_steps:
            break
        k1 = problem.rhs(state, t)
        k2 = problem.rhs(state + (0.5 * dt) * k1, t + 0.5 * dt)
        k3 = problem.rhs(state + (0.5 * dt) * k2, t + 0.5 * dt)
        k4 = problem.rhs(state + dt * k3, t + dt)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_finite(state, n + 1)
    return state
