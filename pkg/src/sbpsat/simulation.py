"""Build a problem from a config, run it and collect energy and seismograms."""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from sbpsat.config import SimulationConfig
from sbpsat.diagnostics import Seismogram, locate_receiver, staggered_energy, write_outputs
from sbpsat.domain import Layout, build_regions, stack_specs
from sbpsat.semidiscrete import ElasticProblem, State
from sbpsat.timestepper import (CflReport, StepView, TimeGrid, build_source, cfl_check,
                                run_leapfrog, run_rk4)


def build_layout(config: SimulationConfig) -> Layout:
    specs = stack_specs(config.region_sizes(), y_bottom=config.y_bottom)
    return build_regions(specs, config.load_media())


def build_problem(config: SimulationConfig, layout: Layout | None = None) -> ElasticProblem:
    layout = layout or build_layout(config)
    spec = config.source_spec()
    source = build_source(spec, layout) if spec is not None else None
    return ElasticProblem(layout, source=source,
                          free_surface_sats=config.toggles.free_surface_sats,
                          interface_sats=config.toggles.interface_sats)


@dataclass
class SimulationResult:
    layout: Layout
    time: TimeGrid
    cfl: CflReport
    energy: list[tuple[float, float, float, float]] = field(default_factory=list)
    seismograms: list[Seismogram] = field(default_factory=list)
    final: State | None = None
    wall_time: float = 0.0

    @property
    def final_energy(self) -> float:
        return self.energy[-1][1] if self.energy else 0.0


def initial_state(config: SimulationConfig, layout: Layout, seed: int) -> State:
    if config.initial == "zero":
        return State.zeros(layout)
    return State.random(layout, np.random.default_rng(seed))


def run_simulation(config: SimulationConfig, seed: int = 0,
                   layout: Layout | None = None) -> SimulationResult:
    """Integrate the configured problem, sampling every ``decimation`` steps."""
    layout = layout or build_layout(config)
    problem = build_problem(config, layout)
    grid = TimeGrid.from_end(config.time.dt, config.time.t_end)
    result = SimulationResult(layout=layout, time=grid,
                              cfl=cfl_check(layout, grid.dt, config.cfl_safety))
    stencils = [locate_receiver(r, layout) for r in config.receiver_specs()]
    result.seismograms = [Seismogram(r) for r in config.receiver_specs()]
    every = config.outputs.decimation

    def record(view: StepView) -> None:
        if view.n % every:
            return
        e = staggered_energy(view.state, view.previous, layout)
        result.energy.append((view.t, e.e_total, e.e_kin, e.e_pot))
        for stencil, seis in zip(stencils, result.seismograms):
            seis.append(view.t, stencil.sample_centred(view.state, view.previous))

    integrate = run_leapfrog if config.mode == "leapfrog" else run_rk4
    start = _time.perf_counter()
    result.final = integrate(problem, initial_state(config, layout, seed), grid, [record])
    result.wall_time = _time.perf_counter() - start
    return result


def write_result(result: SimulationResult, out_dir) -> list:
    return write_outputs(out_dir, result.energy, result.seismograms)
