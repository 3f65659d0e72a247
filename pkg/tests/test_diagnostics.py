import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbpsat.diagnostics import (AUDIT_CASES, ReceiverSpec, Seismogram, audit_energy,
                                discrete_energy, energy_rate, locate_receiver, read_csv,
                                record_receiver, staggered_energy, write_outputs)
from sbpsat.domain import FIELD_SUBGRIDS, HomogeneousMedia, build_regions, stack_specs
from sbpsat.errors import ConfigurationError
from sbpsat.semidiscrete import FIELD_NAMES, ElasticProblem, State


class TestEnergy:
    def test_zero(self, two_region_layout):
        e = discrete_energy(State.zeros(two_region_layout), two_region_layout)
        assert e.e_total == 0.0 and e.e_kin == 0.0 and e.e_pot == 0.0

    def test_single_velocity_point(self, single_layout):
        lay = single_layout
        r = lay.regions[0]
        s = State.zeros(lay)
        s[0].vx[3, 2] = 1.5
        e = discrete_energy(s, lay)
        assert e.e_kin == pytest.approx(0.5 * r.xops.dx * r.yops.aN[2] * 1.0 * 1.5 ** 2, rel=1e-15)
        assert e.e_pot == 0.0

    def test_single_shear_point(self):
        # mu = rho cs^2 = 1, so the shear compliance is 1/2
        lay = build_regions(stack_specs([(0.5, 0.5, 1 / 16)]), HomogeneousMedia(1.0, 2.0, 1.0))
        r = lay.regions[0]
        s = State.zeros(lay)
        s[0].sxy[1, 0] = 2.0
        e = discrete_energy(s, lay)
        assert e.e_pot == pytest.approx(0.5 * r.xops.dx * r.yops.aM[0] * 2.0 ** 2, rel=1e-15)

    def test_per_region_sums(self, two_region_layout):
        s = State.random(two_region_layout, np.random.default_rng(0))
        e = discrete_energy(s, two_region_layout)
        assert len(e.per_region) == 2
        assert e.e_kin == pytest.approx(sum(k for k, _ in e.per_region), rel=1e-15)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_positive(self, hetero_layout, seed):
        s = State.random(hetero_layout, np.random.default_rng(seed))
        e = discrete_energy(s, hetero_layout)
        assert e.e_kin > 0 and e.e_pot > 0

    @given(st.integers(0, 2 ** 32 - 1), st.floats(-10, 10).filter(lambda c: abs(c) > 1e-3))
    @settings(max_examples=20, deadline=None)
    def test_quadratic_scaling(self, two_region_layout, seed, c):
        s = State.random(two_region_layout, np.random.default_rng(seed))
        e1 = discrete_energy(s, two_region_layout).e_total
        e2 = discrete_energy(c * s, two_region_layout).e_total
        assert e2 == pytest.approx(c * c * e1, rel=1e-13)

    def test_rate_matches_finite_difference(self, hetero_layout):
        lay = hetero_layout
        rng = np.random.default_rng(3)
        s, d = State.random(lay, rng), State.random(lay, rng)
        rate = energy_rate(s, d, lay)
        for eps in (1e-7, 1e-6, 1e-5):
            fd = (discrete_energy(s + eps * d, lay).e_total
                  - discrete_energy(s - eps * d, lay).e_total) / (2 * eps)
            assert fd == pytest.approx(rate, rel=1e-6, abs=1e-6)

    def test_staggered_without_previous(self, single_layout):
        s = State.random(single_layout, np.random.default_rng(1))
        assert (staggered_energy(s, None, single_layout).e_total
                == discrete_energy(s, single_layout).e_total)

    def test_staggered_equal_levels(self, single_layout):
        s = State.random(single_layout, np.random.default_rng(1))
        assert staggered_energy(s, s.copy(), single_layout).e_total == pytest.approx(
            discrete_energy(s, single_layout).e_total, rel=1e-15)


def _linear_state(layout, a=1.0, b=2.0):
    s = State.zeros(layout)
    for r, f in zip(layout.regions, s):
        for n in FIELD_NAMES:
            X, Y = r.spec.coords(FIELD_SUBGRIDS[n])
            f[n][:] = a * X + b * Y
    return s


class TestReceivers:
    def test_exact_at_node(self, two_region_layout):
        lay = two_region_layout
        s = State.random(lay, np.random.default_rng(0))
        r = lay.regions[0]
        X, Y = r.spec.coords(FIELD_SUBGRIDS["vy"])
        spec = ReceiverSpec(float(X[5, 4]), float(Y[5, 4]), "vy")
        assert record_receiver(s, spec, lay) == pytest.approx(s[0].vy[5, 4], rel=1e-14)

    @pytest.mark.parametrize("component", ["vx", "vy", "sxx", "sxy", "syy"])
    @pytest.mark.parametrize("x, y", [(0.3, 1.21), (0.41, 1.49), (0.62, 0.73), (0.2, 0.01),
                                      (0.7, 0.99)])
    def test_linear_field_exact(self, two_region_layout, component, x, y):
        s = _linear_state(two_region_layout)
        got = record_receiver(s, ReceiverSpec(x, y, component), two_region_layout)
        assert got == pytest.approx(x + 2 * y, rel=1e-12)

    def test_interface_belongs_to_upper_region(self, two_region_layout):
        st_ = locate_receiver(ReceiverSpec(0.5, 1.0, "syy"), two_region_layout)
        assert st_.region == 0

    def test_bad_component(self):
        with pytest.raises(ConfigurationError):
            ReceiverSpec(0.0, 0.0, "pressure")

    def test_outside_domain(self, two_region_layout):
        with pytest.raises(ConfigurationError):
            locate_receiver(ReceiverSpec(0.5, 2.0), two_region_layout)

    def test_centred_averages_velocity(self, single_layout):
        rng = np.random.default_rng(2)
        a, b = State.random(single_layout, rng), State.random(single_layout, rng)
        st_ = locate_receiver(ReceiverSpec(0.2, 0.3, "vx"), single_layout)
        assert st_.sample_centred(a, b) == pytest.approx(0.5 * (st_.sample(a) + st_.sample(b)))
        st_ = locate_receiver(ReceiverSpec(0.2, 0.3, "sxx"), single_layout)
        assert st_.sample_centred(a, b) == st_.sample(a)


class TestOutputs:
    def test_energy_only(self, tmp_path):
        written = write_outputs(tmp_path, [(0.0, 1.0, 0.5, 0.5)], [])
        assert [p.name for p in written] == ["energy.csv"]
        assert not (tmp_path / "seismogram.csv").exists()
        assert (tmp_path / "energy.csv").read_text().splitlines()[0] == "t,e_total,e_kin,e_pot"

    def test_seismogram_file(self, tmp_path):
        rng = np.random.default_rng(0)
        seis = [Seismogram(ReceiverSpec(0.1, 0.2, "vx")), Seismogram(ReceiverSpec(0.3, 0.4, "vy"))]
        times = np.arange(10) * 0.01
        for t in times:
            for s in seis:
                s.append(float(t), float(rng.standard_normal()))
        write_outputs(tmp_path, [(0.0, 1.0, 0.5, 0.5)], seis)
        raw = (tmp_path / "seismogram.csv").read_bytes()
        assert b"\r" not in raw
        lines = raw.decode().splitlines()
        assert lines[0] == "t,rec0_vx,rec1_vy"
        assert len(lines) == 11
        assert not any(line.endswith(",") for line in lines)
        header, data = read_csv(tmp_path / "seismogram.csv")
        assert data.shape == (10, 3)
        np.testing.assert_array_equal(data[:, 0], times)
        np.testing.assert_array_equal(data[:, 2], seis[1].values)

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=4, max_size=4))
    @settings(max_examples=30, deadline=None)
    def test_round_trip_bit_exact(self, tmp_path_factory, row):
        d = tmp_path_factory.mktemp("rt")
        write_outputs(d, [row], [])
        _, data = read_csv(d / "energy.csv")
        assert [float(v) for v in data[0]] == row

    def test_mismatched_lengths(self, tmp_path):
        a, b = Seismogram(ReceiverSpec(0, 0)), Seismogram(ReceiverSpec(0, 0))
        a.append(0.0, 1.0)
        with pytest.raises(ValueError):
            write_outputs(tmp_path, [], [a, b])


class TestAudit:
    def test_cases(self, two_region_layout):
        cases = audit_energy(two_region_layout, 5, np.random.default_rng(0))
        assert [c.name for c in cases] == [c[0] for c in AUDIT_CASES]
        assert all(c.passed() for c in cases), [(c.name, c.max_rate, c.max_oracle_mismatch)
                                                for c in cases]
        assert cases[0].max_rate <= 1e-12
        # without penalties the rate is visibly nonzero
        assert cases[-1].max_rate > 1e-6

    def test_rhs_rate_zero_for_full_problem(self, hetero_layout):
        s = State.random(hetero_layout, np.random.default_rng(0))
        pb = ElasticProblem(hetero_layout)
        assert abs(energy_rate(s, pb.rhs(s), hetero_layout)) < 1e-12 * discrete_energy(
            s, hetero_layout).e_total
