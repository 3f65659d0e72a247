import json
from pathlib import Path

import numpy as np
import pytest

from sbpsat.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, main
from sbpsat.config import load_config, parse_config
from sbpsat.diagnostics import read_csv
from sbpsat.domain import layered_raster, write_raster
from sbpsat.errors import ConfigurationError


def small_config(**overrides):
    cfg = {
        "regions": [{"Lx": 0.5, "Ly": 0.25, "h": 1 / 32}, {"Lx": 0.5, "Ly": 0.5, "h": 1 / 16}],
        "media": {"homogeneous": {"rho": 1.0, "cp": 2.0, "cs": 1.0}},
        "time": {"dt": 0.004, "t_end": 0.2},
        "source": {"x": 0.25, "y": 0.6, "f0": 6.0, "t0": 0.1},
        "receivers": [{"x": 0.1, "y": 0.7, "component": "vx"},
                      {"x": 0.3, "y": 0.2, "component": "vy"}],
    }
    cfg.update(overrides)
    return cfg


def write_config(path, cfg):
    path.write_text(json.dumps(cfg))
    return path


class TestConfig:
    def test_defaults(self):
        c = parse_config(small_config())
        assert c.mode == "leapfrog" and c.outputs.decimation == 1
        assert c.toggles.free_surface_sats and c.toggles.interface_sats

    @pytest.mark.parametrize("patch, where", [
        ({"time": {"dt": -1.0, "t_end": 1.0}}, "time.dt"),
        ({"media": {}}, "media"),
        ({"regions": []}, "regions"),
        ({"receivers": [{"x": 0, "y": 0, "component": "p"}]}, "receivers.0.component"),
        ({"colour": "red"}, "colour"),
        ({"outputs": {"decimation": 0}}, "outputs.decimation"),
    ])
    def test_errors_are_located(self, patch, where):
        with pytest.raises(ConfigurationError, match=where.replace(".", r"\.")):
            parse_config(small_config(**patch))

    def test_bad_json(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text("{ not json")
        with pytest.raises(ConfigurationError, match="line 1"):
            load_config(p)

    def test_raster_relative_to_config(self, tmp_path):
        sub = tmp_path / "cfg"
        sub.mkdir()
        write_raster(sub / "m.media", layered_raster(0.5, 0.75, 0.05))
        cfg = small_config(media={"raster": "m.media"})
        c = load_config(write_config(sub / "c.json", cfg))
        assert c.load_media().nx == 11

    def test_missing_raster(self, tmp_path):
        c = load_config(write_config(tmp_path / "c.json", small_config(media={"raster": "x"})))
        with pytest.raises(ConfigurationError, match="media.raster"):
            c.load_media()


class TestRunCommand:
    def test_writes_csvs(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.json", small_config())
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--output", str(out)]) == EXIT_OK
        text = capsys.readouterr().out
        assert "steps: 50" in text and "final e_total" in text
        header, energy = read_csv(out / "energy.csv")
        assert header == ["t", "e_total", "e_kin", "e_pot"]
        assert energy.shape == (51, 4)
        header, seis = read_csv(out / "seismogram.csv")
        assert header == ["t", "rec0_vx", "rec1_vy"]
        assert np.any(seis[:, 1] != 0)

    def test_same_seed_same_bytes(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", small_config(initial="random", source=None))
        blobs = []
        for k in range(2):
            out = tmp_path / f"o{k}"
            assert main(["run", "--config", str(cfg), "--output", str(out), "--seed", "7"]) == 0
            blobs.append((out / "energy.csv").read_bytes() + (out / "seismogram.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_random_state_energy_constant(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", small_config(initial="random", source=None))
        main(["run", "--config", str(cfg), "--output", str(tmp_path / "o")])
        _, energy = read_csv(tmp_path / "o" / "energy.csv")
        assert np.max(np.abs(energy[:, 1] / energy[0, 1] - 1)) < 1e-12

    def test_threads_flag(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", small_config())
        assert main(["--threads", "1", "run", "--config", str(cfg),
                     "--output", str(tmp_path / "o")]) == EXIT_OK

    def test_config_error_exit(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.json", small_config(time={"dt": 0, "t_end": 1}))
        assert main(["run", "--config", str(cfg)]) == EXIT_CONFIG
        assert "time.dt" in capsys.readouterr().err

    def test_missing_config(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG

    def test_unstable_exit(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.json",
                           small_config(time={"dt": 0.05, "t_end": 200.0}, initial="random"))
        assert main(["run", "--config", str(cfg), "--output", str(tmp_path / "o")]) == EXIT_NUMERICAL
        err = capsys.readouterr().err
        assert "step" in err and "reduce dt" in err

    def test_unwritable_output(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", small_config())
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert main(["run", "--config", str(cfg), "--output", str(blocker / "x")]) == EXIT_IO


class TestVerifyOperators:
    def test_default_passes(self, capsys, tmp_path):
        report = tmp_path / "r.json"
        assert main(["verify-operators", "--json", str(report)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "all checks passed" in out
        assert "fallback" not in out
        assert len(json.loads(report.read_text())) == 8

    def test_fallback_reported(self, capsys):
        assert main(["verify-operators", "--qb", "3", "--sizes", "9"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "ladder fallback used" in out and "(3,2) inconsistent" in out

    @pytest.mark.parametrize("flag", ["--sizes", "--periodic-sizes", "--transfer-sizes"])
    def test_too_small(self, flag):
        assert main(["verify-operators", flag, "3"]) == EXIT_CONFIG


def test_energy_audit(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", small_config())
    assert main(["energy-audit", "--config", str(cfg), "--n-random", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "all_sats" in out and "PASS" in out
    assert out.count("matches edge flux oracle") == 3


def test_derive_operators(tmp_path, capsys):
    assert main(["derive-operators"]) == EXIT_OK
    assert "43291/73728" in capsys.readouterr().out
    target = tmp_path / "tables.txt"
    assert main(["derive-operators", "--output", str(target)]) == EXIT_OK
    assert "12207/8192" in target.read_text()


def test_shipped_configs_parse():
    root = Path(__file__).resolve().parents[1] / "configs"
    for path in sorted(root.glob("*.json")):
        c = load_config(path)
        assert c.load_media() is not None
