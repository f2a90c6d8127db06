from dataclasses import replace

import numpy as np
import pytest
from conftest import random_config as _random_config
from conftest import random_state as _random_state

from acidfront import GridSpec, SimState
from acidfront.monitor import ViolationReport
from acidfront.scenarios import PRESET_NAMES, make_preset
from acidfront.snapshot_io import (
    MANIFEST_VERSION,
    MidlineOffGridError,
    ParseError,
    RunManifest,
    SnapshotIoError,
    config_lines,
    read_config,
    read_field_csv,
    read_manifest,
    read_snapshot,
    read_trajectory,
    trajectory_filename,
    write_config,
    write_manifest,
    write_section,
    write_snapshot,
    write_trajectory,
)
from acidfront.theta import NodeTrajectory


class TestSnapshotRoundTrip:
    def test_bit_exact_round_trip(self, tmp_path, rng):
        grid = GridSpec(L=1.0, n=13)
        s = _random_state(rng, 13)
        write_snapshot(s, tmp_path, "t1.25")
        back = read_snapshot(tmp_path, "t1.25", 1.25)
        assert np.array_equal(back.N, s.N)
        assert np.array_equal(back.A, s.A)
        assert np.array_equal(back.H, s.H)

    def test_rewrite_is_byte_identical(self, tmp_path, rng):
        s = _random_state(rng, 9)
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        [p1, *_] = write_snapshot(s, tmp_path / "a", "x")
        [p2, *_] = write_snapshot(s, tmp_path / "b", "x")
        assert p1.read_bytes() == p2.read_bytes()

    def test_label_with_separator_rejected(self, tmp_path, rng):
        s = _random_state(rng, 5)
        with pytest.raises(SnapshotIoError):
            write_snapshot(s, tmp_path, "evil/label")
        with pytest.raises(SnapshotIoError):
            write_snapshot(s, tmp_path, "..")

    def test_ragged_rows_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(ParseError, match="line 2"):
            read_field_csv(bad)

    def test_bad_number_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(ParseError, match="line 2"):
            read_field_csv(bad)


class TestSection:
    def test_midline_section_content(self, tmp_path):
        grid = GridSpec(L=1.0, n=5)
        s = SimState(0.0, np.ones((5, 5)), np.zeros((5, 5)), np.zeros((5, 5)))
        s.A[2, :] = [0.0, 0.1, 0.5, 0.1, 0.0]
        path = write_section(s, grid, tmp_path, "t0")
        lines = path.read_text().splitlines()
        assert lines[0] == "x2,N,A,H"
        assert len(lines) == 6
        mid_row = lines[3].split(",")
        assert float(mid_row[0]) == 0.5
        assert float(mid_row[2]) == 0.5

    def test_symmetric_state_gives_symmetric_section(self, tmp_path):
        grid = GridSpec(L=1.0, n=9)
        x = grid.coords()
        a = np.exp(-10 * ((x[:, None] - 0.5) ** 2 + (x[None, :] - 0.5) ** 2))
        s = SimState(0.0, np.ones((9, 9)), a, np.zeros((9, 9)))
        path = write_section(s, grid, tmp_path, "sym")
        rows = [line.split(",") for line in path.read_text().splitlines()[1:]]
        a_vals = [float(r[2]) for r in rows]
        assert a_vals == a_vals[::-1]

    def test_even_grid_rejected(self, tmp_path):
        grid = GridSpec(L=1.0, n=10)
        s = SimState(0.0, np.ones((10, 10)), np.zeros((10, 10)),
                     np.zeros((10, 10)))
        with pytest.raises(MidlineOffGridError):
            write_section(s, grid, tmp_path, "oops")


class TestConfigFormat:
    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_presets_round_trip_unchanged(self, tmp_path, name):
        cfg = make_preset(name)
        path = tmp_path / f"{name}.cfg"
        write_config(cfg, path)
        assert read_config(path) == cfg

    def test_random_configs_round_trip(self, tmp_path, rng):
        for k in range(25):
            cfg = _random_config(rng)
            path = tmp_path / f"c{k}.cfg"
            write_config(cfg, path)
            assert read_config(path) == cfg

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        cfg = make_preset("fig1")
        path = tmp_path / "c.cfg"
        write_config(cfg, path)
        text = "# header comment\n\n" + path.read_text().replace(
            "boundary=neumann", "boundary=neumann  # zero flux"
        )
        path.write_text(text)
        assert read_config(path) == cfg

    def test_missing_key_named(self, tmp_path):
        cfg = make_preset("fig1")
        path = tmp_path / "c.cfg"
        write_config(cfg, path)
        lines = [l for l in path.read_text().splitlines() if not l.startswith("k_A=")]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError, match="k_A"):
            read_config(path)

    def test_unknown_key_rejected_with_line(self, tmp_path):
        cfg = make_preset("fig1")
        path = tmp_path / "c.cfg"
        write_config(cfg, path)
        path.write_text(path.read_text() + "mystery=1\n")
        with pytest.raises(ParseError, match="mystery"):
            read_config(path)

    def test_duplicate_key_rejected(self, tmp_path):
        cfg = make_preset("fig1")
        path = tmp_path / "c.cfg"
        write_config(cfg, path)
        path.write_text(path.read_text() + "tol=1e-9\n")
        with pytest.raises(ParseError, match="duplicate"):
            read_config(path)

    def test_semantic_problems_rejected(self, tmp_path):
        cfg = make_preset("fig1")
        path = tmp_path / "c.cfg"
        write_config(cfg, path)
        path.write_text(path.read_text().replace("k_A=1.0", "k_A=0.0"))
        with pytest.raises(ParseError, match="k_A"):
            read_config(path)

    def test_non_integer_n_rejected(self, tmp_path):
        cfg = make_preset("fig1")
        path = tmp_path / "c.cfg"
        write_config(cfg, path)
        path.write_text(path.read_text().replace("n=101", "n=101.5"))
        with pytest.raises(ParseError, match="integer"):
            read_config(path)

    def test_off_center_bump_not_representable(self):
        cfg = make_preset("fig1")
        cfg = replace(cfg, init=replace(cfg.init, A0_center=(0.1, 0.2)))
        with pytest.raises(ValueError, match="center"):
            config_lines(cfg)


class TestTrajectoryFiles:
    def test_round_trip(self, tmp_path, rng):
        times = np.unique(np.concatenate([[0.0], rng.uniform(0, 2, 20), [2.0]]))
        traj = NodeTrajectory(times, rng.uniform(0, 1, len(times)),
                              rng.uniform(0, 2, len(times)))
        path = tmp_path / trajectory_filename(3, 7)
        write_trajectory(traj, path)
        back = read_trajectory(path)
        assert np.array_equal(back.times, traj.times)
        assert np.array_equal(back.a_values, traj.a_values)
        assert np.array_equal(back.h_values, traj.h_values)

    def test_header_required(self, tmp_path):
        path = tmp_path / "traj_0_0.csv"
        path.write_text("0.0,0.0,0.0\n")
        with pytest.raises(ParseError, match="header"):
            read_trajectory(path)


class TestManifest:
    def test_round_trip(self, tmp_path):
        cfg = make_preset("fig2", n=31)
        manifest = RunManifest(
            format_version=MANIFEST_VERSION,
            config=cfg,
            dt_used=2.25e-3,
            step_count=444,
            snapshot_times=(0.0, 23.0),
            snapshot_labels=("t0.00", "t23.00"),
            files=("config.cfg", "t0.00_N.csv"),
            trajectory_nodes=((7, 7), (15, 23)),
            report=ViolationReport(worst_negative_A=1e-9, violation_count=3,
                                   first_violation_time=4.5),
        )
        write_manifest(tmp_path, manifest)
        back = read_manifest(tmp_path)
        assert back == manifest

    def test_unsupported_version_rejected(self, tmp_path):
        cfg = make_preset("fig1", n=11)
        manifest = RunManifest(
            format_version=MANIFEST_VERSION, config=cfg, dt_used=0.1,
            step_count=1, snapshot_times=(), snapshot_labels=(), files=(),
            trajectory_nodes=(), report=ViolationReport(),
        )
        path = write_manifest(tmp_path, manifest)
        path.write_text(path.read_text().replace("format_version=1",
                                                 "format_version=99"))
        with pytest.raises(ParseError, match="format_version"):
            read_manifest(tmp_path)
