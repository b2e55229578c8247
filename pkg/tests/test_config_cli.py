"""Config parsing/emission round-trips and the command-line surface."""

import numpy as np
import pytest

from liqshock import ConfigError, RunConfig, emit_config, parse_config
from liqshock.cli import main


class TestParseConfig:
    def test_minimal_with_defaults(self):
        cfg = parse_config("sigma=0.3\nnu01=1\nnu10=12\n")
        assert cfg.sigma == 0.3
        assert cfg.strike == 2.0
        assert cfg.horizon == 1.0
        assert cfg.grid == "uniform"
        assert cfg.scheme == "linear"

    def test_comments_and_blanks(self):
        cfg = parse_config("# settings\n\nsigma=0.4   # vol\n\n")
        assert cfg.sigma == 0.4

    def test_negative_sigma_names_key(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("sigma=-1\n")
        assert "sigma" in str(exc.value)

    def test_unknown_key_with_line_number(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("sigma=0.3\nbogus=1\n")
        assert exc.value.entries[0][0] == 2
        assert exc.value.entries[0][1] == "bogus"

    def test_collects_every_error(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("bogus=1\nsigma=abc\nno_equals_here\n")
        assert len(exc.value.entries) == 3

    def test_duplicate_key(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("sigma=0.3\nsigma=0.4\n")
        assert "duplicate" in str(exc.value)

    def test_explicit_tau_requires_dt(self):
        with pytest.raises(ConfigError):
            parse_config("tau_rule=explicit\n")
        cfg = parse_config("tau_rule=explicit\ndt=0.01\n")
        assert cfg.dt == 0.01

    def test_bool_parsing(self):
        assert parse_config("capture_trajectory=true\n").capture_trajectory
        with pytest.raises(ConfigError):
            parse_config("capture_trajectory=1\n")


class TestRoundTrip:
    def test_emit_parse_identity_defaults(self):
        cfg = RunConfig()
        assert parse_config(emit_config(cfg)) == cfg

    def test_emit_parse_identity_fuzzed(self):
        rng = np.random.default_rng(41)
        for _ in range(40):
            cfg = RunConfig(
                sigma=float(rng.uniform(0.05, 1.0)),
                mu=float(rng.uniform(-0.3, 0.3)),
                gamma=float(rng.uniform(0.2, 5.0)),
                nu01=float(rng.uniform(0.1, 10.0)),
                nu10=float(rng.uniform(0.1, 20.0)),
                strike=float(rng.uniform(1.0, 4.0)),
                horizon=float(rng.uniform(0.2, 2.0)),
                s_min=0.0,
                s_max=float(rng.uniform(5.0, 20.0)),
                grid=str(rng.choice(["uniform", "tavella"])),
                intervals=int(rng.integers(2, 500)),
                alpha=float(rng.uniform(0.5, 40.0)),
                scheme=str(rng.choice(["linear", "linearized"])),
                left_bc=str(rng.choice(["natural", "dirichlet"])),
                capture_trajectory=bool(rng.integers(0, 2)),
            )
            assert parse_config(emit_config(cfg)) == cfg


class TestCliSolve:
    def test_csv_shape_and_terminal_column(self, tmp_path, capsys):
        out = tmp_path / "surface.csv"
        code = main(["solve", "--I", "40", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "S,p_at_t0,q_at_t0,p_at_T,q_at_T"
        assert len(lines) == 42
        first = lines[1].split(",")
        last = lines[-1].split(",")
        # terminal prices equal the payoff at both ends of the domain
        assert float(first[0]) == 0.0
        assert float(first[3]) == pytest.approx(0.0, abs=1e-12)
        assert float(first[4]) == pytest.approx(0.0, abs=1e-12)
        assert float(last[0]) == 5.0
        assert float(last[3]) == pytest.approx(3.0, abs=1e-12)
        assert float(last[4]) == pytest.approx(3.0, abs=1e-12)

    def test_issue_prices_near_positive(self, tmp_path):
        # at-issue columns may dip below zero only by the known O(dt)
        # boundary artifact, never by more
        out = tmp_path / "surface.csv"
        assert main(["solve", "--I", "240", "--out", str(out)]) == 0
        rows = np.loadtxt(out, delimiter=",", skiprows=1)
        assert rows[:, 1].min() >= -1e-6
        assert rows[:, 2].min() >= -1e-6

    def test_byte_stable(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for path in (a, b):
            assert main(["solve", "--I", "60", "--grid", "tavella",
                         "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_stdout_when_no_path(self, capsys):
        assert main(["solve", "--I", "48"]) == 0
        captured = capsys.readouterr()
        assert captured.out.startswith("S,p_at_t0")


class TestCliTables:
    def test_converge_columns(self, tmp_path):
        out = tmp_path / "conv.csv"
        code = main(["converge", "--levels", "30,60", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ("I,value_R0,diff_R0,ratio_R0,order_R0,"
                            "value_R1,diff_R1,ratio_R1,order_R1")
        row30 = lines[1].split(",")
        # first row has no difference/ratio/order
        assert row30[0] == "30"
        assert row30[2] == "" and row30[3] == "" and row30[4] == ""
        row60 = lines[2].split(",")
        assert row60[2] != "" and row60[3] == ""

    def test_extrapolate_columns(self, tmp_path):
        out = tmp_path / "extr.csv"
        code = main(["extrapolate", "--levels", "40,80", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "I,Z,W,Y,diff_Y,ratio,order"
        assert len(lines) == 3
        z, w, y = (float(x) for x in lines[1].split(",")[1:4])
        assert y == pytest.approx(2 * w - z, abs=1e-9)

    def test_bad_levels_rejected(self, tmp_path):
        assert main(["converge", "--levels", "30,50"]) == 1


class TestCliVerify:
    def test_report_and_exit_code(self, capsys):
        # positivity fails by the known O(dt) boundary dip; every other
        # audit passes, and the exit code reflects the failure
        code = main(["verify", "--I", "60"])
        out = capsys.readouterr().out
        lines = [l for l in out.splitlines() if l.startswith("[")]
        assert len(lines) == 6
        statuses = {l.split("] ")[1].split(":")[0]: l[1:5] for l in lines}
        assert statuses["positivity"] == "FAIL"
        for name in ("comparison(h+0.1)", "comparison(call vs 0)",
                     "translation", "m_matrix", "sup_bound"):
            assert statuses[name] == "PASS"
        assert code == 3


class TestCliErrors:
    def test_unknown_flag(self, capsys):
        assert main(["solve", "--wat"]) == 1

    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_bad_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("sigma=-3\n")
        assert main(["solve", "--config", str(cfg)]) == 1

    def test_missing_config_file(self, capsys):
        assert main(["solve", "--config", "/nonexistent/x.cfg"]) == 1

    def test_config_file_drives_run(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("sigma=0.3\nintervals=48\ngrid=uniform\n")
        out = tmp_path / "o.csv"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 50
