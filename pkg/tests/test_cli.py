import subprocess
import sys

import pytest

from ppghrv.cli import main, read_config_file
from ppghrv.io import read_dataset_csv, read_hr_csv, read_ppg_csv, read_rr_csv
from ppghrv.models import load_model


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """One synth -> process -> train pipeline shared by the read-only tests."""
    root = tmp_path_factory.mktemp("cli")
    code = main([
        "synth", "--preset", "sit", "--duration-s", "120", "--seed", "3",
        "--out-ppg", str(root / "ppg.csv"), "--out-rr", str(root / "rr.csv"),
    ])
    assert code == 0
    code = main([
        "process", "--ppg", str(root / "ppg.csv"),
        "--out-hr", str(root / "hr.csv"),
        "--rr", str(root / "rr.csv"), "--n-s", "30",
        "--out-dataset", str(root / "ds.csv"),
    ])
    assert code == 0
    code = main([
        "train", "--dataset", str(root / "ds.csv"), "--model", "dt",
        "--budget", "2", "--seed", "7", "--out", str(root / "model.bin"),
    ])
    assert code == 0
    return root


class TestPipelineCommands:
    def test_synth_outputs_parse_back(self, workdir):
        signal = read_ppg_csv(workdir / "ppg.csv")
        gt = read_rr_csv(workdir / "rr.csv")
        assert signal.samples.size == 120 * 25
        assert gt.beat_times_s.size > 100

    def test_process_outputs(self, workdir):
        shr = read_hr_csv(workdir / "hr.csv")
        ds = read_dataset_csv(workdir / "ds.csv")
        assert len(shr) > 0
        assert ds.n_features == 31
        assert len(ds) == len(shr) - 30 + 1

    def test_train_wrote_loadable_model(self, workdir):
        model = load_model(workdir / "model.bin")
        assert model.n_features == 31
        pred = model.predict(read_dataset_csv(workdir / "ds.csv").features[0])
        assert pred > 0.0

    def test_train_prints_hyperparams(self, workdir, tmp_path, capsys):
        code = main([
            "train", "--dataset", str(workdir / "ds.csv"), "--model", "knn",
            "--budget", "2", "--seed", "1", "--out", str(tmp_path / "m.bin"),
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "best hyperparams" in out and "validation MAPE" in out

    def test_eval_reports_both_mapes(self, workdir, tmp_path, capsys):
        code = main([
            "eval", "--model", str(workdir / "model.bin"),
            "--dataset", str(workdir / "ds.csv"),
            "--out-trace", str(tmp_path / "trace.csv"),
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "model MAPE" in out and "sigproc MAPE" in out
        header = (tmp_path / "trace.csv").read_text().splitlines()[0]
        assert header == "window_end_s,truth_ms,sigproc_ms,model_ms"

    def test_bench_saved_model(self, workdir, capsys):
        code = main([
            "bench", "--model", str(workdir / "model.bin"),
            "--dataset", str(workdir / "ds.csv"), "--repetitions", "200",
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "repetitions: 200" in out and "mean:" in out

    def test_amplify_writes_table(self, tmp_path, capsys):
        code = main([
            "amplify", "--levels", "0,2", "--trials", "40", "--seed", "2",
            "--out", str(tmp_path / "amp.csv"),
        ])
        out = capsys.readouterr().out
        assert code == 0
        lines = (tmp_path / "amp.csv").read_text().splitlines()
        assert lines[0] == "rr_mape,rmssd_mape,sdnn_mape,trials,seed"
        assert len(lines) == 3
        assert "rr=0%" in out


class TestRunCommand:
    def test_flags_only(self, tmp_path, capsys):
        code = main([
            "run", "--out-dir", str(tmp_path / "out"),
            "--activities", "sit", "--metrics", "rmssd", "--lengths", "30",
            "--models", "dt", "--duration-s", "150", "--budget", "1",
            "--seed", "4", "--clean",
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert (tmp_path / "out" / "results.csv").exists()
        assert out.count("mape=") == 1

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            "# tiny smoke matrix\n"
            f"out_dir = {tmp_path / 'out'}\n"
            "activities = sit\n"
            "metrics = rmssd\n"
            "lengths = 30\n"
            "models = dt\n"
            "duration_s = 150\n"
            "budget = 1\n"
            "clean = true\n"
        )
        code = main(["run", "--config", str(cfg), "--lengths", "30,60"])
        out = capsys.readouterr().out
        assert code == 0
        # the flag's two lengths override the file's single one
        assert out.count("mape=") == 2

    def test_config_file_parsing(self, tmp_path):
        cfg = tmp_path / "a.cfg"
        cfg.write_text("seed = 9  # comment\nclean = false\nlengths=30,60\n")
        assert read_config_file(cfg) == {
            "seed": 9,
            "clean": False,
            "lengths": (30, 60),
        }

    def test_missing_out_dir_rejected(self, capsys):
        code = main(["run", "--activities", "sit"])
        assert code == 1
        assert "out-dir" in capsys.readouterr().err


class TestExitCodes:
    def test_unknown_flag_is_config_error(self, capsys):
        assert main(["synth", "--nope"]) == 1
        assert "config error" in capsys.readouterr().err

    def test_unknown_preset_is_config_error(self, tmp_path, capsys):
        code = main([
            "synth", "--preset", "swim",
            "--out-ppg", str(tmp_path / "p.csv"), "--out-rr", str(tmp_path / "r.csv"),
        ])
        assert code == 1

    def test_missing_input_file_is_data_error(self, tmp_path, capsys):
        code = main([
            "process", "--ppg", str(tmp_path / "absent.csv"),
            "--out-hr", str(tmp_path / "hr.csv"),
        ])
        assert code == 2
        assert "data error" in capsys.readouterr().err

    def test_malformed_csv_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("time_s,value\n0.0,1.0\nnot-a-number,2.0\n")
        code = main([
            "process", "--ppg", str(bad), "--out-hr", str(tmp_path / "hr.csv"),
        ])
        assert code == 2

    def test_corrupt_model_file_is_data_error(self, tmp_path, workdir, capsys):
        blob = tmp_path / "junk.bin"
        blob.write_bytes(b"\x00" * 16)
        code = main([
            "eval", "--model", str(blob), "--dataset", str(workdir / "ds.csv"),
        ])
        assert code == 2

    def test_dataset_flag_needs_rr(self, workdir, tmp_path, capsys):
        code = main([
            "process", "--ppg", str(workdir / "ppg.csv"),
            "--out-hr", str(tmp_path / "hr.csv"),
            "--out-dataset", str(tmp_path / "ds.csv"),
        ])
        assert code == 1
        assert "together" in capsys.readouterr().err

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("outdir = /tmp/x\n")
        assert main(["run", "--config", str(cfg)]) == 1
        assert "unknown key" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [
            sys.executable, "-m", "ppghrv.cli",
            "synth", "--preset", "sit", "--duration-s", "40", "--seed", "0",
            "--out-ppg", str(tmp_path / "p.csv"),
            "--out-rr", str(tmp_path / "r.csv"),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "p.csv").exists()
