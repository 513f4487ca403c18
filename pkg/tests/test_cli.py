"""End-to-end command-line tests."""

import json
from pathlib import Path

import pytest

from mixedae.cli import DEFAULTS, dump_config, load_config, main


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture()
def tiny_experiment_config(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        "[data]\n"
        "n = 1200\n"
        "[experiment]\n"
        "runs = 1\n"
        "epochs = 20\n"
        "losses = standard\n"
        "seed = 3\n"
        "[output]\n"
        f"dir = {tmp_path / 'out'}\n"
    )
    return cfg


class TestConfig:
    def test_dump_contains_all_defaults(self, capsys):
        assert run_cli("config", "dump") == 0
        out = capsys.readouterr().out
        for section, values in DEFAULTS.items():
            assert f"[{section}]" in out
            for key in values:
                assert key in out

    def test_dump_round_trips(self, tmp_path, capsys):
        run_cli("config", "dump")
        text = capsys.readouterr().out
        path = tmp_path / "dumped.ini"
        path.write_text(text)
        assert load_config(str(path)) == load_config(None)

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[experiment]\nbogus = 1\n")
        assert run_cli("experiment", "--config", str(cfg), "--dry-run") == 2

    def test_unknown_section_rejected(self, tmp_path):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[nope]\nx = 1\n")
        assert run_cli("experiment", "--config", str(cfg), "--dry-run") == 2

    def test_json_config_equivalent(self, tmp_path):
        ini = tmp_path / "a.ini"
        ini.write_text("[experiment]\nruns = 7\n")
        js = tmp_path / "a.json"
        js.write_text(json.dumps({"experiment": {"runs": 7}}))
        assert load_config(str(ini)) == load_config(str(js))

    def test_dump_config_format(self):
        text = dump_config(load_config(None))
        assert "[data]" in text and "source = synthetic" in text


class TestGenerate:
    def test_row_count_and_schema(self, tmp_path, capsys):
        out = tmp_path / "data.csv"
        assert run_cli("generate", "--n", "50", "--seed", "1", "--out", str(out)) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 51  # header + n rows
        sidecar = (tmp_path / "data.schema").read_text().splitlines()
        assert len(sidecar) == 9  # 8 feature columns + target line
        assert sidecar[-1] == "y,target"

    def test_idempotent_bytes(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        run_cli("generate", "--n", "40", "--seed", "9", "--out", str(a))
        run_cli("generate", "--n", "40", "--seed", "9", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.schema").read_bytes() == (tmp_path / "b.schema").read_bytes()

    def test_input_not_mutated(self, tmp_path):
        cfg = tmp_path / "exp.ini"
        cfg.write_text("[experiment]\nruns = 1\n")
        before = cfg.read_bytes()
        run_cli("experiment", "--config", str(cfg), "--dry-run")
        assert cfg.read_bytes() == before


class TestTrain:
    def test_autoencoder_train(self, tmp_path, capsys):
        cfg = tmp_path / "train.ini"
        out = tmp_path / "model"
        cfg.write_text(
            f"[data]\nn = 1200\n[train]\nepochs = 20\nseed = 2\n[output]\ndir = {out}\n"
        )
        assert run_cli("train", "--config", str(cfg)) == 0
        assert (out / "model.ckpt").exists()
        curves = (out / "curves.csv").read_text().splitlines()
        assert curves[0] == "epochs,checkpoint,feature,error"
        # exactly 10 checkpoints per encoded feature
        assert len(curves) == 1 + 10 * 33

    def test_empty_category_exit_code(self, tmp_path, capsys):
        # sidecar declares a category that the data never contains
        data = tmp_path / "d.csv"
        data.write_text("a,q\n" + "\n".join(f"{i}.0,u" if i % 2 else f"{i}.0,v" for i in range(10)) + "\n")
        sidecar = tmp_path / "d.schema"
        sidecar.write_text("a,numeric\nq,categorical,u|v|never\n")
        cfg = tmp_path / "train.ini"
        cfg.write_text(
            "[data]\nsource = csv\n"
            f"csv_path = {data}\nschema_path = {sidecar}\n"
            "[train]\nepochs = 5\n"
            f"[output]\ndir = {tmp_path / 'out'}\n"
        )
        assert run_cli("train", "--config", str(cfg)) == 3
        assert "data error" in capsys.readouterr().err

    def test_vae_train(self, tmp_path):
        cfg = tmp_path / "train.ini"
        out = tmp_path / "vae"
        cfg.write_text(
            "[data]\nn = 1200\n[experiment]\nmodel = vae\n"
            f"[train]\nepochs = 10\n[output]\ndir = {out}\n"
        )
        assert run_cli("train", "--config", str(cfg)) == 0
        assert (out / "model.ckpt").exists()


class TestExperiment:
    def test_dry_run(self, tiny_experiment_config, capsys):
        assert run_cli("experiment", "--config", str(tiny_experiment_config), "--dry-run") == 0
        assert "config ok" in capsys.readouterr().out

    def test_end_to_end_outputs(self, tiny_experiment_config, tmp_path, capsys):
        assert run_cli("experiment", "--config", str(tiny_experiment_config)) == 0
        out = tmp_path / "out"
        report = (out / "report.csv").read_text().splitlines()
        assert report[0] == "run,context,epochs,loss,metric,value"
        summary = json.loads((out / "summary.json").read_text())
        assert "metrics" in summary
        curves = list((out / "curves").glob("run_*.csv"))
        assert len(curves) == 1

    def test_idempotent_outputs(self, tiny_experiment_config, tmp_path):
        run_cli("experiment", "--config", str(tiny_experiment_config))
        first = (tmp_path / "out" / "report.csv").read_bytes()
        first_curves = (tmp_path / "out" / "curves" / "run_0_standard.csv").read_bytes()
        run_cli("experiment", "--config", str(tiny_experiment_config))
        assert (tmp_path / "out" / "report.csv").read_bytes() == first
        assert (tmp_path / "out" / "curves" / "run_0_standard.csv").read_bytes() == first_curves

    def test_loss_and_epochs_overrides(self, tiny_experiment_config, tmp_path):
        assert (
            run_cli(
                "experiment", "--config", str(tiny_experiment_config),
                "--epochs", "10", "--loss", "balanced", "--out", str(tmp_path / "o2"),
            )
            == 0
        )
        report = (tmp_path / "o2" / "report.csv").read_text()
        assert "balanced" in report and ",10," in report

    def test_bad_loss_flag(self, tiny_experiment_config):
        assert (
            run_cli("experiment", "--config", str(tiny_experiment_config), "--loss", "huh")
            == 2
        )


class TestReport:
    def test_table_and_plot_data(self, tiny_experiment_config, tmp_path, capsys):
        run_cli("experiment", "--config", str(tiny_experiment_config))
        capsys.readouterr()
        plot = tmp_path / "plot.csv"
        assert run_cli(
            "report", str(tmp_path / "out" / "report.csv"), "--plot-data", str(plot)
        ) == 0
        out = capsys.readouterr().out
        assert "msem" in out and "baseline" in out
        lines = plot.read_text().splitlines()
        assert lines[0] == "metric,epochs,loss,mean,std"
        # sorted by metric then epochs
        rows = [line.split(",") for line in lines[1:]]
        keys = [(r[0], int(r[1])) for r in rows]
        assert keys == sorted(keys)

    def test_missing_file(self, capsys):
        assert run_cli("report", "/nonexistent/report.csv") == 3
        assert "not found" in capsys.readouterr().err
