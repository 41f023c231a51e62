import json
import subprocess
import sys

import pytest

from conftest import make_sample
from qfopt import EvalSample, MultiSeriesSample, write_panel
from qfopt.cli import EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, main


@pytest.fixture
def panel(tmp_path):
    path = tmp_path / "panel.csv"
    write_panel(make_sample(P=60), path)
    return path


@pytest.fixture
def multi_panel(tmp_path):
    a, b = make_sample(P=60), make_sample(P=60, seed=2)
    path = tmp_path / "multi.csv"
    write_panel(MultiSeriesSample((EvalSample(a.y, a.forecasts, a.levels, name="a"),
                                   EvalSample(b.y, b.forecasts, b.levels, name="b"))), path)
    return path


@pytest.fixture
def aug_panel(tmp_path):
    path = tmp_path / "aug.csv"
    write_panel(make_sample(P=60, with_z=True), path)
    return path


def run(argv, tmp_path, name="out"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, (out.read_bytes() if out.exists() else b"")


class TestCommands:
    @pytest.mark.parametrize("cmd", ["mz-test", "mh-test"])
    def test_single_series(self, cmd, panel, tmp_path):
        code, data = run([cmd, "--input", str(panel), "--draws", "19", "--seed", "3"], tmp_path)
        assert code == EXIT_OK
        report = json.loads(data)
        assert report["test"] == cmd.split("-")[0] and report["draws"] == 19

    def test_amz(self, aug_panel, tmp_path):
        code, data = run(["amz-test", "--input", str(aug_panel), "--draws", "9"], tmp_path)
        assert code == EXIT_OK and json.loads(data)["kappa"] == 36

    def test_mmz_individual_csv(self, multi_panel, tmp_path):
        code, data = run(["mmz-test", "--input", str(multi_panel), "--draws", "9", "--individual",
                          "--format", "csv"], tmp_path)
        lines = data.decode().splitlines()
        assert code == EXIT_OK and [l.split(",")[0] for l in lines[1:]] == ["Joint", "a", "b"]

    def test_simulate_csv(self, tmp_path):
        code, data = run(["simulate", "--P", "60", "120", "--block-length", "4", "8",
                          "--replications", "100", "--format", "csv"], tmp_path)
        lines = data.decode().splitlines()
        assert code == EXIT_OK
        assert lines[0] == ",P=60,P=120" and lines[2].startswith("l=8,")

    def test_plot_data(self, panel, tmp_path):
        code = main(["plot-data", "--input", str(panel), "--tau", "0.5", "--h", "2",
                     "--out", str(tmp_path / "plot.csv")])
        assert code == EXIT_OK
        assert len((tmp_path / "plot.csv").read_text().splitlines()) == 61

    def test_byte_identical_reruns(self, panel, tmp_path):
        args = ["mz-test", "--input", str(panel), "--draws", "29", "--seed", "8", "--format", "csv"]
        _, a = run(args, tmp_path, "a")
        _, b = run(args + ["--workers", "3"], tmp_path, "b")
        assert a == b


class TestExitCodes:
    def test_missing_file(self, tmp_path):
        assert main(["mz-test", "--input", str(tmp_path / "nope.csv")]) == EXIT_INVALID

    def test_bad_panel(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,y,tau,h,forecast\n1,1,0.5,1,inf\n")
        assert main(["mz-test", "--input", str(bad)]) == EXIT_INVALID

    def test_block_too_long(self, panel):
        assert main(["mz-test", "--input", str(panel), "--block-length", "500"]) == EXIT_INVALID

    def test_short_sample(self, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text("t,y,tau,h,forecast\n1,0.5,0.5,1,0.4\n2,-0.1,0.5,1,0.0\n3,1.2,0.5,1,0.9\n")
        assert main(["mz-test", "--input", str(path)]) == EXIT_INVALID

    def test_amz_without_z(self, panel):
        assert main(["amz-test", "--input", str(panel)]) == EXIT_INVALID

    def test_numerical_failure(self, panel, monkeypatch):
        from qfopt import cli
        from qfopt.errors import BootstrapFailure

        def boom(*a, **k):
            raise BootstrapFailure("too many failed draws")

        monkeypatch.setattr(cli, "mz_test", boom)
        assert main(["mz-test", "--input", str(panel)]) == EXIT_NUMERIC

    def test_console_script(self, panel):
        proc = subprocess.run([sys.executable, "-m", "qfopt.cli", "mz-test", "--input", str(panel),
                               "--draws", "9"], capture_output=True)
        assert proc.returncode == 0 and json.loads(proc.stdout)["test"] == "mz"
