import filecmp
import os

import numpy as np
import pytest

from jlsm.cli import main

CFG_TEXT = "iterations=40\nburn_in=10\nthinning=2\nk_init=3\nseed=7\n"


@pytest.fixture
def workdir(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CFG_TEXT)
    return tmp_path


def simulate(workdir, **over):
    args = {"n": "12", "q": "3", "k0": "2", "family": "gaussian", "seed": "4"}
    args.update(over)
    out = workdir / "data"
    rc = main(["simulate", "--out", str(out)]
              + sum((["--" + k, v] for k, v in args.items()), []))
    assert rc == 0
    return out


class TestSimulate:
    def test_writes_dataset_and_truth(self, workdir):
        out = simulate(workdir)
        assert (out / "network.txt").exists()
        assert (out / "attributes.tsv").exists()
        assert (out / "truth" / "Z0.tsv").exists()


class TestFitEvaluate:
    def test_round_trip_exit_zero(self, workdir):
        data = simulate(workdir)
        run = workdir / "run"
        rc = main(["fit", "--network", str(data / "network.txt"),
                   "--attributes", str(data / "attributes.tsv"),
                   "--family", "gaussian", "--config", str(workdir / "run.cfg"),
                   "--out", str(run)])
        assert rc == 0
        metrics = workdir / "metrics.csv"
        rc = main(["evaluate", "--chain", str(run / "chain"),
                   "--truth", str(data / "truth"), "--out", str(metrics)])
        assert rc == 0
        text = metrics.read_text()
        assert "delta_Z" in text and "khat" in text

    def test_fixed_seed_chains_byte_identical(self, workdir):
        data = simulate(workdir)
        runs = []
        for name in ("r1", "r2"):
            out = workdir / name
            rc = main(["fit", "--network", str(data / "network.txt"),
                       "--attributes", str(data / "attributes.tsv"),
                       "--family", "gaussian", "--config", str(workdir / "run.cfg"),
                       "--seed", "11", "--out", str(out)])
            assert rc == 0
            runs.append(out / "chain")
        for name in os.listdir(runs[0]):
            assert filecmp.cmp(runs[0] / name, runs[1] / name, shallow=False), name

    def test_threaded_augmentation_still_deterministic(self, workdir):
        data = simulate(workdir)
        runs = []
        for name in ("t1", "t2"):
            out = workdir / name
            rc = main(["fit", "--network", str(data / "network.txt"),
                       "--attributes", str(data / "attributes.tsv"),
                       "--family", "gaussian", "--config", str(workdir / "run.cfg"),
                       "--seed", "11", "--threads", "4", "--out", str(out)])
            assert rc == 0
            runs.append(out / "chain")
        for name in os.listdir(runs[0]):
            assert filecmp.cmp(runs[0] / name, runs[1] / name, shallow=False), name


class TestSelect:
    def test_criteria_table(self, workdir):
        data = simulate(workdir)
        out = workdir / "crit.csv"
        rc = main(["select", "--network", str(data / "network.txt"),
                   "--attributes", str(data / "attributes.tsv"),
                   "--family", "gaussian", "--candidates", "1,2",
                   "--config", str(workdir / "run.cfg"), "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "k,aic,bic,dic,waic"
        assert len(lines) == 3

    def test_cv_table(self, workdir):
        data = simulate(workdir)
        out = workdir / "cv.csv"
        rc = main(["select", "--network", str(data / "network.txt"),
                   "--attributes", str(data / "attributes.tsv"),
                   "--family", "gaussian", "--candidates", "2",
                   "--method", "cv", "--folds", "3",
                   "--config", str(workdir / "run.cfg"), "--out", str(out)])
        assert rc == 0
        assert "mean_heldout_loglik" in out.read_text()


class TestReplication:
    def test_study1_summary_columns(self, workdir):
        out = workdir / "study1"
        rc = main(["replicate-study1", "--cell", "n50q20", "--family", "gaussian",
                   "--reps", "2", "--config", str(workdir / "run.cfg"),
                   "--out", str(out)])
        assert rc == 0
        header = (out / "summary.csv").read_text().split("\n")[0].split(",")
        for col in ("cell", "family", "acc", "mab", "delta_Z_mean", "delta_Z_sd",
                    "delta_B_mean", "delta_alpha_mean", "delta_gamma_mean"):
            assert col in header


class TestExitCodes:
    def test_missing_file_is_data_error(self, workdir):
        rc = main(["fit", "--network", "no_such.txt", "--attributes", "no.tsv",
                   "--family", "gaussian", "--out", str(workdir / "x")])
        assert rc == 3

    def test_malformed_network_is_data_error(self, workdir):
        bad = workdir / "bad.txt"
        bad.write_text("nodes 3\n0 0\n")
        att = workdir / "att.tsv"
        att.write_text("y0\n0\n0\n0\n")
        rc = main(["fit", "--network", str(bad), "--attributes", str(att),
                   "--family", "gaussian", "--out", str(workdir / "x")])
        assert rc == 3

    def test_bad_config_is_usage_error(self, workdir):
        cfg = workdir / "bad.cfg"
        cfg.write_text("iterations=10\nburn_in=20\n")
        data = simulate(workdir)
        rc = main(["fit", "--network", str(data / "network.txt"),
                   "--attributes", str(data / "attributes.tsv"),
                   "--family", "gaussian", "--config", str(cfg),
                   "--out", str(workdir / "x")])
        assert rc == 2

    def test_unknown_subcommand_is_usage_error(self, workdir):
        assert main(["frobnicate"]) == 2

    def test_help_exits_zero(self):
        assert main(["--help"]) == 0
