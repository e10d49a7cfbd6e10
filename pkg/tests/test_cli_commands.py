import json

import pytest

from velocast.cli.main import main
from velocast.synthgen import build_dataset


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "ds"
    build_dataset(out, n_vrus=6, include_video=False, window_stride=150, seed=11)
    return out


def test_cli_train_then_eval(tmp_path, dataset):
    run_dir = tmp_path / "run"
    code = main(["train", "--dataset", str(dataset), "--variant", "GRU",
                 "--epochs", "2", "--batch-size", "64", "--out", str(run_dir),
                 "--seed", "3"])
    assert code == 0
    assert (run_dir / "checkpoint" / "metadata.json").exists()
    assert (run_dir / "train_log.csv").read_text().count("\n") == 2

    out_dir = tmp_path / "eval"
    code = main(["eval", "--dataset", str(dataset), "--variant", "GRU",
                 "--checkpoint", str(run_dir / "checkpoint"),
                 "--out", str(out_dir), "--seed", "3"])
    assert code == 0
    payload = json.loads((out_dir / "eval.json").read_text())
    assert payload["variant"] == "GRU"
    assert payload["asaee"] > 0


def test_cli_sweep_smoke(tmp_path, dataset):
    out = tmp_path / "sweep.tsv"
    code = main(["sweep", "--dataset", str(dataset), "--grid", "smoke",
                 "--epochs", "1", "--out", str(out), "--seed", "2"])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3  # header + two smoke points
    assert sum(line.split("\t")[5] == "*" for line in lines[1:]) == 1


def test_cli_eval_missing_checkpoint_is_validation_error(tmp_path, dataset):
    code = main(["eval", "--dataset", str(dataset), "--variant", "GRU",
                 "--checkpoint", str(tmp_path / "none")])
    assert code == 2
