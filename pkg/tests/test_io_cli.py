import json

import numpy as np
import pytest

from qcgen import io
from qcgen.ansatz import build_ansatz
from qcgen.cli import main, parse_target_spec
from qcgen.datasets import gaussian_target
from qcgen.mle import TrainHistory, TrainRecord
from qcgen.qgan import QganHistory, QganRecord
from qcgen.sampling import SampleSet

MINIMAL_MLE = """
[ansatz]
n_qubits = 1
n_layers = 1

[train]
iterations = {iterations}
batch_size = 8
seed = 3

[target]
kind = point
index = 1
n_samples = 20
"""

SMALL_QGAN = """
[ansatz]
n_qubits = 2
n_layers = 1

[train]
iterations = 20
eval_interval = 5

[target]
kind = gaussian
"""


def _cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_distribution_roundtrip(tmp_path):
    d = gaussian_target(3)
    io.write_distribution(tmp_path / "d.tsv", d)
    lines = (tmp_path / "d.tsv").read_text().splitlines()
    assert lines[0] == "bitstring\tprobability" and lines[1].startswith("000\t") and len(lines) == 9
    assert io.read_distribution(tmp_path / "d.tsv").probs.tobytes() == d.probs.tobytes()


def test_counts_roundtrip(tmp_path):
    s = SampleSet(3, {1: 4, 6: 2})
    io.write_counts(tmp_path / "c.tsv", s)
    assert io.read_counts(tmp_path / "c.tsv") == s
    np.testing.assert_array_equal(io.read_dataset(tmp_path / "c.tsv").samples, [1] * 4 + [6] * 2)


def test_params_roundtrip(tmp_path):
    a = build_ansatz(3, 2, "plus")
    p = np.random.default_rng(0).normal(size=a.parameter_count)
    io.write_params(tmp_path / "p.txt", a, p, n_readout=2)
    first = (tmp_path / "p.txt").read_text().splitlines()[0]
    assert first == "# ansatz n_qubits=3 n_layers=2 input_kind=plus n_readout=2"
    a2, p2, extra = io.read_params(tmp_path / "p.txt")
    assert a2 == a and p2.tobytes() == p.tobytes() and extra == {"n_readout": "2"}


def test_params_roundtrip_custom_pairs(tmp_path):
    from qcgen.qgan import make_discriminator

    a = make_discriminator(3, 2, 2).ansatz
    io.write_params(tmp_path / "d.txt", a, np.zeros(a.parameter_count))
    assert io.read_params(tmp_path / "d.txt")[0] == a


def test_params_bad_files(tmp_path):
    (tmp_path / "a.txt").write_text("0.1\n0.2\n")
    with pytest.raises(io.FormatError):
        io.read_params(tmp_path / "a.txt")
    (tmp_path / "b.txt").write_text("# ansatz n_qubits=1 n_layers=1 input_kind=zero\n0.1\n0.2\n")
    with pytest.raises(io.FormatError):
        io.read_params(tmp_path / "b.txt")
    with pytest.raises(io.FormatError):
        io.read_params(tmp_path / "missing.txt")


def test_history_roundtrips(tmp_path):
    h = TrainHistory([TrainRecord(0, 1.25, 0.5, 0, 3.0), TrainRecord(1, 1.0, 0.25, 2, 2.0)])
    io.write_mle_history(tmp_path / "h.csv", h)
    assert (tmp_path / "h.csv").read_text().splitlines()[0] == "iteration,loss,grad_norm,clip_count"
    back = io.read_mle_history(tmp_path / "h.csv")
    assert back.losses.tolist() == [1.25, 1.0] and back.records[1].clip_count == 2
    q = QganHistory([QganRecord(0, 1.0, 0.5, 0.1, 0.2, 0.3)])
    io.write_qgan_history(tmp_path / "q.csv", q)
    assert io.read_qgan_history(tmp_path / "q.csv") == q


def test_parse_target_spec():
    assert parse_target_spec("gaussian:mean=3.5,std=1.2") == {"kind": "gaussian", "mean": "3.5", "std": "1.2"}
    assert parse_target_spec("uniform") == {"kind": "uniform"}


def test_train_mle_smoke(tmp_path):
    out = tmp_path / "out"
    assert main(["train-mle", _cfg(tmp_path, MINIMAL_MLE.format(iterations=30)), "--out-dir", str(out), "--quiet"]) == 0
    for name in ("config-echo.txt", "params.txt", "history.csv", "distribution.tsv", "summary.json"):
        assert (out / name).exists()
    summary = json.loads((out / "summary.json").read_text())
    assert {"final_nll", "kl", "js", "tv"} <= summary.keys()
    io.read_params(out / "params.txt")
    io.read_distribution(out / "distribution.tsv")
    assert len(io.read_mle_history(out / "history.csv")) == 30


def test_train_mle_zero_iterations_exit_2(tmp_path, capsys):
    rc = main(["train-mle", _cfg(tmp_path, MINIMAL_MLE.format(iterations=0)), "--out-dir", str(tmp_path / "o")])
    assert rc == 2
    assert "iterations" in capsys.readouterr().err


def test_bad_config_exit_2(tmp_path):
    assert main(["train-mle", str(tmp_path / "nope.cfg"), "--quiet"]) == 2
    bad = MINIMAL_MLE.format(iterations=5).replace("seed = 3", "learning_rat = 0.1")
    assert main(["train-mle", _cfg(tmp_path, bad), "--quiet", "--out-dir", str(tmp_path / "o")]) == 2


@pytest.mark.filterwarnings("ignore:overflow encountered")
def test_numerical_failure_exit_3(tmp_path):
    # a huge learning rate through gradient descent overflows the angles to inf
    text = MINIMAL_MLE.format(iterations=50).replace("seed = 3", "optimizer = gd\nlearning_rate = 1e308")
    assert main(["train-mle", _cfg(tmp_path, text), "--quiet", "--out-dir", str(tmp_path / "o")]) == 3


def test_seed_override_and_determinism(tmp_path):
    cfg = _cfg(tmp_path, MINIMAL_MLE.format(iterations=10))
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        assert main(["train-mle", cfg, "--out-dir", str(out), "--seed", "11", "--quiet"]) == 0
        outs.append(out)
    assert (outs[0] / "history.csv").read_bytes() == (outs[1] / "history.csv").read_bytes()
    assert "seed = 11" in (outs[0] / "config-echo.txt").read_text()


def test_train_qgan_deterministic(tmp_path):
    cfg = _cfg(tmp_path, SMALL_QGAN)
    for k in range(2):
        assert main(["train-qgan", cfg, "--out-dir", str(tmp_path / f"q{k}"), "--quiet"]) == 0
    h0 = (tmp_path / "q0" / "history.csv").read_bytes()
    assert h0 == (tmp_path / "q1" / "history.csv").read_bytes()
    assert h0.splitlines()[0] == b"iteration,d_loss,g_loss,js,kl,tv"
    summary = json.loads((tmp_path / "q0" / "summary.json").read_text())
    assert {"js", "tv", "mean", "std", "target_mean", "target_std"} <= summary.keys()
    _, _, extra = io.read_params(tmp_path / "q0" / "disc_params.txt")
    assert extra == {"n_readout": "1"}


def test_sample_bundled_params(tmp_path, capsys):
    assert main(["sample", "task1_params", "--n-samples", "500", "--seed", "2", "--out-dir", str(tmp_path)]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert len(rows) == 4
    s = io.read_counts(tmp_path / "samples.tsv")
    assert s.total == 500
    main(["sample", "task1_params", "--n-samples", "500", "--seed", "2", "--out-dir", str(tmp_path / "b"), "--quiet"])
    assert (tmp_path / "samples.tsv").read_bytes() == (tmp_path / "b" / "samples.tsv").read_bytes()


def test_sample_rejects_zero(tmp_path):
    assert main(["sample", "task1_params", "--n-samples", "0", "--out-dir", str(tmp_path)]) == 2


def test_eval_perturb(capsys):
    assert main(["eval", "task1_params", "--target", "uniform", "--perturb", "0", "--quiet"]) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["metrics"] == r["perturbed_metrics"] and r["js_shift"] == 0
    assert main(["eval", "task1_params", "--target", "uniform", "--perturb", "0.01", "--quiet"]) == 0
    assert json.loads(capsys.readouterr().out)["js_shift"] < 0.01


def test_eval_errors(tmp_path):
    assert main(["eval", "task1_params", "--quiet"]) == 2
    assert main(["eval", "task1_params", "--target", "bogus", "--quiet"]) == 2
    (tmp_path / "p.txt").write_text("garbage\n")
    assert main(["eval", str(tmp_path / "p.txt"), "--target", "uniform", "--quiet"]) == 2


def test_global_flags_before_subcommand(tmp_path):
    cfg = _cfg(tmp_path, MINIMAL_MLE.format(iterations=3))
    assert main(["--quiet", "--out-dir", str(tmp_path / "g"), "train-mle", cfg]) == 0
    assert (tmp_path / "g" / "history.csv").exists()
