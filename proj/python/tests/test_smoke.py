import math

import numpy as np
import pytest

import lupi

TINY = """
dataset: {num_classes: 3, samples_per_class: 10, primary_dim: 4, privileged_dim: 5, segments: 2, frames_per_segment: 2}
teacher: {hidden_dims: [6], embedding_dim: 4}
student: {hidden_dims: [6], embedding_dim: 4}
strategies: [nonseq-embed, seq-aggregator]
alpha: [0.0, 0.5]
seeds: [1]
train: {epochs: 2, batch_size: 8}
teacher_train: {epochs: 2, batch_size: 8}
"""


def tiny_spec():
    spec = lupi.DatasetSpec()
    spec.num_classes = 3
    spec.samples_per_class = 10
    spec.primary_dim = 4
    spec.privileged_dim = 5
    spec.segments = 2
    spec.frames_per_segment = 2
    return spec


def test_generate_and_round_trip(tmp_path):
    data = lupi.generate(tiny_spec())
    assert len(data) == 30
    assert data == lupi.generate(tiny_spec())
    sample = data.train[0]
    assert len(sample.primary_segments) == 2
    assert len(sample.privileged_frames) == 4
    assert sample.primary_segments[0].shape == (4,)
    path = tmp_path / "data.pdst"
    lupi.write_dataset(data, path)
    assert lupi.read_dataset(path) == data
    path.write_bytes(b"XXXX" + path.read_bytes()[4:])
    with pytest.raises(lupi.FormatError):
        lupi.read_dataset(path)


def test_invalid_spec():
    spec = tiny_spec()
    spec.num_classes = 1
    with pytest.raises(lupi.ConfigError):
        lupi.generate(spec)
    with pytest.raises(lupi.ConfigError):
        lupi.validate_run_spec("alpha: [1.5]")


def test_metrics():
    assert lupi.accuracy([0, 1, 2, 2], [0, 1, 2, 1]) == 0.75
    assert lupi.unweighted_accuracy([0, 0, 0, 0], [0, 0, 0, 1], 2) == 0.5
    assert lupi.cosine_score(np.array([1.0, 0.0]), np.array([1.0, 1.0])) == pytest.approx(0.70711, abs=1e-5)
    assert lupi.compute_eer([0.9, 0.8, 0.1, 0.2], [True, True, False, False]) == 0.0
    assert lupi.round_percent(lupi.relative_delta(10.15, 9.7, False)) == pytest.approx(4.43)
    with pytest.raises(lupi.ContractError):
        lupi.relative_delta(0.0, 1.0, True)


def test_training():
    data = lupi.generate(tiny_spec())
    arch = lupi.Architecture()
    arch.hidden_dims = [6]
    arch.embedding_dim = 4
    cfg = lupi.TrainConfig()
    cfg.epochs = 2
    cfg.batch_size = 8
    teacher = lupi.train_teacher(data, arch, False, cfg, 1)
    assert 0.0 <= teacher.accuracy(data.test) <= 1.0
    assert teacher.checkpoint()[:4] == b"LPCK"
    run = lupi.train_student(data, teacher, "nonseq-embed", 0.5, cfg, arch, 1)
    assert [h["epoch"] for h in run["history"]] == [1, 2]
    base = lupi.train_student(data, None, "no-distill", 0.0, cfg, arch, 1)
    zero = lupi.train_student(data, teacher, "nonseq-embed", 0.0, cfg, arch, 1)
    assert base["test_accuracy"] == zero["test_accuracy"]


def test_run_matrix_and_summary():
    records = lupi.run_matrix(TINY)
    assert len(records) == 4
    assert [(r["strategy"], r["alpha"]) for r in records] == [
        ("nonseq-embed", 0.0), ("nonseq-embed", 0.5), ("seq-aggregator", 0.0), ("seq-aggregator", 0.5)]
    csv = lupi.format_results(records, "csv")
    assert csv.splitlines()[0].startswith("strategy,alpha,seed,acc_teacher")
    back = lupi.parse_results_csv(csv)
    assert lupi.format_results(back, "csv") == csv
    cells, best = lupi.summarize(records)
    assert len(cells) == 4
    assert set(best) == {"nonseq-embed", "seq-aggregator"}
    assert all(math.isfinite(c["acc_mean"]) for c in cells)
