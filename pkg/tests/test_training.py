import math

import numpy as np
import pytest
import torch

from lectseg.errors import ChecksumMismatch, ClassTooSmall, NoLabeledData
from lectseg.model import ModelConfig, forward, init_params
from lectseg.training import (
    TrainConfig,
    compute_class_weights,
    history_to_csv,
    load_checkpoint,
    one_cycle_lr,
    save_checkpoint,
    stratified_split,
    train,
)

from helpers import TINY_CONFIG, build_separable_windows

QUICK_MODEL = ModelConfig(
    lstm_units=16, head_units=32, n_context=2, text_dim=1024, audio_dim=512,
    audio_steps_per_frame=49,
)


@pytest.fixture(scope="module")
def separable():
    return build_separable_windows(20, [0, 1, 8], n_context=2, seed=1)


class TestSplit:
    def test_rounding_example(self):
        windows = build_separable_windows(10, [0], 0, seed=0) + build_separable_windows(
            90, [1], 0, seed=2
        )
        train_set, eval_set = stratified_split(windows, 0.1, seed=0)
        eval_counts = {}
        for w in eval_set:
            eval_counts[w.gold.id] = eval_counts.get(w.gold.id, 0) + 1
        assert eval_counts == {0: 1, 1: 9}

    def test_single_sample_class_rejected(self):
        windows = build_separable_windows(1, [0], 0) + build_separable_windows(5, [1], 0)
        with pytest.raises(ClassTooSmall):
            stratified_split(windows, 0.1, seed=0)

    def test_same_seed_identical_partition(self, separable):
        a = stratified_split(separable, 0.1, seed=5)
        b = stratified_split(separable, 0.1, seed=5)
        assert [id(w) for w in a[0]] == [id(w) for w in b[0]]
        assert [id(w) for w in a[1]] == [id(w) for w in b[1]]

    def test_disjoint_union_and_per_class_tolerance(self, separable):
        train_set, eval_set = stratified_split(separable, 0.1, seed=3)
        assert len(train_set) + len(eval_set) == len(separable)
        assert {id(w) for w in train_set}.isdisjoint({id(w) for w in eval_set})
        for k in (0, 1, 8):
            n_c = sum(1 for w in separable if w.gold.id == k)
            taken = sum(1 for w in eval_set if w.gold.id == k)
            assert abs(taken - 0.1 * n_c) <= 1.0

    def test_unlabeled_sample_rejected(self, separable):
        windows = list(separable)
        windows[0].center.gold = None
        try:
            with pytest.raises(NoLabeledData):
                stratified_split(windows, 0.1, seed=0)
        finally:
            windows[0].center.gold = separable[1].center.gold.__class__(
                id=0, name="Theory/Concept", categories=frozenset({"Transcription"})
            )


class TestClassWeights:
    def test_formula(self):
        w = compute_class_weights([100, 50, 10])
        np.testing.assert_allclose(w, [160 / 300, 160 / 150, 160 / 30], rtol=1e-12)
        np.testing.assert_allclose(w, [0.5333, 1.0667, 5.3333], atol=1e-4)

    def test_balanced_counts_give_unit_weights(self):
        np.testing.assert_allclose(compute_class_weights([7, 7, 7, 7]), np.ones(4))

    def test_zero_count_class_gets_zero_weight(self):
        w = compute_class_weights([10, 0, 30])
        assert w[1] == 0.0
        np.testing.assert_allclose(w[[0, 2]], [40 / 20, 40 / 60])

    def test_all_zero_rejected(self):
        with pytest.raises(NoLabeledData):
            compute_class_weights([0, 0, 0])


class TestOneCycle:
    CFG = TrainConfig(epochs=1)

    def test_start_value(self):
        assert one_cycle_lr(0, 1000, self.CFG) == 0.001 / 25

    def test_peak_at_warm_fraction(self):
        assert one_cycle_lr(300, 1000, self.CFG) == 0.001

    def test_final_value(self):
        assert one_cycle_lr(999, 1000, self.CFG) == pytest.approx(1e-7, abs=1e-12)

    def test_peak_is_max_exactly(self):
        for total in (100, 997, 1000):
            values = [one_cycle_lr(s, total, self.CFG) for s in range(total)]
            assert max(values) == 0.001

    def test_continuity_bound(self):
        total = 500
        values = [one_cycle_lr(s, total, self.CFG) for s in range(total)]
        jumps = [abs(b - a) for a, b in zip(values, values[1:])]
        assert max(jumps) < 0.001 * 10 / total

    def test_step_bounds_enforced(self):
        with pytest.raises(ValueError):
            one_cycle_lr(1000, 1000, self.CFG)


class TestTrainLoop:
    def test_epochs_zero_returns_init(self, separable):
        train_set, eval_set = stratified_split(separable, 0.1, seed=0)
        cfg = TrainConfig(epochs=0, seed=4)
        params, history = train(train_set, eval_set, QUICK_MODEL, cfg)
        assert params.to_blob() == init_params(QUICK_MODEL, 4).to_blob()
        assert history.train_loss == [] and history.lr_trace == []

    def test_lr_trace_length(self, separable):
        train_set, eval_set = stratified_split(separable, 0.1, seed=0)
        cfg = TrainConfig(epochs=2, batch_size=16, seed=0)
        _, history = train(train_set, eval_set, QUICK_MODEL, cfg)
        assert len(history.lr_trace) == 2 * math.ceil(len(train_set) / 16)
        assert len(history.train_loss) == 2

    def test_same_seed_identical_history(self, separable):
        train_set, eval_set = stratified_split(separable, 0.1, seed=0)
        cfg = TrainConfig(epochs=2, batch_size=16, seed=9)
        _, h1 = train(train_set, eval_set, QUICK_MODEL, cfg)
        _, h2 = train(train_set, eval_set, QUICK_MODEL, cfg)
        assert h1.train_loss == h2.train_loss
        assert h1.eval_loss == h2.eval_loss
        assert h1.eval_macro_f == h2.eval_macro_f
        assert h1.lr_trace == h2.lr_trace

    def test_quick_overfit_smoke(self, separable):
        train_set, eval_set = stratified_split(separable, 0.1, seed=0)
        cfg = TrainConfig(epochs=12, batch_size=16, seed=0)
        params, history = train(train_set, eval_set, QUICK_MODEL, cfg)
        correct = 0
        for w in train_set:
            probs = forward(params, w)
            correct += int(np.argmax(probs)) == w.gold.id
        assert correct / len(train_set) >= 0.95
        assert max(history.eval_macro_f) >= 0.9


def test_adam_zero_gradient_leaves_params_unchanged():
    params = init_params(TINY_CONFIG, 0)
    module = params.module
    opt = torch.optim.Adam(module.parameters(), lr=0.001, betas=(0.9, 0.999), eps=1e-8)
    before = params.to_blob()
    opt.zero_grad()
    for p in module.parameters():
        p.grad = torch.zeros_like(p)
    opt.step()
    assert params.to_blob() == before


def test_history_csv_layout():
    from lectseg.training import TrainHistory

    h = TrainHistory(train_loss=[1.5, 1.0], eval_loss=[1.4, 1.1], eval_macro_f=[0.2, 0.5])
    text = history_to_csv(h)
    lines = text.strip().split("\n")
    assert lines[0] == "epoch,train_loss,eval_loss,macro_F"
    assert lines[1].startswith("0,1.5,1.4,")
    assert len(lines) == 3


class TestCheckpoint:
    def test_round_trip_identical_forward(self, tmp_path, separable):
        train_set, eval_set = stratified_split(separable, 0.1, seed=0)
        cfg = TrainConfig(epochs=1, batch_size=16, seed=0)
        params, history = train(train_set, eval_set, QUICK_MODEL, cfg)
        path = tmp_path / "m.ckpt"
        save_checkpoint(params, history, path)
        loaded = load_checkpoint(path)
        w = separable[0]
        np.testing.assert_array_equal(forward(params, w), forward(loaded, w))
        assert loaded.epoch == params.epoch
        assert loaded.config == params.config

    def test_flipped_blob_byte_detected(self, tmp_path):
        params = init_params(TINY_CONFIG, 0)
        path = tmp_path / "m.ckpt"
        save_checkpoint(params, None, path)
        raw = bytearray(path.read_bytes())
        raw[-5] ^= 0x01
        path.write_bytes(bytes(raw))
        with pytest.raises(ChecksumMismatch):
            load_checkpoint(path)

    def test_missing_file_is_not_checksum_error(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_checkpoint(tmp_path / "absent.ckpt")

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(eval_fraction=1.5)
        with pytest.raises(ValueError):
            TrainConfig(max_lr=0.0)

    def test_train_config_json_round_trip(self, tmp_path):
        cfg = TrainConfig(epochs=3, batch_size=8, seed=2)
        p = tmp_path / "train.json"
        import json

        p.write_text(json.dumps(cfg.to_dict()))
        assert TrainConfig.from_json(p) == cfg
