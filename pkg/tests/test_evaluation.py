import numpy as np
import pytest

from lectseg.errors import LengthMismatch
from lectseg.evaluation import (
    confusion,
    confusion_to_csv,
    metrics_to_json,
    per_class_metrics,
    render_metrics_table,
    row_normalize,
)
from lectseg.taxonomy import LABELS


def brute_force_metrics(preds, golds, n_classes):
    """Pair-counting oracle: walks every (gold, pred) pair per class."""
    out = {}
    for c in range(n_classes):
        tp = sum(1 for g, p in zip(golds, preds) if g == c and p == c)
        fp = sum(1 for g, p in zip(golds, preds) if g != c and p == c)
        fn = sum(1 for g, p in zip(golds, preds) if g == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out[c] = (precision, recall, f)
    return out


class TestConfusion:
    def test_all_correct_single_class(self):
        cm = confusion([2] * 7, [2] * 7)
        assert cm.counts[2, 2] == 7
        assert cm.counts.sum() == 7

    def test_off_diagonal(self):
        cm = confusion([0, 1], [0, 0])
        assert cm.counts[0, 0] == 1 and cm.counts[0, 1] == 1

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion([0, 1, 2], [0, 1, 2, 3])

    def test_empty_rejected(self):
        with pytest.raises(LengthMismatch):
            confusion([], [])


class TestPerClassMetrics:
    def test_hand_counted_example(self):
        # class 0: TP=3, FP=1, FN=2
        golds = [0, 0, 0, 0, 0, 1]
        preds = [0, 0, 0, 1, 1, 0]
        report = per_class_metrics(confusion(preds, golds))
        assert report.precision[0] == pytest.approx(0.75)
        assert report.recall[0] == pytest.approx(0.6)
        assert report.f_score[0] == pytest.approx(2 / 3, abs=1e-4)

    def test_perfect_diagonal(self):
        golds = list(range(10)) * 3
        report = per_class_metrics(confusion(golds, golds))
        np.testing.assert_allclose(report.precision, 1.0)
        np.testing.assert_allclose(report.recall, 1.0)
        np.testing.assert_allclose(report.f_score, 1.0)
        assert report.accuracy == 1.0

    def test_undefined_ratios_flagged_zero(self):
        # class 3 never appears in gold or pred
        report = per_class_metrics(confusion([0, 1], [0, 1]))
        assert report.precision[3] == 0.0
        assert report.undefined_precision[3]
        assert report.undefined_recall[3]
        assert report.undefined_f[3]
        assert not report.undefined_precision[0]

    def test_macro_ignores_unsupported_classes(self):
        report = per_class_metrics(confusion([0, 1], [0, 1]))
        assert report.macro_f == pytest.approx(1.0)

    def test_oracle_equivalence_500_random_lists(self):
        rng = np.random.default_rng(123)
        for _ in range(500):
            n = int(rng.integers(1, 201))
            golds = rng.integers(0, 10, n).tolist()
            preds = rng.integers(0, 10, n).tolist()
            report = per_class_metrics(confusion(preds, golds))
            oracle = brute_force_metrics(preds, golds, 10)
            for c in range(10):
                assert report.precision[c] == oracle[c][0]
                assert report.recall[c] == oracle[c][1]
                assert report.f_score[c] == oracle[c][2]

    def test_micro_recall_equals_accuracy(self):
        rng = np.random.default_rng(7)
        golds = rng.integers(0, 10, 300).tolist()
        preds = rng.integers(0, 10, 300).tolist()
        cm = confusion(preds, golds)
        report = per_class_metrics(cm)
        micro_recall = np.diag(cm.counts).sum() / cm.counts.sum()
        assert report.accuracy == pytest.approx(micro_recall)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(11)
        golds = rng.integers(0, 10, 100)
        preds = rng.integers(0, 10, 100)
        perm = rng.permutation(100)
        a = per_class_metrics(confusion(preds.tolist(), golds.tolist()))
        b = per_class_metrics(confusion(preds[perm].tolist(), golds[perm].tolist()))
        np.testing.assert_array_equal(a.precision, b.precision)
        np.testing.assert_array_equal(a.recall, b.recall)
        np.testing.assert_array_equal(a.f_score, b.f_score)


class TestRowNormalize:
    def test_two_entry_row(self):
        cm = confusion([0, 1], [0, 0])
        normed = row_normalize(cm)
        assert normed[0, 0] == 0.5 and normed[0, 1] == 0.5

    def test_zero_rows_stay_zero(self):
        cm = confusion([0], [0])
        normed = row_normalize(cm)
        assert normed[5].sum() == 0.0

    def test_single_entry_row(self):
        cm = confusion([4], [4])
        assert row_normalize(cm)[4, 4] == 1.0

    def test_nonzero_rows_sum_to_one(self):
        rng = np.random.default_rng(3)
        cm = confusion(rng.integers(0, 10, 500).tolist(), rng.integers(0, 10, 500).tolist())
        sums = row_normalize(cm).sum(axis=1)
        for i in range(10):
            if cm.counts[i].sum():
                assert abs(sums[i] - 1.0) < 1e-9


class TestRendering:
    def test_table_columns_and_row_order(self):
        golds = list(range(10)) * 4
        report = per_class_metrics(confusion(golds, golds))
        lines = render_metrics_table(report).strip().split("\n")
        header = lines[0].split()
        assert header == ["Label", "Precision", "Recall", "F-Score"]
        body = lines[2:]
        assert len(body) == 10
        for line, label in zip(body, LABELS):
            assert line.startswith(label.name)
        assert body[-1].split()[-3:] == ["1.000", "1.000", "1.000"]

    def test_three_decimal_formatting(self):
        golds = [9] * 29 + [8] * 13
        preds = [9] * 25 + [8] * 4 + [8] * 10 + [9] * 3
        report = per_class_metrics(confusion(preds, golds))
        table = render_metrics_table(report)
        row = [l for l in table.split("\n") if l.startswith("Miscellaneous")][0]
        cells = row.split()
        assert all(len(c.split(".")[1]) == 3 for c in cells[-3:])

    def test_json_report_fields(self):
        import json

        report = per_class_metrics(confusion([0, 1], [0, 1]))
        doc = json.loads(metrics_to_json(report))
        assert len(doc["per_class"]) == 10
        assert doc["per_class"][0]["label"] == "Theory/Concept"
        assert "macro" in doc and "accuracy" in doc
        assert doc["per_class"][3]["undefined"]["precision"] is True

    def test_csv_exports(self):
        cm = confusion([0, 0, 1], [0, 1, 1])
        raw = confusion_to_csv(cm)
        assert raw.splitlines()[0].startswith("true\\pred,Theory/Concept")
        assert len(raw.splitlines()) == 11
        normed = confusion_to_csv(cm, normalized=True)
        row0 = normed.splitlines()[1].split(",")[1:]
        assert sum(float(v) for v in row0) == pytest.approx(1.0, abs=1e-9)
