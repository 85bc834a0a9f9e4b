import numpy as np
import pytest

from careerkit.errors import UndefinedMetricError
from careerkit.evaluation import (
    accuracy,
    build_report,
    confusion,
    f1_per_class,
    macro_avg,
    micro_ovr_counts,
    precision_per_class,
    recall_per_class,
    weighted_avg,
)
from careerkit.numerics import SeededRng


def brute_force_metrics(y_true, y_pred, n_classes):
    """Independent tally oracle: explicit loops, no shared code paths."""
    n = len(y_true)
    grid = [[0] * n_classes for _ in range(n_classes)]
    for t, p in zip(y_true, y_pred):
        grid[t][p] += 1
    correct = sum(grid[c][c] for c in range(n_classes))
    acc = correct / n
    precision, recall, f1, support = [], [], [], []
    for c in range(n_classes):
        col = sum(grid[r][c] for r in range(n_classes))
        row = sum(grid[c])
        p = grid[c][c] / col if col else 0.0
        r = grid[c][c] / row if row else 0.0
        precision.append(p)
        recall.append(r)
        f1.append(2 * p * r / (p + r) if p + r else 0.0)
        support.append(row)
    macro = {"precision": sum(precision) / n_classes,
             "recall": sum(recall) / n_classes, "f1": sum(f1) / n_classes}
    weighted = {k: sum(v[c] * support[c] for c in range(n_classes)) / n
                for k, v in (("precision", precision), ("recall", recall),
                             ("f1", f1))}
    tp = fp = tn = fn = 0
    for c in range(n_classes):
        for t, p in zip(y_true, y_pred):
            if t == c and p == c:
                tp += 1
            elif t != c and p == c:
                fp += 1
            elif t == c and p != c:
                fn += 1
            else:
                tn += 1
    return grid, acc, precision, recall, f1, support, macro, weighted, \
        (tp, fp, tn, fn)


def random_pair(rng, n_max=50, c_max=6):
    c = 2 + rng.below(c_max - 1)
    n = 2 + rng.below(n_max - 1)
    y_true = [rng.below(c) for _ in range(n)]
    y_pred = [rng.below(c) for _ in range(n)]
    return y_true, y_pred, c


class TestConfusion:
    def test_perfect(self):
        cm = confusion([0, 1], [0, 1], 2)
        assert cm.grid.tolist() == [[1, 0], [0, 1]]

    def test_all_wrong(self):
        cm = confusion([0, 0], [1, 1], 2)
        assert cm.grid[0, 1] == 2

    def test_matches_tally_oracle(self):
        rng = SeededRng(1)
        y_true, y_pred, c = random_pair(rng, n_max=50)
        grid, *_ = brute_force_metrics(y_true, y_pred, c)
        assert confusion(y_true, y_pred, c).grid.tolist() == grid

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion([0], [0, 1], 2)

    def test_out_of_range_code(self):
        with pytest.raises(ValueError):
            confusion([0, 2], [0, 1], 2)


class TestAccuracy:
    def test_39_of_44(self):
        y_true = [0] * 44
        y_pred = [0] * 39 + [1] * 5
        cm = confusion(y_true, y_pred, 6)
        assert accuracy(cm) == pytest.approx(39 / 44, abs=1e-15)
        assert f"{accuracy(cm) * 100:.2f}" == "88.64"

    def test_34_of_44(self):
        cm = confusion([0] * 44, [0] * 34 + [1] * 10, 6)
        assert accuracy(cm) == pytest.approx(34 / 44, abs=1e-15)

    def test_perfect(self):
        assert accuracy(confusion([0, 1, 2], [0, 1, 2], 3)) == 1.0

    def test_empty_rejected(self):
        with pytest.raises(UndefinedMetricError):
            accuracy(confusion([], [], 2))


class TestPerClass:
    def test_perfect(self):
        cm = confusion([0, 1, 2], [0, 1, 2], 3)
        assert precision_per_class(cm).tolist() == [1.0, 1.0, 1.0]
        assert recall_per_class(cm).tolist() == [1.0, 1.0, 1.0]
        assert f1_per_class(cm).tolist() == [1.0, 1.0, 1.0]

    def test_never_predicted_class_gets_zero(self):
        cm = confusion([0, 1], [0, 0], 2)
        assert precision_per_class(cm)[1] == 0.0
        report = build_report([0, 1], [0, 0], ["a", "b"], "m")
        assert (1, "precision") in report.zero_division

    def test_hand_computed_two_class_grid(self):
        # grid [[3,1],[2,4]]
        y_true = [0] * 4 + [1] * 6
        y_pred = [0, 0, 0, 1] + [0, 0, 1, 1, 1, 1]
        cm = confusion(y_true, y_pred, 2)
        assert cm.grid.tolist() == [[3, 1], [2, 4]]
        assert precision_per_class(cm) == pytest.approx([0.6, 0.8])
        assert recall_per_class(cm) == pytest.approx([0.75, 2 / 3])
        assert f1_per_class(cm) == pytest.approx([2 / 3, 8 / 11])

    def test_f1_between_min_and_max(self):
        rng = SeededRng(2)
        for _ in range(50):
            y_true, y_pred, c = random_pair(rng)
            cm = confusion(y_true, y_pred, c)
            p = precision_per_class(cm)
            r = recall_per_class(cm)
            f1 = f1_per_class(cm)
            for i in range(c):
                if p[i] + r[i] > 0:
                    assert min(p[i], r[i]) - 1e-12 <= f1[i] <= max(p[i], r[i]) + 1e-12


class TestAverages:
    def test_equal_supports(self):
        per_class = np.array([1.0, 0.5])
        assert macro_avg(per_class) == 0.75
        assert weighted_avg(per_class, np.array([10, 10])) == 0.75

    def test_weighted_hand_computed(self):
        assert weighted_avg(np.array([1.0, 0.5]),
                            np.array([30, 10])) == pytest.approx(0.875)

    def test_single_class(self):
        assert macro_avg(np.array([0.7])) == pytest.approx(0.7)
        assert weighted_avg(np.array([0.7]), np.array([9])) == pytest.approx(0.7)

    def test_weighted_recall_equals_accuracy(self):
        rng = SeededRng(3)
        for _ in range(100):
            y_true, y_pred, c = random_pair(rng)
            cm = confusion(y_true, y_pred, c)
            keep = cm.supports > 0
            wr = weighted_avg(recall_per_class(cm)[keep], cm.supports[keep])
            assert abs(wr - accuracy(cm)) < 1e-12


class TestMicroOvrCounts:
    def test_svm_row_shape(self):
        cm = confusion([0] * 44, [0] * 39 + [1] * 5, 6)
        counts = micro_ovr_counts(cm)
        assert (counts.tp, counts.fp, counts.tn, counts.fn) == (39, 5, 215, 5)

    def test_mlp_row_shape(self):
        cm = confusion([0] * 44, [0] * 38 + [1] * 6, 6)
        counts = micro_ovr_counts(cm)
        assert (counts.tp, counts.fp, counts.tn, counts.fn) == (38, 6, 214, 6)

    def test_perfect(self):
        cm = confusion([0, 1, 2] * 3 + [0], [0, 1, 2] * 3 + [0], 3)
        counts = micro_ovr_counts(cm)
        assert (counts.tp, counts.fp, counts.tn, counts.fn) == (10, 0, 20, 0)

    def test_identities_and_ovr_oracle(self):
        rng = SeededRng(4)
        for _ in range(50):
            y_true, y_pred, c = random_pair(rng)
            cm = confusion(y_true, y_pred, c)
            counts = micro_ovr_counts(cm)
            n = len(y_true)
            assert counts.tp + counts.fn == n
            assert counts.tp + counts.fp == n
            assert counts.fp == counts.fn
            assert counts.tn == n * (c - 1) - counts.fp
            *_, oracle = brute_force_metrics(y_true, y_pred, c)
            assert (counts.tp, counts.fp, counts.tn, counts.fn) == oracle
            assert accuracy(cm) == pytest.approx(counts.tp / n, abs=1e-15)


class TestBuildReport:
    def test_matches_oracle_everywhere(self):
        rng = SeededRng(5)
        for _ in range(30):
            y_true, y_pred, c = random_pair(rng)
            labels = [f"c{i}" for i in range(c)]
            report = build_report(y_true, y_pred, labels, "model")
            _, acc, precision, recall, f1, support, macro, weighted, counts = \
                brute_force_metrics(y_true, y_pred, c)
            assert report.accuracy == pytest.approx(acc, abs=1e-12)
            assert report.precision == pytest.approx(precision, abs=1e-12)
            assert report.recall == pytest.approx(recall, abs=1e-12)
            assert report.f1 == pytest.approx(f1, abs=1e-12)
            assert report.supports.tolist() == support
            for key in macro:
                assert report.macro[key] == pytest.approx(macro[key], abs=1e-12)
                assert report.weighted[key] == pytest.approx(weighted[key],
                                                             abs=1e-12)
            assert (report.counts.tp, report.counts.fp, report.counts.tn,
                    report.counts.fn) == counts

    def test_serialization_round_trip(self):
        report = build_report([0, 1, 1], [0, 1, 0], ["x", "y"], "toy")
        data = report.to_dict()
        assert data["model"] == "toy"
        assert data["per_class"]["x"]["support"] == 1
        text = report.to_text()
        assert "accuracy" in text and "weighted avg" in text

    def test_empty_rejected(self):
        with pytest.raises(UndefinedMetricError):
            build_report([], [], ["a", "b"], "m")
