"""Discriminant classifier and cross-validation tests."""

import numpy as np
import pytest

from crawltex import TrainingError, ValidationError, cross_validate, lda_fit, lda_predict
from crawltex.ml import benchmark_table, fold_assignments


def two_blobs(rng, n_per=10, dim=3, separation=5.0):
    a = rng.normal(0.0, 1.0, (n_per, dim))
    b = rng.normal(separation, 1.0, (n_per, dim))
    return np.vstack([a, b]), ["a"] * n_per + ["b"] * n_per


class TestLdaFit:
    def test_class_means(self):
        X = np.array([[0.0], [0.1], [10.0], [10.1]])
        model = lda_fit(X, ["a", "a", "b", "b"])
        assert model.means.ravel().tolist() == pytest.approx([0.05, 10.05])

    def test_fisher_direction_oracle(self):
        # Closed-form two-class solution: scatter-matrix inverse applied to
        # the mean difference. The fitted direction must be parallel.
        rng = np.random.default_rng(0)
        for _ in range(20):
            dim = int(rng.integers(1, 4))
            n1, n2 = int(rng.integers(3, 11)), int(rng.integers(3, 11))
            a = rng.normal(0, 1, (n1, dim)) + rng.normal(0, 3, dim)
            b = rng.normal(0, 1, (n2, dim)) + rng.normal(0, 3, dim)
            X = np.vstack([a, b])
            model = lda_fit(X, ["a"] * n1 + ["b"] * n2, shrinkage=0.0)

            mu_a, mu_b = a.mean(0), b.mean(0)
            scatter = (a - mu_a).T @ (a - mu_a) + (b - mu_b).T @ (b - mu_b)
            oracle = np.linalg.solve(np.atleast_2d(scatter), mu_a - mu_b)
            fitted = np.linalg.solve(
                model.regularized_covariance(), model.means[0] - model.means[1]
            )
            oracle /= np.linalg.norm(oracle)
            fitted /= np.linalg.norm(fitted)
            assert min(np.linalg.norm(fitted - oracle), np.linalg.norm(fitted + oracle)) < 1e-8

    def test_identical_distributions_chance_accuracy(self):
        rng = np.random.default_rng(200)
        accuracies = []
        for seed in range(10):
            X = rng.normal(0, 1, (40, 5))
            labels = ["a"] * 20 + ["b"] * 20
            accuracies.append(cross_validate(X, labels, folds=10, seed=seed).mean_accuracy)
        assert 0.3 < np.mean(accuracies) < 0.7

    def test_class_with_one_sample(self):
        X = np.array([[0.0], [1.0], [2.0]])
        with pytest.raises(TrainingError):
            lda_fit(X, ["a", "a", "b"])

    def test_single_class(self):
        X = np.zeros((4, 2))
        with pytest.raises(ValidationError):
            lda_fit(X, ["a"] * 4)

    def test_non_finite_features(self):
        X = np.array([[0.0], [np.inf], [1.0], [2.0]])
        with pytest.raises(ValidationError):
            lda_fit(X, ["a", "a", "b", "b"])

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        X, y = two_blobs(rng)
        m1, m2 = lda_fit(X, y), lda_fit(X, y)
        assert np.array_equal(m1.covariance, m2.covariance)
        assert np.array_equal(m1.means, m2.means)


class TestLdaPredict:
    def test_class_mean_wins(self):
        rng = np.random.default_rng(1)
        X, y = two_blobs(rng, separation=8.0)
        model = lda_fit(X, y)
        label, _ = lda_predict(model, model.means[1])
        assert label == "b"

    def test_midpoint_tie_goes_to_first_class(self):
        X = np.array([[-1.0], [-1.2], [1.0], [1.2]])
        model = lda_fit(X, ["a", "a", "b", "b"], shrinkage=0.0)
        label, scores = lda_predict(model, np.array([0.0]))
        assert scores[0] == scores[1]
        assert label == "a"

    def test_rescaling_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            dim = int(rng.integers(2, 6))
            n = int(rng.integers(4, 10))
            X = rng.normal(0, 1, (2 * n, dim))
            X[n:] += rng.normal(0, 2, dim)
            y = ["a"] * n + ["b"] * n
            scale = float(10 ** rng.uniform(-3, 3))
            probe = rng.normal(0, 2, dim)
            plain, _ = lda_predict(lda_fit(X, y), probe)
            scaled, _ = lda_predict(lda_fit(X * scale, y), probe * scale)
            assert plain == scaled

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(2)
        X, y = two_blobs(rng)
        model = lda_fit(X, y)
        with pytest.raises(ValidationError):
            lda_predict(model, np.zeros(7))


class TestCrossValidate:
    def test_perfectly_separable(self):
        rng = np.random.default_rng(3)
        X, y = two_blobs(rng, n_per=20, separation=50.0)
        report = cross_validate(X, y, folds=10, seed=0)
        assert report.mean_accuracy == 1.0
        assert report.std_accuracy == 0.0
        assert report.correct == report.total == 40

    def test_every_sample_tested_once(self):
        labels = [f"c{i % 3}" for i in range(30)]
        assignment, effective, _ = fold_assignments(labels, 10, seed=1)
        assert effective == 10
        assert assignment.size == 30
        counts = np.bincount(assignment, minlength=10)
        assert counts.sum() == 30

    def test_silk_shape_stratification(self):
        # 5 classes x 10 samples with 10 folds: every fold holds exactly
        # one sample of each class.
        labels = [f"k{c}" for c in range(5) for _ in range(10)]
        assignment, effective, warnings = fold_assignments(labels, 10, seed=3)
        assert effective == 10 and not warnings
        labels = np.asarray(labels)
        for f in range(10):
            members = labels[assignment == f]
            assert members.size == 5
            assert len(set(members.tolist())) == 5

    def test_confusion_accounting(self):
        rng = np.random.default_rng(4)
        X = rng.normal(0, 1, (60, 4))
        X[20:40] += 1.5
        X[40:] += 3.0
        y = ["a"] * 20 + ["b"] * 20 + ["c"] * 20
        report = cross_validate(X, y, folds=10, seed=2)
        assert int(np.trace(report.confusion)) == report.correct
        assert report.confusion.sum(axis=1).tolist() == [20, 20, 20]
        assert report.total == 60
        assert report.mean_accuracy == pytest.approx(report.fold_accuracies.mean())

    def test_permuted_labels_hit_chance(self):
        rng = np.random.default_rng(42)
        n_classes, per_class = 4, 20
        X = np.vstack([rng.normal(3 * c, 1.0, (per_class, 6)) for c in range(n_classes)])
        labels = [f"c{c}" for c in range(n_classes) for _ in range(per_class)]
        accuracies = []
        for seed in range(8):
            perm = np.random.default_rng(100 + seed).permutation(len(labels))
            permuted = [labels[i] for i in perm]
            accuracies.append(cross_validate(X, permuted, folds=10, seed=seed).mean_accuracy)
        chance = 1.0 / n_classes
        sigma = np.sqrt(chance * (1 - chance) / (len(labels) * len(accuracies)))
        assert abs(np.mean(accuracies) - chance) <= 3 * sigma

    def test_fold_reduction_warning(self):
        rng = np.random.default_rng(6)
        X, y = two_blobs(rng, n_per=4, separation=10.0)
        report = cross_validate(X, y, folds=10, seed=0)
        assert report.folds == 4
        assert any("reduced folds" in w for w in report.warnings)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(8)
        X = rng.normal(0, 1, (40, 4))
        X[20:] += 1.0
        y = ["a"] * 20 + ["b"] * 20
        r1 = cross_validate(X, y, folds=5, seed=9)
        r2 = cross_validate(X, y, folds=5, seed=9)
        assert np.array_equal(r1.fold_accuracies, r2.fold_accuracies)
        assert np.array_equal(r1.confusion, r2.confusion)

    def test_single_class_rejected(self):
        X = np.zeros((6, 2))
        with pytest.raises(ValidationError):
            cross_validate(X, ["a"] * 6)


class TestReportFormats:
    def test_fold_report_csv(self):
        rng = np.random.default_rng(10)
        X, y = two_blobs(rng, n_per=10, separation=20.0)
        report = cross_validate(X, y, folds=5, seed=0)
        lines = report.to_csv().strip().splitlines()
        assert lines[0] == "fold,accuracy,std,correct,total"
        assert len(lines) == 7
        assert lines[-1].startswith("overall,1.0,0.0,20,20")

    def test_benchmark_table(self):
        text = benchmark_table(
            [
                ("acrawler-both", 48, 50, 0.96, 0.0843),
                ("fourier", None, None, None, "boom"),
            ]
        )
        assert "96.00 (+/-8.43)" in text
        assert "failed: boom" in text
        assert text.splitlines()[0].startswith("method")
