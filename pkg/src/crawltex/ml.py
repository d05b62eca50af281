"""Linear discriminant classification and stratified cross-validation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TrainingError, ValidationError

DEFAULT_SHRINKAGE = 1e-4


def _as_matrix(features) -> np.ndarray:
    if isinstance(features, np.ndarray):
        matrix = np.asarray(features, np.float64)
    else:
        matrix = np.asarray([np.asarray(getattr(f, "values", f), np.float64) for f in features])
    if matrix.ndim != 2 or matrix.size == 0:
        raise ValidationError("features must form a non-empty 2-D matrix")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError("features contain non-finite values")
    return matrix


@dataclass(frozen=True)
class LdaModel:
    """Gaussian discriminant with one shared covariance.

    ``covariance`` is the pooled within-class covariance before shrinkage;
    scoring uses ``covariance + shrinkage * mean(diag) * I``. Priors are
    empirical class frequencies.
    """

    classes: list
    means: np.ndarray
    covariance: np.ndarray
    shrinkage: float
    priors: np.ndarray
    _coef: np.ndarray = field(repr=False, default=None)
    _intercept: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def regularized_covariance(self) -> np.ndarray:
        diag_mean = float(np.trace(self.covariance)) / self.dim
        # Degenerate all-zero covariance still needs an invertible matrix.
        ridge = self.shrinkage * diag_mean if diag_mean > 0 else self.shrinkage
        return self.covariance + ridge * np.eye(self.dim)

    def scores(self, matrix: np.ndarray) -> np.ndarray:
        return matrix @ self._coef + self._intercept


def lda_fit(features, labels, shrinkage: float = DEFAULT_SHRINKAGE) -> LdaModel:
    """Fit class means and a shrunk pooled covariance.

    The pooled covariance is the within-class scatter summed over classes
    and divided by (samples - classes); the shrinkage coefficient scales a
    ridge of the mean diagonal added at scoring time. Requires >= 2
    classes and >= 2 samples per class.
    """
    matrix = _as_matrix(features)
    labels = list(labels)
    if len(labels) != matrix.shape[0]:
        raise ValidationError(
            f"{matrix.shape[0]} feature rows but {len(labels)} labels"
        )
    if not 0 <= shrinkage <= 1:
        raise ValidationError(f"shrinkage must be in [0, 1], got {shrinkage}")

    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ValidationError(f"need >= 2 classes, got {len(classes)}")
    label_array = np.asarray(labels)

    dim = matrix.shape[1]
    means = np.zeros((len(classes), dim))
    scatter = np.zeros((dim, dim))
    counts = np.zeros(len(classes))
    for ci, cls in enumerate(classes):
        rows = matrix[label_array == cls]
        if rows.shape[0] < 2:
            raise TrainingError(f"class {cls!r} has {rows.shape[0]} sample(s); need >= 2")
        counts[ci] = rows.shape[0]
        means[ci] = rows.mean(axis=0)
        centered = rows - means[ci]
        scatter += centered.T @ centered
    covariance = scatter / (matrix.shape[0] - len(classes))
    priors = counts / counts.sum()

    model = LdaModel(
        classes=classes,
        means=means,
        covariance=covariance,
        shrinkage=float(shrinkage),
        priors=priors,
    )
    coef = np.linalg.solve(model.regularized_covariance(), means.T)
    intercept = -0.5 * np.einsum("cd,dc->c", means, coef) + np.log(priors)
    object.__setattr__(model, "_coef", coef)
    object.__setattr__(model, "_intercept", intercept)
    return model


def lda_predict(model: LdaModel, feature):
    """Predict one sample; returns (label, per-class scores).

    The winning class maximizes the shared-covariance Gaussian
    discriminant score; exact ties go to the earliest class in
    ``model.classes``.
    """
    values = np.asarray(getattr(feature, "values", feature), np.float64)
    if values.ndim != 1 or values.size != model.dim:
        raise ValidationError(
            f"feature has length {values.size}, model expects {model.dim}"
        )
    if not np.all(np.isfinite(values)):
        raise ValidationError("feature contains non-finite values")
    scores = model.scores(values[None, :])[0]
    return model.classes[int(np.argmax(scores))], scores


@dataclass
class FoldReport:
    """Cross-validation outcome.

    ``mean_accuracy`` averages the per-fold accuracies; ``correct`` counts
    hits over all folds and equals the confusion-matrix trace. Confusion
    rows are true classes, columns predictions, both in ``classes`` order.
    """

    fold_accuracies: np.ndarray
    fold_correct: np.ndarray
    fold_total: np.ndarray
    mean_accuracy: float
    std_accuracy: float
    correct: int
    total: int
    confusion: np.ndarray
    classes: list
    folds: int
    warnings: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["fold,accuracy,std,correct,total"]
        for f, acc in enumerate(self.fold_accuracies):
            lines.append(f"{f},{float(acc)},,{self.fold_correct[f]},{self.fold_total[f]}")
        lines.append(
            f"overall,{float(self.mean_accuracy)},{float(self.std_accuracy)},"
            f"{self.correct},{self.total}"
        )
        return "\n".join(lines) + "\n"


def fold_assignments(labels, folds: int, seed: int):
    """Seeded stratified fold index per sample.

    Samples of each class are shuffled and dealt round-robin, so per-class
    fold sizes differ by at most one. Returns (assignment array,
    effective fold count, warnings).
    """
    labels = np.asarray(list(labels))
    classes = sorted(set(labels.tolist()))
    if len(classes) < 2:
        raise ValidationError(f"need >= 2 classes for cross-validation, got {len(classes)}")
    class_counts = {cls: int((labels == cls).sum()) for cls in classes}
    smallest = min(class_counts.values())
    warnings = []
    effective = folds
    if smallest < folds:
        effective = smallest
        warnings.append(
            f"reduced folds from {folds} to {effective}: smallest class has "
            f"{smallest} sample(s)"
        )
    if effective < 2:
        raise ValidationError("every class needs >= 2 samples for cross-validation")

    rng = np.random.default_rng(seed)
    assignment = np.empty(labels.size, np.int64)
    for cls in classes:
        members = np.flatnonzero(labels == cls)
        shuffled = rng.permutation(members)
        assignment[shuffled] = np.arange(shuffled.size) % effective
    return assignment, effective, warnings


def cross_validate(
    features,
    labels,
    folds: int = 10,
    seed: int = 0,
    shrinkage: float = DEFAULT_SHRINKAGE,
) -> FoldReport:
    """Stratified k-fold evaluation of the discriminant classifier.

    Fold assignment is seeded and deterministic. Each fold is scored by a
    model fitted on the remaining folds; the report aggregates fold
    accuracies (mean and bias-corrected standard deviation), the total
    correct count, and the confusion matrix.
    """
    matrix = _as_matrix(features)
    labels = list(labels)
    if len(labels) != matrix.shape[0]:
        raise ValidationError(f"{matrix.shape[0]} feature rows but {len(labels)} labels")
    assignment, effective, warnings = fold_assignments(labels, folds, seed)

    classes = sorted(set(labels))
    class_index = {cls: i for i, cls in enumerate(classes)}
    label_array = np.asarray(labels)

    accuracies = np.zeros(effective)
    fold_correct = np.zeros(effective, np.int64)
    fold_total = np.zeros(effective, np.int64)
    confusion = np.zeros((len(classes), len(classes)), np.int64)
    for f in range(effective):
        test_mask = assignment == f
        model = lda_fit(matrix[~test_mask], label_array[~test_mask].tolist(), shrinkage)
        scores = model.scores(matrix[test_mask])
        predicted = [model.classes[i] for i in np.argmax(scores, axis=1)]
        actual = label_array[test_mask].tolist()
        hits = sum(p == a for p, a in zip(predicted, actual))
        fold_correct[f] = hits
        fold_total[f] = len(actual)
        accuracies[f] = hits / len(actual)
        for a, p in zip(actual, predicted):
            confusion[class_index[a], class_index[p]] += 1

    return FoldReport(
        fold_accuracies=accuracies,
        fold_correct=fold_correct,
        fold_total=fold_total,
        mean_accuracy=float(accuracies.mean()),
        std_accuracy=float(accuracies.std(ddof=1)) if effective > 1 else 0.0,
        correct=int(fold_correct.sum()),
        total=int(fold_total.sum()),
        confusion=confusion,
        classes=classes,
        folds=effective,
        warnings=warnings,
    )


def benchmark_table(rows) -> str:
    """Aligned plain-text comparison table.

    ``rows`` holds (method, correct, total, mean_accuracy, std_accuracy)
    tuples, or (method, None, None, None, message) for failed methods.
    """
    rendered = []
    for method, correct, total, mean, std in rows:
        if mean is None:
            rendered.append((method, "-", f"failed: {std}"))
        else:
            rendered.append(
                (method, f"{correct}/{total}", f"{mean * 100:.2f} (+/-{std * 100:.2f})")
            )
    headers = ("method", "correct", "accuracy %")
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in rendered)) if rendered else len(headers[i])
        for i in range(3)
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    for r in rendered:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(3)))
    return "\n".join(lines) + "\n"
