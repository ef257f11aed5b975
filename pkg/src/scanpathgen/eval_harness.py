"""Classification harness: stratified cross-validation with optional
generated/augmented training data, and deception scoring of generated scan
paths against classifiers trained on real data.

Two classifiers are provided: a nearest-centroid baseline and a
single-hidden-layer (100 unit) softmax network trained by full-batch
gradient descent with a small learning-rate/epoch grid search.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .features import augment, featurize_heatmap, featurize_hov
from .gaze_data import Dataset, GazeRecording

FEATURE_KINDS = ("heatmap", "hov")
CLASSIFIER_KINDS = ("nearest_centroid", "mlp_1hidden")

MLP_LEARNING_RATES = (0.1, 0.01, 0.001)
MLP_EPOCH_GRID = (50, 200)


def featurize_recordings(
    recordings: Sequence[GazeRecording],
    feature_kind: str,
    *,
    grid: tuple[int, int] = (16, 16),
    bins: int = 36,
) -> np.ndarray:
    """Stack one feature vector per recording into an (n, m) matrix."""
    if feature_kind == "heatmap":
        return np.array([featurize_heatmap(r, *grid).values for r in recordings])
    if feature_kind == "hov":
        return np.array([featurize_hov(r, bins).values for r in recordings])
    raise ConfigError(f"unknown feature kind {feature_kind!r}, expected one of {FEATURE_KINDS}")


class NearestCentroidClassifier:
    """Predicts the class whose mean feature vector is closest."""

    def __init__(self):
        self.classes_: list[str] = []
        self.centroids_: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: Sequence[str]) -> "NearestCentroidClassifier":
        y = np.asarray(y)
        self.classes_ = sorted(set(y.tolist()))
        self.centroids_ = np.array(
            [X[y == c].mean(axis=0) for c in self.classes_]
        )
        return self

    def predict(self, X: np.ndarray) -> list[str]:
        d2 = ((X[:, None, :] - self.centroids_[None, :, :]) ** 2).sum(axis=2)
        return [self.classes_[i] for i in np.argmin(d2, axis=1)]


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def mlp_init(n_in: int, n_hidden: int, n_out: int, rng: np.random.Generator) -> dict:
    return {
        "W1": rng.normal(0.0, 1.0 / np.sqrt(n_in), size=(n_in, n_hidden)),
        "b1": np.zeros(n_hidden),
        "W2": rng.normal(0.0, 1.0 / np.sqrt(n_hidden), size=(n_hidden, n_out)),
        "b2": np.zeros(n_out),
    }


def mlp_loss_and_grad(params: dict, X: np.ndarray, Y: np.ndarray) -> tuple[float, dict]:
    """Mean cross-entropy of the tanh/softmax network and its gradients.

    Y is one-hot (n, classes). Kept as a pure function of the parameter dict
    so the gradients can be checked against finite differences.
    """
    n = len(X)
    z1 = X @ params["W1"] + params["b1"]
    a1 = np.tanh(z1)
    logits = a1 @ params["W2"] + params["b2"]
    probs = _softmax(logits)
    loss = float(-np.log(np.clip((probs * Y).sum(axis=1), 1e-300, None)).mean())

    dlogits = (probs - Y) / n
    dW2 = a1.T @ dlogits
    db2 = dlogits.sum(axis=0)
    da1 = dlogits @ params["W2"].T
    dz1 = da1 * (1.0 - a1**2)
    dW1 = X.T @ dz1
    db1 = dz1.sum(axis=0)
    return loss, {"W1": dW1, "b1": db1, "W2": dW2, "b2": db2}


class MlpClassifier:
    """One hidden layer (tanh) + softmax, full-batch gradient descent."""

    def __init__(self, hidden: int = 100, seed: int = 0):
        self.hidden = hidden
        self.seed = seed
        self.classes_: list[str] = []
        self.params_: dict | None = None
        self.best_hyper_: tuple[float, int] | None = None

    def _train(self, X: np.ndarray, Y: np.ndarray, lr: float, epochs: int) -> dict:
        rng = np.random.default_rng(self.seed)
        params = mlp_init(X.shape[1], self.hidden, Y.shape[1], rng)
        for _ in range(epochs):
            _, grads = mlp_loss_and_grad(params, X, Y)
            for key in params:
                params[key] -= lr * grads[key]
        return params

    def fit(self, X: np.ndarray, y: Sequence[str]) -> "MlpClassifier":
        y = np.asarray(y)
        self.classes_ = sorted(set(y.tolist()))
        if len(self.classes_) < 2:
            raise ConfigError("MLP training needs at least 2 classes")
        index = {c: i for i, c in enumerate(self.classes_)}
        Y = np.zeros((len(y), len(self.classes_)))
        Y[np.arange(len(y)), [index[c] for c in y]] = 1.0

        # Hyperparameter search on a held-out 20% split, then retrain on all data.
        rng = np.random.default_rng(self.seed)
        order = rng.permutation(len(X))
        n_val = max(1, len(X) // 5)
        val_idx, train_idx = order[:n_val], order[n_val:]
        best_acc, best = -1.0, (MLP_LEARNING_RATES[0], MLP_EPOCH_GRID[0])
        if len(train_idx) >= 2 and len(set(y[train_idx].tolist())) >= 2:
            for lr in MLP_LEARNING_RATES:
                for epochs in MLP_EPOCH_GRID:
                    params = self._train(X[train_idx], Y[train_idx], lr, epochs)
                    pred = self._predict_with(params, X[val_idx])
                    acc = float(np.mean([p == y[i] for p, i in zip(pred, val_idx)]))
                    if acc > best_acc:
                        best_acc, best = acc, (lr, epochs)
        self.best_hyper_ = best
        self.params_ = self._train(X, Y, *best)
        return self

    def _predict_with(self, params: dict, X: np.ndarray) -> list[str]:
        a1 = np.tanh(X @ params["W1"] + params["b1"])
        logits = a1 @ params["W2"] + params["b2"]
        return [self.classes_[i] for i in np.argmax(logits, axis=1)]

    def predict(self, X: np.ndarray) -> list[str]:
        return self._predict_with(self.params_, X)


def train_mlp(
    features: Sequence[np.ndarray] | np.ndarray,
    labels: Sequence[str],
    hidden: int = 100,
    seed: int = 0,
) -> MlpClassifier:
    X = np.asarray([getattr(f, "values", f) for f in features], dtype=float)
    return MlpClassifier(hidden=hidden, seed=seed).fit(X, labels)


def train_classifier(kind: str, X: np.ndarray, y: Sequence[str], seed: int = 0):
    if kind in ("nearest_centroid", "centroid"):
        return NearestCentroidClassifier().fit(X, y)
    if kind in ("mlp_1hidden", "mlp"):
        return MlpClassifier(seed=seed).fit(X, y)
    raise ConfigError(f"unknown classifier kind {kind!r}, expected one of {CLASSIFIER_KINDS}")


@dataclass
class EvalReport:
    """Cross-validation and/or deception results."""

    classes: tuple[str, ...]
    chance_level: float
    fold_accuracies: tuple[float, ...] = ()
    mean_accuracy: float | None = None
    balanced_accuracy: float | None = None
    confusion: np.ndarray | None = None
    deception_per_class: dict[str, float] = field(default_factory=dict)
    deception_overall: float | None = None


def format_report(report: EvalReport) -> str:
    lines = [f"classes: {', '.join(report.classes)}", f"chance: {report.chance_level:.4f}"]
    if report.fold_accuracies:
        folds = ", ".join(f"{a:.4f}" for a in report.fold_accuracies)
        lines.append(f"fold accuracies: {folds}")
        lines.append(f"mean accuracy: {report.mean_accuracy:.4f}")
        lines.append(f"balanced accuracy: {report.balanced_accuracy:.4f}")
    if report.confusion is not None:
        lines.append("confusion (rows true, cols predicted):")
        for cls, row in zip(report.classes, report.confusion):
            lines.append(f"  {cls}: " + " ".join(str(int(v)) for v in row))
    if report.deception_overall is not None:
        lines.append(f"deception overall: {report.deception_overall:.4f}")
        for cls in report.classes:
            if cls in report.deception_per_class:
                lines.append(f"  deception {cls}: {report.deception_per_class[cls]:.4f}")
    return "\n".join(lines)


def stratified_folds(
    labels: Sequence[str], folds: int, rng: np.random.Generator
) -> list[list[int]]:
    """Shuffled per-class round-robin split; every class needs >= folds members."""
    if folds < 2:
        raise ConfigError(f"folds must be >= 2, got {folds}")
    by_class: dict[str, list[int]] = {}
    for i, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(i)
    for cls, idx in sorted(by_class.items()):
        if len(idx) < folds:
            raise ConfigError(
                f"class {cls!r} has {len(idx)} recordings, needs >= {folds} for {folds}-fold CV"
            )
    out: list[list[int]] = [[] for _ in range(folds)]
    for cls in sorted(by_class):
        idx = np.array(by_class[cls])
        rng.shuffle(idx)
        for j, i in enumerate(idx):
            out[j % folds].append(int(i))
    return [sorted(fold) for fold in out]


def _augment_training(
    recordings: list[GazeRecording],
    labels: list[str],
    rng: np.random.Generator,
) -> tuple[list[GazeRecording], list[str]]:
    """One augmented copy per kind per training recording (where applicable)."""
    by_class: dict[str, list[GazeRecording]] = {}
    for rec, lab in zip(recordings, labels):
        by_class.setdefault(lab, []).append(rec)
    extra_recs, extra_labels = [], []
    for rec, lab in zip(recordings, labels):
        pool = [r for r in by_class[lab] if r is not rec]
        for kind in ("crop", "noise", "combine", "random_points"):
            if kind == "crop" and len(rec.points) < 4:
                continue
            if kind == "combine" and not pool:
                continue
            extra_recs.append(augment(rec, kind, rng, pool=pool))
            extra_labels.append(lab)
    return extra_recs, extra_labels


def cross_validate(
    dataset: Dataset,
    feature_kind: str,
    classifier_kind: str,
    folds: int = 5,
    extra_training: Sequence[GazeRecording] | None = None,
    augment_training: bool = False,
    seed: int = 0,
    *,
    use_real_training: bool = True,
    grid: tuple[int, int] = (16, 16),
    bins: int = 36,
    threads: int = 1,
) -> EvalReport:
    """Stratified k-fold evaluation on real data.

    Generated recordings in `extra_training` join every training fold and
    never a test fold; augmentation likewise touches training folds only.
    With use_real_training=False the classifier sees only the extra
    (generated) data while test folds stay real.
    """
    labels = dataset.labels()
    classes = dataset.classes()
    rng_split = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(folds,)))
    fold_indices = stratified_folds(labels, folds, rng_split)
    index = {c: i for i, c in enumerate(classes)}
    extra = list(extra_training) if extra_training else []
    extra_labels = [rec.label(dataset.class_key) for rec in extra]
    for lab in extra_labels:
        if lab not in index:
            raise ConfigError(f"extra training recording has unknown class {lab!r}")

    def run_fold(f: int) -> tuple[float, np.ndarray]:
        test_idx = fold_indices[f]
        train_idx = [i for i in range(len(labels)) if i not in set(test_idx)]
        assert not set(test_idx) & set(train_idx)
        train_recs: list[GazeRecording] = []
        train_labels: list[str] = []
        if use_real_training:
            train_recs += [dataset.recordings[i] for i in train_idx]
            train_labels += [labels[i] for i in train_idx]
        train_recs += extra
        train_labels += extra_labels
        if augment_training:
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(f, 1)))
            aug_recs, aug_labels = _augment_training(train_recs, train_labels, rng)
            train_recs += aug_recs
            train_labels += aug_labels
        if not train_recs:
            raise ConfigError("no training data: real training disabled and no extra data")

        X_train = featurize_recordings(train_recs, feature_kind, grid=grid, bins=bins)
        X_test = featurize_recordings(
            [dataset.recordings[i] for i in test_idx], feature_kind, grid=grid, bins=bins
        )
        clf = train_classifier(classifier_kind, X_train, train_labels, seed=seed + f)
        pred = clf.predict(X_test)
        confusion = np.zeros((len(classes), len(classes)))
        hits = 0
        for i, p in zip(test_idx, pred):
            confusion[index[labels[i]], index[p]] += 1
            hits += int(p == labels[i])
        return hits / len(test_idx), confusion

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_fold, range(folds)))
    else:
        results = [run_fold(f) for f in range(folds)]

    accuracies = tuple(acc for acc, _ in results)
    confusion = np.sum([c for _, c in results], axis=0)
    recalls = [
        confusion[i, i] / confusion[i].sum() for i in range(len(classes)) if confusion[i].sum() > 0
    ]
    return EvalReport(
        classes=tuple(classes),
        chance_level=1.0 / len(classes),
        fold_accuracies=accuracies,
        mean_accuracy=float(np.mean(accuracies)),
        balanced_accuracy=float(np.mean(recalls)),
        confusion=confusion,
    )


def score_deception(clf, features_by_class: Mapping[str, np.ndarray]) -> tuple[dict[str, float], float]:
    """Fraction of generated features classified as their intended class."""
    per_class: dict[str, float] = {}
    hits = total = 0
    for cls in sorted(features_by_class):
        pred = clf.predict(features_by_class[cls])
        ok = sum(int(p == cls) for p in pred)
        per_class[cls] = ok / len(pred)
        hits += ok
        total += len(pred)
    return per_class, hits / total


def deception_rate(
    real: Dataset,
    generated_per_class: Mapping[str, Sequence[GazeRecording]],
    feature_kind: str,
    classifier_kind: str,
    seed: int = 0,
    *,
    grid: tuple[int, int] = (16, 16),
    bins: int = 36,
) -> EvalReport:
    """Train on all real data; deception succeeds when a generated recording
    is assigned the class its source model was trained on."""
    classes = real.classes()
    for cls in generated_per_class:
        if cls not in classes:
            raise ConfigError(f"generated data names unknown class {cls!r}")
    X = featurize_recordings(real.recordings, feature_kind, grid=grid, bins=bins)
    clf = train_classifier(classifier_kind, X, real.labels(), seed=seed)
    feats = {
        cls: featurize_recordings(recs, feature_kind, grid=grid, bins=bins)
        for cls, recs in generated_per_class.items()
        if len(recs) > 0
    }
    per_class, overall = score_deception(clf, feats)
    return EvalReport(
        classes=tuple(classes),
        chance_level=1.0 / len(classes),
        deception_per_class=per_class,
        deception_overall=overall,
    )
