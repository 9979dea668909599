"""Dataset loading, preprocessing, and synthetic problem generation.

Synthetic problems draw a feature matrix (optionally through a low-rank
factor pair so the features live in a proper subspace and the problem is
certifiably nonconvex), a k-sparse ground-truth weight vector, and labels
y = 1(x @ theta0 + noise >= 0).  Every random quantity comes from its own
named child stream of one seed, so adding or removing a draw in one place
never shifts the others and the clean generator matches the noisy one at
noise_sigma = 0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .model import Dataset

__all__ = [
    "DataError",
    "SynthSpec",
    "load_csv",
    "load_sparse_classification_format",
    "save_csv",
    "center",
    "apply_center",
    "train_test_split",
    "gen_separable",
    "gen_noisy",
]

# child-stream order of the generator seed; fixed so that draws stay put
_STREAMS = ("latent_left", "latent_right", "features", "support",
            "amplitudes", "signs", "train_noise", "test_noise")

AMPLITUDE_UNIFORM = "uniform"
AMPLITUDE_NORMAL = "normal"


class DataError(ValueError):
    """Malformed or unusable input data."""


@dataclass
class SynthSpec:
    """Parameters of one synthetic classification problem.

    ``latent_dim`` routes the features through a d x latent_dim times
    latent_dim x N factor product (scaled to unit spectral norm on the
    training block); None draws iid standard normal features.  Amplitudes
    of the k nonzeros of theta0 are either uniform on [amp_low, amp_high]
    with random signs, or standard normal.  ``noisy_test_labels`` controls
    whether test labels get their own noise draw or stay clean.
    """

    d: int
    n_train: int
    k: int
    n_test: int = 0
    latent_dim: int | None = None
    amplitude: str = AMPLITUDE_UNIFORM
    amp_low: float = 5.0
    amp_high: float = 15.0
    noise_sigma: float = 0.0
    noisy_test_labels: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.n_train < 1:
            raise ValueError(f"n_train must be >= 1, got {self.n_train}")
        if self.n_test < 0:
            raise ValueError(f"n_test must be >= 0, got {self.n_test}")
        if not (0 <= self.k <= self.d):
            raise ValueError(f"k must lie in [0, d] = [0, {self.d}], got {self.k}")
        if self.latent_dim is not None and not (1 <= self.latent_dim <= self.d):
            raise ValueError(
                f"latent_dim must lie in [1, d] = [1, {self.d}], got {self.latent_dim}"
            )
        if self.amplitude not in (AMPLITUDE_UNIFORM, AMPLITUDE_NORMAL):
            raise ValueError(f"unknown amplitude law {self.amplitude!r}")
        if self.amp_low > self.amp_high:
            raise ValueError("amp_low must not exceed amp_high")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")


def _streams(seed: int) -> dict:
    children = np.random.SeedSequence(seed).spawn(len(_STREAMS))
    return {name: np.random.default_rng(child) for name, child in zip(_STREAMS, children)}


def _generate(spec: SynthSpec, with_noise: bool):
    rng = _streams(spec.seed)
    n_total = spec.n_train + spec.n_test

    if spec.latent_dim is not None:
        A = rng["latent_left"].standard_normal((spec.d, spec.latent_dim))
        B = rng["latent_right"].standard_normal((spec.latent_dim, n_total))
        M = A @ B
        scale = np.linalg.norm(M[:, : spec.n_train], 2)
        X_all = (M / scale).T
    else:
        X_all = rng["features"].standard_normal((n_total, spec.d))

    support = rng["support"].choice(spec.d, size=spec.k, replace=False)
    if spec.amplitude == AMPLITUDE_UNIFORM:
        values = rng["amplitudes"].uniform(spec.amp_low, spec.amp_high, spec.k)
        values *= rng["signs"].choice([-1.0, 1.0], size=spec.k)
    else:
        values = rng["amplitudes"].standard_normal(spec.k)
    theta0 = np.zeros(spec.d)
    theta0[support] = values

    margins = X_all @ theta0
    train_noise = np.zeros(spec.n_train)
    test_noise = np.zeros(spec.n_test)
    if with_noise and spec.noise_sigma > 0:
        train_noise = rng["train_noise"].normal(0.0, spec.noise_sigma, spec.n_train)
        if spec.noisy_test_labels:
            test_noise = rng["test_noise"].normal(0.0, spec.noise_sigma, spec.n_test)
    labels_train = (margins[: spec.n_train] + train_noise >= 0).astype(int)
    train = Dataset(X_all[: spec.n_train], labels_train)
    test = None
    if spec.n_test > 0:
        labels_test = (margins[spec.n_train:] + test_noise >= 0).astype(int)
        test = Dataset(X_all[spec.n_train:], labels_test)
    return train, test, theta0


def gen_separable(spec: SynthSpec):
    """Noise-free labels 1(x @ theta0 >= 0); the data is linearly separable."""
    return _generate(spec, with_noise=False)


def gen_noisy(spec: SynthSpec):
    """Labels 1(x @ theta0 + noise >= 0) with Gaussian pre-threshold noise."""
    return _generate(spec, with_noise=True)


def center(data: Dataset) -> Dataset:
    """Subtract column means (the intercept column, if any, is exempt).

    The returned dataset accumulates the total shift in ``center`` so that
    held-out data can be mapped the same way.  Centering twice is a no-op
    up to rounding.
    """
    X = data.features.copy()
    shift = X.mean(axis=0)
    if data.has_intercept:
        shift[-1] = 0.0
    X -= shift
    return Dataset(X, data.labels, centered=True, center=data.center + shift,
                   has_intercept=data.has_intercept)


def apply_center(data: Dataset, shift: np.ndarray) -> Dataset:
    """Shift features by an externally computed center (training center)."""
    shift = np.asarray(shift, dtype=float)
    if shift.shape != (data.n_features,):
        raise ValueError(
            f"center has shape {shift.shape} but the dataset has {data.n_features} features"
        )
    delta = shift - data.center
    return Dataset(data.features - delta, data.labels, centered=True, center=shift,
                   has_intercept=data.has_intercept)


def train_test_split(data: Dataset, test_fraction: float, seed: int,
                     center_split: bool = True):
    """Seeded shuffle and split; the test side is centered with the training
    center when ``center_split`` is set."""
    if not (0.0 < test_fraction < 1.0):
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = data.n_samples
    n_test = int(np.floor(n * test_fraction))
    n_train = n - n_test
    if n_test < 1 or n_train < 1:
        raise DataError(
            f"split of {n} samples at test_fraction {test_fraction} leaves an empty side"
        )
    perm = np.random.default_rng(seed).permutation(n)
    tr, te = perm[:n_train], perm[n_train:]
    train = Dataset(data.features[tr], data.labels[tr], centered=data.centered,
                    center=data.center, has_intercept=data.has_intercept)
    test = Dataset(data.features[te], data.labels[te], centered=data.centered,
                   center=data.center, has_intercept=data.has_intercept)
    if center_split:
        train = center(train)
        test = apply_center(test, train.center)
    return train, test


def _parse_label(token: str, label_map: dict | None, where: str) -> int:
    if label_map is not None:
        if token in label_map:
            return int(label_map[token])
        raise DataError(f"{where}: label {token!r} is not covered by the label map")
    try:
        value = float(token)
    except ValueError:
        raise DataError(
            f"{where}: cannot parse label {token!r}; pass a label map for string labels"
        ) from None
    if value in (0.0, 1.0):
        return int(value)
    raise DataError(
        f"{where}: label {token!r} is not binary; labels must be 0 or 1 "
        "(use a label map for other encodings)"
    )


def _parse_feature(token: str, where: str) -> float:
    if token == "":
        return 0.0  # missing values are filled with zeros
    try:
        return float(token)
    except ValueError:
        raise DataError(f"{where}: cannot parse feature value {token!r}") from None


def _looks_like_header(row: list[str]) -> bool:
    for cell in row:
        if cell.strip() == "":
            continue
        try:
            float(cell)
        except ValueError:
            return True
    return False


def load_csv(path, label_column=None, add_intercept: bool = False,
             label_map: dict | None = None, header: str = "auto") -> Dataset:
    """Load a dense CSV with one label column; empty cells become 0.0.

    ``label_column`` may be a header name or a 0-based index; None means
    the column named "label" when a header exists, else column 0.
    ``header`` is "auto" (sniff the first row), "yes", or "no".
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"{path}: file contains no rows")

    if header == "auto":
        has_header = _looks_like_header(rows[0])
    elif header in ("yes", "no"):
        has_header = header == "yes"
    else:
        raise ValueError(f"header must be 'auto', 'yes', or 'no', got {header!r}")

    names = None
    if has_header:
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path}: file contains a header but no data rows")

    if label_column is None:
        if names is not None and "label" in names:
            label_idx = names.index("label")
        else:
            label_idx = 0
    elif isinstance(label_column, str):
        if names is None:
            raise DataError(
                f"{path}: label column {label_column!r} was given by name but the "
                "file has no header"
            )
        if label_column not in names:
            raise DataError(f"{path}: no column named {label_column!r} in header")
        label_idx = names.index(label_column)
    else:
        label_idx = int(label_column)

    width = len(rows[0])
    if not (0 <= label_idx < width):
        raise DataError(f"{path}: label column index {label_idx} out of range for "
                        f"{width} columns")
    features = []
    labels = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        where = f"{path}: row {i + 1}"
        labels.append(_parse_label(row[label_idx].strip(), label_map, where))
        feats = [
            _parse_feature(cell.strip(), f"{where}, column {j + 1}")
            for j, cell in enumerate(row)
            if j != label_idx
        ]
        features.append(feats)
    X = np.asarray(features, dtype=float)
    if add_intercept:
        X = np.hstack([X, np.ones((X.shape[0], 1))])
    return Dataset(X, np.asarray(labels), has_intercept=add_intercept)


def load_sparse_classification_format(path, add_intercept: bool = False,
                                      num_features: int | None = None,
                                      label_map: dict | None = None) -> Dataset:
    """Load the plain-text sparse format ``label idx:val idx:val ...``.

    Indices are 1-based; absent features are zero.  The dimension is the
    largest index seen unless ``num_features`` pins it (needed to keep
    train and test files aligned).
    """
    entries = []
    labels = []
    max_idx = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split()
            where = f"{path}: line {lineno}"
            labels.append(_parse_label(tokens[0], label_map, where))
            row = {}
            for tok in tokens[1:]:
                if ":" not in tok:
                    raise DataError(f"{where}: malformed entry {tok!r}, expected idx:val")
                idx_str, val_str = tok.split(":", 1)
                try:
                    idx = int(idx_str)
                except ValueError:
                    raise DataError(f"{where}: feature index {idx_str!r} is not an integer") from None
                if idx < 1:
                    raise DataError(f"{where}: feature indices are 1-based, got {idx}")
                if idx in row:
                    raise DataError(f"{where}: duplicate feature index {idx}")
                row[idx] = _parse_feature(val_str, where)
                max_idx = max(max_idx, idx)
            entries.append(row)
    if not entries:
        raise DataError(f"{path}: file contains no rows")
    d = num_features if num_features is not None else max_idx
    if d < 1:
        raise DataError(f"{path}: cannot infer the feature dimension from an all-empty file")
    if max_idx > d:
        raise DataError(f"{path}: feature index {max_idx} exceeds num_features = {d}")
    X = np.zeros((len(entries), d))
    for i, row in enumerate(entries):
        for idx, val in row.items():
            X[i, idx - 1] = val
    if add_intercept:
        X = np.hstack([X, np.ones((X.shape[0], 1))])
    return Dataset(X, np.asarray(labels), has_intercept=add_intercept)


def save_csv(data: Dataset, path) -> None:
    """Write ``label,f1,...,fd`` rows with full-precision floats, so a
    load/save/load round trip reproduces the features bit for bit."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label"] + [f"f{j + 1}" for j in range(data.n_features)])
        for y, x in zip(data.labels, data.features):
            writer.writerow([int(y)] + [repr(float(v)) for v in x])
