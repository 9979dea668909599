"""Logistic model: dataset container, loss, gradient, and curvature bounds.

Samples are rows of ``features``; labels live in {0, 1}.  For a weight
vector ``theta`` the model is  p(y=1 | x) = sigmoid(theta @ x)  and the
negative log-likelihood over the dataset is

    loss(theta) = sum_i log(1 + exp(-s_i * (theta @ x_i))),   s_i = 2*y_i - 1

which is evaluated through ``logaddexp`` so that margins up to +-1e4 stay
finite.  The gradient Lipschitz constant is bounded by ||X||^2 / 4 with
||X|| the spectral norm of the feature matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Dataset",
    "sigmoid",
    "loss",
    "loss_gradient",
    "spectral_norm",
    "lipschitz_bound",
    "predict",
    "predict_many",
]


@dataclass
class Dataset:
    """Feature matrix (N x d), binary labels, and centering bookkeeping.

    ``center`` is the vector already subtracted from the raw features
    (zeros when ``centered`` is false).  When ``has_intercept`` is true the
    last column is a constant-1 column that centering must leave alone.
    Instances are treated as immutable once constructed.
    """

    features: np.ndarray
    labels: np.ndarray
    centered: bool = False
    center: np.ndarray | None = None
    has_intercept: bool = False

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"features must be a 2-d array with N,d >= 1, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("features contain non-finite values")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError(
                f"labels must be 1-d with one entry per sample, got shape {y.shape} "
                f"for {X.shape[0]} samples"
            )
        y = y.astype(int)
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must take values in {0, 1}")
        c = self.center
        c = np.zeros(X.shape[1]) if c is None else np.asarray(c, dtype=float)
        if c.shape != (X.shape[1],) or not np.all(np.isfinite(c)):
            raise ValueError("center must be a finite length-d vector")
        self.features = X
        self.labels = y
        self.center = c
        self.centered = bool(self.centered)
        self.has_intercept = bool(self.has_intercept)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def sigmoid(t):
    """Numerically stable logistic function, elementwise."""
    a = np.asarray(t, dtype=float)
    e = np.exp(-np.abs(a))
    out = np.where(a >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return float(out) if np.ndim(t) == 0 else out


def _check_theta(theta, data: Dataset) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (data.n_features,):
        raise ValueError(
            f"theta has shape {theta.shape} but the dataset has {data.n_features} features"
        )
    return theta


def loss(theta, data: Dataset) -> float:
    """Negative log-likelihood of the dataset under theta."""
    theta = _check_theta(theta, data)
    z = data.features @ theta
    signs = 2.0 * data.labels - 1.0
    return float(np.sum(np.logaddexp(0.0, -signs * z)))


def loss_gradient(theta, data: Dataset) -> np.ndarray:
    """Gradient of the loss: X^T (sigmoid(X theta) - y)."""
    theta = _check_theta(theta, data)
    z = data.features @ theta
    return data.features.T @ (sigmoid(z) - data.labels)


def spectral_norm(data: Dataset, tol: float = 1e-10) -> float:
    """Largest singular value of the feature matrix by power iteration.

    The start vector comes from a fixed seed, so repeated calls agree
    bitwise.  Iteration stops once successive estimates agree to relative
    tolerance ``tol`` (capped at 10000 sweeps).
    """
    X = data.features
    if not X.any():
        return 0.0
    rng = np.random.default_rng(0)
    v = rng.standard_normal(X.shape[1])
    nv = np.linalg.norm(v)
    v = v / nv
    estimate = 0.0
    for _ in range(10000):
        u = X @ v
        w = X.T @ u
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # start vector sits in the null space; perturb and continue
            v = rng.standard_normal(X.shape[1])
            v /= np.linalg.norm(v)
            continue
        new = float(np.sqrt(np.dot(u, u)))  # ||X v|| with ||v|| = 1
        v = w / nw
        if abs(new - estimate) <= tol * max(new, np.finfo(float).tiny):
            return new
        estimate = new
    return estimate


def lipschitz_bound(data: Dataset) -> float:
    """Upper bound ||X||^2 / 4 on the loss gradient's Lipschitz constant."""
    s = spectral_norm(data, tol=1e-12)
    return 0.25 * s * s


def predict(theta, x):
    """Predicted label and probability for one sample; ties go to label 1.

    If the model was trained on centered features the caller must subtract
    the stored center from ``x`` first.
    """
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.shape != theta.shape:
        raise ValueError(f"sample has shape {x.shape} but theta has shape {theta.shape}")
    z = float(x @ theta)
    return (1 if z >= 0 else 0), sigmoid(z)


def predict_many(theta, features):
    """Vectorized predict over the rows of a feature matrix."""
    theta = np.asarray(theta, dtype=float)
    X = np.asarray(features, dtype=float)
    z = X @ theta
    return (z >= 0).astype(int), sigmoid(z)
