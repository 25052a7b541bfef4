"""Linear latent variable models: PCA and symmetric FastICA.

Both models expose the same :class:`LatentModel`: ``loadings`` holds one unit
latent direction per row in the column space of the data they were fitted on,
and ``scores = X @ loadings.T``.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, RankError, StateError
from .signals import NULL_EIGENVALUE_RTOL, TrajectoryMatrix

__all__ = [
    "LatentModel",
    "ConvergenceWarning",
    "fit_pca",
    "fit_ica",
    "whiten_components",
    "encode",
    "decode",
    "save_model",
    "load_model",
    "max_components",
]


class ConvergenceWarning(UserWarning):
    """FastICA stopped at ``max_iter`` before reaching ``tol``."""


@dataclass(frozen=True)
class LatentModel:
    """A fitted linear latent variable model.

    Attributes
    ----------
    kind : {'pca', 'ica'}
    loadings : ndarray, shape (k, n)
        Latent directions, one per row.
    scores : ndarray, shape (m, k)
        Projections of the training data on the loadings.
    eigenvalues : ndarray, shape (k,) or None
        Covariance eigenvalues in descending order (PCA only).
    mean : ndarray, shape (n,)
        Column means removed from the raw data before fitting.
    whitening_transform : ndarray, shape (k, n) or None
        Internal FastICA whitening matrix (ICA only).
    seed : int or None
        Seed of the FastICA initialisation.
    converged : bool
    n_iter : int
    """

    kind: str
    loadings: np.ndarray
    scores: np.ndarray
    eigenvalues: np.ndarray | None
    mean: np.ndarray
    whitening_transform: np.ndarray | None = None
    seed: int | None = None
    converged: bool = True
    n_iter: int = 0

    def __post_init__(self):
        for name in ("loadings", "scores", "eigenvalues", "mean", "whitening_transform"):
            value = getattr(self, name)
            if value is not None:
                value = np.array(value, dtype=float)
                value.setflags(write=False)
                object.__setattr__(self, name, value)

    @property
    def k(self):
        return self.loadings.shape[0]

    @property
    def n_features(self):
        return self.loadings.shape[1]

    @property
    def direction_norms(self):
        return np.linalg.norm(self.loadings, axis=1)

    @property
    def model_id(self):
        """Content hash identifying this model's directions."""
        h = hashlib.sha1(self.kind.encode())
        h.update(np.ascontiguousarray(self.loadings).tobytes())
        return h.hexdigest()[:12]

    def permuted(self, order):
        """Return a copy with directions reordered by ``order``."""
        order = np.asarray(order, dtype=int)
        return LatentModel(
            kind=self.kind,
            loadings=self.loadings[order],
            scores=self.scores[:, order],
            eigenvalues=None if self.eigenvalues is None else self.eigenvalues[order],
            mean=self.mean,
            whitening_transform=(None if self.whitening_transform is None
                                 else self.whitening_transform),
            seed=self.seed,
            converged=self.converged,
            n_iter=self.n_iter,
        )


def _as_standardised(X):
    if isinstance(X, TrajectoryMatrix):
        if not X.is_standardised:
            raise StateError("LVM fitting needs a centred or whitened trajectory matrix; "
                             "call standardise() first")
        means = X.column_means if X.whitening_transform is None else np.zeros(X.n_cols)
        return X.data, means
    a = np.asarray(X, dtype=float)
    if a.ndim != 2:
        raise InvalidArgumentError("expected a 2-D data matrix")
    if np.max(np.abs(a.mean(axis=0)), initial=0.0) > 1e-8 * max(1.0, np.abs(a).max()):
        raise StateError("data matrix is not column-centred; call standardise() first")
    return a, np.zeros(a.shape[1])


def max_components(m, n):
    """Largest k a centred ``m x n`` matrix can support, ``min(m - 1, n)``."""
    return max(0, min(m - 1, n))


def _check_k(k, m, n):
    if int(k) != k or k < 1:
        raise InvalidArgumentError(f"k must be a positive integer, got {k}")
    kmax = max_components(m, n)
    if k > kmax:
        raise RankError(f"k={k} exceeds the rank bound {kmax} of a centred {m}x{n} matrix")
    return int(k)


def _canonical_signs(L):
    """Flip rows so that each row's largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(L), axis=1)
    signs = np.sign(L[np.arange(L.shape[0]), idx])
    signs[signs == 0] = 1.0
    return L * signs[:, None]


def fit_pca(X, k):
    """Principal component analysis of a standardised matrix.

    Loadings are the top-``k`` eigenvectors of ``C = X^T X / (m - 1)``,
    obtained from the thin SVD of ``X``.
    """
    data, means = _as_standardised(X)
    m, n = data.shape
    k = _check_k(k, m, n)
    _, s, vt = np.linalg.svd(data, full_matrices=False)
    loadings = _canonical_signs(vt[:k])
    eig = s[:k] ** 2 / (m - 1)
    return LatentModel("pca", loadings, data @ loadings.T, eig, means)


def whiten_components(data, k):
    """PCA whitening of a centred matrix onto its top ``k`` directions.

    Returns ``(Z, K)`` with ``Z = data @ K.T`` of unit covariance. Directions
    whose eigenvalue is below ``NULL_EIGENVALUE_RTOL`` of the largest carry no
    signal; their rows of ``K`` are zero, so the matching columns of ``Z`` are
    zero instead of amplified round-off.
    """
    m = data.shape[0]
    _, s, vt = np.linalg.svd(data, full_matrices=False)
    eig = s[:k] ** 2 / (m - 1)
    live = eig > NULL_EIGENVALUE_RTOL * eig[0] if eig[0] > 0 else np.zeros(k, bool)
    K = np.zeros((k, data.shape[1]))
    K[live] = vt[:k][live] / np.sqrt(eig[live])[:, None]
    return data @ K.T, K


def _sym_decorrelate(W):
    """``W <- (W W^T)^{-1/2} W``."""
    s, u = np.linalg.eigh(W @ W.T)
    s = np.clip(s, np.finfo(float).tiny, None)
    return (u / np.sqrt(s)) @ u.T @ W


def _contrast(name, alpha):
    if name == "logcosh":
        def g(u):
            gu = np.tanh(alpha * u)
            return gu, alpha * (1.0 - gu ** 2)
    elif name == "cube":
        def g(u):
            return u ** 3, 3.0 * u ** 2
    else:
        raise InvalidArgumentError(f"unknown contrast {name!r}; use 'logcosh' or 'cube'")
    return g


def _fastica_symmetric(Z, W, g, tol, max_iter):
    m = Z.shape[0]
    W = _sym_decorrelate(W)
    for it in range(1, max_iter + 1):
        gwx, g_wx = g(Z @ W.T)
        W1 = _sym_decorrelate(gwx.T @ Z / m - g_wx.mean(axis=0)[:, None] * W)
        lim = np.max(np.abs(np.abs(np.einsum("ij,ij->i", W1, W)) - 1.0))
        W = W1
        if lim < tol:
            return W, True, it
    return W, False, max_iter


def fit_ica(X, k, contrast="logcosh", tol=1e-4, max_iter=200, seed=0, whiten=True,
            alpha=1.0):
    """Symmetric FastICA.

    With ``whiten=True`` the data is PCA-whitened onto ``k`` directions, the
    fixed-point iteration runs there, and the unmixing rows are mapped back to
    the data's column space and normalised. ``whiten=False`` assumes ``X`` is
    already white and iterates on all of its columns.

    Non-convergence is not fatal: the model comes back with
    ``converged=False`` and a :class:`ConvergenceWarning` is issued.
    """
    data, means = _as_standardised(X)
    m, n = data.shape
    k = _check_k(k, m, n)
    if not tol > 0:
        raise InvalidArgumentError(f"tol must be > 0, got {tol}")
    if int(max_iter) != max_iter or max_iter < 1:
        raise InvalidArgumentError(f"max_iter must be a positive integer, got {max_iter}")
    g = _contrast(contrast, alpha)
    rng = np.random.default_rng(seed)

    if whiten:
        Z, K = whiten_components(data, k)
        W0 = rng.standard_normal((k, k))
    else:
        Z, K = data, None
        W0 = rng.standard_normal((k, n))
    W, converged, n_iter = _fastica_symmetric(Z, W0, g, tol, int(max_iter))
    if not converged:
        warnings.warn(f"FastICA did not converge in {max_iter} iterations (tol={tol})",
                      ConvergenceWarning, stacklevel=2)

    unmixing = W @ K if whiten else W
    norms = np.linalg.norm(unmixing, axis=1)
    norms[norms == 0] = 1.0
    loadings = _canonical_signs(unmixing / norms[:, None])
    return LatentModel("ica", loadings, data @ loadings.T, None, means,
                       whitening_transform=K, seed=seed, converged=converged, n_iter=n_iter)


def _data_of(X):
    return X.data if isinstance(X, TrajectoryMatrix) else np.asarray(X, dtype=float)


def encode(model, X):
    """Project ``X`` onto the model's loadings: ``X @ loadings.T``."""
    data = np.atleast_2d(_data_of(X))
    if data.shape[1] != model.n_features:
        raise InvalidArgumentError(
            f"X has {data.shape[1]} columns, model expects {model.n_features}")
    return data @ model.loadings.T


def decode(model, scores, subset=None, restore_mean=False):
    """Sum score-weighted loadings back into data space.

    ``subset`` restricts the reconstruction to the listed directions;
    ``scores`` may then hold either all ``k`` columns or just the subset.
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    L = model.loadings
    if subset is not None:
        subset = np.asarray(subset, dtype=int).ravel()
        if subset.size and (subset.min() < -model.k or subset.max() >= model.k):
            raise InvalidArgumentError(f"subset indices out of range for k={model.k}")
        if scores.shape[1] == model.k:
            scores = scores[:, subset]
        elif scores.shape[1] != subset.size:
            raise InvalidArgumentError(
                f"scores have {scores.shape[1]} columns; expected {model.k} or {subset.size}")
        L = L[subset]
    elif scores.shape[1] != model.k:
        raise InvalidArgumentError(f"scores have {scores.shape[1]} columns, model has k={model.k}")
    Xhat = scores @ L
    if restore_mean:
        Xhat = Xhat + model.mean
    return Xhat


# -- persistence -----------------------------------------------------------

_ARRAY_FIELDS = ("loadings", "scores", "eigenvalues", "mean", "whitening_transform")


def save_model(model, path):
    """Write ``model`` to a JSON document (floats stored losslessly)."""
    doc = {
        "format": "lspie-latent-model",
        "version": 1,
        "kind": model.kind,
        "k": model.k,
        "seed": model.seed,
        "converged": model.converged,
        "n_iter": model.n_iter,
    }
    for name in _ARRAY_FIELDS:
        value = getattr(model, name)
        doc[name] = None if value is None else value.tolist()
    path = Path(path)
    path.write_text(json.dumps(doc))
    return path


def load_model(path):
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "lspie-latent-model":
        raise InvalidArgumentError(f"{path} is not a saved latent model")
    model = LatentModel(
        kind=doc["kind"],
        loadings=np.array(doc["loadings"], dtype=float),
        scores=np.array(doc["scores"], dtype=float),
        eigenvalues=None if doc["eigenvalues"] is None else np.array(doc["eigenvalues"]),
        mean=np.array(doc["mean"], dtype=float),
        whitening_transform=(None if doc["whitening_transform"] is None
                             else np.array(doc["whitening_transform"])),
        seed=doc["seed"],
        converged=doc["converged"],
        n_iter=doc["n_iter"],
    )
    if model.k != doc["k"]:
        raise InvalidArgumentError(f"{path}: k={doc['k']} but {model.k} loadings stored")
    return model
