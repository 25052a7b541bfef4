"""Per-direction metrics and the metric registry.

A metric is any callable ``fn(model, X) -> array of k finite floats``, where
``X`` is the standardised data the model describes (``None`` means "use the
model's own scores"). Metrics are resolved by name through a process-wide
registry that ranking, scaling and the CLI all share.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, stats

from .errors import (DegenerateDataError, InvalidArgumentError, MetricConflictError,
                     MetricContractError, UnknownMetricError)
from .signals import TrajectoryMatrix

__all__ = [
    "MetricVector",
    "scaling_scores",
    "variance_explained",
    "kurtosis",
    "skewness",
    "negentropy_proxy",
    "register_metric",
    "get_metric",
    "list_metrics",
    "evaluate",
]

SHIFT_EPS = 1e-12


@dataclass(frozen=True)
class MetricVector:
    """Metric values ``theta`` for k directions and their scaling scores ``s``."""

    metric_name: str
    values: np.ndarray
    scores: np.ndarray
    source_model_id: str = ""

    def __len__(self):
        return self.values.shape[0]

    def permuted(self, order):
        return MetricVector(self.metric_name, self.values[order], self.scores[order],
                            self.source_model_id)


def scaling_scores(theta):
    """Normalise metric values into scores that sum to one.

    Negative values are shifted first (``theta - min(theta) + 1e-12``) so the
    result is always a convex weighting.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise InvalidArgumentError("no metric values to normalise")
    if np.any(theta < 0):
        theta = theta - theta.min() + SHIFT_EPS
    total = theta.sum()
    if not total > 0:
        raise DegenerateDataError("metric values sum to zero; scaling scores are undefined")
    return theta / total


def _data_of(X):
    return X.data if isinstance(X, TrajectoryMatrix) else np.asarray(X, dtype=float)


def _scores_of(model, X):
    if X is None:
        return model.scores
    return _data_of(X) @ model.loadings.T


def variance_explained(model, X):
    """Variance of each score column as a fraction of the total variance of ``X``."""
    if X is None:
        raise InvalidArgumentError("variance_explained needs the data matrix X")
    data = _data_of(X)
    total = data.var(axis=0, ddof=1).sum()
    if not total > 0:
        raise DegenerateDataError("data has zero total variance")
    norms = np.linalg.norm(model.loadings, axis=1)
    scores = data @ model.loadings.T
    return scores.var(axis=0, ddof=1) / norms ** 2 / total


def _checked_scores(model, X):
    s = _scores_of(model, X)
    if s.shape[0] < 4:
        raise DegenerateDataError(f"need at least 4 samples per score column, got {s.shape[0]}")
    sd = s.std(axis=0)
    flat = np.flatnonzero(sd <= 1e-300 + 1e-14 * np.abs(s).max(initial=0.0))
    if flat.size:
        raise DegenerateDataError(f"score column {int(flat[0])} has zero variance")
    return s


def kurtosis(model, X=None):
    """Absolute excess kurtosis of each score column."""
    return np.abs(stats.kurtosis(_checked_scores(model, X), axis=0, fisher=True, bias=True))


def skewness(model, X=None):
    """Absolute skewness of each score column."""
    return np.abs(stats.skew(_checked_scores(model, X), axis=0, bias=True))


def _logcosh(u):
    # log(cosh(u)) without overflow
    a = np.abs(u)
    return a + np.log1p(np.exp(-2 * a)) - np.log(2)


@lru_cache(maxsize=None)
def _gauss_logcosh():
    val, _ = integrate.quad(lambda u: _logcosh(u) * np.exp(-u * u / 2) / np.sqrt(2 * np.pi),
                            -40, 40, points=[0])
    return val


def negentropy_proxy(model, X=None):
    """``(E[log cosh y] - E[log cosh nu])**2`` on standardised scores, nu ~ N(0, 1)."""
    s = _checked_scores(model, X)
    y = (s - s.mean(axis=0)) / s.std(axis=0)
    return (_logcosh(y).mean(axis=0) - _gauss_logcosh()) ** 2


_registry = {}
_lock = threading.Lock()


def register_metric(name, fn):
    """Make ``fn(model, X)`` available under ``name``.

    Raises :class:`MetricConflictError` if ``name`` is taken.
    """
    if not isinstance(name, str) or not name:
        raise InvalidArgumentError("metric name must be a non-empty string")
    if not callable(fn):
        raise InvalidArgumentError(f"metric {name!r} is not callable")
    with _lock:
        if name in _registry:
            raise MetricConflictError(f"metric {name!r} is already registered")
        _registry[name] = fn
    return name, fn


def get_metric(name):
    if callable(name):
        return name
    try:
        return _registry[name]
    except KeyError:
        raise UnknownMetricError(
            f"unknown metric {name!r}; registered: {', '.join(sorted(_registry))}") from None


def list_metrics():
    return sorted(_registry)


def evaluate(model, metric, X=None):
    """Evaluate a metric (name or callable) and wrap it as a :class:`MetricVector`."""
    fn = get_metric(metric)
    name = metric if isinstance(metric, str) else getattr(fn, "__name__", "custom")
    values = np.asarray(fn(model, X), dtype=float)
    if values.shape != (model.k,):
        raise MetricContractError(
            f"metric {name!r} returned shape {values.shape}, expected ({model.k},)")
    if not np.all(np.isfinite(values)):
        raise MetricContractError(f"metric {name!r} returned non-finite values")
    return MetricVector(name, values, scaling_scores(values), model.model_id)


for _name, _fn in (("variance_explained", variance_explained), ("kurtosis", kurtosis),
                   ("skewness", skewness), ("negentropy_proxy", negentropy_proxy)):
    register_metric(_name, _fn)
