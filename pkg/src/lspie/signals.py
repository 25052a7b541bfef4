"""Test signals, Hankel trajectory matrices and data standardisation.

A trajectory matrix has ``window`` rows; row ``i`` is the series starting at
sample ``i``, so every column is a length-``window`` slice of the series and
entry ``(i, j)`` equals ``x[i + j]``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DegenerateRankError, InvalidArgumentError, StateError

__all__ = [
    "TimeSeries",
    "TrajectoryMatrix",
    "generate_signal",
    "hankelise",
    "dehankelise",
    "standardise",
    "stack_channels",
    "read_signal_csv",
    "write_signal_csv",
    "write_matrix_csv",
    "read_matrix_csv",
    "SIGNAL_KINDS",
    "NULL_EIGENVALUE_RTOL",
]

SIGNAL_KINDS = ("pure_sine", "decreasing_freq")

# eigenvalues below this fraction of the largest are treated as null
NULL_EIGENVALUE_RTOL = 1e-10


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled scalar channel.

    Parameters
    ----------
    values : ndarray, shape (N,)
        Samples, in signal units. Must be finite.
    sample_rate : float
        Samples per second, strictly positive.
    t0 : float
        Time of the first sample in seconds.
    """

    values: np.ndarray
    sample_rate: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise InvalidArgumentError("TimeSeries values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("TimeSeries values contain NaN or Inf")
        if not self.sample_rate > 0:
            raise InvalidArgumentError(f"sample_rate must be > 0, got {self.sample_rate}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.shape[0]

    @property
    def times(self):
        return self.t0 + np.arange(len(self)) / self.sample_rate


@dataclass(frozen=True)
class TrajectoryMatrix:
    """Hankel embedding of a series together with its standardisation state.

    ``column_means`` is set once the matrix has been centred and
    ``whitening_transform`` (shape ``(n_original, n_cols)``) once whitened, so
    that ``data == (raw - column_means) @ whitening_transform``.
    ``channel_rows`` records the ``(start, stop)`` row range of every channel
    when several trajectory matrices were stacked.
    """

    data: np.ndarray
    window: int
    n_cols: int
    source_len: int
    standardisation: str = "raw"
    column_means: np.ndarray | None = None
    whitening_transform: np.ndarray | None = None
    channel_rows: tuple = field(default=())

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise InvalidArgumentError("trajectory data must be a 2-D matrix")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if self.standardisation not in ("raw", "centered", "whitened"):
            raise InvalidArgumentError(f"unknown standardisation {self.standardisation!r}")
        if not self.channel_rows:
            object.__setattr__(self, "channel_rows", ((0, data.shape[0]),))

    @classmethod
    def from_array(cls, data, standardisation="raw"):
        """Wrap an arbitrary ``m x n`` matrix (treated as raw unless told otherwise)."""
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.size == 0:
            raise InvalidArgumentError("expected a non-empty 2-D matrix")
        m, n = data.shape
        means = np.zeros(n) if standardisation != "raw" else None
        return cls(data, window=m, n_cols=n, source_len=m + n - 1,
                   standardisation=standardisation, column_means=means)

    @property
    def shape(self):
        return self.data.shape

    @property
    def is_standardised(self):
        return self.standardisation != "raw"


def generate_signal(kind, n_samples=4000, sample_rate=4000 / (12 * np.pi)):
    """Sample one of the two toy signals at ``t_i = i / sample_rate``.

    ``pure_sine`` is ``sin(2 pi t)``; ``decreasing_freq`` is
    ``sin(2 pi t**0.85)``, whose instantaneous frequency falls over time.
    """
    if kind not in SIGNAL_KINDS:
        raise InvalidArgumentError(f"unknown signal kind {kind!r}; choose from {SIGNAL_KINDS}")
    if int(n_samples) != n_samples or n_samples < 2:
        raise InvalidArgumentError(f"n_samples must be an integer >= 2, got {n_samples}")
    if not sample_rate > 0:
        raise InvalidArgumentError(f"sample_rate must be > 0, got {sample_rate}")
    t = np.arange(int(n_samples)) / sample_rate
    if kind == "pure_sine":
        values = np.sin(2 * np.pi * t)
    else:
        values = np.sin(2 * np.pi * t ** 0.85)
    return TimeSeries(values, sample_rate=float(sample_rate), t0=0.0)


def hankelise(series, window):
    """Embed ``series`` into a ``window x (N - window + 1)`` Hankel matrix."""
    x = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    N = x.shape[0]
    if int(window) != window or not 2 <= window <= N - 1:
        raise InvalidArgumentError(
            f"window must be an integer in [2, {N - 1}] for a series of length {N}, got {window}")
    window = int(window)
    n = N - window + 1
    data = np.lib.stride_tricks.sliding_window_view(x, n).copy()
    return TrajectoryMatrix(data, window=window, n_cols=n, source_len=N)


def dehankelise(matrix):
    """Average the anti-diagonals of ``matrix`` into a series of length ``m + n - 1``.

    Exact inverse of :func:`hankelise` on true Hankel matrices.
    """
    if isinstance(matrix, TrajectoryMatrix):
        matrix = matrix.data
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise InvalidArgumentError("dehankelise needs a non-empty 2-D matrix")
    m, n = a.shape
    k = np.add.outer(np.arange(m), np.arange(n)).ravel()
    sums = np.bincount(k, weights=a.ravel(), minlength=m + n - 1)
    counts = np.bincount(k, minlength=m + n - 1)
    return sums / counts


def standardise(matrix, mode="center", drop_null=False):
    """Centre, or centre and whiten, the columns of a raw trajectory matrix.

    Whitening uses the sample covariance ``X^T X / (m - 1)``. Covariance
    eigenvalues below ``NULL_EIGENVALUE_RTOL`` times the largest are null;
    they raise :class:`DegenerateRankError` unless ``drop_null`` is set, in
    which case the whitened matrix keeps only the non-null directions.
    """
    if matrix.standardisation != "raw":
        raise StateError(f"matrix is already {matrix.standardisation}; standardise needs raw data")
    if mode not in ("center", "whiten"):
        raise InvalidArgumentError(f"mode must be 'center' or 'whiten', got {mode!r}")
    X = matrix.data
    means = X.mean(axis=0)
    Xc = X - means
    if mode == "center":
        return replace(matrix, data=Xc, standardisation="centered", column_means=means)

    m, n = Xc.shape
    if m < 2:
        raise InvalidArgumentError("whitening needs at least two rows")
    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    eig = s ** 2 / (m - 1)
    keep = eig > NULL_EIGENVALUE_RTOL * eig.max() if eig.size and eig.max() > 0 else np.zeros(eig.size, bool)
    null = [int(i) for i in np.flatnonzero(~keep)] + list(range(eig.size, n))
    if null and not drop_null:
        raise DegenerateRankError(
            f"covariance is rank deficient: {len(null)} of {n} eigen-directions are null "
            f"(indices {null[:10]}{'...' if len(null) > 10 else ''})",
            null_directions=null)
    if not keep.any():
        raise DegenerateRankError("covariance is identically zero", null_directions=list(range(n)))
    transform = vt[keep].T / np.sqrt(eig[keep])
    Z = Xc @ transform
    return replace(matrix, data=Z, n_cols=Z.shape[1], standardisation="whitened",
                   column_means=means, whitening_transform=transform)


def stack_channels(channels):
    """Concatenate per-channel trajectory matrices row-wise.

    The returned matrix records each channel's row range in ``channel_rows``.
    """
    channels = list(channels)
    if not channels:
        raise InvalidArgumentError("need at least one channel")
    if len(channels) == 1:
        return channels[0]
    n = channels[0].n_cols
    mode = channels[0].standardisation
    for i, ch in enumerate(channels):
        if ch.n_cols != n:
            raise InvalidArgumentError(f"channel {i} has {ch.n_cols} columns, expected {n}")
        if ch.standardisation != mode:
            raise InvalidArgumentError(
                f"channel {i} is {ch.standardisation}, expected {mode}")
    rows, start = [], 0
    for ch in channels:
        rows.append((start, start + ch.data.shape[0]))
        start += ch.data.shape[0]
    data = np.vstack([ch.data for ch in channels])
    means = None
    if mode != "raw":
        means = np.vstack([ch.column_means for ch in channels]).mean(axis=0)
    return TrajectoryMatrix(data, window=data.shape[0], n_cols=n, source_len=data.shape[0] + n - 1,
                            standardisation=mode, column_means=means, channel_rows=tuple(rows))


# -- CSV interchange -------------------------------------------------------

def write_signal_csv(series, path):
    """Write ``series`` as a two-column ``time,value`` CSV with header."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "value"])
        for t, v in zip(series.times, series.values):
            w.writerow([repr(float(t)), repr(float(v))])
    return path


def read_signal_csv(path):
    """Read a ``time,value`` CSV written by :func:`write_signal_csv`."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2:
        raise InvalidArgumentError(f"{path}: expected two columns (time, value)")
    t, v = data[:, 0], data[:, 1]
    rate = 1.0 if len(t) < 2 else 1.0 / float(np.mean(np.diff(t)))
    return TimeSeries(v, sample_rate=rate, t0=float(t[0]) if len(t) else 0.0)


def write_matrix_csv(matrix, path, header=None):
    """Write a 2-D array with full float precision (lossless round trip)."""
    if isinstance(matrix, TrajectoryMatrix):
        matrix = matrix.data
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        if header is not None:
            w.writerow(header)
        for row in a:
            w.writerow([repr(float(v)) for v in row])
    return path


def read_matrix_csv(path, header=False):
    return np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
