"""Ranking, scaling, clustering and condensing of linear latent directions
fitted to Hankelised time series."""

from .enhance import (CondensedModel, RankedModel, ScaledModel, apply_condense_filter,
                      as_latent_model, cluster, condense, rank, scale)
from .errors import (DegenerateDataError, DegenerateRankError, InvalidArgumentError, LspieError,
                     MetricConflictError, MetricContractError, RankError, StateError,
                     UnknownMetricError)
from .lvm import LatentModel, decode, encode, fit_ica, fit_pca, load_model, save_model
from .metrics import MetricVector, evaluate, kurtosis, list_metrics, register_metric, variance_explained
from .postfilter import FilterSpec, apply_filter, design_butterworth
from .signals import (TimeSeries, TrajectoryMatrix, dehankelise, generate_signal, hankelise,
                      stack_channels, standardise)

__version__ = "0.1.0"
