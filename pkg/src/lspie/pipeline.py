"""End-to-end experiment runs: signal -> Hankel -> LVM -> enhancements -> files."""

from __future__ import annotations

import csv
import json
import re
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime
from pathlib import Path

import numpy as np

from . import enhance, lvm, metrics, signals
from .errors import InvalidArgumentError
from .postfilter import FilterSpec
from .svgplot import stacked_traces_svg, write_svg

__all__ = [
    "RunConfig",
    "RunReport",
    "run_experiment",
    "reproduce_paper",
    "load_channels",
    "load_config",
    "default_output_dir",
    "TOY_SAMPLE_RATE",
]

TOY_SAMPLE_RATE = 4000 / (12 * np.pi)
_CLUSTER_RE = re.compile(r"^cluster(?:\((\d+)\)|:(\d+))?$")


@dataclass
class RunConfig:
    """Everything needed to reproduce one run.

    ``input`` is a built-in signal kind or a CSV path. ``enhancements`` is an
    ordered subset of ``rank``, ``scale``, ``cluster(K)`` and ``condense``.
    ``filter`` is ``None`` (off) or a dict of :class:`FilterSpec` fields.
    """

    input: str = "pure_sine"
    n_samples: int = 4000
    sample_rate: float = TOY_SAMPLE_RATE
    time_column: bool = False
    window: int = 300
    model: str = "pca"
    k: int = 8
    metric: str = "variance_explained"
    enhancements: list = field(default_factory=lambda: ["rank", "scale"])
    order: str = "descending"
    scale_divide: bool = False
    similarity: str = "abs_cosine"
    backend: str = "agglomerative"
    eps: float = enhance.LCON_EPS
    min_members: int = enhance.LCON_MIN_MEMBERS
    filter: dict | None = None
    seed: int = 0
    contrast: str = "logcosh"
    tol: float = 1e-4
    max_iter: int = 200
    output_dir: str | None = None

    def __post_init__(self):
        self.enhancements = list(self.enhancements)
        self.validate()

    def cluster_k(self):
        for step in self.enhancements:
            m = _CLUSTER_RE.match(step)
            if m:
                return int(m.group(1) or m.group(2)) if (m.group(1) or m.group(2)) else None
        return None

    def filter_spec(self):
        return None if self.filter is None else FilterSpec(**self.filter)

    def validate(self):
        steps = []
        for step in self.enhancements:
            if step in ("rank", "scale", "condense"):
                steps.append(step)
            elif _CLUSTER_RE.match(step):
                if self.cluster_k() is None:
                    raise InvalidArgumentError("cluster needs a cluster count, e.g. 'cluster(3)'")
                steps.append("cluster")
            else:
                raise InvalidArgumentError(f"unknown enhancement {step!r}")
        if "cluster" in steps and "condense" in steps:
            raise InvalidArgumentError("choose at most one of cluster and condense")
        if len(set(steps)) != len(steps):
            raise InvalidArgumentError("each enhancement may appear only once")
        if self.model not in ("pca", "ica"):
            raise InvalidArgumentError(f"model must be 'pca' or 'ica', got {self.model!r}")
        metrics.get_metric(self.metric)
        self.filter_spec()

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, doc):
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**doc)


@dataclass
class RunReport:
    config: dict
    metric_table: list
    permutation: list | None
    clusters: list | None
    condensed_metric_table: list | None
    K: int | None
    converged: bool
    files: dict
    timing: dict

    def to_dict(self):
        return asdict(self)


def load_config(path):
    """Read a JSON run configuration (a bare config or a report's ``config``)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read config {path}: {exc}") from exc
    if "config" in doc and isinstance(doc["config"], dict):
        doc = doc["config"]
    return RunConfig.from_dict(doc)


def default_output_dir():
    return Path("lspie_out") / datetime.now().strftime("%Y%m%d-%H%M%S")


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_channels(path, time_column=False):
    """Read a CSV with one column per channel (optional header and time column)."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read input CSV {path}: {exc}") from exc
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise InvalidArgumentError(f"{path}: no data rows")
    try:
        data = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise InvalidArgumentError(f"{path}: non-numeric or ragged data ({exc})") from exc
    rate = 1.0
    if time_column:
        if data.shape[1] < 2:
            raise InvalidArgumentError(f"{path}: --time-column needs at least two columns")
        t, data = data[:, 0], data[:, 1:]
        if len(t) > 1:
            dt = np.diff(t)
            if not np.all(dt > 0):
                raise InvalidArgumentError(f"{path}: time column must be strictly increasing")
            rate = 1.0 / float(dt.mean())
    return [signals.TimeSeries(data[:, j], sample_rate=rate) for j in range(data.shape[1])]


@contextmanager
def _stage(name):
    try:
        yield
    except Exception as exc:
        if not hasattr(exc, "stage"):
            exc.stage = name
        raise


def _metric_rows(name, mv):
    return [{"name": name, "index": i, "theta": float(t), "score": float(s)}
            for i, (t, s) in enumerate(zip(mv.values, mv.scores))]


def _write_metrics_csv(path, rows):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "index", "theta", "score"])
        for r in rows:
            w.writerow([r["name"], r["index"], repr(r["theta"]), repr(r["score"])])


def _write_clusters_csv(path, rows):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["original_index", "cluster_id", "sign"])
        w.writerows(rows)


def _signal_label(cfg):
    return cfg.input if cfg.input in signals.SIGNAL_KINDS else Path(cfg.input).name


def run_experiment(config, output_dir=None):
    """Run one configured pipeline and write its CSV, SVG and JSON outputs."""
    cfg = config if isinstance(config, RunConfig) else RunConfig.from_dict(config)
    out = Path(output_dir or cfg.output_dir or default_output_dir())
    timing, files = {}, {}
    t_start = time.perf_counter()

    with _stage("load"):
        if cfg.input in signals.SIGNAL_KINDS:
            channels = [signals.generate_signal(cfg.input, cfg.n_samples, cfg.sample_rate)]
        else:
            channels = load_channels(cfg.input, cfg.time_column)
    with _stage("hankelise"):
        H = signals.stack_channels([signals.hankelise(ch, cfg.window) for ch in channels])
    with _stage("standardise"):
        X = signals.standardise(H, "center")
    timing["prepare_s"] = time.perf_counter() - t_start

    t0 = time.perf_counter()
    with _stage("fit"):
        if cfg.model == "pca":
            model = lvm.fit_pca(X, cfg.k)
        else:
            model = lvm.fit_ica(X, cfg.k, contrast=cfg.contrast, tol=cfg.tol,
                                max_iter=cfg.max_iter, seed=cfg.seed)
    timing["fit_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    label = f"{_signal_label(cfg)} / {cfg.model.upper()}"
    fitted = model
    permutation = None
    scaled = None
    condensed = None
    condensed_rows = None
    with _stage("enhance"):
        steps = [("cluster" if s.startswith("cluster") else s) for s in cfg.enhancements]
        if "rank" in steps:
            ranked = enhance.rank(model, cfg.metric, X, cfg.order)
            model, permutation = ranked.base, ranked.permutation
        mv = metrics.evaluate(model, cfg.metric, X)
        if "scale" in steps:
            scaled = enhance.scale(model, cfg.metric, X, divide=cfg.scale_divide)
        target = scaled if scaled is not None else model
        if "cluster" in steps:
            condensed = enhance.cluster(target, cfg.cluster_k(), cfg.similarity, cfg.backend,
                                        seed=cfg.seed)
        elif "condense" in steps:
            condensed = enhance.condense(target, cfg.similarity, cfg.eps, cfg.min_members)
    if condensed is not None:
        with _stage("filter"):
            condensed = enhance.apply_condense_filter(condensed, cfg.filter_spec())
        with _stage("enhance"):
            cmodel = enhance.as_latent_model(condensed, X, model.mean)
            cmv = metrics.evaluate(cmodel, cfg.metric, X)
            condensed_rows = _metric_rows(cfg.metric, cmv)
    timing["enhance_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    with _stage("write"):
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise InvalidArgumentError(f"cannot create output directory {out}: {exc}") from exc
        files["model"] = lvm.save_model(fitted, out / "model.json")
        files["loadings"] = signals.write_matrix_csv(model.loadings, out / "loadings.csv")
        files["scores"] = signals.write_matrix_csv(model.scores, out / "scores.csv")
        metric_rows = _metric_rows(cfg.metric, mv)
        _write_metrics_csv(out / "metrics.csv", metric_rows)
        files["metrics"] = out / "metrics.csv"

        files["panel_raw"] = write_svg(out / "panel_raw.svg", stacked_traces_svg(
            fitted.loadings, f"{label}: normalised latent directions"))
        enhanced_traces = scaled.scaled_loadings if scaled is not None else model.loadings
        if scaled is not None:
            files["scaled_loadings"] = signals.write_matrix_csv(
                scaled.scaled_loadings, out / "scaled_loadings.csv")
        if permutation is not None or scaled is not None:
            what = " and ".join(w for w, on in (("ranked", permutation is not None),
                                                 ("scaled", scaled is not None)) if on)
            labels = [f"L{int(p)}" for p in (permutation if permutation is not None
                                             else range(model.k))]
            files["panel_enhanced"] = write_svg(out / "panel_enhanced.svg", stacked_traces_svg(
                enhanced_traces, f"{label}: {cfg.metric} {what}", labels=labels))
        clusters = None
        if condensed is not None:
            orig = permutation if permutation is not None else np.arange(model.k)
            clusters = [(int(orig[i]), c, s) for i, c, s in condensed.assignments()]
            clusters.sort()
            _write_clusters_csv(out / "clusters.csv", clusters)
            files["clusters"] = out / "clusters.csv"
            files["condensed_loadings"] = signals.write_matrix_csv(
                condensed.merged_loadings, out / "condensed_loadings.csv")
            _write_metrics_csv(out / "condensed_metrics.csv", condensed_rows)
            files["condensed_metrics"] = out / "condensed_metrics.csv"
            labels = ["+".join(f"L{int(orig[i])}" for i in members)
                      for members in condensed.clusters]
            files["panel_condensed"] = write_svg(out / "panel_condensed.svg", stacked_traces_svg(
                condensed.merged_loadings,
                f"{label}: {condensed.method.upper()} K={condensed.K}", labels=labels))
        (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
        files["config"] = out / "config.json"
    timing["write_s"] = time.perf_counter() - t0
    timing["total_s"] = time.perf_counter() - t_start

    report = RunReport(
        config=cfg.to_dict(),
        metric_table=metric_rows,
        permutation=None if permutation is None else [int(p) for p in permutation],
        clusters=None if clusters is None else [list(c) for c in clusters],
        condensed_metric_table=condensed_rows,
        K=None if condensed is None else condensed.K,
        converged=bool(fitted.converged),
        files={k: str(v) for k, v in files.items()},
        timing=timing,
    )
    report_path = out / "report.json"
    report.files["report"] = str(report_path)
    report_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return report


TOY_RUNS = [(sig, model) for sig in signals.SIGNAL_KINDS for model in ("pca", "ica")]


def reproduce_paper(output_dir=None, seed=0, jobs=1):
    """Run both toy signals through PCA and ICA with rank, scale and condense.

    Returns the four reports in the order pure-sine PCA, pure-sine ICA,
    decreasing-frequency PCA, decreasing-frequency ICA. Each run writes to its
    own ``<signal>_<model>`` subdirectory.
    """
    out = Path(output_dir or default_output_dir())
    configs = [RunConfig(input=sig, model=model, k=8, window=300, n_samples=4000,
                         sample_rate=TOY_SAMPLE_RATE, metric="variance_explained",
                         enhancements=["rank", "scale", "condense"], seed=seed,
                         output_dir=str(out / f"{sig}_{model}"))
               for sig, model in TOY_RUNS]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_experiment, configs))
    return [run_experiment(c) for c in configs]
