"""Command-line entry point: ``lspie {generate,run,reproduce-paper,list-metrics}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from . import metrics, pipeline, signals
from .errors import LspieError

# CLI flag dest -> RunConfig field
_RUN_FLAGS = {
    "input": "input", "n_samples": "n_samples", "sample_rate": "sample_rate",
    "time_column": "time_column", "window": "window", "model": "model", "k": "k",
    "metric": "metric", "enhance": "enhancements", "order": "order",
    "scale_divide": "scale_divide", "similarity": "similarity", "backend": "backend",
    "eps": "eps", "min_members": "min_members", "seed": "seed", "contrast": "contrast",
    "tol": "tol", "max_iter": "max_iter", "out": "output_dir",
}


def _parser():
    p = argparse.ArgumentParser(prog="lspie", description="Latent-space enhancement of PCA/ICA "
                                "models fitted to Hankelised time series.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a built-in toy signal to CSV")
    g.add_argument("kind", choices=signals.SIGNAL_KINDS)
    g.add_argument("--n-samples", type=int, default=4000)
    g.add_argument("--sample-rate", type=float, default=pipeline.TOY_SAMPLE_RATE)
    g.add_argument("--out", required=True, help="output CSV path")

    r = sub.add_parser("run", help="run one configured pipeline")
    r.add_argument("--config", help="JSON config file; flags override its values")
    r.add_argument("--input", help=f"signal kind {signals.SIGNAL_KINDS} or CSV path")
    r.add_argument("--n-samples", type=int)
    r.add_argument("--sample-rate", type=float)
    r.add_argument("--time-column", action="store_true", default=None,
                   help="first CSV column holds sample times")
    r.add_argument("--window", type=int)
    r.add_argument("--model", choices=("pca", "ica"))
    r.add_argument("--k", type=int)
    r.add_argument("--metric")
    r.add_argument("--enhance", nargs="*", metavar="STEP",
                   help="ordered steps: rank scale 'cluster(K)' condense")
    r.add_argument("--order", choices=("descending", "ascending"))
    r.add_argument("--scale-divide", action="store_true", default=None,
                   help="scale by L/s instead of s*L")
    r.add_argument("--similarity", choices=("abs_cosine", "score_correlation"))
    r.add_argument("--backend", choices=("agglomerative", "kmeans"))
    r.add_argument("--eps", type=float)
    r.add_argument("--min-members", type=int)
    r.add_argument("--filter", choices=("on", "off"))
    r.add_argument("--filter-order", type=int)
    r.add_argument("--filter-cutoff", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--contrast", choices=("logcosh", "cube"))
    r.add_argument("--tol", type=float)
    r.add_argument("--max-iter", type=int)
    r.add_argument("--out", help="output directory (default lspie_out/<timestamp>)")

    rp = sub.add_parser("reproduce-paper", help="both toy signals x {PCA, ICA}")
    rp.add_argument("--out", help="output directory (default lspie_out/<timestamp>)")
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--jobs", type=int, default=1)

    sub.add_parser("list-metrics", help="print registered metric names")
    return p


def build_config(args):
    """Merge a config file (if any) with command-line flags; flags win."""
    doc = {}
    if args.config:
        doc = pipeline.load_config(args.config).to_dict()
    for dest, key in _RUN_FLAGS.items():
        value = getattr(args, dest)
        if value is not None:
            doc[key] = value
    filt = doc.get("filter")
    if args.filter == "off":
        filt = None
    elif args.filter == "on" or args.filter_order is not None or args.filter_cutoff is not None:
        filt = dict(filt or {})
        if args.filter_order is not None:
            filt["order"] = args.filter_order
        if args.filter_cutoff is not None:
            filt["cutoff"] = args.filter_cutoff
    doc["filter"] = filt
    known = {f.name for f in fields(pipeline.RunConfig)}
    return pipeline.RunConfig.from_dict({k: v for k, v in doc.items() if k in known})


def _print_report(report, stream):
    cfg = report.config
    print(f"{cfg['input']} {cfg['model']} k={cfg['k']} metric={cfg['metric']} "
          f"converged={report.converged}", file=stream)
    for row in report.metric_table:
        print(f"  [{row['index']}] theta={row['theta']:.6g} score={row['score']:.4f}", file=stream)
    if report.K is not None:
        print(f"  condensed K={report.K}", file=stream)
    print(f"  outputs in {Path(report.files['report']).parent}", file=stream)


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "generate":
            series = signals.generate_signal(args.kind, args.n_samples, args.sample_rate)
            print(signals.write_signal_csv(series, args.out))
        elif args.command == "list-metrics":
            for name in metrics.list_metrics():
                print(name)
        elif args.command == "run":
            report = pipeline.run_experiment(build_config(args))
            _print_report(report, sys.stdout)
        elif args.command == "reproduce-paper":
            out = Path(args.out) if args.out else pipeline.default_output_dir()
            reports = pipeline.reproduce_paper(out, seed=args.seed, jobs=args.jobs)
            for rep in reports:
                _print_report(rep, sys.stdout)
            (out / "summary.json").write_text(
                json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    except LspieError as exc:
        stage = getattr(exc, "stage", None)
        print(f"lspie: error{f' in stage {stage!r}' if stage else ''}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
