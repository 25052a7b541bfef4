"""
Ranking and scaling latent directions
=====================================

Ranking reorders directions by a metric. Scaling multiplies each direction
by its share ``s_j`` of the metric, so a panel of loadings shows large
contributors large and small ones small.
"""

import warnings

import numpy as np

from lspie import fit_ica, generate_signal, hankelise, list_metrics, rank, scale, standardise
from lspie.lvm import ConvergenceWarning
from lspie.svgplot import stacked_traces_svg, write_svg

X = standardise(hankelise(generate_signal("decreasing_freq"), 300))
with warnings.catch_warnings():
    warnings.simplefilter("ignore", ConvergenceWarning)
    ica = fit_ica(X, 8, seed=0)

print("registered metrics:", list_metrics())

for metric in ("variance_explained", "kurtosis"):
    r = rank(ica, metric, X)
    print(f"\n{metric}: order {r.permutation.tolist()}")
    print("  theta:", np.round(r.metric.values, 5))
    print("  s    :", np.round(r.metric.scores, 4))

# scale the ranked model; direction norms now equal the scaling scores
r = rank(ica, "variance_explained", X)
s = scale(r.base, "variance_explained", X)
print("\nnorms after scaling:", np.round(np.linalg.norm(s.scaled_loadings, axis=1), 4))

write_svg("rank_scale.svg", stacked_traces_svg(s.scaled_loadings, "ICA, ranked and scaled",
                                               labels=[f"IC{i + 1}" for i in range(8)]))
print("wrote rank_scale.svg")
