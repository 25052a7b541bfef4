"""
Clustering and condensing
=========================

Clustering merges directions into a chosen number ``K`` of groups.
Condensing picks ``K`` itself with density clustering on ``1 - |cos|``.
Members are sign-aligned before summing, since ``L`` and ``-L`` are the
same direction.
"""

import warnings

import numpy as np

from lspie import (FilterSpec, apply_condense_filter, as_latent_model, cluster, condense,
                   fit_ica, generate_signal, hankelise, standardise, variance_explained)
from lspie.enhance import direction_distances
from lspie.lvm import ConvergenceWarning

X = standardise(hankelise(generate_signal("pure_sine"), 300))
with warnings.catch_warnings():
    warnings.simplefilter("ignore", ConvergenceWarning)
    ica = fit_ica(X, 8, seed=0)

D = direction_distances(ica)
print("pairwise 1 - |cos| (rounded):")
print(np.round(D, 3))

# K = 7 merges exactly one pair: the two most similar directions
c7 = cluster(ica, 7)
print("\nK=7 clusters:", c7.clusters)

# condensing with the default eps = 0.2
c = condense(ica)
print("condensed into K =", c.K, "clusters:", c.clusters)
print("member signs:", c.member_signs)

cm = as_latent_model(c, X)
print("variance explained after condensing:", np.round(variance_explained(cm, X), 4))

# the optional lowpass pass smooths the merged loadings
smooth = apply_condense_filter(c, FilterSpec(order=4, cutoff=0.05))
change = np.abs(smooth.merged_loadings - c.merged_loadings).max()
print(f"largest change from filtering: {change:.2e}")

# eps controls how eagerly directions merge
for eps in (1e-6, 0.01, 0.2, 1.0):
    print(f"eps={eps:<6} K={condense(ica, eps=eps).K}")
