"""
Trajectory matrices
===================

A scalar series becomes a matrix by sliding a window along it: row ``i``
holds the series starting at sample ``i``. The result is constant along
anti-diagonals, and averaging those anti-diagonals gives the series back.
"""

import numpy as np

from lspie import dehankelise, generate_signal, hankelise, standardise

# six periods of sin(2 pi t), 4000 samples
x = generate_signal("pure_sine")
print(f"{len(x)} samples at {x.sample_rate:.3f} Hz, t in [0, {x.times[-1]:.3f}]")

H = hankelise(x, 300)
print("trajectory matrix:", H.data.shape, "source length", H.source_len)

# every anti-diagonal holds one sample
print("H[3, 10] == x[13]:", H.data[3, 10] == x.values[13])

# the round trip is exact up to rounding
err = np.abs(dehankelise(H) - x.values).max()
print(f"round-trip error {err:.1e}")

# centring removes each column mean; ICA whitens on top of this internally
X = standardise(H)
print("largest column mean after centring:", np.abs(X.data.mean(axis=0)).max())

# a pure tone spans only two directions, so the matrix has rank 2
s = np.linalg.svd(X.data, compute_uv=False)
print("leading singular values:", np.round(s[:4], 6))
