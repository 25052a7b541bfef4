"""
The lowpass filter
==================

A Butterworth lowpass in second-order sections. Run forward and backward it
has zero phase and a squared magnitude response.
"""

import numpy as np

from lspie import FilterSpec, apply_filter, design_butterworth
from lspie.postfilter import magnitude_response

sos = design_butterworth(4, 0.1)
f = np.array([0.0, 0.05, 0.1, 0.2, 0.4])
print("frequency :", f)
print("|H|       :", np.round(magnitude_response(sos, f), 6))

# a slow tone plus a fast one; only the slow one survives
n = np.arange(2000)
cutoff = 0.03
slow = np.sin(2 * np.pi * 0.2 * cutoff * n)
fast = np.sin(2 * np.pi * 10 * cutoff * n)
y = apply_filter(slow + fast, FilterSpec(4, cutoff))
core = slice(200, 1800)
print(f"residual vs slow tone: {np.abs(y[core] - slow[core]).max():.2e}")

# zero-phase: the output peak lines up with the input peak
x = np.sin(2 * np.pi * 0.01 * n)
yz = apply_filter(x, FilterSpec(4, 0.05))
lags = np.arange(-20, 21)
xc = [np.dot(x[200:1800], yz[200 + L:1800 + L]) for L in lags]
print("lag of best alignment:", lags[int(np.argmax(xc))])

# the causal mode lags instead
yc = apply_filter(x, FilterSpec(4, 0.05, mode="causal"))
xc = [np.dot(x[200:1800], yc[200 + L:1800 + L]) for L in lags]
print("causal lag:", lags[int(np.argmax(xc))])
