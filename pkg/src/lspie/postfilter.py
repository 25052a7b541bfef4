"""Lowpass Butterworth filtering of merged latent directions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import InvalidArgumentError

__all__ = ["FilterSpec", "DEFAULT_FILTER", "design_butterworth", "apply_filter", "magnitude_response"]


@dataclass(frozen=True)
class FilterSpec:
    """Butterworth lowpass settings.

    ``cutoff`` is the -3 dB frequency as a fraction of the sampling rate and
    must lie strictly below Nyquist (0.5).
    """

    order: int = 4
    cutoff: float = 0.1
    mode: str = "zero_phase"

    def __post_init__(self):
        if int(self.order) != self.order or not 1 <= self.order <= 8:
            raise InvalidArgumentError(f"filter order must be an integer in [1, 8], got {self.order}")
        if not 0 < self.cutoff < 0.5:
            raise InvalidArgumentError(f"cutoff must lie in (0, 0.5), got {self.cutoff}")
        if self.mode not in ("zero_phase", "causal"):
            raise InvalidArgumentError(f"mode must be 'zero_phase' or 'causal', got {self.mode!r}")

    @property
    def padlen(self):
        return 3 * self.order


DEFAULT_FILTER = FilterSpec()


def design_butterworth(order, cutoff):
    """Second-order sections of a digital Butterworth lowpass.

    Bilinear transform with prewarping, so the response is exactly -3 dB at
    ``cutoff`` (fraction of the sampling rate) and unity at DC.
    """
    spec = FilterSpec(order, cutoff)
    return signal.butter(spec.order, 2.0 * spec.cutoff, btype="lowpass", output="sos")


def magnitude_response(sos, freqs):
    """``|H|`` of a cascade of sections at ``freqs`` (fractions of the sampling rate)."""
    z = np.exp(-2j * np.pi * np.asarray(freqs, dtype=float))
    h = np.ones_like(z)
    for b0, b1, b2, a0, a1, a2 in sos:
        h *= (b0 + b1 * z + b2 * z * z) / (a0 + a1 * z + a2 * z * z)
    return np.abs(h)


def apply_filter(x, spec=DEFAULT_FILTER):
    """Filter a sequence.

    ``zero_phase`` runs the filter forwards and backwards over an
    odd-reflected extension of ``3 * order`` samples per side, so the
    magnitude response is squared and there is no phase shift.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InvalidArgumentError("apply_filter works on one-dimensional sequences")
    if x.shape[0] <= spec.padlen:
        raise InvalidArgumentError(
            f"signal of length {x.shape[0]} is too short for order {spec.order} "
            f"(needs more than {spec.padlen} samples)")
    sos = design_butterworth(spec.order, spec.cutoff)
    if spec.mode == "causal":
        return signal.sosfilt(sos, x)
    return signal.sosfiltfilt(sos, x, padtype="odd", padlen=spec.padlen)
