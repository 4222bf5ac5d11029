"""Hierarchical Gaussian smoothing of raw score sequences.

A score sequence is convolved with a truncated, renormalized 1D Gaussian,
iterating over sigma = 1, 2, ..., sigma_max so coarser passes see signal
already cleaned at finer scales. Boundaries use reflect padding (mirror
without repeating the edge sample) so events touching clip boundaries are
not artificially damped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ScoreSequence
from .errors import InvalidSigma, ValidationError


@dataclass(frozen=True)
class GaussianKernel:
    """Truncated Gaussian weights, symmetric, strictly positive, summing to 1."""

    sigma: float
    radius: int
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.size != 2 * self.radius + 1:
            raise ValidationError(
                f"kernel of radius {self.radius} needs {2 * self.radius + 1} "
                f"weights, got {w.size}")
        if not np.all(w > 0):
            raise ValidationError("kernel weights must be strictly positive")
        if not np.allclose(w, w[::-1], rtol=0, atol=1e-12):
            raise ValidationError("kernel weights must be symmetric")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValidationError("kernel weights must sum to 1")


def build_kernel(sigma: float, radius: int) -> GaussianKernel:
    """Evaluate exp(-(j - radius)^2 / (2 sigma^2)) on the integer grid and
    renormalize to unit mass.

    The final weight vector is nudged so its float sum is exactly 1.0, which
    makes smoothing an exact fixed point on constant inputs.
    """
    if not sigma > 0:
        raise InvalidSigma(f"sigma must be positive, got {sigma}")
    if radius < 1:
        raise ValidationError(f"radius must be >= 1, got {radius}")
    offsets = np.arange(-radius, radius + 1, dtype=float)
    raw = np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    w = raw / raw.sum()
    w[radius] += 1.0 - w.sum()
    return GaussianKernel(sigma=float(sigma), radius=int(radius),
                          weights=tuple(float(x) for x in w))


def default_radius(sigma: float) -> int:
    """Truncation half-width ceil(3 sigma), covering >99.7% of the mass."""
    return max(1, math.ceil(3.0 * sigma))


def smooth_once(scores: ScoreSequence, kernel: GaussianKernel) -> ScoreSequence:
    """Convolve one sequence with a kernel under reflect padding.

    Computed in centered form, out[t] = x[t] + sum_j w_j * (x_pad[t+j] - x[t]),
    so constant inputs pass through bit-exactly; the result is then clipped to
    the input range, which the exact convex combination guarantees anyway but
    float rounding can overshoot by ~1 ulp.
    """
    x = scores.as_array()
    r = kernel.radius
    w = np.asarray(kernel.weights, dtype=float)
    padded = np.pad(x, r, mode="reflect") if x.size > 1 else np.full(
        x.size + 2 * r, x[0])
    windows = np.lib.stride_tricks.sliding_window_view(padded, 2 * r + 1)
    out = x + (windows - x[:, None]) @ w
    np.clip(out, x.min(), x.max(), out=out)
    return ScoreSequence(video_id=scores.video_id, scores=out,
                         fps=scores.fps)


def hierarchical_smooth(scores: ScoreSequence, sigma_max: int) -> ScoreSequence:
    """Apply smooth_once for sigma = 1..sigma_max with radius ceil(3 sigma).

    Ascending sigma suppresses local noise first, then progressively wider
    passes flatten what remains while preserving the global trend.
    """
    if sigma_max < 1:
        raise InvalidSigma(f"sigma_max must be >= 1, got {sigma_max}")
    out = scores
    for sigma in range(1, sigma_max + 1):
        out = smooth_once(out, build_kernel(sigma, default_radius(sigma)))
    return out
