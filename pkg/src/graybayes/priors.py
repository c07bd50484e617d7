"""Distributions over actual (pre-noise) gray-levels.

Two sources of a color prior: the uniform assumption, and an estimate
recovered from an observed image histogram by inverting the noise matrix
(``observed histogram = noise_matrix @ actual histogram``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularNoiseMatrixError
from .noise import NoiseMatrix

SUM_TOL = 1e-12

DEFAULT_CONDITION_THRESHOLD = 1e12


@dataclass(frozen=True)
class ColorDistribution:
    """A probability vector over ``N`` gray-levels."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a non-empty vector")
        if p.min() < 0:
            raise ValueError("probabilities must be non-negative")
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities must sum to 1 within {SUM_TOL}, got {p.sum()!r}")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def num_colors(self) -> int:
        return int(self.probs.size)


def uniform_distribution(num_colors: int) -> ColorDistribution:
    """The uniform prior: every level has probability ``1/N``."""
    if num_colors < 1:
        raise ValueError("num_colors must be positive")
    p = np.full(num_colors, 1.0 / num_colors)
    # Exact unit sum regardless of 1/N rounding.
    p /= p.sum()
    return ColorDistribution(probs=p)


def observed_histogram(img, num_colors: int) -> ColorDistribution:
    """Normalized gray-level frequencies of an image.

    Accepts a :class:`~graybayes.image.GrayImage` or a plain integer array.
    """
    pixels = np.asarray(getattr(img, "pixels", img))
    if pixels.size == 0:
        raise ValueError("empty image")
    if pixels.min() < 0 or pixels.max() >= num_colors:
        raise ValueError(f"pixel values must lie in [0, {num_colors})")
    counts = np.bincount(pixels.ravel(), minlength=num_colors).astype(float)
    return ColorDistribution(probs=counts / counts.sum())


def deconvolve_histogram(
    observed: ColorDistribution,
    m: NoiseMatrix,
    condition_threshold: float = DEFAULT_CONDITION_THRESHOLD,
) -> ColorDistribution:
    """Estimate the actual-color distribution behind an observed histogram.

    Solves ``m.entries @ x = observed`` as a linear system.  Sampling noise in
    a real histogram can push components of the solution slightly negative;
    those are clamped to zero and the result renormalized, keeping the output
    a usable prior.

    Raises
    ------
    SingularNoiseMatrixError
        If the matrix's condition estimate exceeds ``condition_threshold``.
        A near-singular system would amplify histogram noise by the condition
        number, so refusing is safer than returning garbage.
    """
    if observed.num_colors != m.num_colors:
        raise ValueError(
            f"histogram length {observed.num_colors} does not match matrix size {m.num_colors}"
        )
    condition = float(np.linalg.cond(m.entries))
    if not np.isfinite(condition) or condition > condition_threshold:
        raise SingularNoiseMatrixError(condition, condition_threshold)
    solution = np.linalg.solve(m.entries, observed.probs)
    clamped = np.clip(solution, 0.0, None)
    total = clamped.sum()
    if total == 0.0:
        raise SingularNoiseMatrixError(condition, condition_threshold)
    return ColorDistribution(probs=clamped / total)


def save_distribution_csv(dist: ColorDistribution, path: str) -> None:
    """Write the vector as a single CSV line."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(repr(float(v)) for v in dist.probs) + "\n")


def load_distribution_csv(path: str) -> ColorDistribution:
    with open(path, "r", encoding="ascii") as fh:
        line = fh.readline().strip()
    return ColorDistribution(probs=np.array([float(v) for v in line.split(",")]))
