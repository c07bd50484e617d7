"""Discrete noise models over gray-levels.

A noise model is an ``N x N`` column-stochastic table: entry ``(o, a)`` is the
probability of observing gray-level ``o`` when the actual pre-noise level is
``a``.  Three families are supported:

* additive Gaussian, discretized at integer gray-levels,
* replacement, where the observation is drawn from a fixed distribution
  regardless of the actual level,
* mixtures of the two, combined columnwise by a weight.

Additive noise needs a decision about what happens at the ends of the gray
range.  ``renormalize`` truncates the kernel to ``[0, N)`` and rescales each
column; ``wraparound`` treats levels as circular, which preserves exact
shift-invariance at the cost of physical plausibility.  Both are exposed
because exact shift-invariance matters to the gradient analysis while
truncation better matches real sensors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

COLUMN_SUM_TOL = 1e-12

BOUNDARY_MODES = ("renormalize", "wraparound")


@dataclass(frozen=True)
class GaussianAdditive:
    """Additive Gaussian noise with standard deviation ``sigma`` gray-levels."""

    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class Replacement:
    """Replacement noise: observation drawn from ``dist``, independent of the actual level."""

    dist: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.dist, dtype=float)
        if d.ndim != 1:
            raise ValueError("replacement distribution must be a vector")
        if d.min() < 0 or abs(d.sum() - 1.0) > COLUMN_SUM_TOL:
            raise ValueError("replacement distribution must be a probability vector")
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)


@dataclass(frozen=True)
class Mixture:
    """Weighted sum of two noise models: ``weight * additive_part + (1 - weight) * replacement_part``."""

    weight: float
    additive_part: "NoiseSpec"
    replacement_part: "NoiseSpec"

    def __post_init__(self) -> None:
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"mixture weight must lie in [0, 1], got {self.weight}")


NoiseSpec = Union[GaussianAdditive, Replacement, Mixture]


@dataclass(frozen=True)
class NoiseMatrix:
    """Column-stochastic table of corruption probabilities.

    Parameters
    ----------
    num_colors : int
        Number of gray-levels ``N``.
    entries : numpy.ndarray
        ``(N, N)`` array; ``entries[o, a]`` is P(observe ``o`` | actual ``a``).
        Every column sums to 1.
    boundary_mode : str
        ``"renormalize"`` or ``"wraparound"``; records how additive kernels
        were fitted into the finite gray range.

    Notes
    -----
    The orientation is chosen so that ``entries @ actual_histogram`` is the
    observed histogram, making deconvolution a plain linear solve.
    """

    num_colors: int
    entries: np.ndarray
    boundary_mode: str

    def __post_init__(self) -> None:
        if self.num_colors < 1:
            raise ValueError("num_colors must be positive")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise ValueError(f"boundary_mode must be one of {BOUNDARY_MODES}")
        e = np.asarray(self.entries, dtype=float)
        n = self.num_colors
        if e.shape != (n, n):
            raise ValueError(f"entries must be ({n}, {n}), got {e.shape}")
        if e.min() < 0 or e.max() > 1:
            raise ValueError("entries must be probabilities in [0, 1]")
        sums = e.sum(axis=0)
        worst = float(np.abs(sums - 1.0).max())
        if worst > COLUMN_SUM_TOL:
            raise ValueError(f"columns must sum to 1 within {COLUMN_SUM_TOL}; worst error {worst:.3g}")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)


def _gaussian_column_renormalize(num_colors: int, sigma: float) -> np.ndarray:
    # fsum normalizers are exactly rounded, hence order-independent, so the
    # reflection symmetry entry(o, a) == entry(N-1-o, N-1-a) holds bitwise.
    # Downstream sign tests on analytically tied pixel pairs rely on that.
    o = np.arange(num_colors, dtype=float)
    cols = np.empty((num_colors, num_colors))
    for a in range(num_colors):
        kernel = np.exp(-((o - a) ** 2) / (2.0 * sigma * sigma))
        cols[:, a] = kernel / math.fsum(kernel)
    return cols


def _gaussian_wrapped_kernel(num_colors: int, sigma: float) -> np.ndarray:
    # Sum enough aliases that the dropped tail is below double precision:
    # the kernel at 40 sigma is ~e^-800, which underflows to exactly 0.0.
    # With fsum accumulation that makes kernel[k] == kernel[n-k] bitwise,
    # since the two alias multisets differ only in terms that are 0.0.
    reps = math.ceil(40.0 * sigma / num_colors) + 1
    two_var = 2.0 * sigma * sigma
    kernel = np.array(
        [
            math.fsum(
                math.exp(-((k + m * num_colors) ** 2) / two_var)
                for m in range(-reps, reps + 1)
            )
            for k in range(num_colors)
        ]
    )
    return kernel / math.fsum(kernel)


def build_noise_matrix(
    spec: NoiseSpec, num_colors: int, boundary_mode: str = "renormalize"
) -> NoiseMatrix:
    """Construct the corruption table for a noise description.

    Parameters
    ----------
    spec : NoiseSpec
        One of :class:`GaussianAdditive`, :class:`Replacement`,
        :class:`Mixture`.
    num_colors : int
        Gray-level count ``N``; at least 2.
    boundary_mode : str
        How additive kernels handle the ends of the gray range.

    Returns
    -------
    NoiseMatrix

    Notes
    -----
    Gaussian columns are the kernel ``exp(-(o - a)^2 / (2 sigma^2))``
    evaluated at integer levels and normalized.  Under ``wraparound`` the
    kernel is alias-summed over the circle first, so the matrix is circulant
    and symmetric.  Mixtures are combined columnwise after building each part
    under the same ``boundary_mode``.
    """
    if num_colors < 2:
        raise ValueError(f"need at least 2 gray-levels, got {num_colors}")
    if boundary_mode not in BOUNDARY_MODES:
        raise ValueError(f"boundary_mode must be one of {BOUNDARY_MODES}")

    if isinstance(spec, GaussianAdditive):
        if boundary_mode == "renormalize":
            entries = _gaussian_column_renormalize(num_colors, spec.sigma)
        else:
            kernel = _gaussian_wrapped_kernel(num_colors, spec.sigma)
            offsets = (np.arange(num_colors)[:, None] - np.arange(num_colors)[None, :]) % num_colors
            entries = kernel[offsets]
    elif isinstance(spec, Replacement):
        if len(spec.dist) != num_colors:
            raise ValueError(
                f"replacement distribution has length {len(spec.dist)}, expected {num_colors}"
            )
        entries = np.tile(np.asarray(spec.dist, dtype=float)[:, None], (1, num_colors))
    elif isinstance(spec, Mixture):
        add = build_noise_matrix(spec.additive_part, num_colors, boundary_mode)
        rep = build_noise_matrix(spec.replacement_part, num_colors, boundary_mode)
        entries = spec.weight * add.entries + (1.0 - spec.weight) * rep.entries
    else:
        raise TypeError(f"unknown noise spec {type(spec).__name__}")

    # No final rescale: every branch normalizes with exactly rounded sums, so
    # columns already meet the stochasticity tolerance, and a per-column
    # rescale would reintroduce order-dependent rounding that breaks the
    # bitwise symmetries the gradient sign tests depend on.
    return NoiseMatrix(num_colors=num_colors, entries=entries, boundary_mode=boundary_mode)


def identity_noise(num_colors: int) -> NoiseMatrix:
    """The zero-noise table: observation always equals the actual level."""
    return NoiseMatrix(
        num_colors=num_colors,
        entries=np.eye(num_colors),
        boundary_mode="renormalize",
    )


def corruption_prob(m: NoiseMatrix, observed: int, actual: int) -> float:
    """P(observe ``observed`` | actual ``actual``)."""
    n = m.num_colors
    if not (0 <= observed < n and 0 <= actual < n):
        raise ValueError(f"colors ({observed}, {actual}) out of range [0, {n})")
    return float(m.entries[observed, actual])


def is_additive(m: NoiseMatrix, tol: float = 1e-12) -> bool:
    """Whether the table depends only on the difference ``o - a``.

    Under ``wraparound`` the difference is taken mod ``N`` (the table must be
    circulant); under ``renormalize`` it is the exact integer difference, so
    entries along each diagonal must agree.
    """
    n = m.num_colors
    e = m.entries
    if m.boundary_mode == "wraparound":
        offsets = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
        circulant = e[:, 0][offsets]
        return bool(np.abs(e - circulant).max() <= tol)
    for d in range(-(n - 1), n):
        diag = np.diagonal(e, offset=d)
        if diag.size > 1 and diag.max() - diag.min() > tol:
            return False
    return True


def save_noise_matrix_csv(m: NoiseMatrix, path: str) -> None:
    """Write the table as CSV: header ``N,boundary_mode``, then N rows of N
    probabilities, row index = observed level."""
    lines = [f"{m.num_colors},{m.boundary_mode}\n"]
    for row in m.entries:
        lines.append(",".join(repr(float(v)) for v in row) + "\n")
    with open(path, "w", encoding="ascii") as fh:
        fh.writelines(lines)


def load_noise_matrix_csv(path: str) -> NoiseMatrix:
    """Read a table written by :func:`save_noise_matrix_csv`."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        parts = header.split(",")
        if len(parts) != 2:
            raise ValueError(f"bad noise matrix header: {header!r}")
        n = int(parts[0])
        mode = parts[1]
        rows = [
            [float(v) for v in line.strip().split(",")]
            for line in fh
            if line.strip()
        ]
    entries = np.array(rows, dtype=float)
    return NoiseMatrix(num_colors=n, entries=entries, boundary_mode=mode)
