"""Window likelihoods: the core boundary/interior detectors.

Every detector here answers one question about a ``k x k`` pixel window
(default 3 x 3): how probable is exactly this observation under a hypothesis
about the underlying scene?

* ``interior_likelihood`` - the window sits inside a uniformly colored
  region: one latent color, every pixel independently corrupted.
* ``exterior_likelihood`` - the window sits in unstructured randomness:
  every coloring is equally likely, so the value is the constant
  ``(1/N)^(k*k)`` regardless of contents.
* ``boundary_likelihood_constant`` - the deliberate flat approximation that
  reuses the same constant for the boundary hypothesis.
* ``boundary_likelihood_exact`` - the full bimodal model: the window
  straddles two region colors and each pixel took either color with equal
  chance before corruption.
* ``pruned_interior_likelihood`` - the interior sum with provably bounded
  shortcuts: colors that some pixel already rules out are skipped.

All of these treat the window as an ensemble: only the multiset of values
matters, never their arrangement.  The implementations sort the window first,
which makes every operation invariant under pixel permutations bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .image import GrayImage
from .noise import NoiseMatrix, corruption_prob
from .priors import ColorDistribution

BOUNDARY_MODELS = ("constant_approx", "exact_bimodal")

FEATURE_SCANS = ("interior_vs_exterior", "boundary_vs_not")


class CostCounter:
    """Tallies scalar multiplications performed by the detector operations.

    Costs are mathematical operation counts (how many scalar products the
    formulas require), independent of vectorization, so implementations can
    be compared against hand arithmetic.  ``pruned_colors`` counts color
    terms skipped by pruning.
    """

    def __init__(self) -> None:
        self.multiplies = 0
        self.pruned_colors = 0

    def add_multiplies(self, n: int) -> None:
        self.multiplies += int(n)

    def add_pruned(self, n: int) -> None:
        self.pruned_colors += int(n)

    def reset(self) -> None:
        self.multiplies = 0
        self.pruned_colors = 0


@dataclass(frozen=True)
class Window:
    """A ``k x k`` excerpt of an observed image.

    ``values`` holds the k*k gray-levels in any order (the detectors are
    arrangement-blind); ``center`` optionally records the source coordinate.
    """

    size: int
    values: np.ndarray
    center: Optional[tuple[int, int]] = None

    def __post_init__(self) -> None:
        if self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"window size must be odd and positive, got {self.size}")
        v = np.asarray(self.values)
        if not np.issubdtype(v.dtype, np.integer):
            raise ValueError("window values must be integer gray-levels")
        if v.ndim != 1 or v.size != self.size * self.size:
            raise ValueError(f"expected {self.size * self.size} values, got shape {v.shape}")
        if v.min() < 0:
            raise ValueError("window values must be non-negative")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class DetectorConfig:
    """Everything a window detector needs to run.

    Parameters
    ----------
    noise : NoiseMatrix
    color_prior : ColorDistribution
        Prior over region colors; length must match the noise matrix.
    window_size : int
        Odd window side ``k``; 3 unless there is a reason to gather more
        evidence per point.
    prune_eps : float
        Maximum allowable absolute error for the pruned interior sum; 0
        disables pruning.
    boundary_model : str
        ``"constant_approx"`` or ``"exact_bimodal"``; which boundary
        likelihood full-image scans use.
    counter : CostCounter, optional
        When present, operations report their multiplication counts to it.
    """

    noise: NoiseMatrix
    color_prior: ColorDistribution
    window_size: int = 3
    prune_eps: float = 0.0
    boundary_model: str = "constant_approx"
    counter: Optional[CostCounter] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise ValueError("window_size must be odd and positive")
        if not 0.0 <= self.prune_eps < 1.0:
            raise ValueError("prune_eps must lie in [0, 1)")
        if self.boundary_model not in BOUNDARY_MODELS:
            raise ValueError(f"boundary_model must be one of {BOUNDARY_MODELS}")
        if self.noise.num_colors != self.color_prior.num_colors:
            raise ValueError(
                f"noise matrix size {self.noise.num_colors} does not match "
                f"prior length {self.color_prior.num_colors}"
            )

    @property
    def num_colors(self) -> int:
        return self.noise.num_colors


def _tick(cfg: DetectorConfig, multiplies: int) -> None:
    if cfg.counter is not None:
        cfg.counter.add_multiplies(multiplies)


def _check_window(w: Window, cfg: DetectorConfig) -> np.ndarray:
    if w.size != cfg.window_size:
        raise ValueError(f"window size {w.size} does not match config {cfg.window_size}")
    if w.values.max() >= cfg.num_colors:
        raise ValueError(f"window values must lie in [0, {cfg.num_colors})")
    # Sorting canonicalizes the ensemble so permuted windows take the exact
    # same arithmetic path, making results bitwise permutation-invariant.
    return np.sort(w.values)


def pixel_really_is(observed: int, color: int, cfg: DetectorConfig) -> float:
    """Likelihood that one observed pixel started as ``color``.

    This is only the corruption term P(observed | color); the prior over the
    region color enters once per window inside the window likelihoods, not
    once per pixel.
    """
    return corruption_prob(cfg.noise, observed, color)


def interior_likelihood(w: Window, cfg: DetectorConfig) -> float:
    """P(window | center lies inside one uniformly colored region).

    Sums, over every candidate region color ``c``, the prior mass of ``c``
    times the product of per-pixel corruption probabilities.
    """
    values = _check_window(w, cfg)
    rows = cfg.noise.entries[values, :]
    per_color = rows.prod(axis=0)
    result = float(cfg.color_prior.probs @ per_color)
    n = cfg.num_colors
    _tick(cfg, n * (values.size - 1) + n)
    return result


def exterior_likelihood(w: Window, cfg: DetectorConfig) -> float:
    """P(window | center lies in a random area): the constant ``(1/N)^(k*k)``."""
    k2 = cfg.window_size * cfg.window_size
    result = (1.0 / cfg.num_colors) ** k2
    _tick(cfg, k2 - 1)
    return result


def boundary_likelihood_constant(w: Window, cfg: DetectorConfig) -> float:
    """The flat boundary approximation: same constant as the exterior.

    The true boundary distribution is always flatter than the interior one,
    so treating it as maximally flat biases only mildly while removing nearly
    all per-pixel cost.
    """
    return exterior_likelihood(w, cfg)


def boundary_likelihood_exact(w: Window, cfg: DetectorConfig) -> float:
    """P(window | center straddles two region colors), the bimodal model.

    Averages over unordered pairs of distinct region colors, weighting each
    pair by the renormalized product of its prior masses; within a pair each
    pixel is an equal mixture of the two corruption columns.
    """
    if cfg.num_colors < 2:
        raise ValueError("the bimodal model needs at least 2 gray-levels")
    values = _check_window(w, cfg)
    k2 = values.size
    rows = cfg.noise.entries[values, :]
    first, second = np.triu_indices(cfg.num_colors, k=1)
    num_pairs = first.size

    mix = 0.5 * rows[:, first] + 0.5 * rows[:, second]
    per_pair = mix.prod(axis=0)
    pair_mass = cfg.color_prior.probs[first] * cfg.color_prior.probs[second]
    total_mass = pair_mass.sum()
    if total_mass <= 0.0:
        raise ValueError(
            "no pair of distinct colors has positive prior mass; "
            "the bimodal model is degenerate under this prior"
        )
    result = float((pair_mass @ per_pair) / total_mass)
    _tick(cfg, num_pairs * (2 * k2) + num_pairs * (k2 - 1) + num_pairs + num_pairs)
    return result


def pruned_interior_likelihood(w: Window, cfg: DetectorConfig) -> float:
    """Interior likelihood with color terms skipped under a proven bound.

    A color is skipped when any single pixel factor falls below
    ``prune_eps / N``: the skipped term's whole product is then below that
    threshold (all other factors and the prior are at most 1), and at most N
    colors are skipped, so the total error is at most ``prune_eps``.
    With ``prune_eps = 0`` nothing is skipped and the result equals
    :func:`interior_likelihood` exactly.
    """
    values = _check_window(w, cfg)
    rows = cfg.noise.entries[values, :]
    keep = rows.min(axis=0) >= cfg.prune_eps / cfg.num_colors
    kept = int(keep.sum())
    if cfg.counter is not None:
        cfg.counter.add_pruned(cfg.num_colors - kept)
    if kept == 0:
        return 0.0
    per_color = rows[:, keep].prod(axis=0)
    result = float(cfg.color_prior.probs[keep] @ per_color)
    _tick(cfg, kept * (values.size - 1) + kept)
    return result


@dataclass(frozen=True)
class LikelihoodPairMap:
    """Per-pixel (P(O|feature), P(O|not feature)) over an image.

    Border pixels whose window does not fit are absent, encoded as NaN in
    both planes.
    """

    feature: str
    p_feature: np.ndarray
    p_not_feature: np.ndarray

    def __post_init__(self) -> None:
        if self.p_feature.shape != self.p_not_feature.shape:
            raise ValueError("likelihood planes must share a shape")

    @property
    def height(self) -> int:
        return int(self.p_feature.shape[0])

    @property
    def width(self) -> int:
        return int(self.p_feature.shape[1])

    @property
    def defined_mask(self) -> np.ndarray:
        return ~np.isnan(self.p_feature)


def scan_image(img: GrayImage, cfg: DetectorConfig, feature: str) -> LikelihoodPairMap:
    """Evaluate a likelihood pair at every pixel whose window fits.

    ``interior_vs_exterior`` pairs (interior, exterior); ``boundary_vs_not``
    pairs (boundary under ``cfg.boundary_model``, interior).  When
    ``cfg.prune_eps`` is positive the interior side uses the pruned sum.
    Border pixels of width ``k // 2`` are absent rather than padded; padding
    would silently change the model.
    """
    if feature not in FEATURE_SCANS:
        raise ValueError(f"feature must be one of {FEATURE_SCANS}")
    if img.num_colors != cfg.num_colors:
        raise ValueError("image color count does not match detector config")
    k = cfg.window_size
    if img.height < k or img.width < k:
        raise ValueError(f"image {img.width}x{img.height} is smaller than the {k}x{k} window")

    interior_op = pruned_interior_likelihood if cfg.prune_eps > 0 else interior_likelihood
    if feature == "interior_vs_exterior":
        feature_op, other_op = interior_op, exterior_likelihood
    elif cfg.boundary_model == "exact_bimodal":
        feature_op, other_op = boundary_likelihood_exact, interior_op
    else:
        feature_op, other_op = boundary_likelihood_constant, interior_op

    r = k // 2
    p_feat = np.full((img.height, img.width), np.nan)
    p_not = np.full((img.height, img.width), np.nan)
    for y in range(r, img.height - r):
        for x in range(r, img.width - r):
            values = img.pixels[y - r : y + r + 1, x - r : x + r + 1].ravel()
            w = Window(size=k, values=values, center=(x, y))
            p_feat[y, x] = feature_op(w, cfg)
            p_not[y, x] = other_op(w, cfg)
    return LikelihoodPairMap(feature=feature, p_feature=p_feat, p_not_feature=p_not)


def save_pair_map_csv(pmap: LikelihoodPairMap, path: str) -> None:
    """Write the map as float CSV: one line per image row, each pixel
    contributing its two values in order; absent pixels as ``nan,nan``."""
    with open(path, "w", encoding="ascii") as fh:
        for y in range(pmap.height):
            cells = []
            for x in range(pmap.width):
                a, b = pmap.p_feature[y, x], pmap.p_not_feature[y, x]
                cells.append("nan" if np.isnan(a) else repr(float(a)))
                cells.append("nan" if np.isnan(b) else repr(float(b)))
            fh.write(",".join(cells) + "\n")
