"""Ground truth by brute force, and synthetic scenes to evaluate against.

A tiny model is a complete generative story for a handful of pixels: a prior
over latent structures (one region, a bimodal window, pure randomness, a two
region strip), uniform latent colors within each structure, and independent
per-pixel corruption.  Because the universe of circumstances is finite, the
posterior of any feature proposition can be computed exactly by summing
circumstance probabilities.  That sum is the definitional optimal detector;
every approximate detector in this package is tested against it.

The scene half generates seeded rectangle worlds with known boundary masks,
applies noise, and scores detector output against the truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.stats import rankdata

from .bayes import ProbabilityMap
from .errors import ImpossibleObservationError
from .image import GrayImage
from .noise import NoiseMatrix, NoiseSpec

STRUCTURES = ("single_region", "bimodal_window", "random_field", "two_region_strip")

MAX_PIXELS = 12
MAX_COLORS = 8
ENUMERATION_GUARD = 10**8

FeaturePredicate = Callable[[str, np.ndarray], bool]


@dataclass(frozen=True)
class TinyModelSpec:
    """A fully enumerable generative model over a few pixels.

    ``structures`` maps structure names to prior weights (summing to 1).
    ``two_region_strip`` reads the pixels as a 1-D strip with one boundary at
    a uniform split position and independent uniform colors on each side.
    """

    num_pixels: int
    num_colors: int
    structures: tuple[tuple[str, float], ...]
    noise: NoiseMatrix

    def __post_init__(self) -> None:
        if not 1 <= self.num_pixels <= MAX_PIXELS:
            raise ValueError(f"num_pixels must lie in [1, {MAX_PIXELS}]")
        if not 2 <= self.num_colors <= MAX_COLORS:
            raise ValueError(f"num_colors must lie in [2, {MAX_COLORS}]")
        if self.noise.num_colors != self.num_colors:
            raise ValueError("noise matrix size does not match num_colors")
        if not self.structures:
            raise ValueError("at least one structure is required")
        total = 0.0
        for name, weight in self.structures:
            if name not in STRUCTURES:
                raise ValueError(f"unknown structure {name!r}")
            if weight < 0:
                raise ValueError("structure weights must be non-negative")
            total += weight
        if abs(total - 1.0) > 1e-12:
            raise ValueError("structure weights must sum to 1")
        names = [name for name, _ in self.structures]
        if len(set(names)) != len(names):
            raise ValueError("structure names must be distinct")


def _structure_circumstances(
    name: str, weight: float, num_pixels: int, num_colors: int
) -> tuple[np.ndarray, np.ndarray]:
    """All latent colorings of one structure with their probabilities."""
    k, n = num_pixels, num_colors
    if name == "single_region":
        actuals = np.repeat(np.arange(n, dtype=np.int64)[:, None], k, axis=1)
        weights = np.full(n, weight / n)
        return actuals, weights
    if name == "random_field":
        count = n**k
        radix = n ** np.arange(k, dtype=np.int64)
        actuals = (np.arange(count, dtype=np.int64)[:, None] // radix) % n
        weights = np.full(count, weight / count)
        return actuals, weights
    if name == "bimodal_window":
        first, second = np.triu_indices(n, k=1)
        num_pairs = first.size
        masks = (np.arange(2**k, dtype=np.int64)[:, None] >> np.arange(k)) & 1
        # (pairs, selections, pixels): each pixel takes color 1 or 2 per mask bit
        actuals = np.where(
            masks[None, :, :] == 0, first[:, None, None], second[:, None, None]
        ).reshape(num_pairs * 2**k, k)
        weights = np.full(actuals.shape[0], weight / (num_pairs * 2**k))
        return actuals, weights
    if name == "two_region_strip":
        if k < 2:
            raise ValueError("two_region_strip needs at least 2 pixels")
        rows = []
        for split in range(1, k):
            for left in range(n):
                for right in range(n):
                    rows.append([left] * split + [right] * (k - split))
        actuals = np.array(rows, dtype=np.int64)
        weights = np.full(actuals.shape[0], weight / actuals.shape[0])
        return actuals, weights
    raise ValueError(f"unknown structure {name!r}")


class PosteriorEnumerator:
    """Precomputed circumstance table for repeated exact posterior queries."""

    def __init__(self, spec: TinyModelSpec) -> None:
        self.spec = spec
        blocks = []
        weight_blocks = []
        names = []
        total_rows = 0
        for name, weight in spec.structures:
            actuals, weights = _structure_circumstances(
                name, weight, spec.num_pixels, spec.num_colors
            )
            total_rows += actuals.shape[0]
            if total_rows > ENUMERATION_GUARD:
                raise ValueError(
                    f"circumstance count exceeds the {ENUMERATION_GUARD} guard"
                )
            blocks.append(actuals)
            weight_blocks.append(weights)
            names.extend([name] * actuals.shape[0])
        self._actuals = np.concatenate(blocks, axis=0)
        self._weights = np.concatenate(weight_blocks)
        self._names = names
        self._mask_cache: dict[FeaturePredicate, np.ndarray] = {}

    def _feature_mask(self, predicate: FeaturePredicate) -> np.ndarray:
        cached = self._mask_cache.get(predicate)
        if cached is None:
            cached = np.fromiter(
                (
                    bool(predicate(name, row))
                    for name, row in zip(self._names, self._actuals)
                ),
                dtype=bool,
                count=len(self._names),
            )
            self._mask_cache[predicate] = cached
        return cached

    def _observation_likelihoods(self, observation) -> np.ndarray:
        obs = np.asarray(observation, dtype=np.int64)
        if obs.shape != (self.spec.num_pixels,):
            raise ValueError(
                f"observation must have {self.spec.num_pixels} pixels, got shape {obs.shape}"
            )
        if obs.min() < 0 or obs.max() >= self.spec.num_colors:
            raise ValueError(f"observation values must lie in [0, {self.spec.num_colors})")
        per_pixel = self.spec.noise.entries[obs[None, :], self._actuals]
        return per_pixel.prod(axis=1)

    def joint_and_marginal(
        self, observation, predicate: FeaturePredicate
    ) -> tuple[float, float]:
        """(P(observation and feature), P(observation)) under the model."""
        lik = self._observation_likelihoods(observation)
        weighted = lik * self._weights
        marginal = float(weighted.sum())
        joint = float(weighted[self._feature_mask(predicate)].sum())
        return joint, marginal

    def posterior(self, observation, predicate: FeaturePredicate) -> float:
        """Exact P(feature | observation): ratio of circumstance sums."""
        joint, marginal = self.joint_and_marginal(observation, predicate)
        if marginal <= 0.0:
            raise ImpossibleObservationError(
                "observation has probability 0 under the tiny model"
            )
        return joint / marginal


def enumerate_posterior(
    spec: TinyModelSpec, observation, feature_predicate: FeaturePredicate
) -> float:
    """One-shot exact posterior; build a :class:`PosteriorEnumerator` to
    amortize the table across many observations."""
    return PosteriorEnumerator(spec).posterior(observation, feature_predicate)


def structure_is(name: str) -> FeaturePredicate:
    """Predicate factory: the circumstance's structure is ``name``."""

    def predicate(structure: str, actuals: np.ndarray) -> bool:
        return structure == name

    return predicate


def actuals_monochrome(structure: str, actuals: np.ndarray) -> bool:
    """Predicate: every latent pixel shares one color, whatever the structure."""
    return bool((actuals == actuals[0]).all())


def save_tiny_model(spec: TinyModelSpec, path: str) -> None:
    """Key-value text serialization, one `key: value` pair per line.

    Structures repeat one line each; the noise matrix follows inline as
    ``noise_row`` lines (row index = observed level).
    """
    lines = [
        f"num_pixels: {spec.num_pixels}",
        f"num_colors: {spec.num_colors}",
    ]
    for name, weight in spec.structures:
        lines.append(f"structure: {name} {weight!r}")
    lines.append(f"boundary_mode: {spec.noise.boundary_mode}")
    for row in spec.noise.entries:
        lines.append("noise_row: " + ",".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_tiny_model(path: str) -> TinyModelSpec:
    num_pixels = num_colors = None
    structures: list[tuple[str, float]] = []
    boundary_mode = "renormalize"
    noise_rows: list[list[float]] = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or ":" not in line:
                continue
            key, _, value = line.partition(":")
            key, value = key.strip(), value.strip()
            if key == "num_pixels":
                num_pixels = int(value)
            elif key == "num_colors":
                num_colors = int(value)
            elif key == "structure":
                name, weight = value.rsplit(" ", 1)
                structures.append((name.strip(), float(weight)))
            elif key == "boundary_mode":
                boundary_mode = value
            elif key == "noise_row":
                noise_rows.append([float(v) for v in value.split(",")])
    if num_pixels is None or num_colors is None or not noise_rows:
        raise ValueError(f"incomplete tiny model file {path}")
    noise = NoiseMatrix(
        num_colors=num_colors,
        entries=np.array(noise_rows),
        boundary_mode=boundary_mode,
    )
    return TinyModelSpec(
        num_pixels=num_pixels,
        num_colors=num_colors,
        structures=tuple(structures),
        noise=noise,
    )


@dataclass(frozen=True)
class SceneSpec:
    """Parameters of a synthetic rectangle scene.

    Rectangles are painted back to front in random colors over a random
    background; sizes are uniform over ``[min_rect_size, max_rect_size]``
    (the latter defaults to half the smaller image side) and rectangles are
    clipped at the image edges.  ``noise`` records the corruption the scene
    is meant to be viewed through; :func:`generate_scene` itself returns the
    noiseless image.
    """

    width: int
    height: int
    num_rects: int
    color_range: int
    rng_seed: int
    noise: Optional[NoiseSpec] = None
    min_rect_size: int = 8
    max_rect_size: Optional[int] = None

    def __post_init__(self) -> None:
        if self.width < 2 or self.height < 2:
            raise ValueError("scene dimensions must be at least 2x2")
        if self.num_rects < 0:
            raise ValueError("num_rects must be non-negative")
        if self.color_range < 2:
            raise ValueError("color_range must be at least 2")
        if self.min_rect_size < 1:
            raise ValueError("min_rect_size must be positive")
        if self.max_rect_size is not None and self.max_rect_size < self.min_rect_size:
            raise ValueError("max_rect_size must be >= min_rect_size")


def generate_scene(spec: SceneSpec) -> tuple[GrayImage, np.ndarray]:
    """Paint the scene and derive its boundary truth mask.

    The truth mask marks pixels whose noiseless color differs from a
    4-neighbor's: both sides of every visible edge.  A rectangle that lands
    in the background's color leaves no edge and no truth.

    Draw order per rectangle is (width, height, x, y, color) from a fresh
    seeded generator, so scenes are pure functions of the spec.
    """
    rng = np.random.default_rng(spec.rng_seed)
    max_size = spec.max_rect_size
    if max_size is None:
        max_size = max(spec.min_rect_size, min(spec.width, spec.height) // 2)
    img = np.full(
        (spec.height, spec.width),
        rng.integers(0, spec.color_range),
        dtype=np.int64,
    )
    for _ in range(spec.num_rects):
        w = int(rng.integers(spec.min_rect_size, max_size + 1))
        h = int(rng.integers(spec.min_rect_size, max_size + 1))
        x0 = int(rng.integers(0, spec.width - 1))
        y0 = int(rng.integers(0, spec.height - 1))
        color = int(rng.integers(0, spec.color_range))
        img[y0 : min(spec.height, y0 + h), x0 : min(spec.width, x0 + w)] = color

    truth = np.zeros((spec.height, spec.width), dtype=bool)
    vertical = img[:-1, :] != img[1:, :]
    horizontal = img[:, :-1] != img[:, 1:]
    truth[:-1, :] |= vertical
    truth[1:, :] |= vertical
    truth[:, :-1] |= horizontal
    truth[:, 1:] |= horizontal
    return GrayImage(pixels=img, num_colors=spec.color_range), truth


def apply_noise(img: GrayImage, m: NoiseMatrix, seed: int) -> GrayImage:
    """Resample every pixel from its corruption column, deterministically.

    Inverse-CDF sampling against one uniform draw per pixel; the draw grid
    is generated in one pass so the output is a pure function of
    ``(img, m, seed)`` regardless of scene content.
    """
    if img.num_colors != m.num_colors:
        raise ValueError("image color count does not match noise matrix")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(m.entries, axis=0)
    uniforms = rng.random(img.pixels.shape)
    out = np.empty_like(img.pixels)
    for actual in range(m.num_colors):
        mask = img.pixels == actual
        if mask.any():
            out[mask] = np.searchsorted(cdf[:, actual], uniforms[mask], side="right")
    out = np.clip(out, 0, m.num_colors - 1)
    return GrayImage(pixels=out, num_colors=img.num_colors)


def score_boundary_map(
    pmap: ProbabilityMap, truth: np.ndarray, feature: Optional[str] = None
) -> tuple[float, float, float]:
    """Rank the detector against ground truth.

    Returns ``(auc, mean_on, mean_off)`` over defined pixels: AUC is the
    probability that a random true-boundary pixel outranks a random
    non-boundary pixel (ties count half), and the means are the average
    posterior on and off the truth mask.
    """
    plane = pmap.channel(feature)
    truth = np.asarray(truth, dtype=bool)
    if truth.shape != plane.shape:
        raise ValueError("truth mask shape does not match the map")
    defined = pmap.defined_mask
    scores = plane[defined]
    labels = truth[defined]
    num_pos = int(labels.sum())
    num_neg = int(labels.size - num_pos)
    if num_pos == 0 or num_neg == 0:
        raise ValueError("truth must contain both classes among defined pixels")
    ranks = rankdata(scores)
    auc = (float(ranks[labels].sum()) - num_pos * (num_pos + 1) / 2.0) / (
        num_pos * num_neg
    )
    return auc, float(scores[labels].mean()), float(scores[~labels].mean())
