"""Posteriors from likelihoods, and combination across disjoint domains.

The conversion is ordinary Bayes arithmetic over a mutually exclusive,
all-encompassing set of feature propositions: posteriors are the normalized
products of likelihood and prior.  The combination rule merges detectors
built on mutually exclusive world assumptions ("domains") into a single
posterior, weighting each domain by its prior mass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ImpossibleObservationError
from .windows import LikelihoodPairMap

SUM_TOL = 1e-12

SCAN_FEATURE_LABELS = {
    "interior_vs_exterior": ("interior", "exterior"),
    "boundary_vs_not": ("boundary", "not_boundary"),
}


@dataclass(frozen=True)
class FeatureSet:
    """Ordered names for a mutually exclusive, all-encompassing proposition set."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.labels) < 2:
            raise ValueError("a feature set needs at least 2 propositions")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("feature labels must be distinct")


@dataclass(frozen=True)
class PriorVector:
    """Prior (or posterior) probabilities aligned with a FeatureSet."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("need at least 2 probabilities")
        if p.min() < 0:
            raise ValueError("probabilities must be non-negative")
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities must sum to 1 within {SUM_TOL}")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class LikelihoodSet:
    """P(observation | feature_i) for each proposition in a FeatureSet."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("need at least 2 likelihoods")
        if v.min() < 0 or v.max() > 1:
            raise ValueError("likelihoods must lie in [0, 1]")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class DomainWeight:
    """Relative prior mass of one domain; only ratios between weights matter."""

    label: str
    weight: float

    def __post_init__(self) -> None:
        if not self.weight > 0:
            raise ValueError(f"domain weight must be positive, got {self.weight}")


def posterior(lik: LikelihoodSet, prior: PriorVector) -> PriorVector:
    """Normalized products of likelihood and prior.

    Raises
    ------
    ImpossibleObservationError
        If every product is zero: the observation cannot occur under any
        admitted proposition, which indicates a modeling bug rather than a
        value to hide behind a uniform fallback.
    """
    if lik.values.size != prior.probs.size:
        raise ValueError("likelihood and prior lengths differ")
    products = lik.values * prior.probs
    denominator = products.sum()
    if denominator <= 0.0:
        raise ImpossibleObservationError(
            "observation has probability 0 under every feature proposition"
        )
    return PriorVector(probs=products / denominator)


def combine_disjoint(
    per_domain: Sequence[tuple[float, float, DomainWeight]],
) -> float:
    """Combine detectors across mutually exclusive domains.

    Each entry is ``(p_obs_and_feature, p_obs, weight)`` for one domain:
    the joint probability of the observation and the feature under the
    domain's model, the marginal probability of the observation, and the
    domain's prior mass.  The result is

        sum_i joint_i * w_i / sum_i marginal_i * w_i

    which equals the feature posterior given the observation and the
    disjunction of the domains.  The numerator terms must be joints, not bare
    likelihoods: a bare P(obs | feature) can exceed P(obs) and would push the
    ratio above 1.  Form the joint as
    ``p_obs_given_feature * p_feature_given_domain``.
    """
    if len(per_domain) < 2:
        raise ValueError("need at least 2 domains to combine")
    joints = []
    marginals = []
    weights = []
    for joint, marginal, dw in per_domain:
        if not isinstance(dw, DomainWeight):
            raise TypeError("third element of each entry must be a DomainWeight")
        if not (0.0 <= joint <= 1.0 and 0.0 <= marginal <= 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        if joint > marginal:
            raise ValueError(
                f"domain {dw.label!r}: p_obs_and_feature {joint!r} exceeds p_obs "
                f"{marginal!r}; pass the joint (likelihood times feature prior), "
                "not the bare likelihood"
            )
        joints.append(joint * dw.weight)
        marginals.append(marginal * dw.weight)
        weights.append(dw.weight)
    denominator = sum(marginals)
    if denominator <= 0.0:
        raise ImpossibleObservationError(
            "observation has probability 0 under every domain"
        )
    return sum(joints) / denominator


@dataclass(frozen=True)
class ProbabilityMap:
    """Image-shaped posterior distributions: a generalized image.

    ``values`` has shape ``(height, width, m)``; absent pixels are NaN in
    every channel.  Each defined pixel's channel vector sums to 1.
    """

    features: FeatureSet
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 3 or v.shape[2] != len(self.features.labels):
            raise ValueError("values must be (height, width, num_features)")
        defined = ~np.isnan(v[:, :, 0])
        if defined.any():
            vectors = v[defined]
            if vectors.min() < 0:
                raise ValueError("posteriors must be non-negative")
            worst = float(np.abs(vectors.sum(axis=1) - 1.0).max())
            if worst > 1e-9:
                raise ValueError(f"defined pixels must sum to 1 within 1e-9; worst {worst:.3g}")
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def defined_mask(self) -> np.ndarray:
        return ~np.isnan(self.values[:, :, 0])

    def channel(self, label: Optional[str] = None) -> np.ndarray:
        """The 2-D posterior plane of one feature (default: the first)."""
        idx = 0 if label is None else self.features.labels.index(label)
        return self.values[:, :, idx]


def posterior_map(lik_map: LikelihoodPairMap, prior: PriorVector) -> ProbabilityMap:
    """Apply :func:`posterior` at every defined pixel of a likelihood scan.

    A zero-denominator pixel raises with its coordinate so the offending
    observation can be inspected.
    """
    if prior.probs.size != 2:
        raise ValueError("likelihood pair maps take a length-2 prior")
    labels = SCAN_FEATURE_LABELS.get(lik_map.feature, (lik_map.feature, f"not_{lik_map.feature}"))
    features = FeatureSet(labels=labels)
    out = np.full((lik_map.height, lik_map.width, 2), np.nan)
    defined = lik_map.defined_mask
    for y, x in zip(*np.nonzero(defined)):
        lik = LikelihoodSet(
            values=np.array([lik_map.p_feature[y, x], lik_map.p_not_feature[y, x]])
        )
        try:
            out[y, x, :] = posterior(lik, prior).probs
        except ImpossibleObservationError as exc:
            raise ImpossibleObservationError(f"at pixel (x={x}, y={y}): {exc}") from exc
    return ProbabilityMap(features=features, values=out)


def save_probability_map_csv(pmap: ProbabilityMap, path: str) -> None:
    """Write the first feature's plane as float CSV, absent pixels as nan."""
    plane = pmap.channel()
    with open(path, "w", encoding="ascii") as fh:
        for y in range(pmap.height):
            cells = [
                "nan" if np.isnan(v) else repr(float(v)) for v in plane[y]
            ]
            fh.write(",".join(cells) + "\n")


def probability_map_to_pgm_samples(pmap: ProbabilityMap, label: Optional[str] = None) -> np.ndarray:
    """8-bit samples round(255 * posterior); absent pixels become 0."""
    plane = pmap.channel(label)
    samples = np.where(np.isnan(plane), 0.0, plane)
    return np.rint(255.0 * samples).astype(np.int64)
