"""Two-pixel boundary inference and gradient validity analysis.

The classical gradient reduces a pixel pair to ``|o1 - o2|`` and thresholds
it.  That is only trustworthy when the threshold ordering agrees with the
Bayesian posterior ordering, i.e. when the gradient is monotonic in
probability.  This module computes the exact two-pixel boundary posterior,
checks monotonicity exhaustively, evaluates the closed-form ratio inequality
that characterizes it, and builds gradient-to-probability lookup tables whose
per-magnitude spread measures how far the gradient can be trusted.

All pair sums use exactly rounded accumulation (``math.fsum``) so that pairs
related by symmetry produce bit-identical likelihoods; posterior comparisons
across different boundary priors then agree in sign exactly, with no rounding
flicker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ImpossibleObservationError
from .noise import NoiseMatrix

PAIR_ENUMERATION_GUARD = 4096

DEFAULT_TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PixelPair:
    """Two observed gray-levels, the input of the one-dimensional gradient."""

    o1: int
    o2: int

    def __post_init__(self) -> None:
        if self.o1 < 0 or self.o2 < 0:
            raise ValueError("gray-levels must be non-negative")


def _check_pair(p: PixelPair, m: NoiseMatrix) -> None:
    n = m.num_colors
    if p.o1 >= n or p.o2 >= n:
        raise ValueError(f"pair ({p.o1}, {p.o2}) out of range [0, {n})")


def gradient_magnitude(p: PixelPair) -> int:
    """The one-dimensional gradient ``|o1 - o2|``."""
    return abs(p.o1 - p.o2)


def circular_magnitude(p: PixelPair, num_colors: int) -> int:
    """Gradient magnitude on the color circle: ``min(d, N - d)``.

    Under wraparound noise, levels 0 and N-1 are adjacent, so the plain
    difference would misrank pairs by construction.
    """
    d = abs(p.o1 - p.o2) % num_colors
    return min(d, num_colors - d)


def same_region_likelihood(p: PixelPair, m: NoiseMatrix) -> float:
    """P(pair | both pixels share one region color).

    The color sum carries the uniform prior ``1/N`` so the value is a genuine
    likelihood, directly comparable with enumeration oracles.
    """
    _check_pair(p, m)
    e = m.entries
    n = m.num_colors
    total = math.fsum(float(e[p.o1, c]) * float(e[p.o2, c]) for c in range(n))
    return total / n


def diff_region_likelihood(p: PixelPair, m: NoiseMatrix) -> float:
    """P(pair | the pixels lie in regions of independent colors).

    The double color sum factors into a product of row sums; the ``1/N^2``
    prior factor keeps it a genuine likelihood.
    """
    _check_pair(p, m)
    e = m.entries
    n = m.num_colors
    bracket1 = math.fsum(float(v) for v in e[p.o1, :])
    bracket2 = math.fsum(float(v) for v in e[p.o2, :])
    return (bracket1 * bracket2) / (n * n)


def boundary_posterior_two_pixel(p: PixelPair, m: NoiseMatrix, p_b: float) -> float:
    """Posterior probability of a boundary between the two pixels."""
    if not 0.0 < p_b < 1.0:
        raise ValueError(f"p_b must lie in (0, 1), got {p_b}")
    b = diff_region_likelihood(p, m)
    nb = same_region_likelihood(p, m)
    numerator = b * p_b
    denominator = numerator + nb * (1.0 - p_b)
    if denominator <= 0.0:
        raise ImpossibleObservationError(
            f"pair ({p.o1}, {p.o2}) has probability 0 under both hypotheses"
        )
    return numerator / denominator


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of the exhaustive gradient-vs-posterior sweep.

    ``counterexamples`` holds tuples ``(pair_a, pair_b, gradient_relation,
    posterior_relation)`` where the two relations conflict.
    ``max_equal_gradient_posterior_spread`` is the widest posterior range
    inside any equal-magnitude group.  ``condition_violations`` is reserved
    for the algebraic inequality checked by :func:`check_monotonicity_condition`;
    the sweep itself leaves it empty.
    """

    passed: bool
    counterexamples: tuple[tuple[PixelPair, PixelPair, str, str], ...]
    max_equal_gradient_posterior_spread: float
    condition_violations: tuple[tuple[int, int, int], ...] = field(default=())
    tolerance: float = DEFAULT_TIE_TOLERANCE

    def to_text(self) -> str:
        lines = [
            f"monotonicity: {'passed' if self.passed else 'failed'}",
            f"tolerance: {self.tolerance!r}",
            f"max equal-gradient posterior spread: {self.max_equal_gradient_posterior_spread!r}",
            f"counterexamples: {len(self.counterexamples)}",
        ]
        for pair_a, pair_b, grel, prel in self.counterexamples[:20]:
            lines.append(
                f"  gradient({pair_a.o1},{pair_a.o2}) {grel} gradient({pair_b.o1},{pair_b.o2})"
                f" but posterior {prel}"
            )
        if len(self.counterexamples) > 20:
            lines.append(f"  ... {len(self.counterexamples) - 20} more")
        lines.append(f"condition violations: {len(self.condition_violations)}")
        return "\n".join(lines) + "\n"


def _magnitude_for_mode(p: PixelPair, m: NoiseMatrix) -> int:
    if m.boundary_mode == "wraparound":
        return circular_magnitude(p, m.num_colors)
    return gradient_magnitude(p)


def check_monotonicity(
    m: NoiseMatrix, tolerance: float = DEFAULT_TIE_TOLERANCE
) -> MonotonicityReport:
    """Exhaustively verify that gradient ordering matches posterior ordering.

    Enumerates all N^2 pixel pairs at a reference boundary prior of 0.5 and
    checks, up to ``tolerance``:

    1. pairs of equal gradient magnitude have equal posteriors,
    2. a pair of higher magnitude never has a lower posterior than a pair of
       lower magnitude.

    A single reference prior suffices because posterior orderings are
    invariant in the prior (the posterior is a monotone function of the
    likelihood ratio); that invariance is tested separately.  Pairs that are
    impossible under both hypotheses cannot be observed and are excluded.
    """
    n = m.num_colors
    if n > PAIR_ENUMERATION_GUARD:
        raise ValueError(f"N={n} exceeds the enumeration guard {PAIR_ENUMERATION_GUARD}")

    groups: dict[int, list[tuple[float, PixelPair]]] = {}
    for o1 in range(n):
        for o2 in range(n):
            pair = PixelPair(o1, o2)
            try:
                post = boundary_posterior_two_pixel(pair, m, 0.5)
            except ImpossibleObservationError:
                continue
            groups.setdefault(_magnitude_for_mode(pair, m), []).append((post, pair))

    counterexamples: list[tuple[PixelPair, PixelPair, str, str]] = []
    max_spread = 0.0
    extremes: dict[int, tuple[tuple[float, PixelPair], tuple[float, PixelPair]]] = {}
    for g, members in groups.items():
        lo = min(members, key=lambda t: t[0])
        hi = max(members, key=lambda t: t[0])
        extremes[g] = (lo, hi)
        spread = hi[0] - lo[0]
        max_spread = max(max_spread, spread)
        if spread > tolerance:
            counterexamples.append((hi[1], lo[1], "=", "!="))

    magnitudes = sorted(extremes)
    for i, g_low in enumerate(magnitudes):
        for g_high in magnitudes[i + 1 :]:
            low_hi = extremes[g_low][1]
            high_lo = extremes[g_high][0]
            if high_lo[0] < low_hi[0] - tolerance:
                counterexamples.append((high_lo[1], low_hi[1], ">", "<"))

    passed = not counterexamples and max_spread <= tolerance
    return MonotonicityReport(
        passed=passed,
        counterexamples=tuple(counterexamples),
        max_equal_gradient_posterior_spread=max_spread,
        tolerance=tolerance,
    )


def check_monotonicity_condition(
    m: NoiseMatrix, tolerance: float = DEFAULT_TIE_TOLERANCE
) -> list[tuple[int, int, int]]:
    """Check the algebraic strict-inequality characterization of monotonicity.

    For every observed level ``o`` and every ``o_dbl > o_pri >= 0``, requires

        sum_c P(o_dbl|c) P(o|c) / sum_c P(o_dbl|c)
            <  sum_c P(o_pri|c) P(o|c) / sum_c P(o_pri|c)

    strictly, reading ``o_pri`` and ``o_dbl`` as raw gray-levels compared
    against a fixed ``o``.  Returns all triples ``(o, o_pri, o_dbl)`` where
    the left side is not below the right side by more than ``tolerance`` -
    ties count as violations of strictness.  This is a literal transcription;
    :func:`check_monotonicity` is the definitional check, and the two are
    cross-validated rather than assumed to agree.
    """
    n = m.num_colors
    if n > PAIR_ENUMERATION_GUARD:
        raise ValueError(f"N={n} exceeds the enumeration guard {PAIR_ENUMERATION_GUARD}")
    e = m.entries
    cross = e @ e.T
    row_sums = e.sum(axis=1)
    violations: list[tuple[int, int, int]] = []
    for o in range(n):
        with_o = cross[:, o]
        for o_pri in range(n):
            if row_sums[o_pri] == 0.0:
                continue
            rhs = with_o[o_pri] / row_sums[o_pri]
            for o_dbl in range(o_pri + 1, n):
                if row_sums[o_dbl] == 0.0:
                    continue
                lhs = with_o[o_dbl] / row_sums[o_dbl]
                if not lhs < rhs - tolerance:
                    violations.append((o, o_pri, o_dbl))
    return violations


@dataclass(frozen=True)
class LookupRow:
    magnitude: int
    min_posterior: float
    mean_posterior: float
    max_posterior: float

    @property
    def spread(self) -> float:
        return self.max_posterior - self.min_posterior


@dataclass(frozen=True)
class LookupTable:
    """Gradient magnitude to boundary posterior, with per-magnitude spread.

    When the noise is monotonic the spread is ~0 and the mean column is the
    single table value the gradient shortcut would use; otherwise the spread
    quantifies how much posterior information the magnitude alone discards.
    """

    p_b: float
    boundary_mode: str
    rows: tuple[LookupRow, ...]

    def to_csv_text(self) -> str:
        lines = ["g,min,mean,max,spread"]
        for r in self.rows:
            lines.append(
                f"{r.magnitude},{r.min_posterior!r},{r.mean_posterior!r},"
                f"{r.max_posterior!r},{r.spread!r}"
            )
        return "\n".join(lines) + "\n"


def build_lookup_table(m: NoiseMatrix, p_b: float) -> LookupTable:
    """Aggregate the two-pixel posterior over all pairs of each magnitude.

    Magnitudes run over ``[0, N-1]`` in renormalize mode and over the
    circular range ``[0, N//2]`` in wraparound mode.
    """
    if not 0.0 < p_b < 1.0:
        raise ValueError(f"p_b must lie in (0, 1), got {p_b}")
    n = m.num_colors
    groups: dict[int, list[float]] = {}
    for o1 in range(n):
        for o2 in range(n):
            pair = PixelPair(o1, o2)
            try:
                post = boundary_posterior_two_pixel(pair, m, p_b)
            except ImpossibleObservationError:
                continue
            groups.setdefault(_magnitude_for_mode(pair, m), []).append(post)
    rows = tuple(
        LookupRow(
            magnitude=g,
            min_posterior=min(vals),
            mean_posterior=math.fsum(vals) / len(vals),
            max_posterior=max(vals),
        )
        for g, vals in sorted(groups.items())
    )
    return LookupTable(p_b=p_b, boundary_mode=m.boundary_mode, rows=rows)
