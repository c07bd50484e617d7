"""Exception types shared across the package."""

from __future__ import annotations


class ImpossibleObservationError(ValueError):
    """The observation has probability zero under every admitted hypothesis.

    Raised instead of returning NaN so that modeling bugs surface loudly.
    The message identifies the offending pixel coordinate when the error
    arises inside a full-image scan.
    """


class SingularNoiseMatrixError(ValueError):
    """A noise matrix is too ill-conditioned to invert reliably.

    Parameters
    ----------
    condition_estimate : float
        The norm-based condition estimate that exceeded the threshold.
    threshold : float
        The refusal threshold in effect.
    """

    def __init__(self, condition_estimate: float, threshold: float) -> None:
        self.condition_estimate = condition_estimate
        self.threshold = threshold
        super().__init__(
            f"noise matrix condition estimate {condition_estimate:.6g} exceeds "
            f"threshold {threshold:.6g}; deconvolution would amplify noise into garbage"
        )


class PgmFormatError(ValueError):
    """The input is not a readable P2/P5 PGM file."""
