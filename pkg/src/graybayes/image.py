"""Gray-level image container.

A :class:`GrayImage` is an observed grid of discrete gray-level indices in
``[0, num_colors)``.  It is the observation ``O`` that every detector in this
package conditions on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GrayImage:
    """An observed gray-level grid.

    Parameters
    ----------
    pixels : numpy.ndarray
        Integer array of shape ``(height, width)`` with values in
        ``[0, num_colors)``.
    num_colors : int
        Number of distinct gray-levels ``N``.
    """

    pixels: np.ndarray
    num_colors: int

    width: int = field(init=False)
    height: int = field(init=False)

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("pixels must be a non-empty 2-D array")
        if not np.issubdtype(px.dtype, np.integer):
            raise ValueError("pixels must be integers (gray-level indices)")
        if self.num_colors < 1:
            raise ValueError("num_colors must be positive")
        if px.min() < 0 or px.max() >= self.num_colors:
            raise ValueError(
                f"pixel values must lie in [0, {self.num_colors}); "
                f"found range [{px.min()}, {px.max()}]"
            )
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)
        object.__setattr__(self, "height", int(px.shape[0]))
        object.__setattr__(self, "width", int(px.shape[1]))
