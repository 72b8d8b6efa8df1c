"""Certified measure of sublevel sets {|f| <= eps} by quadtree bisection.

Each cell is classified with an interval enclosure of f: entirely inside,
entirely outside, or undecided.  Undecided cells are split until the depth
limit (or until their total area is small relative to the certified part).
The estimate counts half of the undecided area; the undecided area itself is
a hard error bar.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .intervals import abs_range, phase_range
from .phase_algebra import PolynomialPhase


@dataclass(frozen=True)
class SublevelMeasure:
    measure: float
    error: float  # undecided area; the true measure lies in [lower, upper]
    inside: float
    cells: int

    @property
    def lower(self) -> float:
        return self.inside

    @property
    def upper(self) -> float:
        return self.inside + self.error


def sublevel_measure(
    f: PolynomialPhase,
    rho: float,
    epsilon: float,
    max_depth: int = 12,
    rel_tol: float = 0.0,
    max_cells: int = 4_000_000,
) -> SublevelMeasure:
    """Area of {x in [-rho, rho]^2 : |f(x)| <= epsilon}.

    Splitting stops at ``max_depth`` levels, or earlier once the undecided
    area is at most ``rel_tol`` times the current estimate.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not rho > 0:
        raise ValueError("rho must be positive")
    x0 = np.array([-rho])
    y0 = np.array([-rho])
    h = 2.0 * rho
    inside = 0.0
    cells = 0
    for depth in range(max_depth + 1):
        lo, hi = abs_range(*phase_range(f, x0, x0 + h, y0, y0 + h))
        cells += len(x0)
        is_in = hi <= epsilon
        is_out = lo > epsilon
        inside += np.count_nonzero(is_in) * h * h
        und = ~(is_in | is_out)
        x0, y0 = x0[und], y0[und]
        und_area = len(x0) * h * h
        if not len(x0) or depth == max_depth:
            break
        if rel_tol > 0 and und_area <= rel_tol * (inside + 0.5 * und_area):
            break
        if 4 * len(x0) > max_cells:
            break
        h *= 0.5
        x0 = np.concatenate([x0, x0 + h, x0, x0 + h])
        y0 = np.concatenate([y0, y0, y0 + h, y0 + h])
    und_area = len(x0) * h * h
    return SublevelMeasure(inside + 0.5 * und_area, und_area, inside, cells)
