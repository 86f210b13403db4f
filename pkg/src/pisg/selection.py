"""The argmax-selection correspondence and its piecewise-linear realization.

For inputs ``x, y`` the correspondence returns the interval
``[min y_j, max y_j]`` over ``j`` in ``argmax x``.  ``select_pair_step`` is
the two-input pseudo-circuit: its fixed points in the auxiliary input ``z``
are exactly the correspondence values.  ``select_n`` chains pairwise
decisions along prefix maxima.
"""

from __future__ import annotations

import enum
from typing import Sequence


class TieRule(enum.Enum):
    KEEP_EARLIER = "keep-earlier"


def select_pair_step(x1, x2, y1, y2, z):
    """``clamp(z + d1 - d2 + d3 - d4)`` with ``d1 = max(0, min(x1-x2, y1-y2))`` etc.

    At most one of the four gate terms is nonzero, so their signed sum is
    ``sign(dx) sign(dy) min(|dx|, |dy|)``.
    """
    dx, dy = x1 - x2, y1 - y2
    shift = 0
    if dx and dy:
        shift = min(abs(dx), abs(dy))
        if (dx > 0) != (dy > 0):
            shift = -shift
    lo, hi = (y1, y2) if y1 <= y2 else (y2, y1)
    return max(lo, min(hi, z + shift))


def select_pair_fixed_points(x1, x2, y1, y2) -> tuple:
    """Closed interval ``(lo, hi)`` of fixed points of :func:`select_pair_step`."""
    if x1 > x2:
        return (y1, y1)
    if x1 < x2:
        return (y2, y2)
    return (min(y1, y2), max(y1, y2))


def selection_interval(x: Sequence, y: Sequence) -> tuple:
    """The correspondence value ``[min_A y, max_A y]`` with ``A = argmax x``."""
    if len(x) != len(y) or not x:
        raise ValueError("x and y must be nonempty and of equal length")
    top = max(x)
    ys = [yj for xj, yj in zip(x, y) if xj == top]
    return (min(ys), max(ys))


def select_n(x: Sequence, y: Sequence, tie_rule: TieRule = TieRule.KEEP_EARLIER):
    """Deterministic point of the selection interval via the prefix-max chain."""
    if len(x) != len(y) or not x:
        raise ValueError("x and y must be nonempty and of equal length")
    if tie_rule is not TieRule.KEEP_EARLIER:
        raise ValueError(f"unsupported tie rule {tie_rule}")
    best, z = x[0], y[0]
    for xi, yi in zip(x[1:], y[1:]):
        if xi > best:
            best, z = xi, yi
    return z
