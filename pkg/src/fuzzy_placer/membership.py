"""Piecewise-linear membership functions and the curve algebra used by Mamdani inference.

Every curve is a finite list of ``(x, mu)`` breakpoints joined by straight
segments and extended flat beyond the first and last breakpoint. Clipping,
max-aggregation and the centroid all stay exact on that representation:
no sampling grid is involved anywhere in this module.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateOutput, EmptyRuleSet, InvalidConfig

@dataclass(frozen=True)
class MembershipFunction:
    """Piecewise-linear curve mapping a crisp value to a degree in [0, 1].

    Args:
        breakpoints: ``(x, mu)`` pairs with strictly increasing ``x``.
            At least two are required.
    """

    breakpoints: tuple[tuple[float, float], ...]

    def __init__(self, breakpoints: Iterable[Sequence[float]]):
        pts = tuple((float(x), float(mu)) for x, mu in breakpoints)
        if len(pts) < 2:
            raise InvalidConfig("a membership function needs at least 2 breakpoints")
        for i, (x, mu) in enumerate(pts):
            if not (math.isfinite(x) and math.isfinite(mu)):
                raise InvalidConfig(f"breakpoint {i} is not finite: ({x}, {mu})")
            if not 0.0 <= mu <= 1.0:
                raise InvalidConfig(f"breakpoint {i} has degree {mu} outside [0, 1]")
            if i and x <= pts[i - 1][0]:
                raise InvalidConfig(
                    f"breakpoint x values must be strictly increasing (index {i}: {x} <= {pts[i - 1][0]})"
                )
        object.__setattr__(self, "breakpoints", pts)

    @property
    def xs(self) -> tuple[float, ...]:
        return tuple(x for x, _ in self.breakpoints)

    @property
    def mus(self) -> tuple[float, ...]:
        return tuple(mu for _, mu in self.breakpoints)

    def __call__(self, x: float) -> float:
        return membership_degree(self, x)

    def scaled(self, factor: float) -> "MembershipFunction":
        """Return the curve with every degree multiplied by ``factor`` (0 <= factor <= 1)."""
        if not 0.0 <= factor <= 1.0:
            raise InvalidConfig(f"scale factor {factor} outside [0, 1]")
        return MembershipFunction((x, mu * factor) for x, mu in self.breakpoints)

    def is_zero(self) -> bool:
        return all(mu == 0.0 for _, mu in self.breakpoints)


@dataclass(frozen=True)
class AggregatedOutput:
    """Pointwise maximum of the clipped rule consequents."""

    curve: MembershipFunction

    def scaled(self, factor: float) -> "AggregatedOutput":
        return AggregatedOutput(self.curve.scaled(factor))


def membership_degree(mf: MembershipFunction, x: float) -> float:
    """Evaluate ``mf`` at ``x`` by linear interpolation, flat outside the breakpoints."""
    pts = mf.breakpoints
    if x <= pts[0][0]:
        return pts[0][1]
    if x >= pts[-1][0]:
        return pts[-1][1]
    i = bisect_right(mf.xs, x)
    (x0, y0), (x1, y1) = pts[i - 1], pts[i]
    if y0 == y1:
        return y0
    t = (x - x0) / (x1 - x0)
    y = y0 + t * (y1 - y0)
    # rounding must not push the degree out of the segment's range
    return min(max(y, min(y0, y1)), max(y0, y1))


def _crossing(x0: float, x1: float, t: float) -> float | None:
    """Point at fraction ``t`` of ``[x0, x1]``, kept strictly inside the segment.

    Rounding may land the crossing on an endpoint; it is nudged one ulp inward
    instead of being dropped, because dropping it erases the kink and distorts
    curves clipped at tiny strengths. Returns None if no float lies strictly
    between the endpoints.
    """
    lo = math.nextafter(x0, x1)
    hi = math.nextafter(x1, x0)
    if lo > hi:
        return None
    return min(max(x0 + t * (x1 - x0), lo), hi)


def implicate(consequent_mf: MembershipFunction, strength: float) -> MembershipFunction:
    """Mamdani min-implication: clip ``consequent_mf`` at height ``strength``.

    A breakpoint is inserted wherever a segment crosses the clip level, so the
    result is exactly ``min(mu(x), strength)``.
    """
    if not 0.0 <= strength <= 1.0:
        raise InvalidConfig(f"firing strength {strength} outside [0, 1]")
    if strength >= 1.0:
        return consequent_mf
    pts = consequent_mf.breakpoints
    if strength == 0.0:
        return MembershipFunction((x, 0.0) for x, _ in pts)

    xs = set(consequent_mf.xs)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if (y0 - strength) * (y1 - strength) < 0.0:
            xc = _crossing(x0, x1, (strength - y0) / (y1 - y0))
            if xc is not None:
                xs.add(xc)
    xs = sorted(xs)
    return MembershipFunction((x, min(membership_degree(consequent_mf, x), strength)) for x in xs)


def aggregate(clipped: Sequence[MembershipFunction]) -> AggregatedOutput:
    """Pointwise maximum of ``clipped``, represented exactly.

    The result has a breakpoint at every input breakpoint and at every
    crossing between two inputs, so it is linear between its own breakpoints.

    Raises:
        EmptyRuleSet: if ``clipped`` is empty.
    """
    curves = list(clipped)
    if not curves:
        raise EmptyRuleSet("cannot aggregate an empty set of rule outputs")
    if len(curves) == 1:
        return AggregatedOutput(curves[0])

    grid = sorted({x for c in curves for x in c.xs})
    xs = set(grid)
    for a, b in zip(grid, grid[1:]):
        va = [membership_degree(c, a) for c in curves]
        vb = [membership_degree(c, b) for c in curves]
        for i in range(len(curves)):
            for j in range(i + 1, len(curves)):
                da = va[i] - va[j]
                db = vb[i] - vb[j]
                if da * db < 0.0:
                    xc = _crossing(a, b, da / (da - db))
                    if xc is not None:
                        xs.add(xc)
    xs = sorted(xs)
    return AggregatedOutput(MembershipFunction((x, max(membership_degree(c, x) for c in curves)) for x in xs))


def _restrict(curve: MembershipFunction, lo: float, hi: float) -> list[tuple[float, float]]:
    inner = [(x, mu) for x, mu in curve.breakpoints if lo < x < hi]
    return [(lo, membership_degree(curve, lo)), *inner, (hi, membership_degree(curve, hi))]


def area_and_moment(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Exact ``(integral of mu, integral of x*mu)`` of the polyline through ``points``."""
    areas = []
    moments = []
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        w = x1 - x0
        areas.append(w * (y0 + y1) / 2.0)
        moments.append(w * (x0 * (2.0 * y0 + y1) + x1 * (y0 + 2.0 * y1)) / 6.0)
    return math.fsum(areas), math.fsum(moments)


def defuzzify_centroid(agg: AggregatedOutput | MembershipFunction, universe: tuple[float, float]) -> float:
    """Center of gravity of the aggregated curve over ``universe``.

    Integrals are evaluated in closed form segment by segment. Degrees are
    divided by their peak first; the centroid does not change, and curves
    clipped at tiny strengths do not underflow.

    Raises:
        DegenerateOutput: if the curve is zero everywhere on the universe.
    """
    curve = agg.curve if isinstance(agg, AggregatedOutput) else agg
    lo, hi = universe
    points = _restrict(curve, lo, hi)
    peak = max(mu for _, mu in points)
    if peak <= 0.0:
        raise DegenerateOutput("aggregated output is zero on the whole universe; no rule fired")
    area, moment = area_and_moment([(x, mu / peak) for x, mu in points])
    return min(max(moment / area, lo), hi)
