"""Success frequencies, Wilson intervals and monotone-trend verdicts."""

from __future__ import annotations

from dataclasses import dataclass

from scipy.stats import binomtest

from ..errors import ConfigError


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("need at least one trial")
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    # clamp so the interval always contains the point estimate despite rounding
    p = successes / trials
    return min(float(ci.low), p), max(float(ci.high), p)


@dataclass(frozen=True)
class TrendPoint:
    param: float
    successes: int
    trials: int

    @property
    def frequency(self) -> float:
        return self.successes / self.trials

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.trials)


@dataclass
class TrendReport:
    name: str
    points: list[TrendPoint]
    verdict: str  # "non-decreasing" or "violated"
    offending: tuple[float, float] | None

    @property
    def ok(self) -> bool:
        return self.verdict == "non-decreasing"

    def table(self) -> str:
        lines = [f"{self.name:>10} {'succ':>6} {'trials':>6} {'freq':>7}  wilson95"]
        for p in self.points:
            lo, hi = p.interval
            lines.append(
                f"{p.param:>10g} {p.successes:>6d} {p.trials:>6d} {p.frequency:>7.3f}  [{lo:.3f}, {hi:.3f}]"
            )
        tail = self.verdict
        if self.offending:
            tail += f" between {self.offending[0]:g} and {self.offending[1]:g}"
        lines.append(f"verdict: {tail}")
        return "\n".join(lines)


def trend_report(name: str, points: list[TrendPoint]) -> TrendReport:
    """Call the series non-decreasing unless some later point's interval lies entirely
    below an earlier point's interval."""
    if len(points) < 2:
        raise ConfigError("points", "a trend needs at least two parameter points")
    if len({p.trials for p in points}) != 1:
        raise ConfigError("points", "every point must use the same number of trials")
    pts = sorted(points, key=lambda p: p.param)
    for i, a in enumerate(pts):
        for b in pts[i + 1 :]:
            if b.interval[1] < a.interval[0]:
                return TrendReport(name, pts, "violated", (a.param, b.param))
    return TrendReport(name, pts, "non-decreasing", None)
