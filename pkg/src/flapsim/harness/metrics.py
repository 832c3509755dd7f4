"""Step-response metrics: 5 % settling time, overshoot, reverse response, final error."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

SETTLING_BAND = 0.05
REVERSE_THRESHOLD = 0.05
REVERSE_MIN_DURATION = 0.010


@dataclass(frozen=True)
class ChannelMetrics:
    settling_time: float  # nan when the signal never stays inside the band
    overshoot_pct: float
    reverse_response: bool
    reverse_pct: float  # largest excursion against the step, % of the step
    steady_state_error: float  # |final - target|, in the channel's units

    @classmethod
    def undefined(cls) -> "ChannelMetrics":
        return cls(math.nan, math.nan, False, math.nan, math.nan)

    def as_dict(self) -> dict:
        return asdict(self)


def step_metrics(t, y, target: float, initial: float | None = None, *,
                 band: float = SETTLING_BAND, reverse_threshold: float = REVERSE_THRESHOLD,
                 reverse_min_duration: float = REVERSE_MIN_DURATION) -> ChannelMetrics:
    """Metrics of a sampled step response ``y(t)`` heading from ``initial`` to ``target``.

    Settling time is the first sample after the last one outside
    ``target +- band*|step|``. A reverse response is flagged when, before
    the response first covers half the step, it stays beyond
    ``reverse_threshold*|step|`` on the wrong side for at least
    ``reverse_min_duration`` seconds.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size == 0:
        return ChannelMetrics.undefined()
    y0 = float(y[0]) if initial is None else float(initial)
    step = target - y0
    mag = abs(step)
    if mag == 0.0:
        return ChannelMetrics(math.nan, math.nan, False, math.nan, abs(float(y[-1]) - target))
    direction = math.copysign(1.0, step)

    outside = np.nonzero(np.abs(y - target) > band * mag)[0]
    if outside.size == 0:
        settling = float(t[0])
    elif outside[-1] == t.size - 1:
        settling = math.nan
    else:
        settling = float(t[outside[-1] + 1])

    progress = (y - y0) * direction
    overshoot = max(0.0, float(np.max(progress - mag))) / mag * 100.0

    reached = np.nonzero(progress >= 0.5 * mag)[0]
    window = slice(0, reached[0] if reached.size else t.size)
    early, t_early = progress[window], t[window]
    reverse_pct = max(0.0, -float(np.min(early))) / mag * 100.0 if early.size else 0.0
    reverse = False
    start = None
    for i, below in enumerate(early < -reverse_threshold * mag):
        if below:
            start = t_early[i] if start is None else start
            if t_early[i] - start >= reverse_min_duration - 1e-9:
                reverse = True
                break
        else:
            start = None

    return ChannelMetrics(settling, overshoot, reverse, reverse_pct, abs(float(y[-1]) - target))
