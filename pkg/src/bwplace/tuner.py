"""Online hill climbing of the data-to-worker proximity factor.

The tuner watches a stall-rate stream: it collects fixed-size windows,
trims outliers from both sorted tails, averages the rest, and keeps raising
the proximity factor by a constant step while the averages keep dropping.
On the first non-improving window it stops and reverts to the previous
(best-observed) value.  A two-stage variant first protects a co-scheduled
high-priority workload: stage 1 climbs until that workload's stall rate
stabilizes, and the factor reached becomes a lower bound for the normal
climb of stage 2.

Default parameters (20-sample windows, trim 5 per tail, 0.2 s intervals,
10% steps) are the calibrated operating point for the whole toolkit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import islice
from typing import Callable, Iterator, Optional, Sequence

from .errors import ValidationError


class Decision(Enum):
    INCREASE = "increase"
    STOP = "stop"


class Phase(Enum):
    CLIMBING = "climbing"
    STOPPED = "stopped"


@dataclass(frozen=True)
class TunerConfig:
    """Measurement-window and step configuration.

    ``interval`` is seconds of wall clock against a live measurement source
    and logical time against the simulator; the tuner itself only ever sees
    sample batches.
    """

    window_size: int = 20
    trim: int = 5
    interval: float = 0.2
    step: float = 0.10

    def __post_init__(self):
        if self.trim < 0 or self.window_size <= 2 * self.trim:
            raise ValidationError("window_size must exceed twice the trim count")
        if not 0.0 < self.step <= 1.0:
            raise ValidationError(f"step must lie in (0, 1], got {self.step}")
        if self.interval <= 0:
            raise ValidationError(f"interval must be positive, got {self.interval}")

    @property
    def max_windows(self) -> int:
        return math.ceil(1.0 / self.step) + 1


@dataclass(frozen=True)
class TunerState:
    current_dwp: float = 0.0
    prev_window_avg: Optional[float] = None
    prev_dwp: Optional[float] = None
    history: tuple = ()
    phase: Phase = Phase.CLIMBING


@dataclass(frozen=True)
class WindowRecord:
    index: int
    dwp: float
    window_avg: float
    decision: Decision


@dataclass(frozen=True)
class TuningResult:
    final_dwp: float
    records: tuple
    state: TunerState


@dataclass(frozen=True)
class CoScheduledResult:
    final_dwp: float
    bound: float
    stage1_records: tuple
    stage2_records: tuple


def summarize_window(samples: Sequence[float], trim: int) -> float:
    """Trimmed mean: sort, drop ``trim`` from each end, average the rest."""
    if trim < 0:
        raise ValidationError(f"trim must be non-negative, got {trim}")
    if len(samples) <= 2 * trim:
        raise ValidationError(f"window of {len(samples)} samples too small for trim {trim}")
    kept = sorted(samples)[trim: len(samples) - trim]
    return sum(kept) / len(kept)


def _bump(dwp: float, step: float) -> float:
    # round keeps repeated 0.1 steps from drifting off the grid
    return min(round(dwp + step, 12), 1.0)


def tuner_step(state: TunerState, window_avg: float, config: TunerConfig):
    """Advance the climb by one summarized window.

    Returns ``(new_state, decision)``.  The first window has no baseline and
    always explores upward unless already at the top; a non-improving window
    stops the climb and reverts to the previous value.
    """
    if state.phase is not Phase.CLIMBING:
        raise ValidationError("tuner_step called after the climb stopped")
    history = state.history + ((state.current_dwp, window_avg),)
    at_top = state.current_dwp >= 1.0 - 1e-12
    improved = state.prev_window_avg is None or window_avg < state.prev_window_avg
    if improved and not at_top:
        new_state = TunerState(
            current_dwp=_bump(state.current_dwp, config.step),
            prev_window_avg=window_avg,
            prev_dwp=state.current_dwp,
            history=history,
            phase=Phase.CLIMBING,
        )
        return new_state, Decision.INCREASE
    if improved:
        # Hit the top while still improving: keep the boundary value.
        final = state.current_dwp
    else:
        final = state.prev_dwp if state.prev_dwp is not None else state.current_dwp
    new_state = TunerState(
        current_dwp=final,
        prev_window_avg=window_avg,
        prev_dwp=state.prev_dwp,
        history=history,
        phase=Phase.STOPPED,
    )
    return new_state, Decision.STOP


def _collect(stream: Iterator[float], config: TunerConfig) -> float:
    samples = list(islice(stream, config.window_size))
    if len(samples) < config.window_size:
        raise ValidationError("measurement stream exhausted mid-window")
    return summarize_window(samples, config.trim)


def run_tuning(
    stream: Iterator[float],
    plan_applier: Callable[[float], None],
    config: TunerConfig,
    start_dwp: float = 0.0,
) -> TuningResult:
    """Drive the climb against a measurement stream until it stops.

    ``plan_applier`` is invoked with the new factor after every increase and
    once more with the reverted best value on stop (replaying the stored
    best plan is the one backward transition the flow permits).
    """
    state = TunerState(current_dwp=start_dwp)
    records = []
    for index in range(config.max_windows):
        avg = _collect(stream, config)
        dwp_at_window = state.current_dwp
        state, decision = tuner_step(state, avg, config)
        records.append(WindowRecord(index, dwp_at_window, avg, decision))
        plan_applier(state.current_dwp)
        if decision is Decision.STOP:
            break
    return TuningResult(final_dwp=state.current_dwp, records=tuple(records), state=state)


def co_scheduled_tuning(
    stream_a: Iterator[float],
    stream_b: Iterator[float],
    plan_applier_b: Callable[[float], None],
    config: TunerConfig,
    stable_rel_change: float = 0.02,
) -> CoScheduledResult:
    """Two-stage climb for a best-effort workload B next to a high-priority A.

    Stage 1 raises B's proximity factor while A's trimmed stall average
    still drops by more than ``stable_rel_change`` relative per window; the
    value where it stabilizes (reverted one step) becomes the lower bound.
    Stage 2 is the standard climb over B's own stream, starting at and never
    returning below that bound.
    """
    records1 = []
    prev_avg: Optional[float] = None
    prev_dwp: Optional[float] = None
    dwp = 0.0
    bound = None
    for index in range(config.max_windows):
        avg = _collect(stream_a, config)
        at_top = dwp >= 1.0 - 1e-12
        if prev_avg is None:
            decreasing = True
        else:
            rel = (prev_avg - avg) / abs(prev_avg) if prev_avg != 0 else 0.0
            decreasing = rel > stable_rel_change
        if decreasing and not at_top:
            records1.append(WindowRecord(index, dwp, avg, Decision.INCREASE))
            prev_dwp, prev_avg = dwp, avg
            dwp = _bump(dwp, config.step)
            plan_applier_b(dwp)
            continue
        records1.append(WindowRecord(index, dwp, avg, Decision.STOP))
        if decreasing:
            bound = dwp  # still improving at the top: clamp there
        else:
            bound = prev_dwp if prev_dwp is not None else dwp
        break
    if bound is None:
        bound = dwp
    plan_applier_b(bound)
    stage2 = run_tuning(stream_b, plan_applier_b, config, start_dwp=bound)
    return CoScheduledResult(
        final_dwp=stage2.final_dwp,
        bound=bound,
        stage1_records=tuple(records1),
        stage2_records=stage2.records,
    )


def render_history(records: Sequence[WindowRecord]) -> str:
    """Tabular text report of a tuning run."""
    lines = [f"{'window':>6}  {'dwp':>6}  {'trimmed_avg':>14}  decision"]
    for r in records:
        lines.append(f"{r.index:>6}  {r.dwp:>6.2f}  {r.window_avg:>14.6g}  {r.decision.value}")
    return "\n".join(lines) + "\n"
