"""Population-level jump chain of chase-escape with conversion on K_{n+1}.

The state is the triple of red/blue/white counts.  On a complete graph the
per-edge dynamics collapse to aggregate rates lambda*r*w (red spread),
r*b (chase), and alpha*r (conversion), so the whole process can be simulated
on the counts alone.  The common factor r cancels from the embedded jump
probabilities but not from the holding-time clock.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .params import NoTransitionError, Params

_BUFFER_CHUNK = 1 << 16  # even, so paired draws never straddle a refill


class EventKind(Enum):
    GROW = "grow"        # a white vertex turns red
    CHASE = "chase"      # a red vertex turns blue via a blue neighbor
    CONVERT = "convert"  # a red vertex turns blue spontaneously


class PopulationState(NamedTuple):
    r: int
    b: int
    w: int


@dataclass(frozen=True)
class FixationResult:
    """Terminal statistics, read at the first moment no red remains."""

    white_survivors: int
    blue_total: int
    conversions: int
    fixation_time: float
    jump_count: int


class JumpRecord(NamedTuple):
    time: float
    state: PopulationState
    event: EventKind


@dataclass(frozen=True)
class Trajectory:
    """One realization with every jump retained."""

    initial: PopulationState
    records: tuple[JumpRecord, ...]

    def states(self) -> list[PopulationState]:
        return [self.initial] + [rec.state for rec in self.records]

    def fixation_result(self) -> FixationResult:
        last = self.records[-1]
        conversions = sum(1 for rec in self.records if rec.event is EventKind.CONVERT)
        return FixationResult(
            white_survivors=last.state.w,
            blue_total=last.state.b,
            conversions=conversions,
            fixation_time=last.time,
            jump_count=len(self.records),
        )


def initial_state(params: Params) -> PopulationState:
    r0, b0 = params.initial_red_blue
    return PopulationState(r0, b0, params.n)


def jump_probabilities(state: PopulationState, params: Params) -> tuple[float, float, float]:
    """(p_grow, p_chase, p_convert) for the next jump; the r factor cancels."""
    r, b, w = state
    if r < 1:
        raise NoTransitionError("process already fixated (no red vertices)")
    a = params.conversion_rate
    denom = params.lam * w + b + a
    if denom <= 0.0:
        raise NoTransitionError("total jump rate is zero in this state")
    return params.lam * w / denom, b / denom, a / denom


def total_rate(state: PopulationState, params: Params) -> float:
    """Aggregate jump rate r * (lambda*w + b + alpha)."""
    r, b, w = state
    if r < 1:
        raise NoTransitionError("process already fixated (no red vertices)")
    return r * (params.lam * w + b + params.conversion_rate)


def step(
    state: PopulationState, params: Params, rng: np.random.Generator
) -> tuple[PopulationState, EventKind, float]:
    """Advance one jump.

    Consumes exactly two uniforms in fixed order (event pick, then holding
    time), so the result is a pure function of the generator state.  The
    holding time is Exp(total_rate) of the state being left.
    """
    r, b, w = state
    if r < 1:
        raise NoTransitionError("process already fixated (no red vertices)")
    a = params.conversion_rate
    denom = params.lam * w + b + a
    if denom <= 0.0:
        raise NoTransitionError("total jump rate is zero in this state")
    u_event = rng.random()
    u_hold = rng.random()
    holding = -math.log1p(-u_hold) / (r * denom)
    p_grow = params.lam * w / denom
    if u_event < p_grow:
        return PopulationState(r + 1, b, w - 1), EventKind.GROW, holding
    if u_event < p_grow + b / denom:
        return PopulationState(r - 1, b + 1, w), EventKind.CHASE, holding
    return PopulationState(r - 1, b + 1, w), EventKind.CONVERT, holding


def run_to_fixation(params: Params, rng: np.random.Generator) -> FixationResult:
    """Simulate until no red vertices remain.

    Consumes the same uniform stream as repeated :func:`step` calls (two
    uniforms per jump), drawn in chunks for speed, so a given seed produces
    identical results along either path.
    """
    lam = params.lam
    a = params.conversion_rate
    r, b, w = initial_state(params)
    total = params.total_vertices
    fixation_time = 0.0
    conversions = 0
    jumps = 0
    log1p = math.log1p
    buf = rng.random(min(4 * total, _BUFFER_CHUNK))
    j = 0
    size = buf.size
    while r > 0:
        if j >= size:
            buf = rng.random(_BUFFER_CHUNK)
            size = buf.size
            j = 0
        u_event = buf[j]
        u_hold = buf[j + 1]
        j += 2
        denom = lam * w + b + a
        fixation_time += -log1p(-u_hold) / (r * denom)
        p_grow = lam * w / denom
        if u_event < p_grow:
            r += 1
            w -= 1
        else:
            if u_event >= p_grow + b / denom:
                conversions += 1
            r -= 1
            b += 1
        jumps += 1
    assert jumps <= 2 * total  # each vertex reds at most once and blues at most once
    return FixationResult(w, total - w, conversions, float(fixation_time), jumps)


def record_trajectory(params: Params, rng: np.random.Generator) -> Trajectory:
    """Like :func:`run_to_fixation` but retaining every jump record."""
    start = initial_state(params)
    state = start
    t = 0.0
    records = []
    while state.r > 0:
        state, event, holding = step(state, params, rng)
        t += holding
        records.append(JumpRecord(t, state, event))
    return Trajectory(initial=start, records=tuple(records))


def max_jump_count(params: Params) -> int:
    """Hard bound: every vertex turns red at most once and blue at most once."""
    return 2 * params.total_vertices


def check_trajectory(trajectory: Trajectory, params: Params) -> None:
    """Raise AssertionError unless every trajectory invariant holds."""
    total = params.total_vertices
    if trajectory.initial != initial_state(params):
        raise AssertionError("trajectory does not start at the initial condition")
    if not trajectory.records:
        raise AssertionError("trajectory has no jumps")
    prev_state = trajectory.initial
    prev_time = 0.0
    for rec in trajectory.records:
        if rec.time <= prev_time:
            raise AssertionError("jump times are not strictly increasing")
        r, b, w = rec.state
        if min(r, b, w) < 0 or r + b + w != total:
            raise AssertionError("vertex counts are not conserved")
        grow = (r, b, w) == (prev_state.r + 1, prev_state.b, prev_state.w - 1)
        shrink = (r, b, w) == (prev_state.r - 1, prev_state.b + 1, prev_state.w)
        if rec.event is EventKind.GROW:
            ok = grow
        else:
            ok = shrink
        if not ok:
            raise AssertionError(f"illegal transition {prev_state} -> {rec.state} ({rec.event})")
        # the layer index r + 2b advances by exactly one per jump
        if (r + 2 * b) - (prev_state.r + 2 * prev_state.b) != 1:
            raise AssertionError("layer index did not advance by one")
        prev_state, prev_time = rec.state, rec.time
    if prev_state.r != 0:
        raise AssertionError("trajectory does not end at fixation")
    if len(trajectory.records) > max_jump_count(params):
        raise AssertionError("jump count exceeds the 2 * (vertex count) bound")
