"""Deterministic mean-field limit of the urn in log-time.

In log-time s = log t the urn's expected motion becomes the autonomous
system dp/ds = p^[rule](p) - p, where p^[rule] is the two- or three-draw
winner distribution of p. A classical fourth-order fixed-step
integrator with per-step renormalization follows the flow; the log-sum
functional sum_x log p(x) is the conserved/monotone quantity of
interest on the 3-cycle.
"""

import math
from dataclasses import dataclass

import numpy as np

from .lottery import Lottery
from .tournament import Tournament
from .urn import ReinforcementRule

_FLOOR = 1e-300


class FlowDivergenceError(ArithmeticError):
    """Non-finite state during integration; carries the log-time s."""

    def __init__(self, s: float):
        self.s = s
        super().__init__(f"non-finite flow state at s={s!r}")


@dataclass(frozen=True)
class FlowState:
    """Integration endpoint plus the sampled path that led there."""
    point: tuple
    s: float
    history: tuple
    boundary_contact: bool = False

    @property
    def lottery(self) -> Lottery:
        return Lottery(self.point)


def _payoff_matrix(t: Tournament) -> np.ndarray:
    m = t.beats.astype(np.float64)
    return m - m.T


def _field(matrix: np.ndarray, rule: ReinforcementRule,
           p: np.ndarray) -> np.ndarray:
    g = matrix @ p
    if rule is ReinforcementRule.TWO_ALTERNATIVES:
        return p * g
    return p * (1.5 * g + 0.5 * g * g + 0.5 * (matrix @ (p * g)))


def _check_rule(rule: ReinforcementRule) -> None:
    if rule is ReinforcementRule.FAST:
        raise ValueError(
            "no flow for the fast rule: its reinforcement distribution is "
            "discontinuous where the support changes")


def vector_field(t: Tournament, rule: ReinforcementRule,
                 p: Lottery) -> tuple:
    """p^[rule](p) - p; components sum to zero."""
    _check_rule(rule)
    if len(p) != t.n:
        raise ValueError(f"lottery length {len(p)} does not match n={t.n}")
    arr = np.array(p.as_floats(), dtype=np.float64)
    return tuple(float(v) for v in _field(_payoff_matrix(t), rule, arr))


def log_sum(p) -> float:
    """Sum of log p(x); requires every entry positive."""
    values = [float(q) for q in p]
    for q in values:
        if q <= 0.0:
            raise ValueError("log_sum needs strictly positive entries")
    return math.fsum(math.log(q) for q in values)


def integrate(t: Tournament, rule: ReinforcementRule, p0: Lottery,
              s_end: float, step: float = 1e-3,
              sample_ds: float | None = None) -> FlowState:
    """Follow the flow from p0 to log-time s_end with fixed step size.

    The state is renormalized after every step; entries falling below
    1e-300 are clamped to that floor and flagged as boundary contact.
    The history holds (s, point) pairs at the start, on the sample grid,
    and at the end.
    """
    _check_rule(rule)
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")
    if s_end < 0.0:
        raise ValueError(f"s_end must be nonnegative, got {s_end}")
    if len(p0) != t.n:
        raise ValueError(f"lottery length {len(p0)} does not match n={t.n}")
    matrix = _payoff_matrix(t)
    arr = np.array(p0.as_floats(), dtype=np.float64)
    boundary = False
    history = [(0.0, tuple(float(v) for v in arr))]
    n_full, remainder = divmod(s_end, step)
    sizes = [step] * int(n_full)
    if remainder > 1e-12 * max(1.0, s_end):
        sizes.append(remainder)
    next_sample = sample_ds if sample_ds else None
    s = 0.0
    for h in sizes:
        k1 = _field(matrix, rule, arr)
        k2 = _field(matrix, rule, arr + (h / 2.0) * k1)
        k3 = _field(matrix, rule, arr + (h / 2.0) * k2)
        k4 = _field(matrix, rule, arr + h * k3)
        arr = arr + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s += h
        if not np.isfinite(arr).all():
            raise FlowDivergenceError(s)
        if (arr < _FLOOR).any():
            boundary = True
            arr = np.maximum(arr, _FLOOR)
        arr = arr / arr.sum()
        if next_sample is not None and s >= next_sample - 1e-12:
            history.append((s, tuple(float(v) for v in arr)))
            while next_sample <= s + 1e-12:
                next_sample += sample_ds
    point = tuple(float(v) for v in arr)
    if not history or history[-1][0] < s - 1e-12:
        history.append((s, point))
    return FlowState(point=point, s=s, history=tuple(history),
                     boundary_contact=boundary)
