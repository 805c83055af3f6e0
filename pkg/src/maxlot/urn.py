"""Seeded reinforcement urn processes over a tournament.

Each step draws alternatives by current ball proportions, plays them
against each other, and adds one ball of the winning color. The
two-draw and three-draw rules run through compiled kernels fed by
buffered raw words from a counter-based generator; the fast rule, which
reinforces a draw from the stationary distribution of the proportions,
runs in Python with a per-step linear solve. Trajectories are exactly
reproducible from (tournament, initial counts, rule, seed).
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import fsum, lcm
from types import MappingProxyType

import numpy as np

from . import _kernels
from .chain import chain_step, stationary
from .diagnostics import DiagnosticsContext, mu
from .lottery import Lottery
from .rng import RawStream
from .tournament import Tournament

_BLOCK_WORDS = 1 << 19
_FAST_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class Urn:
    """Ball counts per alternative; totals track elapsed steps.

    total = initial_total + tau always, and every count stays >= 1
    (balls are only ever added).
    """
    counts: tuple
    initial_total: int
    tau: int = 0

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if not counts:
            raise ValueError("urn needs at least one color")
        for c in counts:
            if c < 1:
                raise ValueError(f"every count must be >= 1, got {counts}")
        if sum(counts) != self.total:
            raise ValueError(
                f"counts sum to {sum(counts)}, expected "
                f"{self.initial_total} + {self.tau}")

    @staticmethod
    def fresh(counts) -> "Urn":
        counts = tuple(int(c) for c in counts)
        return Urn(counts=counts, initial_total=sum(counts), tau=0)

    @property
    def total(self) -> int:
        return self.initial_total + self.tau

    @property
    def n(self) -> int:
        return len(self.counts)

    def reinforce(self, x: int) -> "Urn":
        counts = list(self.counts)
        counts[x] += 1
        return Urn(tuple(counts), self.initial_total, self.tau + 1)

    def proportions(self, exact: bool = False) -> Lottery:
        if exact:
            return Lottery(tuple(Fraction(c, self.total)
                                 for c in self.counts))
        return Lottery(tuple(c / self.total for c in self.counts))


class ReinforcementRule(Enum):
    """How the reinforced color is chosen each step."""
    TWO_ALTERNATIVES = "two"
    THREE_ALTERNATIVES = "three"
    FAST = "fast"

    @classmethod
    def parse(cls, token: str) -> "ReinforcementRule":
        for rule in cls:
            if rule.value == token:
                return rule
        valid = ", ".join(r.value for r in cls)
        raise ValueError(f"unknown rule {token!r}; expected one of {valid}")

    @property
    def draws_per_step(self) -> int:
        return {ReinforcementRule.TWO_ALTERNATIVES: 2,
                ReinforcementRule.THREE_ALTERNATIVES: 3,
                ReinforcementRule.FAST: 1}[self]


def draw(u: Urn, stream: RawStream) -> int:
    """One color by ball proportions: uniform integer in [0, total)
    mapped through cumulative counts in index order."""
    v = stream.bounded(u.total)
    for x, c in enumerate(u.counts):
        if v < c:
            return x
        v -= c
    raise AssertionError("unreachable: v < total")


def _winner(t: Tournament, a: int, b: int) -> int:
    return b if b != a and t.beats[b][a] else a


def step(t: Tournament, u: Urn, rule: ReinforcementRule,
         stream: RawStream, fast_exact: bool = False) -> Urn:
    """One reinforcement step; reference implementation of the kernels."""
    if rule is ReinforcementRule.TWO_ALTERNATIVES:
        w = _winner(t, draw(u, stream), draw(u, stream))
    elif rule is ReinforcementRule.THREE_ALTERNATIVES:
        w = _winner(t, _winner(t, draw(u, stream), draw(u, stream)),
                    draw(u, stream))
    else:
        w = _fast_draw(t, u, stream, fast_exact)
    return u.reinforce(w)


def _fast_distribution(t: Tournament, u: Urn, exact: bool) -> Lottery:
    """Stationary distribution of the proportions, residual-checked."""
    nt = u.proportions(exact=exact)
    pi = stationary(t, nt)
    if not exact:
        back = chain_step(t, nt, pi)
        residual = max(abs(back[x] - pi[x]) for x in range(t.n))
        if residual > _FAST_RESIDUAL_TOL:
            raise ArithmeticError(
                f"stationary solve residual {residual:.3e} exceeds "
                f"{_FAST_RESIDUAL_TOL:.0e}")
    return pi


def _fast_draw(t: Tournament, u: Urn, stream: RawStream,
               exact: bool) -> int:
    pi = _fast_distribution(t, u, exact)
    if exact:
        den = lcm(*(q.denominator for q in pi))
        v = stream.bounded(den)
        for x in range(t.n):
            c = pi[x].numerator * (den // pi[x].denominator)
            if v < c:
                return x
            v -= c
        raise AssertionError("unreachable: v < common denominator")
    v = stream.unit()
    acc = 0.0
    last = 0
    for x in range(t.n):
        if pi[x] > 0.0:
            last = x
            acc += pi[x]
            if v < acc:
                return x
    return last


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of one urn run on a strictly increasing schedule."""
    schedule: tuple
    states: tuple
    diagnostics: MappingProxyType
    master_seed: int
    stream: int
    initial_counts: tuple

    def urn_at(self, i: int) -> Urn:
        counts = self.states[i]
        return Urn(counts, sum(self.initial_counts), self.schedule[i])


def geometric_schedule(horizon: int) -> tuple:
    """1, 2, 4, ... doubling below the horizon, then the horizon."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    times = []
    tick = 1
    while tick < horizon:
        times.append(tick)
        tick *= 2
    times.append(horizon)
    return tuple(times)


def _check_schedule(schedule, horizon: int) -> tuple:
    times = tuple(int(s) for s in schedule)
    if not times:
        raise ValueError("snapshot schedule is empty")
    for prev, cur in zip((0,) + times, times):
        if cur <= prev:
            raise ValueError(
                f"schedule must be strictly increasing, got {times}")
    if times[-1] > horizon:
        raise ValueError(
            f"schedule reaches {times[-1]} beyond horizon {horizon}")
    return times


_compiled = False


def _ensure_compiled() -> None:
    global _compiled
    if _compiled:
        return
    beats = np.zeros((1, 1), dtype=np.uint8)
    raw = np.zeros(8, dtype=np.uint64)
    for kernel in (_kernels.run_pair_steps, _kernels.run_triple_steps):
        counts = np.ones(1, dtype=np.int64)
        kernel(beats, counts, 1, raw, 0, 1)
    _compiled = True


def _snapshot_diagnostics(ctx: DiagnosticsContext, u: Urn):
    pstar = ctx.pstar_floats()
    dist = max(abs(u.counts[x] / u.total - pstar[x]) for x in range(u.n))
    outside = fsum(u.counts[x] / u.total for x in range(u.n)
                   if x not in ctx.pstar.support)
    return mu(ctx, u), dist, outside


def run(cfg, stream: int = 0, ctx: DiagnosticsContext | None = None
        ) -> Trajectory:
    """One trajectory under cfg, on the derived stream (cfg.seed, stream)."""
    t = cfg.tournament
    horizon = int(cfg.horizon)
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    schedule = _check_schedule(
        cfg.schedule if cfg.schedule else geometric_schedule(horizon),
        horizon)
    u = Urn.fresh(cfg.counts)
    if u.n != t.n:
        raise ValueError(f"urn has {u.n} colors, tournament has {t.n}")
    if ctx is None:
        ctx = DiagnosticsContext.for_tournament(t)
    rng = RawStream(cfg.seed, stream)
    rule = cfg.rule
    if rule is ReinforcementRule.FAST:
        states, diags = _run_python(t, u, rule, rng, schedule, horizon,
                                    ctx, bool(getattr(cfg, "fast_exact",
                                                      False)))
    else:
        states, diags = _run_kernel(t, u, rule, rng, schedule, horizon, ctx)
    return Trajectory(schedule=schedule, states=tuple(states),
                      diagnostics=MappingProxyType(diags),
                      master_seed=cfg.seed, stream=stream,
                      initial_counts=u.counts)


def _collect(ctx, u, states, mus, dists, outsides):
    states.append(u.counts)
    m, d, o = _snapshot_diagnostics(ctx, u)
    mus.append(m)
    dists.append(d)
    outsides.append(o)


def _run_python(t, u, rule, rng, schedule, horizon, ctx, fast_exact):
    states, mus, dists, outsides = [], [], [], []
    pending = list(schedule)
    for tau in range(1, horizon + 1):
        u = step(t, u, rule, rng, fast_exact)
        if pending and tau == pending[0]:
            pending.pop(0)
            _collect(ctx, u, states, mus, dists, outsides)
    return states, {"mu": tuple(mus), "dist_linf": tuple(dists),
                    "mass_outside_bp": tuple(outsides)}


def _run_kernel(t, u, rule, rng, schedule, horizon, ctx):
    _ensure_compiled()
    kernel = (_kernels.run_pair_steps
              if rule is ReinforcementRule.TWO_ALTERNATIVES
              else _kernels.run_triple_steps)
    per_step = rule.draws_per_step
    beats = np.ascontiguousarray(t.beats.astype(np.uint8))
    counts = np.array(u.counts, dtype=np.int64)
    total = u.total
    buf = rng.take(min(_BLOCK_WORDS, horizon * per_step + 16))
    idx = 0
    tau = 0
    states, mus, dists, outsides = [], [], [], []
    for target in list(schedule) + [horizon]:
        while tau < target:
            done, idx = kernel(beats, counts, total, buf, idx,
                               target - tau)
            tau += done
            total += done
            if tau < target:
                need = (target - tau) * per_step + 16
                fresh = rng.take(min(_BLOCK_WORDS, need))
                buf = np.concatenate((buf[idx:], fresh))
                idx = 0
        if target == horizon and len(states) == len(schedule):
            break
        snap = Urn(tuple(int(c) for c in counts), u.initial_total, tau)
        _collect(ctx, snap, states, mus, dists, outsides)
    return states, {"mu": tuple(mus), "dist_linf": tuple(dists),
                    "mass_outside_bp": tuple(outsides)}


def run_ensemble(cfg, n_seeds: int, max_workers: int | None = None
                 ) -> list:
    """Trajectories on streams 0..n_seeds-1; order-independent results."""
    n_seeds = int(n_seeds)
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    ctx = DiagnosticsContext.for_tournament(cfg.tournament)
    if cfg.rule is not ReinforcementRule.FAST:
        _ensure_compiled()
    if n_seeds == 1:
        return [run(cfg, 0, ctx)]
    workers = max_workers or min(n_seeds, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run, cfg, k, ctx) for k in range(n_seeds)]
        return [f.result() for f in futures]
