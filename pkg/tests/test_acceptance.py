"""Acceptance gate: eleven numbered criteria, one pass/fail line each.

Run with `pytest -v tests/test_acceptance.py`; each test prints a single
`criterion NN <name>: PASS|FAIL` line with the measured numbers (shown
with -s, and always for failures). Tolerances are pinned here and
nowhere else. Ensemble criteria freeze one master seed; the clauses they
assert are properties of the process, not of the seed.
"""

import json
import math
import random
import statistics
import time
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import oracles
from conftest import CONDORCET_OVER_CYCLE, THREE_CYCLE, beats_matrix, corpus, \
    random_exact_lottery, transitive
from maxlot import DiagnosticsContext, ExperimentConfig, Lottery, \
    ReinforcementRule, Tournament, Urn, cyclone, drift_three, drift_two, \
    harmonic_number, harmonic_sandwich, integrate, ld, log_sum, mu, \
    optimal_strategy, p2, p3, random_tournament, restrict, run_ensemble, \
    stationary, top_cycle, variance_step, verify_optimal
from maxlot.cli import main

MASTER_SEED = 20260822
SNAPSHOTS = (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)
UNIFORM3 = (Fraction(1, 3),) * 3


def _line(num, name, ok, detail):
    print(f"criterion {num:02d} {name}: {'PASS' if ok else 'FAIL'} - {detail}")


def _tournament_from_beats(beats):
    n = len(beats)
    return Tournament([[1 if beats[i][j] else 0 for j in range(n)]
                       for i in range(n)])


def _ensemble(t, rule, counts, n_seeds):
    cfg = ExperimentConfig(
        tournament=t, tournament_source="inline", rule=rule, counts=counts,
        horizon=SNAPSHOTS[-1], seed=MASTER_SEED, n_seeds=n_seeds,
        schedule=SNAPSHOTS)
    return run_ensemble(cfg, n_seeds)


def _snapshot_columns(trajectories, key):
    return [[tr.diagnostics[key][i] for tr in trajectories]
            for i in range(len(SNAPSHOTS))]


def test_criterion_01_winner_maps_match_enumeration():
    ts = []
    seen = set()
    for n in (1, 2, 3):
        for beats in oracles.all_labeled_tournaments(n):
            ts.append(_tournament_from_beats(beats))
            seen.add((n, ts[-1].beats.tobytes()))
    draw = 0
    while len(ts) < 200:
        t = random_tournament(4 + draw % 3, 5000 + draw)
        draw += 1
        key = (t.n, t.beats.tobytes())
        if key not in seen:
            seen.add(key)
            ts.append(t)
    rand = random.Random(1234)
    start = time.perf_counter()
    for t in ts:
        beats = beats_matrix(t)
        for _ in range(50):
            p = random_exact_lottery(t.n, rand)
            assert list(p2(t, p).probs) == \
                oracles.pair_winner_distribution(beats, p.probs)
            assert list(p3(t, p).probs) == \
                oracles.triple_winner_distribution(beats, p.probs)
    elapsed = time.perf_counter() - start
    ok = elapsed < 60.0
    _line(1, "winner maps vs enumeration", ok,
          f"{len(ts)} tournaments x 50 lotteries exact, {elapsed:.1f}s")
    assert len(ts) == 200
    assert ok


def test_criterion_02_solver_correctness():
    ts = corpus(11, per_n=8)
    start = time.perf_counter()
    for t in ts:
        strategy = optimal_strategy(t)
        report = verify_optimal(t, strategy.lottery)
        assert report.ok
        assert all(report.residuals[x] == 0 for x in strategy.support)
        assert len(strategy.support) % 2 == 1
        assert strategy.support <= top_cycle(t)
    elapsed = time.perf_counter() - start
    assert optimal_strategy(THREE_CYCLE).lottery.probs == UNIFORM3
    assert optimal_strategy(cyclone(5)).lottery.probs == (Fraction(1, 5),) * 5
    for t in [transitive(n) for n in range(2, 12)] + [CONDORCET_OVER_CYCLE]:
        probs = optimal_strategy(t).lottery.probs
        assert probs[0] == 1 and all(q == 0 for q in probs[1:])
    ok = elapsed < 120.0
    _line(2, "solver correctness", ok,
          f"{len(ts)} tournaments verified, {elapsed:.1f}s")
    assert ok


def _interior_support_solutions(t):
    """All (support, probabilities) with the payoff balanced on the support.

    These are exactly the fully mixed fixed points of p2 on each support,
    found by independent exact elimination over every subset.
    """
    beats = beats_matrix(t)
    found = []
    for size in range(1, t.n + 1):
        for support in combinations(range(t.n), size):
            rows = [[Fraction(1)] * size]
            rhs = [Fraction(1)]
            for x in support:
                rows.append([Fraction((1 if beats[x][y] else 0)
                                      - (1 if beats[y][x] else 0))
                             for y in support])
                rhs.append(Fraction(0))
            sol = oracles.solve_linear(rows, rhs)
            if sol is not None and all(v > 0 for v in sol):
                found.append((support, sol))
    return found


def test_criterion_03_fixed_points():
    ts = corpus(11, per_n=8)
    for t in ts:
        pstar = optimal_strategy(t).lottery
        assert p2(t, pstar).probs == pstar.probs
        assert stationary(t, pstar).probs == pstar.probs
    small = corpus(7)
    n_fixed = 0
    for t in small:
        for support, sol in _interior_support_solutions(t):
            full = [Fraction(0)] * t.n
            for x, q in zip(support, sol):
                full[x] = q
            embedded = Lottery(tuple(full))
            assert p2(t, embedded).probs == embedded.probs
            assert len(support) % 2 == 1
            sub, kept = restrict(t, support)
            assert kept == list(support)
            assert verify_optimal(sub, Lottery(tuple(sol))).ok
            n_fixed += 1
    _line(3, "chain fixed points", True,
          f"p* fixed on {len(ts)} tournaments; converse on {n_fixed} "
          f"fixed points over {len(small)} tournaments (n <= 7)")


def _drift_grid():
    for n in range(1, 5):
        grid = list(oracles.urn_grid(n, 8))
        for beats in oracles.all_labeled_tournaments(n):
            t = _tournament_from_beats(beats)
            ctx = DiagnosticsContext.for_tournament(t)
            for counts in grid:
                yield beats, ctx, Urn(counts, sum(counts))


def test_criterion_04_drift_formulas():
    start = time.perf_counter()
    checked = 0
    for beats, ctx, u in _drift_grid():
        pstar = ctx.pstar.lottery.probs
        d2 = drift_two(ctx, u, exact=True)
        d3 = drift_three(ctx, u, exact=True)
        assert d2 == oracles.drift_oracle(beats, pstar, u.counts, 2)
        assert d3 == oracles.drift_oracle(beats, pstar, u.counts, 3)
        assert d3 >= 0
        at_optimum = u.proportions(exact=True).probs == pstar
        assert (d3 == 0) == at_optimum
        checked += 1
    elapsed = time.perf_counter() - start
    ok = elapsed < 60.0
    _line(4, "drift formulas", ok,
          f"{checked} tournament/urn pairs exact, {elapsed:.1f}s")
    assert ok


def test_criterion_05_variance_step():
    checked = 0
    for beats, ctx, u in _drift_grid():
        pstar = ctx.pstar.lottery.probs
        assert variance_step(ctx, u, exact=True) == \
            oracles.variance_oracle(beats, pstar, u.counts)
        checked += 1
    _line(5, "variance step", True, f"{checked} tournament/urn pairs exact")


def test_criterion_06_three_draw_convergence():
    trajectories = _ensemble(THREE_CYCLE, ReinforcementRule.THREE_ALTERNATIVES,
                             (5, 1, 1), 32)
    columns = _snapshot_columns(trajectories, "dist_linf")
    medians = [statistics.median(col) for col in columns]
    decreasing = all(b < a for a, b in zip(medians, medians[1:]))
    initial = max(abs(Fraction(c, 7) - Fraction(1, 3)) for c in (5, 1, 1))
    below = sum(1 for v in columns[-1] if v < initial) / len(columns[-1])
    ok = decreasing and below >= 0.90
    _line(6, "three-draw convergence", ok,
          f"medians {[round(m, 4) for m in medians]}, "
          f"{below:.0%} of seeds end below {float(initial):.4f}")
    assert ok


def test_criterion_07_two_draw_support_concentration():
    trajectories = _ensemble(CONDORCET_OVER_CYCLE,
                             ReinforcementRule.TWO_ALTERNATIVES,
                             (1, 1, 1, 1), 64)
    columns = _snapshot_columns(trajectories, "mass_outside_bp")
    medians = [statistics.median(col) for col in columns]
    decreasing = all(b < a for a, b in zip(medians, medians[1:]))
    ok = decreasing and medians[-1] <= 0.2
    _line(7, "two-draw support concentration", ok,
          f"medians {[round(m, 5) for m in medians]}")
    assert ok


def test_criterion_08_two_draw_non_convergence():
    trajectories = _ensemble(THREE_CYCLE, ReinforcementRule.TWO_ALTERNATIVES,
                             (8, 1, 1), 64)
    ctx = DiagnosticsContext.for_tournament(THREE_CYCLE)
    target = float(mu(ctx, Urn((8, 1, 1), 10)))
    finals = [tr.diagnostics["mu"][-1] for tr in trajectories]
    gap = abs(statistics.mean(finals) - target)
    bound = 3.0 * statistics.stdev(finals) / math.sqrt(len(finals))
    spread = sum(1 for tr in trajectories
                 if tr.diagnostics["dist_linf"][-1] >= 0.05) / len(trajectories)
    ok = gap <= bound and spread >= 0.50
    _line(8, "two-draw non-convergence", ok,
          f"|mean - start| = {gap:.4f} vs 3 SE = {bound:.4f}; "
          f"{spread:.0%} of seeds keep L-inf >= 0.05")
    assert ok


def test_criterion_09_mean_field_flow():
    state2 = integrate(THREE_CYCLE, ReinforcementRule.TWO_ALTERNATIVES,
                       Lottery((Fraction(1, 2), Fraction(1, 4),
                                Fraction(1, 4))),
                       s_end=20.0, step=1e-3, sample_ds=0.5)
    reference = log_sum((0.5, 0.25, 0.25))
    drift = max(abs(log_sum(point) - reference)
                for _, point in state2.history)
    conserved = drift <= 1e-6

    state3 = integrate(THREE_CYCLE, ReinforcementRule.THREE_ALTERNATIVES,
                       Lottery((0.8, 0.1, 0.1)), s_end=20.0, step=1e-3)
    linf = max(abs(q - 1.0 / 3.0) for q in state3.point)
    contracted = linf <= 1e-3

    short = integrate(THREE_CYCLE, ReinforcementRule.THREE_ALTERNATIVES,
                      Lottery((0.8, 0.1, 0.1)),
                      s_end=0.02, step=1e-5, sample_ds=1e-4)
    worst = 0.0
    hist = short.history
    for i in range(1, len(hist) - 1):
        (s_lo, lo), (_, mid), (s_hi, hi) = hist[i - 1], hist[i], hist[i + 1]
        fd = (log_sum(hi) - log_sum(lo)) / (s_hi - s_lo)
        quadratic = sum(q * q for q in mid) - sum(
            mid[j] * mid[(j + 1) % 3] for j in range(3))
        worst = max(worst, abs(fd - quadratic))
    fd_ok = worst <= 1e-6

    _line(9, "mean-field flow", conserved and contracted and fd_ok,
          f"two-draw log_sum drift {drift:.2e} (<= 1e-6: {conserved}); "
          f"three-draw L-inf at s=20 {linf:.3e} (<= 1e-3: {contracted}); "
          f"log_sum rate vs quadratic {worst:.2e} (<= 1e-6: {fd_ok})")
    assert conserved
    # Known to fail: the three-draw field contracts at linearized rate
    # exp(-s/6), which leaves L-inf near 2e-2 at s = 20. See the flow
    # module tests for the measured rate; the bound below would need
    # s around 38 to hold.
    assert contracted
    assert fd_ok


def test_criterion_10_harmonic_bounds():
    for exponent in range(7):
        k = 10 ** exponent
        lower, upper = harmonic_sandwich(k)
        value = harmonic_number(k)
        assert lower <= value <= upper
        assert abs(ld(k, 2 * k) + math.log(2)) <= 1.0 / k
    _line(10, "harmonic bounds", True,
          "sandwich and ld(k, 2k) -> -log 2 hold for k in 1..10^6")


def _run_cli(argv):
    code = main(argv)
    assert code == 0


def _read_tree(root):
    return {p.name: p.read_bytes() for p in Path(root).iterdir()}


def test_criterion_11_manifest_reproducibility(tmp_path):
    cases = [
        ("simulate",
         ["simulate", "--tournament", "cyclone:5", "--rule", "two",
          "--counts", "1,1,1,1,1", "--horizon", "20000", "--seed", "99"],
         []),
        ("ensemble",
         ["ensemble", "--tournament", "random:4:7", "--rule", "three",
          "--counts", "2,1,1,1", "--horizon", "5000", "--seed", "5",
          "--seeds", "6", "--jobs", "1"],
         ["--jobs", "4"]),
        ("flow",
         ["flow", "--tournament", "cyclone:3", "--rule", "three",
          "--p0", "0.8,0.1,0.1", "--s-end", "2.0", "--step", "0.001",
          "--grid", "0.5"],
         []),
    ]
    details = []
    for name, argv, rerun_extra in cases:
        first = tmp_path / f"{name}_first"
        second = tmp_path / f"{name}_second"
        _run_cli(argv + ["--out", str(first)])
        _run_cli([argv[0], "--manifest", str(first / "manifest.json"),
                  "--out", str(second)] + rerun_extra)
        left, right = _read_tree(first), _read_tree(second)
        assert left.keys() == right.keys()
        assert left == right
        manifest = json.loads((first / "manifest.json").read_text())
        assert manifest["command"] == name
        details.append(f"{name}: {len(left)} files byte-identical")
    _line(11, "manifest reproducibility", True, "; ".join(details))
