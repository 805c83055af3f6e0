"""Command-line front end.

Subcommands: solve, chain, simulate, ensemble, flow, diagnose. Every
file-writing run also writes a manifest.json echoing the full resolved
configuration (tournament text included), so any output can be
regenerated byte-for-byte with --manifest. Config files are flat
key=value text; explicit flags override file values. The output
directory is --out, else $MAXLOT_OUT_DIR, else the working directory.
"""

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from . import __version__
from .chain import iterate, stationary
from .config import (ConfigError, ExperimentConfig, parse_counts, parse_kv,
                     parse_schedule, resolve_tournament)
from .diagnostics import (DiagnosticsContext, drift_three, drift_two,
                          epsilon, epsilon_bound, mu, variance_step)
from .flow import FlowDivergenceError, integrate, log_sum
from .game import ExactSolveLimitError, optimal_strategy, verify_optimal
from .lottery import Lottery
from .tournament import TournamentFormatError, dumps, top_cycle
from .urn import ReinforcementRule, Urn, run, run_ensemble


def _cell(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def _csv(header, rows) -> bytes:
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    return ("\n".join(lines) + "\n").encode("utf-8")


def _json_ready(v):
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator}
    if isinstance(v, dict):
        return {k: _json_ready(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_ready(x) for x in v]
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, (np.integer, np.bool_)):
        return v.item()
    return v


def _json_bytes(obj) -> bytes:
    return (json.dumps(_json_ready(obj), sort_keys=True, indent=2)
            + "\n").encode("utf-8")


def _manifest_bytes(command: str, config: dict, outputs) -> bytes:
    return _json_bytes({
        "artifact": {"name": "maxlot", "version": __version__},
        "command": command,
        "config": config,
        "outputs": sorted(outputs),
    })


def _emit(out_dir: str, files: dict) -> None:
    """Write every file atomically; remove all of them if any write fails."""
    os.makedirs(out_dir, exist_ok=True)
    placed = []
    try:
        for name, data in files.items():
            final = os.path.join(out_dir, name)
            fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
                os.replace(tmp, final)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
            placed.append(final)
    except BaseException:
        for path in placed:
            if os.path.exists(path):
                os.unlink(path)
        raise


def _data_out_dir(args) -> str:
    return args.out or os.environ.get("MAXLOT_OUT_DIR") or "."


def _config_values(args, allowed) -> dict:
    if not getattr(args, "config", None):
        return {}
    values = parse_kv(args.config)
    unknown = sorted(set(values) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return values


def _pick(flag, values, key, conv=str, default=None, required=False):
    if flag is not None:
        return flag
    if key in values:
        return conv(values[key])
    if required:
        raise ConfigError(f"missing required setting {key!r}")
    return default


def parse_lottery(text: str) -> Lottery:
    """Comma-separated entries; fractions stay exact, decimals go float."""
    tokens = [tok.strip() for tok in text.split(",")]
    if any("." in tok or "e" in tok or "E" in tok for tok in tokens):
        return Lottery(tuple(float(tok) for tok in tokens))
    return Lottery(tuple(Fraction(tok) for tok in tokens))


def _load_manifest(path: str, command: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest {path} is not valid JSON: "
                          f"{exc}") from exc
    if data.get("command") != command:
        raise ConfigError(
            f"manifest was written by {data.get('command')!r}, "
            f"not {command!r}")
    return data["config"]


def _resolve_source(args, values) -> tuple:
    source = _pick(args.tournament, values, "tournament", required=True)
    return resolve_tournament(source), source


def cmd_solve(args) -> int:
    values = _config_values(args, {"tournament", "limit", "format"})
    t, source = _resolve_source(args, values)
    limit = _pick(args.limit, values, "limit", int, 16)
    fmt = _pick(args.format, values, "format", str, "csv")
    strat = optimal_strategy(t, max_size=limit)
    report = verify_optimal(t, strat.lottery)
    tc = sorted(top_cycle(t))
    bp = sorted(strat.support)
    print(f"alternatives: {t.n}")
    print("top_cycle: " + " ".join(map(str, tc)))
    print("optimal: " + " ".join(_cell(q) for q in strat.lottery))
    print("bipartisan_set: " + " ".join(map(str, bp)))
    print("residuals: " + " ".join(_cell(r) for r in report.residuals))
    print(f"verified: {_cell(report.ok)}")
    if args.out:
        tc_flags = [x in set(tc) for x in range(t.n)]
        bp_flags = [x in strat.support for x in range(t.n)]
        if fmt == "json":
            data = _json_bytes({
                "n": t.n,
                "optimal": list(strat.lottery),
                "bipartisan_set": bp,
                "top_cycle": tc,
                "residuals": list(report.residuals),
                "verified": report.ok,
            })
            name = "solution.json"
        else:
            rows = [[x, strat.lottery[x], bp_flags[x], tc_flags[x],
                     report.residuals[x]] for x in range(t.n)]
            data = _csv(
                ["alternative", "optimal", "in_bipartisan_set",
                 "in_top_cycle", "residual"], rows)
            name = "solution.csv"
        config = {"tournament": dumps(t), "tournament_source": source,
                  "limit": limit, "format": fmt}
        _emit(args.out, {name: data,
                         "manifest.json": _manifest_bytes(
                             "solve", config, [name])})
    return 0


def cmd_chain(args) -> int:
    values = _config_values(args, {"tournament", "lottery", "steps",
                                   "format"})
    t, source = _resolve_source(args, values)
    steps = _pick(args.steps, values, "steps", int, 5)
    if steps < 1:
        raise ConfigError(f"steps must be >= 1, got {steps}")
    text = _pick(args.lottery, values, "lottery")
    p = parse_lottery(text) if text else Lottery.uniform(t.n)
    fmt = _pick(args.format, values, "format", str, "csv")
    seq = iterate(t, p, steps)
    stat = stationary(t, p)
    header = ["step"] + [f"p_{x}" for x in range(t.n)]
    rows = [[str(i + 1)] + list(q) for i, q in enumerate(seq)]
    rows.append(["stationary"] + list(stat))
    csv_data = _csv(header, rows)
    sys.stdout.write(csv_data.decode("utf-8"))
    if args.out:
        if fmt == "json":
            data = _json_bytes({
                "steps": [{"step": i + 1, "distribution": list(q)}
                          for i, q in enumerate(seq)],
                "stationary": list(stat),
            })
            name = "chain.json"
        else:
            data, name = csv_data, "chain.csv"
        config = {"tournament": dumps(t), "tournament_source": source,
                  "lottery": text or "uniform", "steps": steps,
                  "format": fmt}
        _emit(args.out, {name: data,
                         "manifest.json": _manifest_bytes(
                             "chain", config, [name])})
    return 0


def cmd_diagnose(args) -> int:
    values = _config_values(args, {"tournament", "counts", "format"})
    t, source = _resolve_source(args, values)
    counts = _pick(args.counts, values, "counts", parse_counts,
                   required=True)
    if isinstance(counts, str):
        counts = parse_counts(counts)
    fmt = _pick(args.format, values, "format", str, "csv")
    u = Urn.fresh(counts)
    if u.n != t.n:
        raise ConfigError(f"{u.n} counts for a tournament on {t.n} "
                          f"alternatives")
    ctx = DiagnosticsContext.for_tournament(t)
    eps = epsilon(ctx, u)
    bound = epsilon_bound(ctx, u)
    scalars = [
        ("mu", mu(ctx, u)),
        ("phi", ctx.phi),
        ("drift_two", drift_two(ctx, u)),
        ("drift_three", drift_three(ctx, u)),
        ("variance_step", variance_step(ctx, u)),
        ("epsilon_bound_lhs", bound.lhs),
        ("epsilon_bound_rhs", bound.rhs),
        ("epsilon_bound_log_reference", bound.log_reference),
    ]
    for name, value in scalars:
        print(f"{name}: {_cell(value)}")
    print("epsilon: " + " ".join(_cell(e) for e in eps))
    if args.out:
        if fmt == "json":
            data = _json_bytes(dict(scalars) | {"epsilon": list(eps)})
            name = "diagnostics.json"
        else:
            rows = [[key, "", value] for key, value in scalars]
            rows.extend(["epsilon", str(x), eps[x]] for x in range(t.n))
            data = _csv(["quantity", "index", "value"], rows)
            name = "diagnostics.csv"
        config = {"tournament": dumps(t), "tournament_source": source,
                  "counts": list(counts), "format": fmt}
        _emit(args.out, {name: data,
                         "manifest.json": _manifest_bytes(
                             "diagnose", config, [name])})
    return 0


def _experiment_config(args, command: str) -> ExperimentConfig:
    if getattr(args, "manifest", None):
        return ExperimentConfig.from_manifest_dict(
            _load_manifest(args.manifest, command))
    keys = {"tournament", "rule", "counts", "horizon", "seed", "seeds",
            "schedule", "fast_exact", "format"}
    values = _config_values(args, keys)
    t, source = _resolve_source(args, values)
    rule = ReinforcementRule.parse(
        _pick(args.rule, values, "rule", required=True))
    counts = _pick(args.counts, values, "counts", required=True)
    if isinstance(counts, str):
        counts = parse_counts(counts)
    horizon = _pick(args.horizon, values, "horizon", int, required=True)
    seed = _pick(args.seed, values, "seed", int, 0)
    n_seeds = _pick(getattr(args, "seeds", None), values, "seeds", int, 1)
    schedule_text = _pick(args.schedule, values, "schedule", str,
                          "geometric")
    fast_exact = bool(args.fast_exact) or values.get(
        "fast_exact", "").lower() in ("true", "1", "yes")
    fmt = _pick(args.format, values, "format", str, "csv")
    return ExperimentConfig(
        tournament=t, tournament_source=source, rule=rule,
        counts=tuple(counts), horizon=horizon, seed=seed, n_seeds=n_seeds,
        schedule=parse_schedule(schedule_text, horizon),
        fast_exact=fast_exact, fmt=fmt)


def _trajectory_rows(traj, n: int):
    rows = []
    for i, tau in enumerate(traj.schedule):
        counts = traj.states[i]
        total = sum(counts)
        rows.append([tau] + [c / total for c in counts]
                    + [traj.diagnostics["mu"][i],
                       traj.diagnostics["dist_linf"][i],
                       traj.diagnostics["mass_outside_bp"][i]])
    return rows


def _trajectory_bytes(traj, n: int, fmt: str) -> bytes:
    if fmt == "json":
        rows = [{"tau": tau,
                 "ntilde": [c / sum(traj.states[i]) for c in traj.states[i]],
                 "mu": traj.diagnostics["mu"][i],
                 "dist_linf": traj.diagnostics["dist_linf"][i],
                 "mass_outside_bp": traj.diagnostics["mass_outside_bp"][i]}
                for i, tau in enumerate(traj.schedule)]
        return _json_bytes({"master_seed": traj.master_seed,
                            "stream": traj.stream, "rows": rows})
    header = (["tau"] + [f"ntilde_{x}" for x in range(n)]
              + ["mu", "dist_linf", "mass_outside_bp"])
    return _csv(header, _trajectory_rows(traj, n))


def cmd_simulate(args) -> int:
    cfg = _experiment_config(args, "simulate")
    traj = run(cfg, stream=0)
    name = f"trajectory.{cfg.fmt}"
    files = {
        name: _trajectory_bytes(traj, cfg.tournament.n, cfg.fmt),
        "manifest.json": _manifest_bytes("simulate", cfg.manifest_dict(),
                                         [name]),
    }
    out_dir = _data_out_dir(args)
    _emit(out_dir, files)
    print(os.path.join(out_dir, name))
    return 0


def cmd_ensemble(args) -> int:
    cfg = _experiment_config(args, "ensemble")
    trajs = run_ensemble(cfg, cfg.n_seeds, max_workers=args.jobs)
    width = max(3, len(str(cfg.n_seeds - 1)))
    files = {}
    names = []
    for k, traj in enumerate(trajs):
        name = f"seed_{k:0{width}d}.{cfg.fmt}"
        names.append(name)
        files[name] = _trajectory_bytes(traj, cfg.tournament.n, cfg.fmt)
    rows = []
    for i, tau in enumerate(cfg.schedule):
        dist = [t.diagnostics["dist_linf"][i] for t in trajs]
        outside = [t.diagnostics["mass_outside_bp"][i] for t in trajs]
        row = [tau]
        for series in (dist, outside):
            arr = np.array(series, dtype=np.float64)
            row.extend(float(np.quantile(arr, q)) for q in (0.5, 0.1, 0.9))
        rows.append(row)
    summary = _csv(["tau", "dist_linf_median", "dist_linf_q10",
                    "dist_linf_q90", "mass_outside_bp_median",
                    "mass_outside_bp_q10", "mass_outside_bp_q90"], rows)
    files["summary.csv"] = summary
    names.append("summary.csv")
    files["manifest.json"] = _manifest_bytes("ensemble",
                                             cfg.manifest_dict(), names)
    out_dir = _data_out_dir(args)
    _emit(out_dir, files)
    print(os.path.join(out_dir, "summary.csv"))
    return 0


def cmd_flow(args) -> int:
    if getattr(args, "manifest", None):
        config = _load_manifest(args.manifest, "flow")
        from .tournament import loads
        t = loads(config["tournament"])
        source = config["tournament_source"]
        rule = ReinforcementRule.parse(config["rule"])
        p0 = Lottery(tuple(float(v) for v in config["p0"]))
        s_end = float(config["s_end"])
        step = float(config["step"])
        grid = float(config["grid"])
    else:
        keys = {"tournament", "rule", "p0", "s_end", "step", "grid"}
        values = _config_values(args, keys)
        t, source = _resolve_source(args, values)
        rule = ReinforcementRule.parse(
            _pick(args.rule, values, "rule", required=True))
        p0_text = _pick(args.p0, values, "p0")
        p0 = (Lottery(tuple(float(f) for f in parse_lottery(p0_text)))
              if p0_text else Lottery(tuple([1.0 / t.n] * t.n)))
        s_end = _pick(args.s_end, values, "s_end", float, 20.0)
        step = _pick(args.step, values, "step", float, 1e-3)
        grid = _pick(args.grid, values, "grid", float, 0.1)
    if any(q <= 0.0 for q in p0):
        raise ConfigError("flow start point must have all entries positive")
    state = integrate(t, rule, p0, s_end, step, sample_ds=grid)
    header = ["s"] + [f"p_{x}" for x in range(t.n)] + ["log_sum"]
    rows = [[s] + list(probs) + [log_sum(probs)]
            for s, probs in state.history]
    config = {"tournament": dumps(t), "tournament_source": source,
              "rule": rule.value, "p0": [float(q) for q in p0],
              "s_end": s_end, "step": step, "grid": grid}
    files = {"flow.csv": _csv(header, rows),
             "manifest.json": _manifest_bytes("flow", config,
                                              ["flow.csv"])}
    out_dir = _data_out_dir(args)
    _emit(out_dir, files)
    print(os.path.join(out_dir, "flow.csv"))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxlot",
        description="Exact tournament game solutions and reinforcement "
                    "urn experiments.")
    parser.add_argument("--version", action="version",
                        version=f"maxlot {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, manifest=False):
        p.add_argument("--tournament",
                       help="tournament file, cyclone:N, or random:N:SEED")
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"))
        if manifest:
            p.add_argument("--manifest",
                           help="rerun exactly from a manifest.json")

    p = sub.add_parser("solve", help="optimal strategy and solution sets")
    common(p)
    p.add_argument("--limit", type=int,
                   help="exact-solve size limit (default 16)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("chain", help="iterated winner distributions")
    common(p)
    p.add_argument("--lottery", help="sampling lottery, e.g. 1/2,1/4,1/4")
    p.add_argument("--steps", type=int, help="iterations to print")
    p.set_defaults(func=cmd_chain)

    def experiment(p):
        common(p, manifest=True)
        p.add_argument("--rule", choices=("two", "three", "fast"))
        p.add_argument("--counts", help="initial balls, e.g. 1,1,1")
        p.add_argument("--horizon", type=int, help="number of steps")
        p.add_argument("--seed", type=int, help="master seed (default 0)")
        p.add_argument("--schedule",
                       help="snapshot times, e.g. 10,100,1000, or "
                            "'geometric'")
        p.add_argument("--fast-exact", action="store_true",
                       help="exact rational solve inside the fast rule")

    p = sub.add_parser("simulate", help="one urn trajectory")
    experiment(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ensemble", help="many trajectories plus summary")
    experiment(p)
    p.add_argument("--seeds", type=int, help="number of trajectories")
    p.add_argument("--jobs", type=int,
                   help="worker threads (default: cpu count)")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("flow", help="deterministic mean-field flow")
    common(p, manifest=True)
    p.add_argument("--rule", choices=("two", "three"))
    p.add_argument("--p0", help="start point, e.g. 0.8,0.1,0.1")
    p.add_argument("--s-end", dest="s_end", type=float,
                   help="final log-time (default 20)")
    p.add_argument("--step", type=float,
                   help="integration step (default 1e-3)")
    p.add_argument("--grid", type=float,
                   help="sample spacing in s (default 0.1)")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("diagnose", help="urn diagnostics at one state")
    common(p)
    p.add_argument("--counts", help="ball counts, e.g. 2,1,1")
    p.set_defaults(func=cmd_diagnose)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ExactSolveLimitError as exc:
        print(f"maxlot: error: {exc}", file=sys.stderr)
        return 3
    except (TournamentFormatError, ConfigError, FlowDivergenceError,
            OSError, ValueError) as exc:
        print(f"maxlot: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
