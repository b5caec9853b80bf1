"""Command-line front end: stability checks, single runs, sweeps, tuning.

Every subcommand also accepts --config FILE with a JSON object whose keys
are the flag names (underscored); explicit flags override file values.
Exit codes: 0 success, 1 numeric failure (a verification or qualitative
check fails, or the dynamic hits a singular configuration), 2 invalid
configuration or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import backend
from .game import GameParams, SingularEquilibrium
from .learning import NoAscentProgress, SimConfig, run
from .penalties import PenaltyConfig
from .stability import (
    DeviationSearchConfig,
    SearchBudgetExceeded,
    StrategySpace,
    classify,
    verify_handshake_exclusion,
    verify_penalized_stability,
    verify_unpenalized_stability,
)
from .strategies import Environment, Strategy
from .experiments import (
    SweepSpec,
    check_fig1,
    check_fig2,
    check_fig3,
    check_fig4,
    export_records,
    records_to_csv_text,
    run_custom,
    run_fig1,
    run_fig2,
    run_fig3,
    run_fig4,
    tune_eps_p,
)

_SPACES = {s.value: s for s in StrategySpace}


class ConfigError(Exception):
    pass


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


class _Merged:
    """Flag value if given, else config value, else the default."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self._args = args
        self._config = config
        self._known = set(vars(args))

    def get(self, name: str, default=None, required: bool = False):
        v = getattr(self._args, name, None)
        if v is None:
            v = self._config.get(name, default)
        if v is None and required:
            raise ConfigError(f"missing required setting: {name}")
        return v

    def check_unknown_keys(self):
        for k in self._config:
            if k not in self._known:
                raise ConfigError(f"unknown config key: {k}")


def _floats(value, name: str) -> tuple[float, ...]:
    if isinstance(value, str):
        parts = [s for s in value.split(",") if s != ""]
        try:
            return tuple(float(s) for s in parts)
        except ValueError as exc:
            raise ConfigError(f"bad float list for {name}: {value!r}") from exc
    if isinstance(value, (list, tuple)):
        try:
            return tuple(float(v) for v in value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad float list for {name}: {value!r}") from exc
    raise ConfigError(f"bad float list for {name}: {value!r}")


def _float(m: _Merged, name: str, default=None, required=False) -> Optional[float]:
    v = m.get(name, default, required)
    if v is None:
        return None
    try:
        return float(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"setting {name} must be a number, got {v!r}") from exc


def _int(m: _Merged, name: str, default=None, required=False) -> Optional[int]:
    v = m.get(name, default, required)
    if v is None:
        return None
    if isinstance(v, bool) or (not isinstance(v, int) and not
                               (isinstance(v, str) and v.lstrip("-").isdigit())):
        raise ConfigError(f"setting {name} must be an integer, got {v!r}")
    return int(v)


def _parse_candidate(text: str) -> Strategy:
    head, _, rest = text.partition(":")
    kind = head.strip().upper()
    if kind == "R":
        try:
            return Strategy.rational(float(rest))
        except ValueError as exc:
            raise ConfigError(f"bad rational candidate {text!r}") from exc
    if kind == "B":
        try:
            actions = tuple(float(s) for s in rest.split(",") if s != "")
        except ValueError as exc:
            raise ConfigError(f"bad behavioral candidate {text!r}") from exc
        if not actions:
            raise ConfigError("behavioral candidate needs at least one action")
        return Strategy.behavioral(*actions)
    if kind == "H":
        if rest:
            try:
                return Strategy.handshake(
                    actions=tuple(float(s) for s in rest.split(",")))
            except ValueError as exc:
                raise ConfigError(f"bad handshake candidate {text!r}") from exc
        return Strategy.handshake()
    raise ConfigError(f"cannot parse candidate {text!r} (use R:a, B:x[,y], H)")


def _built(ctor, *args, **kwargs):
    """Construct a parameter object, recasting validation failures.

    Values rejected by the dataclass constructors came from flags or the
    config file, so they are configuration mistakes, not numeric failures.
    """
    try:
        return ctor(*args, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_check(m: _Merged) -> int:
    kappa = _float(m, "kappa", required=True)
    g = _built(GameParams, kappa, _float(m, "m", 1.0))
    pc = _built(PenaltyConfig,
                eps_r=_float(m, "eps_r", 0.0),
                eps_p=_float(m, "eps_p", 0.0),
                eps_h=_float(m, "eps_h", 0.0))
    verify = m.get("verify")
    candidate = m.get("candidate")
    if (verify is None) == (candidate is None):
        raise ConfigError("check needs exactly one of --verify / --candidate")

    if verify is not None:
        if verify == "unpenalized":
            report = verify_unpenalized_stability(g)
        elif verify == "penalized":
            report = verify_penalized_stability(g, pc)
        elif verify == "handshake":
            report = verify_handshake_exclusion(g, pc)
        else:
            raise ConfigError(f"unknown verification {verify!r}")
        print(str(report))
        return 0 if report.passed else 1

    space_key = m.get("space", "S")
    if space_key not in _SPACES:
        raise ConfigError(f"unknown space {space_key!r}")
    strategy = _parse_candidate(candidate)
    verdict = classify(strategy, _SPACES[space_key], Environment.single(g), pc,
                       DeviationSearchConfig())
    print(f"nash={verdict.is_nash} nss={verdict.is_nss} ess={verdict.is_ess} "
          f"margin={verdict.margin:.6g}")
    if verdict.witness is not None:
        print(f"witness: {verdict.witness}")
    return 0


def _cmd_simulate(m: _Merged) -> int:
    kappa1 = _float(m, "kappa1", required=True)
    kappa2 = _float(m, "kappa2")
    m_val = _float(m, "m", 1.0)
    if m.get("rational_only") and m.get("behavioral_only"):
        raise ConfigError(
            "--rational-only and --behavioral-only are mutually exclusive")
    if kappa2 is None:
        env = Environment.single(_built(GameParams, kappa1, m_val))
    else:
        env = _built(Environment.pair,
                     _built(GameParams, kappa1, m_val),
                     _built(GameParams, kappa2, m_val),
                     _float(m, "p", 0.5))
    cfg = _built(
        SimConfig,
        env=env,
        pc=_built(PenaltyConfig,
                  eps_r=_float(m, "eps_r", 1e-5),
                  eps_p=_float(m, "eps_p", 0.001)),
        population_size=_int(m, "pop_size", 10),
        rounds=_int(m, "rounds", 30),
        seed=_int(m, "seed", 0),
        behavioral_enabled=not bool(m.get("rational_only", False)),
        rational_enabled=not bool(m.get("behavioral_only", False)),
    )
    traj = run(cfg)
    alpha = ("" if traj.final_mean_alpha != traj.final_mean_alpha
             else f"{traj.final_mean_alpha:.9g}")
    print(f"final_kind={traj.final_kind} mean_alpha={alpha} "
          f"distinct_actions={traj.final_distinct_actions} "
          f"welfare={traj.welfare_last_two:.9g} "
          f"converged={str(traj.converged).lower()} "
          f"oscillating={str(traj.oscillating).lower()}")
    return 0


_RUNNERS = {"fig1": run_fig1, "fig2": run_fig2, "fig3": run_fig3,
            "fig4": run_fig4}
_CHECKERS = {"fig1": check_fig1, "fig2": check_fig2, "fig3": check_fig3,
             "fig4": check_fig4}


def _cmd_sweep(m: _Merged) -> int:
    experiment = m.get("experiment", required=True)
    if experiment not in ("fig1", "fig2", "fig3", "fig4", "custom"):
        raise ConfigError(f"unknown experiment {experiment!r}")
    overrides: dict = {}
    if _int(m, "replicates") is not None:
        overrides["replicates"] = _int(m, "replicates")
    if _int(m, "base_seed") is not None:
        overrides["base_seed"] = _int(m, "base_seed")
    if _int(m, "workers") is not None:
        overrides["workers"] = _int(m, "workers")
    if _int(m, "rounds") is not None:
        overrides["rounds"] = _int(m, "rounds")
    if _int(m, "pop_size") is not None:
        overrides["population_size"] = _int(m, "pop_size")
    if m.get("kappa1_values") is not None:
        overrides["kappa1_values"] = _floats(m.get("kappa1_values"),
                                             "kappa1_values")
    if _float(m, "kappa2") is not None:
        overrides["kappa2"] = _float(m, "kappa2")
    if m.get("p_values") is not None:
        overrides["p_values"] = _floats(m.get("p_values"), "p_values")
    if m.get("eps_p_values") is not None:
        overrides["eps_p_values"] = _floats(m.get("eps_p_values"),
                                            "eps_p_values")
    if _float(m, "p") is not None:
        overrides["p"] = _float(m, "p")
    if _float(m, "eps_p") is not None:
        overrides["eps_p"] = _float(m, "eps_p")
    if _float(m, "eps_r") is not None:
        overrides["eps_r"] = _float(m, "eps_r")

    out = m.get("out")
    fmt = m.get("format")
    if fmt not in (None, "csv", "json"):
        raise ConfigError(f"unknown format {fmt!r}")

    if experiment == "custom":
        spec = SweepSpec(**overrides)
        records = run_custom(spec)
    else:
        spec = getattr(SweepSpec, experiment)(**overrides)
        records = _RUNNERS[experiment](spec)

    if out:
        export_records(records, out, fmt)
        print(f"wrote {len(records)} records to {out}")
    else:
        sys.stdout.write(records_to_csv_text(records))

    failures = 0
    if experiment in _CHECKERS:
        for outcome in _CHECKERS[experiment](records):
            tag = "PASS" if outcome.passed else "FAIL"
            print(f"[{tag}] {outcome.name} ({outcome.detail})")
            failures += 0 if outcome.passed else 1
    return 1 if failures else 0


def _cmd_tune(m: _Merged) -> int:
    result = tune_eps_p(
        kappa1=_float(m, "kappa1", required=True),
        kappa2=_float(m, "kappa2", required=True),
        p=_float(m, "p", 0.5),
        lo=_float(m, "lo", 0.0),
        hi=_float(m, "hi", 0.002),
        eps_r=_float(m, "eps_r", 1e-5),
        replicates=_int(m, "replicates", 5),
        base_seed=_int(m, "base_seed", 0),
        min_fraction=_float(m, "min_fraction", 0.8),
        tol=_float(m, "tol", 1e-5),
    )
    print(f"eps_P={result.eps_p:.9g} bracket=({result.bracket[0]:.9g},"
          f"{result.bracket[1]:.9g}) probes={len(result.history)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefevo",
        description="Evolution of other-regarding preferences under "
                    "complexity costs: checks, runs, sweeps.")
    parser.add_argument("--backend", choices=("python", "compiled"),
                        help="force a specific simulation kernel")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="stability verification / classification")
    p.add_argument("--config")
    p.add_argument("--kappa", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--eps-r", dest="eps_r", type=float)
    p.add_argument("--eps-p", dest="eps_p", type=float)
    p.add_argument("--eps-h", dest="eps_h", type=float)
    p.add_argument("--verify", choices=("unpenalized", "penalized", "handshake"))
    p.add_argument("--candidate", help="strategy to classify, e.g. R:0.33 or B:0.5")
    p.add_argument("--space", choices=tuple(_SPACES))
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("simulate", help="one adaptive-learning run")
    p.add_argument("--config")
    p.add_argument("--kappa1", type=float)
    p.add_argument("--kappa2", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--eps-p", dest="eps_p", type=float)
    p.add_argument("--eps-r", dest="eps_r", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--pop-size", dest="pop_size", type=int)
    p.add_argument("--rational-only", dest="rational_only",
                   action="store_const", const=True)
    p.add_argument("--behavioral-only", dest="behavioral_only",
                   action="store_const", const=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="run one of the experiment sweeps")
    p.add_argument("--config")
    p.add_argument("--experiment",
                   choices=("fig1", "fig2", "fig3", "fig4", "custom"))
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--replicates", type=int)
    p.add_argument("--base-seed", dest="base_seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--pop-size", dest="pop_size", type=int)
    p.add_argument("--kappa1-values", dest="kappa1_values")
    p.add_argument("--kappa2", type=float)
    p.add_argument("--p-values", dest="p_values")
    p.add_argument("--eps-p-values", dest="eps_p_values")
    p.add_argument("--p", type=float)
    p.add_argument("--eps-p", dest="eps_p", type=float)
    p.add_argument("--eps-r", dest="eps_r", type=float)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("tune-eps-p",
                       help="bisect for the smallest rational-final eps_P")
    p.add_argument("--config")
    p.add_argument("--kappa1", type=float)
    p.add_argument("--kappa2", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--eps-r", dest="eps_r", type=float)
    p.add_argument("--replicates", type=int)
    p.add_argument("--base-seed", dest="base_seed", type=int)
    p.add_argument("--min-fraction", dest="min_fraction", type=float)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=_cmd_tune)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits on usage errors (code 2) and on --help (code 0);
        # keep the documented integer contract instead of letting it
        # propagate out of an embedded call.
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 2
    try:
        if args.backend is not None:
            backend.set_backend(args.backend)
        merged = _Merged(args, _load_config(getattr(args, "config", None)))
        merged.check_unknown_keys()
        return args.func(merged)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SingularEquilibrium, NoAscentProgress, SearchBudgetExceeded,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
