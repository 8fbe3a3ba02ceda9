"""Command-line entry point: ``securestate generate|estimate|bench|bound|oracle``."""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from ._validation import SensorIndexError
from .bench import (
    Preset, build_trial, preset_config, run_bench, summarize, trial_specs, write_csv,
)
from .bounds import MAX_ENUMERATION_SENSORS, bound_report, n_upper
from .fixtures import EXAMPLE_S_BAR, four_sensor_example
from .oracle import brute_force_min_support
from .residual import DEFAULT_EPSILON
from .scenario import NoiseModel
from .search import SearchMode, secure_estimate, trace_search
from .system import max_allowable_attacks

EXIT_OK = 0
EXIT_FAILURE = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(data, out, name):
    text = json.dumps(data, indent=2)
    print(text)
    if out is not None:
        io.save_json(data, Path(out) / name)


def _noise_from_args(args):
    if args.sigma > 0:
        return NoiseModel("truncated_gaussian", sigma=args.sigma, k=args.k)
    return NoiseModel()


def _load_pair(args):
    try:
        system, system_data = io.load_system(args.system)
        window, scenario_data = io.load_scenario(args.scenario)
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot read input: {exc}") from exc
    if window.p != system.p:
        raise UsageError(f"scenario has {window.p} sensors, system has {system.p}")
    return system, system_data, window, scenario_data


def _resolve_s_bar(args, system, system_data, window):
    if args.mode == SearchMode.HALF_P.value:
        return None
    if args.s_bar is not None:
        return args.s_bar
    if system_data.get("s_bar") is not None:
        return int(system_data["s_bar"])
    if system.p > MAX_ENUMERATION_SENSORS:
        raise UsageError(f"p={system.p} too large to derive s_bar; pass --s-bar")
    return max_allowable_attacks(system, window.T)


def cmd_generate(args):
    out = Path(args.out)
    if args.fixture == "example":
        system, window = four_sensor_example()
        io.save_system(system, out / "system.json", s_bar=EXAMPLE_S_BAR)
        io.save_scenario(window, out / "scenario.json", system_ref="system.json")
        print(f"wrote {out / 'system.json'} and {out / 'scenario.json'}")
        return EXIT_OK
    overrides = dict(trials=args.trials, seed=args.seed, schemes=[args.scheme],
                     noises=[_noise_from_args(args)], density=args.density,
                     epsilon=args.epsilon, max_p=args.max_p)
    if args.p is not None or args.n is not None:
        base = preset_config(args.preset).cells[0]
        overrides["cells"] = [(args.p or base[0], args.n or base[1])]
    if args.fraction is not None:
        overrides["fractions"] = [args.fraction]
    config = preset_config(args.preset, **overrides)
    try:
        specs = trial_specs(config.validate())
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    manifest = []
    for k, spec in enumerate(specs):
        trial = build_trial(spec)
        system_name, scenario_name = f"system_{k:04d}.json", f"scenario_{k:04d}.json"
        io.save_system(trial.system, out / system_name, s_bar=trial.s_bar, seed=spec.seed)
        io.save_scenario(trial.window, out / scenario_name, noise=spec.noise, seed=spec.seed,
                         system_ref=system_name)
        manifest.append({"system": system_name, "scenario": scenario_name, "seed": spec.seed,
                         "p": spec.p, "n": spec.n, "s": trial.s, "s_bar": trial.s_bar})
    io.save_json({"preset": config.preset.value, "trials": manifest}, out / "manifest.json")
    print(f"wrote {len(manifest)} system/scenario pairs to {out}")
    return EXIT_OK


def _oracle_verdict(result, report):
    if not result.solved:
        agree = not report.minimal_supports
    else:
        agree = tuple(result.attacked) in report.minimal_supports
    return {"oracle": report.to_dict(), "agreement": bool(agree)}


def cmd_estimate(args):
    system, system_data, window, _ = _load_pair(args)
    s_bar = _resolve_s_bar(args, system, system_data, window)
    mode = SearchMode(args.mode)
    try:
        if args.trace:
            result, trace = trace_search(window, system, window.noise_bounds, args.epsilon,
                                         s_bar, mode)
        else:
            result, trace = secure_estimate(window, system, window.noise_bounds, args.epsilon,
                                            s_bar, mode), None
    except (SensorIndexError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    data = {"s_bar": s_bar, "mode": mode.value, **result.to_dict()}
    if result.solved and window.x0 is not None:
        data["relative_error"] = float(
            np.linalg.norm(window.x0 - result.x_hat) / np.linalg.norm(window.x0))
    if window.attack is not None:
        data["identified"] = result.solved and result.attacked == window.attack.support
    if trace is not None:
        data["trace"] = [row.to_dict() for row in trace]
    if args.oracle:
        cap = s_bar if s_bar is not None else (system.p + 1) // 2 - 1
        report = brute_force_min_support(window, system, window.noise_bounds, args.epsilon, cap)
        data.update(_oracle_verdict(result, report))
    _emit(data, args.out, "result.json")
    return EXIT_OK if result.solved else EXIT_FAILURE


def _format_summary(summary):
    lines = []
    for cell in summary:
        lines.append(
            "p={p} n={n} s={s_text} scheme={scheme} noise={noise} trials={trials} "
            "iterations mean={iterations_mean:.2f} std={iterations_std:.2f} "
            "min={iterations_min} max={iterations_max} runtime_ms mean={runtime_ms_mean:.2f} "
            "misidentification={misidentification_ratio:.3f}".format(
                s_text=",".join(map(str, cell["s"])), **cell)
        )
    return "\n".join(lines)


def cmd_bench(args):
    overrides = dict(trials=args.trials, seed=args.seed, epsilon=args.epsilon,
                     max_p=args.max_p, max_pn=args.max_pn)
    if args.mode is not None:
        overrides["mode"] = SearchMode(args.mode)
    config = preset_config(args.preset, **overrides)
    try:
        config.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    records = run_bench(config)
    summary = summarize(records)
    text = _format_summary(summary)
    print(text)
    if args.out is not None:
        out = Path(args.out)
        write_csv(records, out / "bench.csv")
        (out / "summary.txt").write_text(text + "\n")
        io.save_json(summary, out / "summary.json")
    return EXIT_OK


def cmd_bound(args):
    if args.system is None:
        if args.p is None:
            raise UsageError("give a SYSTEM file or --p")
        data = {"p": args.p, "s_bar": args.s_bar, "s": args.s,
                "n_upper": n_upper(args.p, args.s_bar, args.s),
                "delta_s": None, "threshold": None,
                "note": "no system given: n_upper only"}
    else:
        try:
            system, _ = io.load_system(args.system)
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"cannot read input: {exc}") from exc
        try:
            data = bound_report(system, args.s_bar, args.s, args.T, args.w_bar,
                                args.epsilon).to_dict()
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    _emit(data, args.out, "bound.json")
    return EXIT_OK


def cmd_oracle(args):
    system, system_data, window, _ = _load_pair(args)
    s_bar = args.s_bar
    if s_bar is None:
        s_bar = _resolve_s_bar(argparse.Namespace(mode="exact", s_bar=None), system,
                               system_data, window)
    try:
        report = brute_force_min_support(window, system, window.noise_bounds, args.epsilon,
                                         s_bar, list_all=args.list_all)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    data = {"s_bar": s_bar, **report.to_dict(), "min_cardinality": report.min_cardinality}
    _emit(data, args.out, "oracle.json")
    return EXIT_OK if report.minimal_supports else EXIT_FAILURE


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON,
                        help="solution accuracy (default: %(default)g)")
    common.add_argument("--out", help="output directory")

    parser = _Parser(prog="securestate",
                     description="Attacked-sensor identification and secure state estimation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", parents=[common], help="write system and scenario files")
    gen.add_argument("--preset", choices=[p.value for p in Preset],
                     default=Preset.SMALL_OPTIMALITY.value)
    gen.add_argument("--fixture", choices=["example"],
                     help="write the four-sensor worked example instead")
    gen.add_argument("--trials", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--p", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--density", type=float, default=0.3)
    gen.add_argument("--fraction", type=float, help="attacked share of sensors")
    gen.add_argument("--scheme", choices=["greedy", "random"], default="random")
    gen.add_argument("--sigma", type=float, default=0.0, help="noise std (0: noiseless)")
    gen.add_argument("--k", type=float, default=3.0, help="noise truncation in std units")
    gen.add_argument("--max-p", type=int, default=60)
    gen.set_defaults(func=cmd_generate, out_required=True)

    est = sub.add_parser("estimate", parents=[common], help="run the search on a scenario")
    est.add_argument("system")
    est.add_argument("scenario")
    est.add_argument("--s-bar", type=int)
    est.add_argument("--mode", choices=[m.value for m in SearchMode], default="exact")
    est.add_argument("--trace", action="store_true", help="include per-iteration snapshots")
    est.add_argument("--oracle", action="store_true",
                     help="cross-check against exhaustive enumeration")
    est.set_defaults(func=cmd_estimate)

    ben = sub.add_parser("bench", parents=[common], help="run a batch experiment")
    ben.add_argument("--preset", choices=[p.value for p in Preset],
                     default=Preset.SMALL_OPTIMALITY.value)
    ben.add_argument("--trials", type=int, default=25)
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--mode", choices=[m.value for m in SearchMode])
    ben.add_argument("--max-p", type=int, default=60)
    ben.add_argument("--max-pn", type=int, default=3600)
    ben.set_defaults(func=cmd_bench)

    bnd = sub.add_parser("bound", parents=[common], help="analytic bounds for a plant")
    bnd.add_argument("system", nargs="?")
    bnd.add_argument("--p", type=int, help="sensor count when no SYSTEM is given")
    bnd.add_argument("--s-bar", type=int, required=True)
    bnd.add_argument("--s", type=int, required=True)
    bnd.add_argument("--T", type=int)
    bnd.add_argument("--w-bar", type=float, default=0.0)
    bnd.set_defaults(func=cmd_bound)

    ora = sub.add_parser("oracle", parents=[common], help="exhaustive support enumeration")
    ora.add_argument("system")
    ora.add_argument("scenario")
    ora.add_argument("--s-bar", type=int)
    ora.add_argument("--list-all", action="store_true")
    ora.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "out_required", False) and args.out is None:
        parser.exit(EXIT_USAGE, f"securestate {args.command}: error: --out is required\n")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"securestate {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
