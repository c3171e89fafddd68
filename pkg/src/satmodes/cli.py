"""Command-line entry points.

Verbs:
  sweep              full (encoding, d, eta1) scan -> csv + json + plot data
  ensemble           draw and cache a turbulence ensemble
  simulate-tm        one pulsed-encoding protocol point, JSON to stdout
  simulate-oam       one spatial-encoding protocol point, JSON to stdout
  optimize-subspace  best mode subset for one objective
  report             rebuild csv + plot data from a saved row JSON

Ensembles are cached under $SATMODES_CACHE_DIR when it is set; a cache file
records its seed and parameters and is verified on load.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import cache as cache_mod
from .config import RunConfig, load_config, parse_option, save_config
from .detection import error_probability, optimize_subspace, total_probabilities
from .dispersion import crosstalk_matrix, tmm_coefficient
from .errors import EnsembleCacheError
from .qkd import evaluate_oam_qkd, evaluate_tm_detection, evaluate_tm_qkd
from .sorter import SorterModel
from .sweep import read_json, run_sweep, write_csv, write_json, write_plot_data
from .turbulence import TurbulenceEnsemble, run_ensemble, smm_coefficient

__all__ = ["main"]


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_run_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    overrides: dict[str, object] = {}
    for item in args.set or []:
        name, sep, raw = item.partition("=")
        if not sep:
            raise SystemExit(f"--set expects name=value, got {item!r}")
        overrides[name.strip()] = parse_option(name.strip(), raw)
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "realizations", None) is not None:
        overrides["n_realizations"] = args.realizations
    return dataclasses.replace(config, **overrides) if overrides else config


def _obtain_ensemble(config: RunConfig, args: argparse.Namespace) -> TurbulenceEnsemble:
    params = config.turbulence_params()
    explicit = getattr(args, "ensemble", None)
    if explicit:
        return cache_mod.load_ensemble(explicit, expected_params=params)
    if config.seed is None:
        raise SystemExit("error: spatial channel statistics need --seed or --ensemble")
    cache_dir = os.environ.get("SATMODES_CACHE_DIR")
    if cache_dir:
        key = cache_mod.cache_key(params, config.seed, config.n_realizations)
        path = Path(cache_dir) / f"ensemble-{key}.npz"
        if path.exists():
            _say(f"loading cached ensemble {path}")
            return cache_mod.load_ensemble(path, expected_params=params,
                                           expected_seed=config.seed)
        _say(f"drawing {config.n_realizations} realizations (cache miss)")
        ens = run_ensemble(params, config.n_realizations, config.seed)
        cache_mod.save_ensemble(path, ens)
        _say(f"cached ensemble at {path}")
        return ens
    _say(f"drawing {config.n_realizations} realizations")
    return run_ensemble(params, config.n_realizations, config.seed)


def _emit_json(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")


def _outcome_payload(outcome) -> dict:
    data = dataclasses.asdict(outcome)
    data["subspace"] = list(data["subspace"])
    data["errors_per_basis"] = list(data["errors_per_basis"])
    data["transmission_per_basis"] = list(data["transmission_per_basis"])
    return data


# ---------------------------------------------------------------------------
# verbs

def _cmd_sweep(args: argparse.Namespace) -> None:
    config = _load_run_config(args)
    ensemble = _obtain_ensemble(config, args)
    rows = run_sweep(config, ensemble=ensemble, progress=_say)
    out = Path(args.out)
    write_csv(rows, out / "rows.csv")
    write_json(rows, out / "rows.json")
    pe_path, key_path = write_plot_data(rows, out)
    save_config(config, out / "run_config.ini")
    _say(f"wrote {out / 'rows.csv'}, {out / 'rows.json'}, {pe_path}, {key_path}")


def _cmd_ensemble(args: argparse.Namespace) -> None:
    config = _load_run_config(args)
    if config.seed is None:
        raise SystemExit("error: --seed is required")
    ens = run_ensemble(config.turbulence_params(), config.n_realizations, config.seed)
    cache_mod.save_ensemble(args.out, ens)
    _say(f"saved {ens.n_realizations} realizations to {args.out}")
    _emit_json({"n_realizations": ens.n_realizations, "seed": ens.seed,
                "smm": smm_coefficient(ens)})


def _tm_channel(config: RunConfig, compensated: bool):
    grid = config.spectral_grid()
    stack = config.layer_stack()
    amp = crosstalk_matrix(config.tm_orders, grid, stack, compensated=compensated)
    return amp, tmm_coefficient(grid, stack, compensated=compensated)


def _cmd_simulate_tm(args: argparse.Namespace) -> None:
    config = _load_run_config(args)
    amp, _ = _tm_channel(config, args.compensated)
    if args.mismatch is not None:
        c_smm = args.mismatch
    else:
        c_smm = smm_coefficient(_obtain_ensemble(config, args))
    model = SorterModel(args.d, config.eta0, args.eta1)
    subset, _ = optimize_subspace(
        config.tm_orders, args.d,
        lambda sub: evaluate_tm_qkd(amp.restrict(sub), sub, model, c_smm).key,
        maximize=True)
    outcome = evaluate_tm_qkd(amp.restrict(subset), subset, model, c_smm)
    p_e, _ = evaluate_tm_detection(amp.restrict(subset), model)
    payload = _outcome_payload(outcome)
    payload["detection_error"] = p_e
    payload["compensated"] = args.compensated
    _emit_json(payload)


def _cmd_simulate_oam(args: argparse.Namespace) -> None:
    config = _load_run_config(args)
    _, c_tmm = _tm_channel(config, args.compensated)
    ens = _obtain_ensemble(config, args)
    subset, _ = optimize_subspace(
        config.l_values, args.d,
        lambda sub: evaluate_oam_qkd(ens.subspace_blocks(sub), sub, 1.0).key,
        maximize=True)
    outcome = evaluate_oam_qkd(ens.subspace_blocks(subset), subset, c_tmm)
    mean = ens.mean_probabilities()
    p_tot, _ = total_probabilities(mean.restrict(subset), np.eye(args.d))
    payload = _outcome_payload(outcome)
    payload["detection_error"] = error_probability(p_tot)
    payload["compensated"] = args.compensated
    _emit_json(payload)


def _cmd_optimize(args: argparse.Namespace) -> None:
    config = _load_run_config(args)
    if args.encoding == "tm":
        amp, _ = _tm_channel(config, args.compensated)
        model = SorterModel(args.d, config.eta0, args.eta1)
        if args.objective == "detection":
            subset, score = optimize_subspace(
                config.tm_orders, args.d,
                lambda sub: evaluate_tm_detection(amp.restrict(sub), model)[0])
        else:
            c_smm = (args.mismatch if args.mismatch is not None
                     else smm_coefficient(_obtain_ensemble(config, args)))
            subset, score = optimize_subspace(
                config.tm_orders, args.d,
                lambda sub: evaluate_tm_qkd(amp.restrict(sub), sub, model, c_smm).key,
                maximize=True)
    else:
        ens = _obtain_ensemble(config, args)
        if args.objective == "detection":
            mean = ens.mean_probabilities()

            def pe(sub: tuple[int, ...]) -> float:
                p_tot, _ = total_probabilities(mean.restrict(sub), np.eye(len(sub)))
                return error_probability(p_tot)

            subset, score = optimize_subspace(config.l_values, args.d, pe)
        else:
            subset, score = optimize_subspace(
                config.l_values, args.d,
                lambda sub: evaluate_oam_qkd(ens.subspace_blocks(sub), sub, 1.0).key,
                maximize=True)
    _emit_json({"encoding": args.encoding, "objective": args.objective,
                "d": args.d, "subspace": list(subset), "score": score})


def _cmd_report(args: argparse.Namespace) -> None:
    rows = read_json(args.rows)
    out = Path(args.out)
    write_csv(rows, out / "rows.csv")
    pe_path, key_path = write_plot_data(rows, out)
    _say(f"wrote {out / 'rows.csv'}, {pe_path}, {key_path}")


# ---------------------------------------------------------------------------
# parser

def _add_common(parser: argparse.ArgumentParser, seed: bool = True) -> None:
    parser.add_argument("--config", help="INI run configuration (defaults apply if omitted)")
    parser.add_argument("--set", action="append", metavar="NAME=VALUE",
                        help="override one config option (repeatable)")
    if seed:
        parser.add_argument("--seed", type=int, help="master seed for the turbulence ensemble")
        parser.add_argument("--realizations", type=int, help="ensemble size override")
        parser.add_argument("--ensemble", help="load the turbulence ensemble from this cache file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satmodes",
        description="single-photon satellite downlink: pulsed vs vortex mode encodings")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("sweep", help="full sweep over encoding, dimension and crosstalk")
    _add_common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ensemble", help="draw and save a turbulence ensemble")
    _add_common(p, seed=False)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--realizations", type=int)
    p.add_argument("--out", required=True, help="cache file path (.npz)")
    p.set_defaults(func=_cmd_ensemble)

    p = sub.add_parser("simulate-tm", help="one pulsed-encoding key-rate point")
    _add_common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eta1", type=float, default=0.0)
    p.add_argument("--compensated", action="store_true")
    p.add_argument("--mismatch", type=float,
                   help="spatial survival factor; skips the Monte-Carlo ensemble")
    p.set_defaults(func=_cmd_simulate_tm)

    p = sub.add_parser("simulate-oam", help="one spatial-encoding key-rate point")
    _add_common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--compensated", action="store_true",
                   help="pair with a dispersion-compensated pulsed channel")
    p.set_defaults(func=_cmd_simulate_oam)

    p = sub.add_parser("optimize-subspace", help="best mode subset for one objective")
    _add_common(p)
    p.add_argument("--encoding", choices=("tm", "oam"), required=True)
    p.add_argument("--objective", choices=("detection", "qkd"), default="qkd")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eta1", type=float, default=0.0)
    p.add_argument("--compensated", action="store_true")
    p.add_argument("--mismatch", type=float)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("report", help="csv and plot data from saved row JSON")
    p.add_argument("--rows", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (EnsembleCacheError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
