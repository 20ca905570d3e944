"""Command line interface.

Subcommands map onto the model selector: ``rates`` prints the scalar
rate set for a configuration, ``analytic``, ``numeric`` and
``mc-check`` force the respective model, ``sweep`` honours whatever the
config selects, and the ``fig3a``/``fig3b``/``fig4`` presets reproduce
the reference parameter studies.

Exit codes: 0 on success (also when only some sweep points failed, with
a warning on stderr), 2 for configuration problems, 3 when every point
of a sweep failed or a single-point command hit a solver error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Any

from .analytic import DetuningSpec
from .config import ExperimentConfig, build_config, load_config_file
from .exceptions import ConfigError, SpinSqueezeError
from .layers import delta_prime, evanescent_range
from .rates import validity_report
from .sweep import fig_data, rows_to_csv, rows_to_json, run_sweep

_MODEL_BY_COMMAND = {
    "analytic": "analytic",
    "numeric": "numeric",
    "mc-check": "mc-check",
    "sweep": None,
}


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="config file (see docs/config.md)")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one config key; repeatable",
    )
    parser.add_argument("--out", help="output path ('-' for stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format")
    parser.add_argument("--workers", type=int, help="parallel grid workers")
    parser.add_argument("--seed", type=int, help="random seed for mc-check")
    parser.add_argument("--tol", type=float, help="evanescent kernel tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsqueeze",
        description="Spin squeezing of layered atomic arrays from squeezed light",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("rates", "print the collective rates and validity report"),
        ("analytic", "closed-form squeezing over the photon grid"),
        ("numeric", "steady-state layer model over the photon grid"),
        ("mc-check", "trajectory cross-check against the steady state"),
        ("sweep", "run the sweep with the model chosen in the config"),
        ("fig3a", "squeezing vs photon number preset (a=0.68)"),
        ("fig3b", "optimal squeezing vs layer count preset (a=0.68)"),
        ("fig4", "detuning compensation preset (a=0.95)"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
    return parser


def _collect_overrides(args: argparse.Namespace) -> dict[str, str]:
    overrides: dict[str, str] = {}
    if args.config:
        overrides.update(load_config_file(args.config))
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.out is not None:
        overrides["output.path"] = args.out
    if args.format is not None:
        overrides["output.format"] = args.format
    if args.workers is not None:
        overrides["workers"] = str(args.workers)
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.tol is not None:
        overrides["kernel.tol"] = repr(args.tol)
    return overrides


def _emit(payload: str, path: str) -> None:
    if path == "-" or not path:
        sys.stdout.write(payload)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(payload)


def _rates_rows(config: ExperimentConfig) -> list[dict[str, Any]]:
    rates = config.rates()
    report = validity_report(
        config.geometry, config.beam, config.n_photons_grid[0], rates
    )
    shift = delta_prime(
        config.geometry,
        rates,
        tol=config.kernel_tol,
        max_order=config.kernel_max_order,
    )
    return [
        {
            "gamma0": rates.gamma0,
            "eta": rates.eta,
            "gamma_coll": rates.gamma_coll,
            "gamma_loss": rates.gamma_loss,
            "gamma_s": rates.gamma_s,
            "r0": rates.r0,
            "delta_prime": shift,
            "delta_prime_over_gamma0": shift / rates.gamma0,
            "evanescent_range_1": evanescent_range(config.geometry, 1),
            "n_eff": report.n_eff,
            "heisenberg_floor": report.heisenberg_floor,
            "valid_all": report.all_ok,
            "valid_layer_size": report.layer_size_ok,
            "valid_rayleigh": report.rayleigh_ok,
            "valid_phase_match": report.phase_match_ok,
            "valid_evanescent": report.evanescent_ok,
            "valid_linearization": report.linearization_ok,
        }
    ]


def _run_table_command(command: str, config: ExperimentConfig) -> int:
    if command == "rates":
        rows = _rates_rows(config)
    else:
        rows = run_sweep(config)

    if config.out_format == "csv":
        payload = rows_to_csv(rows)
    else:
        payload = rows_to_json(rows)
    _emit(payload, config.out_path)

    errored = [row for row in rows if row.get("error")]
    if errored and len(errored) == len(rows):
        print("error: every grid point failed", file=sys.stderr)
        return 3
    if errored:
        print(
            f"warning: {len(errored)} of {len(rows)} grid points failed",
            file=sys.stderr,
        )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = _collect_overrides(args)
        if args.command in ("fig3a", "fig3b", "fig4"):
            out_dir = args.out if args.out and args.out != "-" else "."
            fig_overrides = {
                k: v
                for k, v in overrides.items()
                if k not in ("output.path", "output.format")
            }
            out_format = args.format or "csv"
            paths = fig_data(
                args.command, fig_overrides or None, out_dir, out_format
            )
            for path in paths:
                print(path)
            return 0
        config = build_config(overrides)
        if args.command in _MODEL_BY_COMMAND:
            forced = _MODEL_BY_COMMAND[args.command]
            if forced is not None:
                config = dataclasses.replace(config, model=forced)
        return _run_table_command(args.command, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SpinSqueezeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
