"""Command-line front end.

Subcommands map one-to-one onto experiments plus `reproduce`, which writes
the data file behind a numbered figure of the reference result set. Exit
codes: 0 success, 1 configuration/usage error, 2 runtime failure.

CSV schemas (columns in order):
  mobility-trace : hap,t,x_m,y_m,z_m,speed_mps,dir_az_rad,dir_el_rad
  beam-gain      : theta_deg,phi_deg,gain_abs
  sinr-sweep     : n_total,deviation_deg,snr_db,sinr_db
  capacity-sweep : n_total,deviation_deg,snr_db,capacity_bps_hz
  doppler-grid   : theta_deg,phi_deg,sinr_db   (capacity_bps_hz with --capacity)
  pdf            : theta_dev_deg,phi_dev_deg,sinr_db,density (density per dB)

The snr_db axis of the sweeps is per-carrier transmit SNR before array
gain. Angles in config files and CSV outputs are degrees; internal math is
radians.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .config import ConfigError, ScenarioConfig
from .harness import EXPERIMENTS, ExperimentResult, run_experiment

# figure id -> (experiment, output stem, extra kwargs, row filter)
FIGURE_MAP = {
    1: ("mobility_trace", "fig1_hap1_vectors", {}, lambda r: r[0] == 1),
    2: ("mobility_trace", "fig2_hap2_vectors", {}, lambda r: r[0] == 2),
    3: ("mobility_trace", "fig3_positions", {}, None),
    5: ("beam_gain_grid", "fig5_beam_gain", {}, None),
    6: ("sinr_sweep", "fig6_sinr_sweep", {}, None),
    7: ("capacity_sweep", "fig7_capacity_sweep", {}, None),
    8: ("doppler_shift_grid", "fig8_doppler_sinr_grid", {}, None),
    9: ("doppler_shift_grid", "fig9_doppler_capacity_grid",
        {"value": "capacity"}, None),
    10: ("pdf_curves", "fig10_sinr_pdf", {}, None),
    11: ("pdf_curves", "fig11_sinr_pdf_mobile", {"mobile": True}, None),
}

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (config/usage error) instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="hapsim",
                     description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="scenario JSON (defaults to the built-in "
                             "Table-I operating point)")
    common.add_argument("--out", metavar="DIR", default=".",
                        help="output directory for CSV + metadata")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="override the config seed")
    common.add_argument("--trials", type=int, metavar="N",
                        help="override the Monte-Carlo trial count")
    common.add_argument("--quiet", action="store_true",
                        help="suppress progress output")

    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    sub.add_parser("mobility-trace", parents=[common],
                   help="Gauss-Markov + rotation traces for both platforms")
    sub.add_parser("beam-gain", parents=[common],
                   help="beam-gain magnitude over the arrival-angle grid")
    sub.add_parser("sinr-sweep", parents=[common],
                   help="mean SINR vs transmit SNR for each array size and "
                        "arrival deviation")
    sub.add_parser("capacity-sweep", parents=[common],
                   help="mean capacity vs transmit SNR")
    dop = sub.add_parser("doppler-grid", parents=[common],
                         help="mean SINR over arrival angles under the "
                              "mobile preset")
    dop.add_argument("--capacity", action="store_true",
                     help="emit capacity_bps_hz instead of sinr_db")
    pdf = sub.add_parser("pdf", parents=[common],
                         help="analytic SINR density curves per deviation set")
    pdf.add_argument("--mobile", action="store_true",
                     help="fold the mobile preset's Doppler displacement "
                          "into the deviations")
    rep = sub.add_parser("reproduce", parents=[common],
                         help="write the data file behind a numbered figure")
    rep.add_argument("--figure", type=int, required=True,
                     choices=sorted(FIGURE_MAP), metavar="ID",
                     help="figure id: %(choices)s")
    sub.add_parser("validate-config", parents=[common],
                   help="validate a scenario file and exit")
    return parser


def _load_config(args) -> ScenarioConfig:
    if args.config:
        if not os.path.exists(args.config):
            raise ConfigError([f"config: file not found: {args.config}"])
        cfg = ScenarioConfig.from_json_file(args.config)
    else:
        cfg = ScenarioConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    cfg.validate()
    return cfg


def _emit(result: ExperimentResult, out_dir: str, stem: str,
          quiet: bool, row_filter=None) -> None:
    os.makedirs(out_dir, exist_ok=True)
    if row_filter is not None:
        result = ExperimentResult(result.experiment, result.columns,
                                  [r for r in result.rows if row_filter(r)],
                                  result.metadata)
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    result.write_csv(csv_path)
    result.write_metadata(os.path.join(out_dir, f"{stem}.meta.json"))
    if not quiet:
        print(f"wrote {csv_path} ({len(result.rows)} rows)")


_PLAIN_COMMANDS = {
    "mobility-trace": ("mobility_trace", "mobility_trace", {}),
    "beam-gain": ("beam_gain_grid", "beam_gain", {}),
    "sinr-sweep": ("sinr_sweep", "sinr_sweep", {}),
    "capacity-sweep": ("capacity_sweep", "capacity_sweep", {}),
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG

    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"configuration error:\n  " + "\n  ".join(exc.problems),
              file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "validate-config":
            if not args.quiet:
                print(f"configuration OK (hash {cfg.config_hash()})")
            return EXIT_OK
        if args.command in _PLAIN_COMMANDS:
            experiment, stem, kwargs = _PLAIN_COMMANDS[args.command]
            _emit(run_experiment(cfg, experiment, **kwargs),
                  args.out, stem, args.quiet)
            return EXIT_OK
        if args.command == "doppler-grid":
            kwargs = {"value": "capacity"} if args.capacity else {}
            _emit(run_experiment(cfg, "doppler_shift_grid", **kwargs),
                  args.out, "doppler_grid", args.quiet)
            return EXIT_OK
        if args.command == "pdf":
            kwargs = {"mobile": True} if args.mobile else {}
            _emit(run_experiment(cfg, "pdf_curves", **kwargs),
                  args.out, "pdf", args.quiet)
            return EXIT_OK
        if args.command == "reproduce":
            experiment, stem, kwargs, row_filter = FIGURE_MAP[args.figure]
            _emit(run_experiment(cfg, experiment, **kwargs),
                  args.out, stem, args.quiet, row_filter)
            return EXIT_OK
        parser.error(f"unknown subcommand {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error:\n  " + "\n  ".join(exc.problems),
              file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime failure -> exit 2
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
