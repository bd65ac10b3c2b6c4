"""Command line front end: one verb per experiment, CSV artifacts out.

Precedence of settings, lowest to highest: the verb's built-in defaults,
then the ``--config`` file, then explicit flags.  Every run prints the
paths of the files it wrote.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import experiments

_VERB_KINDS = {
    "spectrum": "spectrum",
    "dof": "dof_vs_distance",
    "pathgain": "path_gain",
    "ber": "ber",
    "tnr": "tnr",
    "profiles": "profiles",
}

_VERB_HELP = {
    "spectrum": "coupling intensities of SVD and OAM modes for one geometry",
    "dof": "well-coupled mode counts versus link distance",
    "pathgain": "received-over-transmitted energy versus link distance",
    "ber": "Monte Carlo BER versus SNR for the receiver strategies",
    "tnr": "energy-detector BER versus decision threshold at fixed SNR",
    "profiles": "aperture phase/amplitude maps and radial field cuts",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="flat key = value config file")
    parser.add_argument("--seed", type=int, help="master random seed")
    parser.add_argument("--out", metavar="DIR", help="output directory for CSV files")
    parser.add_argument(
        "--lambda", dest="wavelength", type=float, metavar="M",
        help="carrier wavelength in meters",
    )
    parser.add_argument("--T", type=float, help="transmit radius in wavelengths")
    parser.add_argument("--R", type=float, help="receive radius in wavelengths")
    parser.add_argument("--D", type=float, help="link distance in wavelengths")
    parser.add_argument(
        "--threshold-db", dest="threshold_db", type=float,
        help="mode-count threshold in dB (energy scale, <= 0)",
    )
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per point")


def _add_focus_toggle(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--focused", dest="focused", action="store_const", const=True,
        help="apply the transmit focusing phase law (default)",
    )
    group.add_argument(
        "--unfocused", dest="focused", action="store_const", const=False,
        help="plain helical transmit profiles without focusing",
    )
    parser.set_defaults(focused=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oamlis",
        description="Near-field link simulator for two circular surfaces: "
        "communication modes, OAM beams and receiver performance.",
    )
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser("spectrum", help=_VERB_HELP["spectrum"])
    _add_common(p)
    p.add_argument("--spacing", type=float, help="lattice pitch in wavelengths")
    p.add_argument("--max-charge", dest="max_charge", type=int, help="largest |charge| to evaluate")
    p.add_argument("--n-values", dest="n_values", type=int, help="singular values kept in the CSV")

    p = sub.add_parser("dof", help=_VERB_HELP["dof"])
    _add_common(p)
    p.add_argument("--preset", choices=(*experiments.PRESETS, "all"), help="geometry preset")
    p.add_argument("--distances", help="comma-separated distances in wavelengths")
    p.add_argument("--spacing", type=float, help="lattice pitch in wavelengths")
    p.add_argument("--max-charge", dest="max_charge", type=int, help="largest |charge| to evaluate")

    p = sub.add_parser("pathgain", help=_VERB_HELP["pathgain"])
    _add_common(p)
    p.add_argument("--preset", choices=(*experiments.PRESETS, "all"), help="geometry preset")
    p.add_argument("--distances", help="comma-separated distances in wavelengths")
    p.add_argument("--n-modes", dest="n_modes", type=int, help="superposed mode count (odd)")

    p = sub.add_parser("ber", help=_VERB_HELP["ber"])
    _add_common(p)
    p.add_argument("--modes", help="comma-separated topological charges")
    p.add_argument("--snr-db", dest="snr_db", help="comma-separated SNR axis in dB")
    p.add_argument(
        "--strategies",
        help="comma-separated strategy names "
        f"({', '.join(sorted(experiments._STRATEGY_CONFIGS))})",
    )
    p.add_argument("--drop-db", dest="drop_db", type=float, help="smart-window drop level in dB")
    p.add_argument("--slot", type=float, help="noise slot width in wavelengths")
    _add_focus_toggle(p)

    p = sub.add_parser("tnr", help=_VERB_HELP["tnr"])
    _add_common(p)
    p.add_argument("--modes", help="comma-separated topological charges")
    p.add_argument(
        "--snr", dest="tnr_snr_db", type=float, help="fixed link SNR in dB for the sweep"
    )
    p.add_argument("--tnr-db", dest="tnr_db", help="comma-separated TNR axis in dB")
    p.add_argument("--drop-db", dest="drop_db", type=float, help="smart-window drop level in dB")
    p.add_argument("--slot", type=float, help="noise slot width in wavelengths")
    _add_focus_toggle(p)

    p = sub.add_parser("profiles", help=_VERB_HELP["profiles"])
    _add_common(p)
    p.add_argument("--modes", help="comma-separated topological charges")
    p.add_argument("--resolution", type=int, help="samples per axis of each aperture map")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kind = _VERB_KINDS[args.verb]
    config = experiments.default_config(kind)
    if args.config:
        config = experiments.parse_config(Path(args.config).read_text(), base=config)
        if config.kind != kind:
            config = dataclasses.replace(config, kind=kind)
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key not in ("verb", "config") and value is not None
    }
    config = experiments.apply_overrides(config, **overrides)
    for path in experiments.run(config):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
