"""Experiment runners that turn simulator sweeps into CSV artifacts.

Each ``run_*`` function takes an :class:`ExperimentConfig`, writes one or
more CSV files into the configured output directory and returns the written
paths.  Output is deterministic: a given config and seed produce
byte-identical files.  Every CSV starts with ``#``-prefixed metadata lines
carrying the full resolved configuration, then a header row, then the data.

Configs serialize to a flat ``key = value`` text format; see
:func:`parse_config` / :func:`serialize_config`.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .detect import DetectorConfig, ber_monte_carlo, link_symbol_energy, tnr_sweep
from .geometry import DEFAULT_WAVELENGTH, Scenario, analytic_dof
from .modes import ModeSpectrum, count_modes, svd_mode_spectrum
from .oam import emit_profile_grids, mode_energy, mode_index, path_gain, rx_field_radial

#: Geometry presets (normalized T, R) for the distance sweeps.
PRESETS = {"equal": (10.0, 10.0), "downlink": (25.0, 5.0), "uplink": (5.0, 25.0)}

#: Upper bound on the coupling-matrix size assembled in one piece.
_MATRIX_BUDGET_BYTES = 2 * 1024**3

KINDS = ("spectrum", "dof_vs_distance", "path_gain", "ber", "tnr", "profiles")


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat, serializable description of one experiment run.

    Radii and distances are wavelength-normalized (T = R_T/lambda and so
    on); ``spacing`` and ``slot`` are lattice pitch and noise slot width as
    wavelength fractions.  Fields not used by a given kind are ignored by
    its runner but still serialized, so one file can drive several verbs.
    """

    kind: str = "spectrum"
    wavelength: float = DEFAULT_WAVELENGTH
    T: float = 10.0
    R: float = 10.0
    D: float = 50.0
    distances: tuple = (50.0, 100.0, 150.0, 200.0, 250.0, 300.0, 350.0, 400.0, 450.0, 500.0)
    preset: str = "all"
    threshold_db: float = -5.0
    spacing: float = 0.5
    slot: float = 0.25
    max_charge: int = 15
    n_values: int = 60
    n_modes: int = 51
    modes: tuple = (0, 1, 2, 3, 4)
    strategies: tuple = ("mf", "id", "id_smart", "ed_smart")
    snr_db: tuple = tuple(float(v) for v in range(0, 25, 2))
    tnr_snr_db: float = 19.0
    tnr_db: tuple = tuple(16.0 + 0.5 * k for k in range(33))
    focused: bool = True
    drop_db: float = 10.0
    trials: int = 100000
    seed: int = 0
    resolution: int = 101
    out: str = "results"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.preset not in (*PRESETS, "all"):
            raise ValueError(f"unknown preset {self.preset!r}")
        for name in ("wavelength", "T", "R", "D", "spacing", "slot", "drop_db"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.threshold_db > 0:
            raise ValueError("threshold_db must be <= 0 dB")
        if self.trials < 1:
            raise ValueError("trials must be positive")

    def scenario(self, T=None, R=None, D=None) -> Scenario:
        return Scenario.normalized(
            T if T is not None else self.T,
            R if R is not None else self.R,
            D if D is not None else self.D,
            wavelength=self.wavelength,
        )


_KIND_DEFAULTS = {
    "spectrum": {},
    "dof_vs_distance": {"max_charge": 40},
    "path_gain": {"distances": tuple(50.0 + 25.0 * k for k in range(19))},
    "ber": {"D": 100.0},
    "tnr": {"D": 100.0},
    "profiles": {"T": 5.0, "R": 5.0, "D": 20.0, "modes": (0, 1, 3)},
}


def default_config(kind: str, **overrides) -> ExperimentConfig:
    """Config pre-filled with the kind's canonical scenario."""
    fields = {"kind": kind}
    fields.update(_KIND_DEFAULTS.get(kind, {}))
    fields.update(overrides)
    return ExperimentConfig(**fields)


def _format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _tuple_parser(item):
    def parse(raw: str) -> tuple:
        parts = [p.strip() for p in str(raw).split(",") if p.strip()]
        return tuple(item(p) for p in parts)

    return parse


_FIELD_PARSERS = {
    "kind": str,
    "wavelength": float,
    "T": float,
    "R": float,
    "D": float,
    "distances": _tuple_parser(float),
    "preset": str,
    "threshold_db": float,
    "spacing": float,
    "slot": float,
    "max_charge": int,
    "n_values": int,
    "n_modes": int,
    "modes": _tuple_parser(int),
    "strategies": _tuple_parser(str),
    "snr_db": _tuple_parser(float),
    "tnr_snr_db": float,
    "tnr_db": _tuple_parser(float),
    "focused": _parse_bool,
    "drop_db": float,
    "trials": int,
    "seed": int,
    "resolution": int,
    "out": str,
}


def serialize_config(config: ExperimentConfig) -> str:
    """Flat ``key = value`` text form, keys sorted, newline-terminated."""
    lines = [
        f"{name} = {_format_value(getattr(config, name))}"
        for name in sorted(_FIELD_PARSERS)
    ]
    return "\n".join(lines) + "\n"


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse flat key-value text, overriding ``base`` (or kind defaults).

    Blank lines and ``#`` comments are ignored.  Unknown keys raise.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_PARSERS:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        raw[key] = value.strip()
    kind = raw.get("kind", base.kind if base is not None else "spectrum")
    config = base if base is not None else default_config(kind)
    if config.kind != kind:
        config = default_config(kind)
    overrides = {key: _FIELD_PARSERS[key](value) for key, value in raw.items()}
    return dataclasses.replace(config, **overrides)


def apply_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Replace the given fields, parsing string values like a config file."""
    parsed = {}
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _FIELD_PARSERS:
            raise ValueError(f"unknown config key {key!r}")
        parsed[key] = _FIELD_PARSERS[key](value) if isinstance(value, str) else value
    return dataclasses.replace(config, **parsed)


def _metadata_lines(config: ExperimentConfig, extra: dict | None = None):
    lines = [f"# {line}" for line in serialize_config(config).splitlines()]
    for key in sorted(extra or {}):
        lines.append(f"# {key} = {_format_value(extra[key])}")
    return lines


def _write_csv(path: Path, columns, rows, config: ExperimentConfig, extra: dict | None = None):
    lines = _metadata_lines(config, extra)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format_value(cell) for cell in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def _check_matrix_budget(scenario: Scenario, spacing_m: float) -> None:
    # Cell count of each disk lattice, conservatively by area.
    n_t = math.pi * scenario.radius_tx**2 / spacing_m**2
    n_r = math.pi * scenario.radius_rx**2 / spacing_m**2
    required = 16 * n_t * n_r
    if required > _MATRIX_BUDGET_BYTES:
        factor = (required / _MATRIX_BUDGET_BYTES) ** 0.25
        suggestion = spacing_m * factor / scenario.wavelength
        raise MemoryError(
            f"coupling matrix would need {required / 1024**3:.1f} GiB; "
            f"increase the lattice pitch to at least {suggestion:.3g} wavelengths"
        )


def _oam_energy_spectrum(scenario, focused, max_charge):
    """Energies of modes 1 .. 2*max_charge+1 in standard order."""
    per_charge = {
        ell: mode_energy(mode_index(ell), scenario, focused)
        for ell in range(max_charge + 1)
    }
    n_list = list(range(1, 2 * max_charge + 2))
    energies = np.array(
        [per_charge[abs(_charge_of(n))] for n in n_list]
    )
    return n_list, energies


def _charge_of(n: int) -> int:
    if n == 1:
        return 0
    return n // 2 if n % 2 == 0 else -(n - 1) // 2


def _sorted_energy_spectrum(energies) -> ModeSpectrum:
    order = np.argsort(-np.asarray(energies), kind="stable")
    return ModeSpectrum(
        values=np.asarray(energies)[order],
        scale="energy",
        labels=tuple(int(i + 1) for i in order),
    )


def run_spectrum(config: ExperimentConfig):
    """Coupling intensities of SVD and OAM strategies in one CSV.

    Rows carry the linear intensity and its dB value on a common energy
    scale, normalized to the strongest coupling of any strategy (the top
    singular-value intensity); mode counts at the configured threshold are
    recorded in the metadata.
    """
    scenario = config.scenario()
    spacing_m = config.spacing * config.wavelength
    _check_matrix_budget(scenario, spacing_m)
    svd = svd_mode_spectrum(scenario, spacing_m)
    xi1_sq = svd.reference**2

    rows = []
    keep = min(config.n_values, len(svd.values))
    for index in range(keep):
        xi = svd.values[index]
        rows.append((index + 1, xi, 20 * np.log10(xi / svd.reference), "svd"))

    counts = {"svd": count_modes(svd, config.threshold_db)}
    for focused in (False, True):
        label = "oam_focused" if focused else "oam_unfocused"
        n_list, energies = _oam_energy_spectrum(scenario, focused, config.max_charge)
        counts[label] = count_modes(
            _sorted_energy_spectrum(energies), config.threshold_db, reference=xi1_sq
        )
        for n, energy in zip(n_list, energies):
            rows.append((n, energy, 10 * np.log10(energy / xi1_sq), label))

    extra = {
        "reference_intensity": xi1_sq,
        "count_svd": counts["svd"],
        "count_oam_unfocused": counts["oam_unfocused"],
        "count_oam_focused": counts["oam_focused"],
    }
    path = Path(config.out) / "spectrum.csv"
    columns = ("index", "value_linear", "value_db_energy_scale", "label")
    return [_write_csv(path, columns, rows, config, extra)]


def _preset_list(config: ExperimentConfig):
    if config.preset == "all":
        return list(PRESETS.items())
    return [(config.preset, PRESETS[config.preset])]


def run_dof_vs_distance(config: ExperimentConfig):
    """Well-coupled mode counts versus link distance, per geometry preset.

    For every distance the analytic estimate, the SVD count and both OAM
    counts (referenced to the strongest SVD coupling) are emitted.
    """
    spacing_m = config.spacing * config.wavelength
    rows = []
    for preset, (T, R) in _preset_list(config):
        for distance in config.distances:
            scenario = config.scenario(T=T, R=R, D=distance)
            _check_matrix_budget(scenario, spacing_m)
            svd = svd_mode_spectrum(scenario, spacing_m)
            xi1_sq = svd.reference**2
            rows.append((distance, preset, "analytic", analytic_dof(scenario)))
            rows.append((distance, preset, "svd", count_modes(svd, config.threshold_db)))
            for focused in (False, True):
                label = "oam_focused" if focused else "oam_unfocused"
                _, energies = _oam_energy_spectrum(scenario, focused, config.max_charge)
                count = count_modes(
                    _sorted_energy_spectrum(energies),
                    config.threshold_db,
                    reference=xi1_sq,
                )
                rows.append((distance, preset, label, count))
    path = Path(config.out) / "dof_vs_distance.csv"
    return [_write_csv(path, ("distance", "preset", "label", "value"), rows, config)]


def run_path_gain(config: ExperimentConfig):
    """Received-over-transmitted energy versus distance for the presets."""
    if config.n_modes < 1 or config.n_modes % 2 == 0:
        raise ValueError("n_modes must be odd for a symmetric charge set")
    rows = []
    for preset, (T, R) in _preset_list(config):
        for distance in config.distances:
            scenario = config.scenario(T=T, R=R, D=distance)
            for focused in (False, True):
                label = "focused" if focused else "unfocused"
                eta = path_gain(scenario, config.n_modes, focused)
                rows.append((distance, preset, label, eta, 10 * np.log10(eta)))
    path = Path(config.out) / "path_gain.csv"
    columns = ("distance", "preset", "label", "eta", "eta_db")
    return [_write_csv(path, columns, rows, config)]


_STRATEGY_CONFIGS = {
    "mf": dict(strategy="mf"),
    "id": dict(strategy="id"),
    "id_noeq": dict(strategy="id", equalize=False),
    "id_smart": dict(strategy="id", smart=True),
    "ed_full": dict(strategy="ed"),
    "ed_smart": dict(strategy="ed", smart=True),
}


def detector_for(name: str, drop_db: float = 10.0) -> DetectorConfig:
    """DetectorConfig for a strategy name used in configs and file names."""
    if name not in _STRATEGY_CONFIGS:
        raise ValueError(
            f"unknown strategy {name!r}; expected one of {sorted(_STRATEGY_CONFIGS)}"
        )
    return DetectorConfig(drop_db=drop_db, **_STRATEGY_CONFIGS[name])


def run_ber(config: ExperimentConfig):
    """Monte Carlo BER curves, one CSV per (charge, strategy)."""
    scenario = config.scenario()
    if not config.snr_db:
        raise ValueError("ber experiment needs a non-empty snr_db list")
    e_s = link_symbol_energy(scenario, config.focused, config.modes)
    paths = []
    for charge in config.modes:
        for name in config.strategies:
            detector = detector_for(name, config.drop_db)
            curve = ber_monte_carlo(
                scenario,
                charge,
                detector,
                config.snr_db,
                trials=config.trials,
                seed=config.seed,
                focused=config.focused,
                mode_set=config.modes,
                slot=config.slot * config.wavelength,
            )
            rows = list(zip(curve.axis_db, curve.ber, curve.trials, curve.ci95))
            extra = {"charge": charge, "strategy": name, "symbol_energy": e_s}
            path = Path(config.out) / f"ber_{name}_l{charge}.csv"
            paths.append(
                _write_csv(path, ("axis_db", "ber", "trials", "ci95"), rows, config, extra)
            )
    return paths


def run_tnr(config: ExperimentConfig):
    """Energy-detector BER versus threshold-to-noise ratio at fixed SNR."""
    scenario = config.scenario()
    if not config.tnr_db:
        raise ValueError("tnr experiment needs a non-empty tnr_db list")
    paths = []
    for charge in config.modes:
        for smart in (False, True):
            curve = tnr_sweep(
                scenario,
                charge,
                config.tnr_snr_db,
                config.tnr_db,
                smart,
                trials=config.trials,
                seed=config.seed,
                focused=config.focused,
                mode_set=config.modes,
                drop_db=config.drop_db,
                slot=config.slot * config.wavelength,
            )
            rows = list(zip(curve.axis_db, curve.ber, curve.trials, curve.ci95))
            extra = {"charge": charge, "smart": smart, "snr_db": config.tnr_snr_db}
            suffix = "smart" if smart else "full"
            path = Path(config.out) / f"tnr_ed_l{charge}_{suffix}.csv"
            paths.append(
                _write_csv(path, ("axis_db", "ber", "trials", "ci95"), rows, config, extra)
            )
    return paths


def run_profiles(config: ExperimentConfig):
    """Aperture maps and radial cuts of selected charges, focused and not.

    Per charge and focus state, three Cartesian maps (transmit phase,
    receive amplitude, receive phase) are written as flat (x, y, value)
    tables, plus the radial receive profile.
    """
    scenario = config.scenario()
    paths = []
    for charge in config.modes:
        n = mode_index(charge)
        for focused in (False, True):
            suffix = f"l{charge}_{'focused' if focused else 'unfocused'}"
            grids = emit_profile_grids(n, scenario, focused, config.resolution)
            for key, axis in (("tx_phase", "x_tx"), ("rx_amplitude", "x_rx"), ("rx_phase", "x_rx")):
                values = grids[key]
                coords = grids[axis]
                rows = [
                    (coords[i], coords[j], values[j, i])
                    for j in range(len(coords))
                    for i in range(len(coords))
                ]
                path = Path(config.out) / f"profile_{suffix}_{key}.csv"
                extra = {"charge": charge, "focused": focused, "grid": key}
                paths.append(_write_csv(path, ("x", "y", "value"), rows, config, extra))
            field = rx_field_radial(n, scenario, focused)
            rows = [
                (r, v.real, v.imag, abs(v), np.angle(v))
                for r, v in zip(field.radii, field.samples)
            ]
            path = Path(config.out) / f"radial_{suffix}.csv"
            extra = {"charge": charge, "focused": focused}
            paths.append(
                _write_csv(path, ("radius", "re", "im", "abs", "phase"), rows, config, extra)
            )
    return paths


RUNNERS = {
    "spectrum": run_spectrum,
    "dof_vs_distance": run_dof_vs_distance,
    "path_gain": run_path_gain,
    "ber": run_ber,
    "tnr": run_tnr,
    "profiles": run_profiles,
}


def run(config: ExperimentConfig):
    """Dispatch a config to its runner; returns the written paths."""
    return RUNNERS[config.kind](config)
