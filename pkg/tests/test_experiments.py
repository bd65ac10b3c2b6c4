"""Tests for experiment configs, CSV emission and the command line."""

import dataclasses

import numpy as np
import pytest

from oamlis import cli
from oamlis.experiments import (
    KINDS,
    ExperimentConfig,
    apply_overrides,
    default_config,
    detector_for,
    parse_config,
    run,
    run_path_gain,
    run_spectrum,
    serialize_config,
)


def read_csv(path):
    """Split a written CSV into (metadata dict, header, data rows)."""
    meta = {}
    header = None
    rows = []
    for line in path.read_text(encoding="ascii").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return meta, header, rows


def test_config_round_trip_all_kinds():
    for kind in KINDS:
        config = default_config(kind)
        assert parse_config(serialize_config(config)) == config
        assert serialize_config(parse_config(serialize_config(config))) == serialize_config(config)


def test_kind_defaults():
    assert default_config("dof_vs_distance").max_charge == 40
    assert default_config("ber").D == 100.0
    assert default_config("tnr").D == 100.0
    profiles = default_config("profiles")
    assert (profiles.T, profiles.R, profiles.D) == (5.0, 5.0, 20.0)
    assert profiles.modes == (0, 1, 3)
    gains = default_config("path_gain")
    assert gains.distances[0] == 50.0 and gains.distances[1] == 75.0
    assert default_config("ber", trials=5000).trials == 5000


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(kind="nope")
    with pytest.raises(ValueError):
        ExperimentConfig(preset="sideways")
    with pytest.raises(ValueError):
        ExperimentConfig(T=-1.0)
    with pytest.raises(ValueError):
        ExperimentConfig(threshold_db=1.0)
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)


def test_parse_config_overrides_and_comments():
    base = default_config("spectrum")
    parsed = parse_config("# a comment\n\nT = 12\nmodes = 0, 2, 4\n", base=base)
    assert parsed.T == 12.0
    assert parsed.modes == (0, 2, 4)
    assert parsed.R == base.R


def test_parse_config_switches_kind_defaults():
    parsed = parse_config("kind = profiles\n", base=default_config("spectrum"))
    assert parsed.kind == "profiles"
    assert parsed.T == 5.0 and parsed.modes == (0, 1, 3)


def test_parse_config_rejects_bad_lines():
    with pytest.raises(ValueError):
        parse_config("bogus = 1\n")
    with pytest.raises(ValueError):
        parse_config("just words\n")


def test_apply_overrides_coercion():
    config = default_config("spectrum")
    updated = apply_overrides(config, T="6", focused="false", modes="0,2", seed=3, D=None)
    assert updated.T == 6.0
    assert updated.focused is False
    assert updated.modes == (0, 2)
    assert updated.seed == 3
    assert updated.D == config.D
    with pytest.raises(ValueError):
        apply_overrides(config, nonsense=1)


def test_detector_for_names():
    assert detector_for("mf").strategy == "mf"
    smart = detector_for("id_smart", drop_db=6.0)
    assert smart.strategy == "id" and smart.smart and smart.drop_db == 6.0
    assert detector_for("ed_full").strategy == "ed"
    assert detector_for("id_noeq").equalize is False
    with pytest.raises(ValueError):
        detector_for("bogus")


def test_run_spectrum_csv_contents(tmp_path):
    config = default_config(
        "spectrum", T=4.0, R=4.0, D=30.0, max_charge=4, n_values=10, out=str(tmp_path)
    )
    (path,) = run_spectrum(config)
    meta, header, rows = read_csv(path)
    assert meta["kind"] == "spectrum"
    assert {"count_svd", "count_oam_unfocused", "count_oam_focused"} <= meta.keys()
    assert header == ["index", "value_linear", "value_db_energy_scale", "label"]
    labels = {row[3] for row in rows}
    assert labels == {"svd", "oam_unfocused", "oam_focused"}
    svd_rows = [row for row in rows if row[3] == "svd"]
    assert len(svd_rows) == 10
    assert float(svd_rows[0][2]) == 0.0  # strongest coupling is the reference
    oam_rows = [row for row in rows if row[3] == "oam_focused"]
    assert len(oam_rows) == 2 * 4 + 1
    assert path.read_bytes().endswith(b"\n")


def test_run_spectrum_is_reproducible(tmp_path):
    config = default_config(
        "spectrum", T=4.0, R=4.0, D=30.0, max_charge=3, n_values=5, out=str(tmp_path)
    )
    (path,) = run_spectrum(config)
    first = path.read_bytes()
    (path,) = run_spectrum(config)
    assert path.read_bytes() == first


def test_run_spectrum_rejects_oversized_lattice(tmp_path):
    config = default_config("spectrum", T=4000.0, R=4000.0, D=30000.0, out=str(tmp_path))
    with pytest.raises(MemoryError):
        run_spectrum(config)


def test_run_dof_reproduces_mode_counts(tmp_path):
    config = default_config(
        "dof_vs_distance",
        preset="equal",
        distances=(50.0,),
        max_charge=10,
        out=str(tmp_path),
    )
    (path,) = run(config)
    _, header, rows = read_csv(path)
    assert header == ["distance", "preset", "label", "value"]
    values = {row[2]: float(row[3]) for row in rows}
    assert values["analytic"] == pytest.approx(4 * np.pi**2)
    assert values["svd"] == 42
    assert values["oam_unfocused"] == 11
    assert values["oam_focused"] == 19


def test_run_path_gain_rows_and_validation(tmp_path):
    config = default_config(
        "path_gain", distances=(50.0, 100.0), n_modes=5, out=str(tmp_path)
    )
    (path,) = run(config)
    _, header, rows = read_csv(path)
    assert header == ["distance", "preset", "label", "eta", "eta_db"]
    assert len(rows) == 2 * 3 * 2  # distances x presets x focus states
    for row in rows:
        eta = float(row[3])
        assert 0 < eta < 1
        assert float(row[4]) == pytest.approx(10 * np.log10(eta), abs=1e-9)
    with pytest.raises(ValueError):
        run_path_gain(dataclasses.replace(config, n_modes=4))


def test_run_ber_minimal(tmp_path):
    config = default_config(
        "ber",
        modes=(0,),
        strategies=("mf",),
        snr_db=(6.0,),
        trials=10_000,
        out=str(tmp_path),
    )
    (path,) = run(config)
    assert path.name == "ber_mf_l0.csv"
    meta, header, rows = read_csv(path)
    assert header == ["axis_db", "ber", "trials", "ci95"]
    assert meta["charge"] == "0" and meta["strategy"] == "mf"
    assert len(rows) == 1
    assert 0 <= float(rows[0][1]) <= 0.5
    assert rows[0][2] == "10000"


def test_run_tnr_minimal(tmp_path):
    config = default_config(
        "tnr", modes=(0,), tnr_db=(25.0,), trials=10_000, out=str(tmp_path)
    )
    paths = run(config)
    names = sorted(p.name for p in paths)
    assert names == ["tnr_ed_l0_full.csv", "tnr_ed_l0_smart.csv"]
    for path in paths:
        meta, header, rows = read_csv(path)
        assert header == ["axis_db", "ber", "trials", "ci95"]
        assert meta["snr_db"] == "19"
        assert len(rows) == 1


def test_run_profiles_minimal(tmp_path):
    config = default_config("profiles", modes=(1,), resolution=32, out=str(tmp_path))
    paths = run(config)
    assert len(paths) == 8  # three maps + one radial cut, focused and not
    names = {p.name for p in paths}
    assert "profile_l1_focused_rx_amplitude.csv" in names
    assert "radial_l1_unfocused.csv" in names
    map_path = next(p for p in paths if p.name == "profile_l1_focused_tx_phase.csv")
    _, header, rows = read_csv(map_path)
    assert header == ["x", "y", "value"]
    assert len(rows) == 32 * 32
    with pytest.raises(ValueError):
        run(dataclasses.replace(config, resolution=16))


def test_cli_flag_precedence_over_config_file(tmp_path):
    config_file = tmp_path / "run.cfg"
    config_file.write_text("T = 8\nR = 4\nD = 30\nmax_charge = 2\nn_values = 5\n")
    out = tmp_path / "out"
    code = cli.main(
        [
            "spectrum",
            "--config",
            str(config_file),
            "--T",
            "6",
            "--lambda",
            "0.2",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    meta, _, _ = read_csv(out / "spectrum.csv")
    assert meta["T"] == "6"  # flag wins over the file
    assert meta["R"] == "4"  # file wins over the default
    assert meta["wavelength"] == "0.2"
    assert meta["max_charge"] == "2"


def test_cli_forces_verb_kind(tmp_path):
    config_file = tmp_path / "run.cfg"
    config_file.write_text("kind = ber\nT = 4\nR = 4\nD = 30\nmax_charge = 2\nn_values = 5\n")
    out = tmp_path / "out"
    code = cli.main(["spectrum", "--config", str(config_file), "--out", str(out)])
    assert code == 0
    meta, _, _ = read_csv(out / "spectrum.csv")
    assert meta["kind"] == "spectrum"


def test_cli_rejects_unknown_strategy(tmp_path):
    with pytest.raises(ValueError):
        cli.main(
            [
                "ber",
                "--strategies",
                "bogus",
                "--out",
                str(tmp_path),
            ]
        )


def test_cli_requires_verb(capsys):
    with pytest.raises(SystemExit):
        cli.main([])
    capsys.readouterr()
