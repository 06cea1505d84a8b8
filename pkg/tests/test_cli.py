import json

import numpy as np
import pytest

from rgwave.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from rgwave.data import save_heartbeats, synthesize_dataset


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.err


def stderr_json(err: str) -> dict:
    lines = [line for line in err.splitlines() if line.strip()]
    assert len(lines) == 1
    return json.loads(lines[0])


# --- render -----------------------------------------------------------------


def test_render_writes_expected_files(tmp_path, capsys):
    code, err = run(capsys, "render", "--out", str(tmp_path), "--points", "256")
    assert code == EXIT_OK and err == ""
    for name in ("wavelet.csv", "admissibility.json", "wavelet.png"):
        assert (tmp_path / name).is_file()
    rows = np.loadtxt(tmp_path / "wavelet.csv", delimiter=",", skiprows=1)
    assert rows.shape == (256, 2)
    report = json.loads((tmp_path / "admissibility.json").read_text())
    assert report["psi_hat_at_zero"] == 0.0
    assert report["admissibility_integral"] > 0.0


def test_rendered_wavelet_riemann_integrates_to_zero(tmp_path, capsys):
    code, _ = run(capsys, "render", "--out", str(tmp_path))
    assert code == EXIT_OK
    rows = np.loadtxt(tmp_path / "wavelet.csv", delimiter=",", skiprows=1)
    assert rows.shape[0] == 4096
    h = rows[1, 0] - rows[0, 0]
    integral = h * rows[:, 1].sum()
    assert abs(integral) < 1e-12 * np.max(np.abs(rows[:, 1]))


def test_render_with_no_adjustable_roots(tmp_path, capsys):
    # p=0 keeps the mandatory odd factor t, so the output is still odd.
    code, _ = run(capsys, "render", "--out", str(tmp_path), "--p", "0", "--points", "128")
    assert code == EXIT_OK
    psi = np.loadtxt(tmp_path / "wavelet.csv", delimiter=",", skiprows=1)[:, 1]
    np.testing.assert_allclose(psi, -psi[::-1], atol=1e-15)


def test_render_seed_changes_the_shape(tmp_path, capsys):
    run(capsys, "render", "--out", str(tmp_path / "a"), "--points", "64", "--seed", "1")
    run(capsys, "render", "--out", str(tmp_path / "b"), "--points", "64", "--seed", "2")
    a = (tmp_path / "a" / "wavelet.csv").read_bytes()
    b = (tmp_path / "b" / "wavelet.csv").read_bytes()
    assert a != b


# --- config handling ----------------------------------------------------------


def test_config_supplies_defaults_and_cli_overrides(tmp_path, capsys):
    config = tmp_path / "run.ini"
    config.write_text(
        "[common]\nseed = 9\nout = {0}\n\n[render]\npoints = 128\np = 2\nn = 1\n".format(
            tmp_path / "from_config"
        )
    )
    code, _ = run(capsys, "render", "--config", str(config))
    assert code == EXIT_OK
    rows = np.loadtxt(tmp_path / "from_config" / "wavelet.csv", delimiter=",", skiprows=1)
    assert rows.shape[0] == 128

    code, _ = run(
        capsys, "render", "--config", str(config),
        "--points", "64", "--out", str(tmp_path / "cli_wins"),
    )
    assert code == EXIT_OK
    rows = np.loadtxt(tmp_path / "cli_wins" / "wavelet.csv", delimiter=",", skiprows=1)
    assert rows.shape[0] == 64


def test_unknown_config_key_is_rejected(tmp_path, capsys):
    config = tmp_path / "bad.ini"
    config.write_text("[render]\nbogus = 1\n")
    code, err = run(capsys, "render", "--config", str(config), "--out", str(tmp_path))
    assert code == EXIT_USAGE
    assert stderr_json(err)["error"] == "usage"


def test_unknown_config_section_is_rejected(tmp_path, capsys):
    config = tmp_path / "bad.ini"
    config.write_text("[nonsense]\nx = 1\n")
    code, err = run(capsys, "render", "--config", str(config), "--out", str(tmp_path))
    assert code == EXIT_USAGE
    assert "nonsense" in stderr_json(err)["message"]


def test_missing_config_file(tmp_path, capsys):
    code, err = run(capsys, "render", "--config", str(tmp_path / "nope.ini"))
    assert code == EXIT_USAGE
    assert stderr_json(err)["error"] == "usage"


def test_non_numeric_config_value(tmp_path, capsys):
    config = tmp_path / "bad.ini"
    config.write_text("[render]\npoints = many\n")
    code, err = run(capsys, "render", "--config", str(config), "--out", str(tmp_path))
    assert code == EXIT_USAGE
    assert "points" in stderr_json(err)["message"]


# --- usage errors ---------------------------------------------------------------


def test_zero_wavelets_is_a_usage_error(tmp_path, capsys):
    code, err = run(capsys, "reconstruct", "--m", "0", "--out", str(tmp_path))
    assert code == EXIT_USAGE
    payload = stderr_json(err)
    assert payload["error"] == "usage"
    assert "--m" in payload["message"]


def test_unknown_subcommand(capsys):
    code, err = run(capsys, "definitely-not-a-command")
    assert code == EXIT_USAGE
    assert stderr_json(err)["error"] == "usage"


def test_evaluate_without_model(tmp_path, capsys):
    code, err = run(capsys, "evaluate", "--out", str(tmp_path))
    assert code == EXIT_USAGE
    assert "--model" in stderr_json(err)["message"]


def test_missing_signal_file(tmp_path, capsys):
    code, err = run(
        capsys, "reconstruct", "--signal", str(tmp_path / "nope.txt"), "--out", str(tmp_path)
    )
    assert code == EXIT_USAGE
    assert "not found" in stderr_json(err)["message"]


def test_two_signal_sources_rejected(tmp_path, capsys):
    sig = tmp_path / "sig.txt"
    sig.write_text("0.0\n1.0\n0.0\n")
    code, err = run(
        capsys, "reconstruct", "--signal", str(sig), "--synthetic", "veb",
        "--out", str(tmp_path),
    )
    assert code == EXIT_USAGE
    assert "signal source" in stderr_json(err)["message"]


def test_record_index_out_of_range(tmp_path, capsys):
    beats = tmp_path / "beats.csv"
    save_heartbeats(synthesize_dataset(seed=0, size=3), beats)
    code, err = run(
        capsys, "reconstruct", "--beats", str(beats), "--record", "7",
        "--out", str(tmp_path),
    )
    assert code == EXIT_USAGE
    assert "out of range" in stderr_json(err)["message"]


# --- reconstruct / scalogram ----------------------------------------------------


def test_reconstruct_on_synthetic_beat(tmp_path, capsys):
    code, err = run(
        capsys, "reconstruct", "--out", str(tmp_path),
        "--m", "4", "--steps", "60",
    )
    assert code == EXIT_OK and err == ""
    rows = np.loadtxt(tmp_path / "reconstruction.csv", delimiter=",", skiprows=1)
    assert rows.shape == (300, 3)
    report = json.loads((tmp_path / "reconstruction.json").read_text())
    assert report["m"] == 4
    assert report["steps_run"] == 60
    assert report["final_energy"] < report["initial_energy"]
    assert 0.0 <= report["relative_error"] < 1.0
    assert (tmp_path / "reconstruction.png").is_file()


def test_reconstruct_from_heartbeat_file(tmp_path, capsys):
    beats = tmp_path / "beats.csv"
    save_heartbeats(synthesize_dataset(seed=4, size=3), beats)
    code, _ = run(
        capsys, "reconstruct", "--beats", str(beats), "--record", "1",
        "--m", "3", "--steps", "20", "--out", str(tmp_path),
    )
    assert code == EXIT_OK
    report = json.loads((tmp_path / "reconstruction.json").read_text())
    assert report["source"].endswith(":1")


def test_reconstruct_with_ricker_mother(tmp_path, capsys):
    code, _ = run(
        capsys, "reconstruct", "--mother", "ricker", "--m", "4", "--steps", "30",
        "--out", str(tmp_path),
    )
    assert code == EXIT_OK
    report = json.loads((tmp_path / "reconstruction.json").read_text())
    assert report["mother"] == "ricker"


def test_scalogram_long_format(tmp_path, capsys):
    code, err = run(capsys, "scalogram", "--out", str(tmp_path), "--scales", "5")
    assert code == EXIT_OK and err == ""
    rows = np.loadtxt(tmp_path / "scalogram.csv", delimiter=",", skiprows=1)
    assert rows.shape == (5 * 300, 3)
    assert np.all(rows[:, 2] >= 0.0)
    assert len(np.unique(rows[:, 0])) == 5
    assert (tmp_path / "scalogram.png").is_file()


def test_scalogram_octave_spacing(tmp_path, capsys):
    code, _ = run(
        capsys, "scalogram", "--out", str(tmp_path),
        "--spacing", "octave", "--low", "0.1", "--high", "1.0",
    )
    assert code == EXIT_OK
    rows = np.loadtxt(tmp_path / "scalogram.csv", delimiter=",", skiprows=1)
    assert set(np.unique(rows[:, 0])) == {0.125, 0.25, 0.5, 1.0}


# --- gradcheck / boundcheck -------------------------------------------------------


def test_gradcheck_report(tmp_path, capsys):
    code, err = run(capsys, "gradcheck", "--out", str(tmp_path), "--draws", "2")
    assert code == EXIT_OK and err == ""
    report = json.loads((tmp_path / "gradcheck.json").read_text())
    assert report["passed"] is True
    assert set(report["worst_by_block"]) == {"scale", "translation", "zero", "pole_re", "pole_im"}
    assert max(report["worst_by_block"].values()) < report["tolerance"]
    rows = (tmp_path / "gradcheck.csv").read_text().splitlines()
    assert rows[0] == "draw,block,max_relative_error"
    assert len(rows) == 1 + 2 * 5


def test_boundcheck_report(tmp_path, capsys):
    code, err = run(capsys, "boundcheck", "--out", str(tmp_path), "--signals", "2")
    assert code == EXIT_OK and err == ""
    report = json.loads((tmp_path / "boundcheck.json").read_text())
    assert report["passed"] is True
    assert report["all_bounds_hold"] is True
    assert 0.8 <= report["quadrature_slope"] <= 1.2
    rows = np.loadtxt(tmp_path / "boundcheck.csv", delimiter=",", skiprows=1)
    assert np.all(rows[:, 2] <= rows[:, 3])


# --- train / evaluate ----------------------------------------------------------


def train_args(out, extra=()):
    return [
        "train", "--out", str(out),
        "--synthetic-size", "60", "--epochs", "4", "--m", "3",
        "--hidden-units", "5", "--batch-size", "16",
        *extra,
    ]


def test_train_then_evaluate(tmp_path, capsys):
    code, err = run(capsys, *train_args(tmp_path / "fit"))
    assert code == EXIT_OK and err == ""
    for name in ("model.json", "history.csv", "training.png"):
        assert (tmp_path / "fit" / name).is_file()

    code, err = run(
        capsys, "evaluate", "--model", str(tmp_path / "fit" / "model.json"),
        "--synthetic-size", "40", "--out", str(tmp_path / "score"),
    )
    assert code == EXIT_OK and err == ""
    metrics = json.loads((tmp_path / "score" / "metrics.json").read_text())
    for key in ("total_accuracy", "veb_se", "veb_pp", "normal_se", "normal_pp"):
        assert 0.0 <= metrics[key] <= 1.0
    counts = (
        metrics["true_positive"] + metrics["false_negative"]
        + metrics["false_positive"] + metrics["true_negative"]
    )
    assert counts == 40
    assert (tmp_path / "score" / "evaluation.png").is_file()


def test_training_is_deterministic(tmp_path, capsys):
    run(capsys, *train_args(tmp_path / "a"))
    run(capsys, *train_args(tmp_path / "b"))
    assert (tmp_path / "a" / "model.json").read_bytes() == (tmp_path / "b" / "model.json").read_bytes()
    assert (tmp_path / "a" / "history.csv").read_bytes() == (tmp_path / "b" / "history.csv").read_bytes()


def test_evaluation_is_deterministic(tmp_path, capsys):
    run(capsys, *train_args(tmp_path / "fit"))
    model = str(tmp_path / "fit" / "model.json")
    run(capsys, "evaluate", "--model", model, "--synthetic-size", "30", "--out", str(tmp_path / "a"))
    run(capsys, "evaluate", "--model", model, "--synthetic-size", "30", "--out", str(tmp_path / "b"))
    assert (tmp_path / "a" / "metrics.json").read_bytes() == (tmp_path / "b" / "metrics.json").read_bytes()


def test_bad_model_file_is_usage_error(tmp_path, capsys):
    model = tmp_path / "model.json"
    model.write_text("{\"format_version\": 999}")
    code, err = run(capsys, "evaluate", "--model", str(model), "--out", str(tmp_path))
    assert code == EXIT_USAGE
    assert stderr_json(err)["error"] == "usage"


def test_divergent_fit_exits_numerical(tmp_path, capsys):
    t = np.linspace(0.0, 2.0, 300)
    sig = tmp_path / "sig.txt"
    np.savetxt(sig, np.exp(-(((t - 1.0) / 0.15) ** 2)))
    code, err = run(
        capsys, "reconstruct", "--signal", str(sig),
        "--steps", "40", "--learning-rate", "1e18", "--out", str(tmp_path),
    )
    assert code == EXIT_NUMERIC
    assert stderr_json(err)["error"] == "numerical"


def test_malformed_heartbeat_csv_is_reported(tmp_path, capsys):
    beats = tmp_path / "beats.csv"
    beats.write_text("1,2,3\n")
    code, err = run(capsys, *train_args(tmp_path, extra=["--train", str(beats)]))
    assert code == EXIT_USAGE
    assert stderr_json(err)["error"] == "data"
