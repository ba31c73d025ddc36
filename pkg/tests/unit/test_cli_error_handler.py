import csv
import io
import json
from pathlib import Path

from app.application.common.exceptions import ConfigurationError
from app.cli.error_handler import (
    EXIT_DOMAIN,
    EXIT_UNEXPECTED,
    EXIT_USAGE,
    error_record,
    exit_code_for,
    handle_exception,
)
from app.config.settings import Settings
from app.container import Container
from app.domain.imaging.exceptions import FitFailureError
from app.domain.spins.exceptions import MissingGeometryError
from app.main import dispatch


class _DummyError(FitFailureError):
    pass


def test_handle_exception_writes_json_record_and_returns_exit_code():
    stream = io.StringIO()

    code = handle_exception(FitFailureError("All fit starts diverged", details={"n_starts": 3}), "fit", stream)

    assert code == EXIT_DOMAIN
    assert json.loads(stream.getvalue()) == {
        "error": "FitFailureError",
        "message": "All fit starts diverged",
        "details": {"n_starts": 3},
    }


def test_exit_code_lookup_walks_class_hierarchy():
    assert exit_code_for(_DummyError("diverged")) == EXIT_DOMAIN
    assert exit_code_for(MissingGeometryError("r23 missing")) == EXIT_DOMAIN
    assert exit_code_for(ConfigurationError("bad")) == EXIT_USAGE
    assert exit_code_for(ValueError("bad value")) == EXIT_USAGE
    assert exit_code_for(RuntimeError("boom")) == EXIT_UNEXPECTED


def test_unexpected_errors_hide_their_message():
    record = error_record(RuntimeError("secret internals"))

    assert record == {"error": "InternalError", "message": "An unexpected error occurred", "details": {}}


def test_dispatch_writes_constants_report(tmp_path):
    code = dispatch(["--out", str(tmp_path), "--seed", "3", "constants"], Container(Settings()))

    report = json.loads((tmp_path / "constants.json").read_text())
    assert code == 0
    assert report["zfs_delta_MHz"] == 2870.0


def test_dispatch_returns_usage_code_for_unknown_subcommand():
    assert dispatch(["no-such-command"], Container(Settings())) == EXIT_USAGE


def test_dispatch_returns_usage_code_for_invalid_thread_count(capsys):
    code = dispatch(["--threads", "0", "constants"], Container(Settings()))

    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert code == EXIT_USAGE
    assert record["error"] == "ConfigurationError"
    assert record["details"] == {"threads": 0}


def test_dispatch_rejects_unknown_configuration_keys(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text(json.dumps({"seed": 1, "colour": "blue"}))

    assert dispatch(["--config", str(config), "constants"], Container(Settings())) == EXIT_USAGE


def test_dispatch_reports_missing_configuration_file(tmp_path):
    assert dispatch(["--config", str(tmp_path / "missing.cfg"), "constants"], Container(Settings())) == EXIT_USAGE


def test_dd_spectrum_counts_follow_repetitions_flag(tmp_path):
    argv = ["--out", str(tmp_path), "--seed", "4", "dd-spectrum",
            "--tau-min", "12", "--tau-max", "12", "--tau-step", "1", "--units", "1", "--reps", "5"]

    code = dispatch(argv, Container(Settings()))

    with open(tmp_path / "dd_spectrum.csv", newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert code == 0
    assert len(rows) == 1
    assert 0.0 <= float(rows[0]["expected_counts"]) <= 5.0
    assert 0.0 <= float(rows[0]["sampled_counts"]) <= 5.0


def test_dd_spectrum_rejects_unlisted_flags():
    assert dispatch(["dd-spectrum", "--same-axis"], Container(Settings())) == EXIT_USAGE


def test_shipped_preset_loads_working_point(tmp_path):
    preset = Path(__file__).resolve().parents[2] / "paper.cfg"

    code = dispatch(["--config", str(preset), "--out", str(tmp_path), "constants"], Container(Settings()))

    report = json.loads((tmp_path / "constants.json").read_text())
    assert code == 0
    assert report["field_G"] == [2.43, 1.42, 45.552]
