import io
import json

import numpy as np
import pytest

from app.domain.imaging.value_objects import ObservationKind
from app.infrastructure.storage.readers import parse_candidates, read_observations, read_trace
from app.infrastructure.storage.result_writer import ResultWriter, format_value
from app.infrastructure.tasks.worker_pool import WorkerPool


def test_format_value_renders_cells_stably():
    assert format_value(True) == "1"
    assert format_value(np.float64(0.1)) == "0.1"
    assert format_value(float("nan")) == "nan"
    assert format_value([1.5, 2]) == "1.5 2"
    assert format_value(None) == ""


def test_write_csv_to_stream_uses_first_row_columns():
    stream = io.StringIO()

    ResultWriter(stream=stream).write_csv("rows", [{"tau_us": 11.2, "tied": False}, {"tau_us": 14.0, "tied": True}])

    assert stream.getvalue() == "tau_us,tied\n11.2,0\n14.0,1\n"


def test_write_json_to_directory_converts_numpy_values(tmp_path):
    writer = ResultWriter(str(tmp_path / "out"))

    writer.write_json("report", {"values": np.arange(3), "ok": np.bool_(True), "x": np.float32(0.5)})

    payload = json.loads((tmp_path / "out" / "report.json").read_text())
    assert payload == {"values": [0, 1, 2], "ok": True, "x": 0.5}
    assert writer.written == [str(tmp_path / "out" / "report.json")]


def test_parse_candidates_splits_pairs():
    assert parse_candidates("+u/+d; +d/0u;") == (("+u", "+d"), ("+d", "0u"))

    with pytest.raises(ValueError):
        parse_candidates("+u/+d/0u")


def test_read_observations_defaults_kind_to_flip_flop(tmp_path):
    path = tmp_path / "obs.csv"
    path.write_text("tau_us,jt,candidates,value_kHz\n14.0,A,-u/-d;0d/-u,18.114\n")

    observations = read_observations(str(path))

    assert len(observations) == 1
    assert observations[0].kind is ObservationKind.X
    assert observations[0].candidates == (("-u", "-d"), ("0d", "-u"))


def test_read_observations_requires_columns(tmp_path):
    path = tmp_path / "obs.csv"
    path.write_text("tau_us,jt\n14.0,A\n")

    with pytest.raises(ValueError):
        read_observations(str(path))


def test_read_trace_skips_header_and_blank_lines(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("outcome\n1\n0\n\n1,extra\n")

    trace = read_trace(str(path))

    assert trace.outcomes.tolist() == [1, 0, 1]
    assert not trace.synthetic


def test_worker_pool_preserves_order_across_threads():
    pool = WorkerPool(4)

    assert pool.map(lambda x: x * x, range(20)) == [x * x for x in range(20)]


def test_worker_pool_rejects_zero_threads():
    with pytest.raises(ValueError):
        WorkerPool(0)
