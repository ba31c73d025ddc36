import numpy as np
import pytest
from pydantic import ValidationError

from app.application.common.context import RunContext
from app.application.common.exceptions import ConfigurationError
from app.config.settings import RunConfig, Settings
from app.container import Container


def test_command_line_overrides_win_over_configuration_file():
    config = RunConfig(seed=5, field=[0.0, 0.0, 50.0], jt="b")

    context = RunContext.resolve(Settings(), config, seed=9)

    assert context.seed == 9
    assert context.jt == "B"
    assert context.b.bz == 50.0


def test_configuration_file_wins_over_settings():
    settings = Settings()

    assert RunContext.resolve(settings, RunConfig(seed=5)).seed == 5
    assert RunContext.resolve(settings).seed == settings.DEFAULT_SEED


def test_unset_overrides_are_ignored():
    context = RunContext.resolve(Settings(), RunConfig(threads=2), threads=None, out=None)

    assert context.threads == 2
    assert context.out is None


def test_named_streams_are_independent_and_reproducible():
    context = RunContext.resolve(Settings(), seed=1)

    first = context.rng(3).random(4)

    assert np.array_equal(first, context.rng(3).random(4))
    assert not np.array_equal(first, context.rng(4).random(4))


def test_invalid_geometry_becomes_configuration_error():
    with pytest.raises(ConfigurationError) as exc:
        RunContext.resolve(Settings(), RunConfig(r23=[-1.0, 0.5, 0.5]))

    assert "reason" in exc.value.details


def test_thread_count_must_be_positive():
    with pytest.raises(ConfigurationError) as exc:
        RunContext.resolve(Settings(), threads=0)

    assert exc.value.details == {"threads": 0}


def test_run_config_rejects_unknown_keys_and_bad_values():
    with pytest.raises(ValidationError):
        RunConfig(colour="blue")
    with pytest.raises(ValidationError):
        RunConfig(m_I=2)
    with pytest.raises(ValidationError):
        RunConfig(field=[1.0, 2.0])
    with pytest.raises(ValidationError):
        RunConfig(jt="E")


def test_run_config_requires_referenced_files_to_exist(tmp_path):
    trace = tmp_path / "trace.csv"
    trace.write_text("1\n0\n")

    assert RunConfig(trace_file=str(trace)).trace_file == str(trace)
    with pytest.raises(ValidationError):
        RunConfig(trace_file=str(tmp_path / "missing.csv"))


def test_run_config_reads_flat_json(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text('{"seed": 42, "m_I": -1}')

    config = RunConfig.from_file(str(path))

    assert config.seed == 42 and config.m_I == -1


def test_container_reconfigures_worker_pool_with_thread_count():
    container = Container(Settings())

    container.configure(threads=3)

    assert container.worker_pool().threads == 3
    assert container.readout_model(p_a=0.7).p_a == 0.7
