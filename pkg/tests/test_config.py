import os

import pytest

from edgepose.config import (
    DB_PATH_ENV,
    LOG_LEVEL_ENV,
    THREADS_ENV,
    ScenarioFile,
    build_scenario_file,
    db_path,
    fanout_width,
    load_scenario_file,
    log_level,
    parse_flat,
)
from edgepose.confidence import EmpiricalConfidence
from edgepose.delay import TimeAllocation
from edgepose.errors import ScenarioError
from edgepose.sim import Scenario


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_reproduce_reference_scenario():
    assert ScenarioFile().to_scenario() == Scenario.default()


def test_bundled_documents_agree(scenario_dir):
    flat = load_scenario_file(scenario_dir / "default.cfg")
    nested = load_scenario_file(scenario_dir / "default.yml")
    assert flat.model_dump() == nested.model_dump() == ScenarioFile().model_dump()
    assert flat.digest() == nested.digest()


def test_flat_and_yaml_forms_are_equivalent(tmp_path):
    flat = write(tmp_path, "a.cfg", "# two cameras\nn_devices = 2\nd_req_ms = 300  # tight\ngains_db = -95, -105\n")
    nested = write(tmp_path, "a.yml", "n_devices: 2\nd_req_ms: 300\ngains_db: [-95, -105]\n")
    a, b = load_scenario_file(flat), load_scenario_file(nested)
    assert a.model_dump() == b.model_dump()
    scenario = a.to_scenario()
    assert scenario.d_req_s == pytest.approx(0.3)
    assert scenario.radio.channel_gains_db == (-95.0, -105.0)


def test_unknown_key_is_named(tmp_path):
    path = write(tmp_path, "bad.cfg", "n_device = 4\n")
    with pytest.raises(ScenarioError, match="unknown scenario key 'n_device'"):
        load_scenario_file(path)


def test_gain_list_must_match_device_count():
    with pytest.raises(ScenarioError, match="gains_db lists 2 values for 4 devices"):
        build_scenario_file({"gains_db": "-100, -95"})


def test_rate_backhaul_needs_a_rate():
    with pytest.raises(ScenarioError, match="backhaul_rate_bps"):
        build_scenario_file({"t_bs_mode": "rate"})
    doc = build_scenario_file({"t_bs_mode": "rate", "backhaul_rate_bps": "1e8"})
    assert doc.to_scenario().compute.backhaul.rate_bps == 1e8


def test_value_errors_name_the_key():
    with pytest.raises(ScenarioError, match="occlusion_prob"):
        build_scenario_file({"occlusion_prob": "1.5"})
    with pytest.raises(ScenarioError, match="n_devices"):
        build_scenario_file({"n_devices": "one"})


def test_malformed_lines_report_line_numbers():
    with pytest.raises(ScenarioError, match="line 2"):
        parse_flat("n_devices = 4\njust words\n")
    with pytest.raises(ScenarioError, match="duplicate key 'fps'"):
        parse_flat("fps = 2\nfps = 3\n")
    assert parse_flat("gains_db =\n# comment only\n") == {}


def test_yaml_document_must_be_a_mapping(tmp_path):
    path = write(tmp_path, "list.yml", "- 1\n- 2\n")
    with pytest.raises(ScenarioError):
        load_scenario_file(path)


def test_sample_files_resolve_next_to_the_scenario(tmp_path):
    write(tmp_path, "dev.txt", "confidence\n0.9\n0.1\n0.5\n")
    path = write(tmp_path, "s.cfg", "dev_pos = file(dev.txt)\n")
    scenario = load_scenario_file(path).to_scenario()
    model = scenario.quad(0).dev_pos
    assert isinstance(model, EmpiricalConfidence)
    assert model.samples.tolist() == [0.1, 0.5, 0.9]


def test_provenance_lists_every_key():
    doc = build_scenario_file({"gains_db": "-100,-100,-100,-101"})
    lines = doc.provenance()
    assert [line.split(" =")[0] for line in lines] == list(ScenarioFile.model_fields)
    assert "gains_db = -100.0,-100.0,-100.0,-101.0" in lines
    assert "backhaul_rate_bps =" in lines
    assert ScenarioFile().digest() != doc.digest()


def test_optimizer_settings_mapping():
    config = build_scenario_file({"grid_points": "21", "kappa1": "0.5"}).optimizer_config()
    assert config.grid_points_m == 21
    assert config.kappa1 == 0.5
    assert config.d_req_s is None


def test_loaded_scenario_drives_the_delay_model():
    scenario = build_scenario_file({"t_inf_device_ms": "50", "image_bytes": "1024"}).to_scenario()
    assert scenario.compute.t_inf_device_s == pytest.approx(0.05)
    assert scenario.traffic.image_bits == 8192
    assert TimeAllocation.uniform(scenario.n_devices).n_devices == 4


def test_environment_settings(mocker):
    mocker.patch.dict(os.environ, {THREADS_ENV: "3", DB_PATH_ENV: "/tmp/x.db", LOG_LEVEL_ENV: "debug"})
    assert fanout_width() == 3
    assert str(db_path()) == "/tmp/x.db"
    assert log_level() == "DEBUG"
    mocker.patch.dict(os.environ, {THREADS_ENV: "-1"})
    with pytest.raises(ValueError):
        fanout_width()
    assert fanout_width({THREADS_ENV: "0"}) >= 1
    assert log_level({}) == "WARNING"
