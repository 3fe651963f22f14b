from pathlib import Path

import pytest

from postalias.config import (
    ConfigError,
    ServiceConfig,
    load_config,
    official_fixture_path,
    parse_config_text,
    parse_kv_text,
)


def test_defaults():
    cfg = ServiceConfig()
    assert cfg.validity_days == 30
    assert cfg.events_path == Path("data/events.jsonl")
    assert cfg.parcels_path == Path("data/parcels.json")
    assert cfg.alias_name == "ABC Alias"


def test_parse_kv_text_basics():
    text = """
    # a comment
    data_dir = /tmp/x

    port= 9000
    alias_name = XY Relay
    """
    assert parse_kv_text(text) == {
        "data_dir": "/tmp/x",
        "port": "9000",
        "alias_name": "XY Relay",
    }


def test_parse_kv_text_errors():
    with pytest.raises(ConfigError, match="key = value"):
        parse_kv_text("just words\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_kv_text("port = 1\nport = 2\n")


def test_parse_config_text_types():
    kwargs = parse_config_text("port = 9000\ndata_dir = /tmp/x\nvalidity_days = 7\n")
    assert kwargs == {"port": 9000, "data_dir": Path("/tmp/x"), "validity_days": 7}
    cfg = ServiceConfig(**kwargs)
    assert cfg.port == 9000


def test_parse_config_text_rejects_unknown_and_bad_int():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_text("colour = blue\n")
    with pytest.raises(ConfigError, match="integer"):
        parse_config_text("port = many\n")


def test_load_config(tmp_path):
    path = tmp_path / "svc.conf"
    path.write_text("validity_days = 14\nalias_street = Relay Rd\n", encoding="utf-8")
    cfg = load_config(path)
    assert cfg.validity_days == 14
    assert cfg.alias_street == "Relay Rd"
    assert cfg.port == 8000  # untouched default
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.conf")


def test_official_fixture_path_prefers_data_dir_override(tmp_path):
    cfg = ServiceConfig(data_dir=tmp_path)
    packaged = official_fixture_path(cfg)
    assert packaged.name == "official_addresses.jsonl"
    assert packaged.exists()

    override = tmp_path / "official_addresses.jsonl"
    override.write_text("", encoding="utf-8")
    assert official_fixture_path(cfg) == override
