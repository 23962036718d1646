"""Basic tests for the flagcert package, CLI wiring, config and storage."""

import json
import tempfile
from pathlib import Path

import pytest


def test_import_cli():
    """Test that the CLI module can be imported."""
    from flagcert.cli import app

    assert app.info.name == "flagcert"


def test_cli_has_commands():
    """Test that CLI has expected number of commands."""
    from flagcert.cli import app

    assert len(list(app.registered_commands)) == 12


def test_cli_command_names():
    """Test that expected commands are registered."""
    from flagcert.cli import app

    command_names = [cmd.name for cmd in app.registered_commands]

    expected_commands = [
        "enumerate",
        "flags",
        "tables",
        "expressions",
        "verify",
        "bound",
        "blowup",
        "erdos-check",
        "trend",
        "emit-sdp",
        "round",
        "demo",
    ]

    for cmd in expected_commands:
        assert cmd in command_names, f"Missing command: {cmd}"


def test_import_operations():
    """Test that the operations module exposes the command logic."""
    from flagcert import operations

    assert hasattr(operations, "enumerate_hosts")
    assert hasattr(operations, "verify_certificate")
    assert hasattr(operations, "emit")
    assert hasattr(operations, "round_matrices")


def test_package_exports_errors():
    """Test that the error hierarchy is re-exported from __init__.py."""
    from flagcert import ArgumentError, CertificateError, FlagcertError, Graph6Error, SizeError

    assert issubclass(SizeError, ArgumentError)
    assert issubclass(ArgumentError, ValueError)
    assert issubclass(CertificateError, FlagcertError)
    assert issubclass(Graph6Error, ValueError)


def test_error_attributes():
    """Test that structured error attributes end up in the message."""
    from flagcert.errors import CertificateError, Graph6Error

    e = Graph6Error("bad byte", offset=3)
    assert e.offset == 3
    assert str(e) == "bad byte (at byte 3)"

    c = CertificateError("not symmetric", field="types[0].matrix")
    assert c.field == "types[0].matrix"
    assert str(c) == "types[0].matrix: not symmetric"


def test_output_helpers(capsys):
    """Test CLI output helper functions."""
    from flagcert.cli import output_json

    output_json({"test": "value", "count": 42})
    parsed = json.loads(capsys.readouterr().out)
    assert parsed["test"] == "value"
    assert parsed["count"] == 42


# =============================================================================
# Storage
# =============================================================================


def test_storage_round_trip():
    """Test that a stored report reads back with its metadata."""
    from flagcert.storage import read_report, store_report

    with tempfile.NamedTemporaryFile(suffix=".json", delete=False) as f:
        output_path = f.name

    try:
        test_data = {"bound": "24/625", "passed": True}

        file_path, stored = store_report(
            "verify",
            {"certificate": "shipped"},
            test_data,
            output_path=output_path,
        )

        assert file_path == Path(output_path)
        assert stored.data == test_data
        assert stored.metadata.command == "verify"
        assert stored.metadata.created.endswith("Z")

        loaded = read_report(file_path)
        assert loaded.data == test_data
        assert loaded.metadata.path == output_path
    finally:
        Path(output_path).unlink(missing_ok=True)


def test_storage_generated_name(tmp_path):
    """Test that generated file names carry the command and a sha256 prefix of the params."""
    import hashlib

    from flagcert.storage import store_report

    params = {"certificate": "shipped"}
    file_path, _ = store_report("verify", params, {"ok": True}, storage_dir=tmp_path / "reports")

    expected_hash = hashlib.sha256(json.dumps(params, sort_keys=True).encode()).hexdigest()[:8]
    assert file_path.parent == tmp_path / "reports"
    assert file_path.name.startswith(f"verify_{expected_hash}_")
    assert file_path.name.endswith("Z.json")


def test_write_output_errors_are_argument_errors(tmp_path):
    """Test that unwritable destinations raise ArgumentError, not OSError."""
    from flagcert.errors import ArgumentError
    from flagcert.storage import write_output

    assert write_output(tmp_path / "a" / "b.txt", "x").read_text() == "x"

    blocker = tmp_path / "blocker"
    blocker.write_text("")
    with pytest.raises(ArgumentError):
        write_output(blocker / "out.txt", "x")


def test_storage_rejects_foreign_files(tmp_path):
    """Test that missing files and plain JSON are not reports."""
    from flagcert.errors import ArgumentError
    from flagcert.storage import read_report

    with pytest.raises(ArgumentError):
        read_report(tmp_path / "missing.json")

    plain = tmp_path / "plain.json"
    plain.write_text('{"bound": "24/625"}')
    with pytest.raises(ArgumentError):
        read_report(plain)


# =============================================================================
# Configuration
# =============================================================================


@pytest.fixture
def isolated_config(tmp_path, monkeypatch):
    """Point the config file at a temp dir and clear FLAGCERT_* variables."""
    from flagcert import config

    path = tmp_path / "config.json"
    monkeypatch.setattr(config, "CONFIG_PATH", path)
    for key in ("FLAGCERT_DENOMINATORS", "FLAGCERT_DIAGONAL_BOOST", "FLAGCERT_MAX_DENOMINATOR", "FLAGCERT_APPROX_DIGITS", "FLAGCERT_STORAGE_DIR"):
        monkeypatch.delenv(key, raising=False)
    return path


def test_settings_defaults(isolated_config):
    """Test default settings with no file and no environment."""
    from flagcert.config import DEFAULT_DENOMINATORS, load_settings

    settings = load_settings()
    assert settings.denominators == DEFAULT_DENOMINATORS
    assert settings.diagonal_boost == "0"
    assert settings.approx_digits == 6


def test_settings_precedence(isolated_config, monkeypatch):
    """Test file < environment < explicit option."""
    from flagcert.config import load_settings

    isolated_config.write_text(json.dumps({"denominators": [100], "approx_digits": 4}))
    assert load_settings().denominators == [100]
    assert load_settings().approx_digits == 4

    monkeypatch.setenv("FLAGCERT_DENOMINATORS", "625,2500")
    assert load_settings().denominators == [625, 2500]

    assert load_settings(denominators=[12500]).denominators == [12500]


def test_settings_ignores_broken_file(isolated_config):
    """Test that an unreadable config file counts as empty."""
    from flagcert.config import DEFAULT_DENOMINATORS, load_settings

    isolated_config.write_text("{not json")
    assert load_settings().denominators == DEFAULT_DENOMINATORS


def test_settings_rejects_bad_values(isolated_config, monkeypatch):
    """Test that malformed environment values raise ArgumentError."""
    from flagcert.config import load_settings
    from flagcert.errors import ArgumentError

    monkeypatch.setenv("FLAGCERT_DENOMINATORS", "625,abc")
    with pytest.raises(ArgumentError):
        load_settings()

    monkeypatch.delenv("FLAGCERT_DENOMINATORS")
    with pytest.raises(ArgumentError):
        load_settings(diagonal_boost="-1/10")


def test_settings_max_denominator(isolated_config, monkeypatch):
    """Test the continued-fraction cap: default, environment, disabled by file, bad values."""
    from flagcert.config import load_settings
    from flagcert.errors import ArgumentError

    assert load_settings().max_denominator == 1_000_000

    isolated_config.write_text(json.dumps({"max_denominator": None}))
    assert load_settings().max_denominator is None

    monkeypatch.setenv("FLAGCERT_MAX_DENOMINATOR", "5000")
    assert load_settings().max_denominator == 5000

    monkeypatch.setenv("FLAGCERT_MAX_DENOMINATOR", "many")
    with pytest.raises(ArgumentError):
        load_settings()

    monkeypatch.delenv("FLAGCERT_MAX_DENOMINATOR")
    with pytest.raises(ArgumentError):
        load_settings(max_denominator=0)


def test_parse_denominators():
    """Test the comma-separated ladder parser."""
    from flagcert.config import parse_denominators
    from flagcert.errors import ArgumentError

    assert parse_denominators("625, 2500") == [625, 2500]
    with pytest.raises(ArgumentError):
        parse_denominators("0,5")
