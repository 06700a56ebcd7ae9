"""Tests for the file and logging helpers."""

import logging
import re

import pytest

from ppg.utils.file_ops import (
    generate_timestamped_filename,
    get_data_directory,
    load_json_data,
    save_json_data,
    set_log_level,
    setup_logging,
    write_csv,
    write_lines,
)


@pytest.fixture
def restore_levels():
    yield
    set_log_level("INFO")


class TestJson:
    def test_save_creates_directories(self, tmp_path):
        path = tmp_path / "nested" / "summary.json"
        assert save_json_data({"b": 2, "a": [1, 2]}, str(path))
        assert path.read_text().startswith('{\n  "a"')
        assert load_json_data(str(path)) == {"a": [1, 2], "b": 2}

    def test_unserializable_data(self, tmp_path):
        assert not save_json_data({"x": object()}, str(tmp_path / "bad.json"))

    def test_missing_file(self, tmp_path):
        assert load_json_data(str(tmp_path / "absent.json")) is None

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{oops")
        assert load_json_data(str(path)) is None


class TestTables:
    def test_write_lines(self, tmp_path):
        path = tmp_path / "out" / "ledger.jsonl"
        assert write_lines([b'{"a":1}', b'{"a":2}'], str(path)) == 2
        assert path.read_bytes() == b'{"a":1}\n{"a":2}\n'

    def test_csv_header_comment(self, tmp_path):
        path = tmp_path / "rows.csv"
        assert write_csv([{"q": 0.2, "n": 1}], str(path), ["q", "n"], header_comment="seed=3")
        assert path.read_text().splitlines() == ["# seed=3", "q,n", "0.2,1"]


class TestPaths:
    def test_timestamped_filename(self):
        name = generate_timestamped_filename("sim_summaries")
        assert re.fullmatch(r"sim_summaries_\d{8}_\d{6}\.json", name)
        assert generate_timestamped_filename("run", ".csv").endswith(".csv")

    def test_data_directory_override(self, monkeypatch, tmp_path):
        monkeypatch.setenv("PPG_OUTPUT_DIR", str(tmp_path))
        assert get_data_directory() == str(tmp_path)
        assert get_data_directory("experiments") == str(tmp_path / "experiments")

    def test_data_directory_default(self, monkeypatch):
        monkeypatch.delenv("PPG_OUTPUT_DIR", raising=False)
        assert get_data_directory().endswith("data")


class TestLogging:
    def test_file_handler_under_log_dir(self, monkeypatch, tmp_path):
        monkeypatch.setenv("PPG_LOG_DIR", str(tmp_path))
        log = setup_logging("ppg.tests.filelog")
        log.info("written to file")
        for handler in log.handlers:
            handler.flush()
        files = list(tmp_path.glob("ppg.tests.filelog_*.log"))
        assert len(files) == 1
        assert "written to file" in files[0].read_text()
        for handler in list(log.handlers):
            handler.close()
            log.removeHandler(handler)

    def test_set_log_level_reaches_package_loggers(self, restore_levels):
        inner = setup_logging("ppg.tests.levels")
        outside = setup_logging("other_pkg.levels")
        updated = set_log_level("ERROR")
        assert "ppg.tests.levels" in updated
        assert inner.level == logging.ERROR
        assert outside.level == logging.INFO
