import json
import logging

import pytest

from src.models.settings import SEED_ENV_VAR, RunSettings, SettingsError
from src.models.statistics import RunReport


class TestRunSettings:
    def test_defaults(self):
        settings = RunSettings()
        assert settings.alpha == 0.01
        assert settings.window == 2
        assert settings.test == "parcorr"
        assert settings.order == "default"
        assert not settings.strict_counts
        assert settings.burn_in == 200
        assert "config_path" not in settings.to_dict()

    def test_seed_from_environment(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "42")
        assert RunSettings().seed == 42

    @pytest.mark.parametrize("value", ["abc", "4.5"])
    def test_malformed_seed_names_the_variable(self, monkeypatch, value):
        monkeypatch.setenv(SEED_ENV_VAR, value)
        with pytest.raises(SettingsError, match=SEED_ENV_VAR):
            RunSettings()

    def test_blank_seed_means_zero(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, " ")
        assert RunSettings().seed == 0

    def test_missing_file_keeps_defaults(self, tmp_path):
        assert RunSettings(str(tmp_path / "absent.json")).alpha == 0.01

    def test_save_and_load(self, tmp_path):
        path = str(tmp_path / "conf" / "settings.json")
        settings = RunSettings(path)
        settings.alpha = 0.05
        settings.order = "swapped"
        assert settings.save_settings()
        loaded = RunSettings(path)
        assert loaded.alpha == 0.05
        assert loaded.order == "swapped"

    def test_save_without_path(self):
        assert not RunSettings().save_settings()

    def test_unknown_keys_are_skipped(self, caplog):
        settings = RunSettings()
        with caplog.at_level(logging.WARNING, logger="src.models.settings"):
            settings.from_dict({"window": 4, "colour": "red", "config_path": "x"})
        assert settings.window == 4
        assert not hasattr(settings, "colour")
        assert settings.config_path is None
        assert "colour" in caplog.text

    def test_reset(self):
        settings = RunSettings()
        settings.window = 7
        settings.reset_to_defaults()
        assert settings.window == 2


class TestRunReport:
    @pytest.fixture
    def report(self):
        report = RunReport("parcorr", 0.05, "swapped", 3, 2)
        report.histogram.update({0: 21, 1: 12})
        report.add_iteration(0, 21, 9, False)
        report.add_iteration(1, 12, 6, True)
        report.conflicts = ["X0(t) на ребре X0(t) - X1(t): отклонена TAIL"]
        report.edges_total, report.edges_temporal, report.edges_contemporaneous = 6, 4, 2
        report.metrics = {"skeleton_f1": 0.75}
        report.finish(1.5)
        return report

    def test_total(self, report):
        assert report.total_tests == 33

    def test_text_lines(self, report):
        text = report.to_text()
        head = text.split("\n---\n")[0].splitlines()
        assert "alpha: 0.05" in head
        assert "ci_total: 33" in head
        assert head.index("ci_size_0: 21") < head.index("ci_size_1: 12")
        assert "runtime_sec: 1.500" in head
        assert "skeleton_f1: 0.7500" in head
        assert "peak_memory_mb" not in text.split("\n---\n")[0]

    def test_json_block(self, report):
        block = json.loads(report.to_text().split("\n---\n")[1])
        assert block["ci_histogram"] == {"0": 21, "1": 12}
        assert block["iterations"][1] == {"r": 1, "tests": 12, "edges": 6, "done": True}

    def test_parse_text(self, report):
        parsed = RunReport.parse_text(report.to_text())
        assert parsed.to_dict() == report.to_dict()

    def test_parse_text_without_json(self):
        with pytest.raises(ValueError):
            RunReport.parse_text("test: parcorr\n")
