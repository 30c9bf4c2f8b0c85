"""
Tests for plstar.toml loading and flag overrides.
"""

import pytest

from plstar.errors import ConfigError
from plstar.interp import Domain
from plstar.resources.schemas import PlstarConfig
from plstar.utils.config import load_config, merge_overrides, overlay_domain, parse_domain_flag

from .common import ROOT


class TestLoadConfig:
    def test_defaults_without_file(self, tmp_path, monkeypatch):
        """No plstar.toml in the working directory means defaults."""
        monkeypatch.chdir(tmp_path)
        config = load_config()
        assert config == PlstarConfig()
        assert config.domain.int_min == -128
        assert config.fuel.max_unfoldings == 64

    def test_repository_file(self):
        """The shipped plstar.toml is valid."""
        config = load_config(ROOT / "plstar.toml")
        assert config.domain.to_domain().int_range == (-16, 16)
        assert config.backend == "c"

    def test_signatures_resolve_against_the_file(self, tmp_path):
        """Relative signature paths are relative to the config file."""
        path = tmp_path / "plstar.toml"
        path.write_text('signatures = "sigs/all.sig"\n', encoding="utf-8")
        assert load_config(path).signatures == str(tmp_path / "sigs/all.sig")

    def test_explicit_missing_file(self, tmp_path):
        """A named file must exist."""
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.toml")

    @pytest.mark.parametrize(
        "text",
        [
            "backend = \n",
            'backend = "fortran"\n',
            "[domain]\nint_min = 5\nint_max = 1\n",
            "[fuel]\nmax_unfoldings = 0\n",
        ],
    )
    def test_invalid(self, tmp_path, text):
        """Bad TOML and out-of-range values are configuration errors."""
        path = tmp_path / "plstar.toml"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)


class TestDomainFlag:
    @pytest.mark.parametrize(
        "flag, expected",
        [
            ("int:-8..8", {"int_min": -8, "int_max": 8}),
            ("array-len:0..4", {"array_min": 0, "array_max": 4}),
            ("array-values:1..5", {"array_min_value": 1, "array_max_value": 5}),
            ("array:2..3", {"array_min_value": 2, "array_max_value": 3}),
        ],
    )
    def test_parse(self, flag, expected):
        assert parse_domain_flag(flag) == expected

    @pytest.mark.parametrize("flag", ["int:5..1", "int 0..3", "bool:0..1"])
    def test_rejected(self, flag):
        with pytest.raises(ConfigError):
            parse_domain_flag(flag)


class TestMergeOverrides:
    def test_flags_win(self):
        """Set flags replace values; None leaves them alone; domain merges per field."""
        merged = merge_overrides(
            PlstarConfig(),
            {"backend": "pseudo", "oracle": None, "domain": {"int_min": 0, "int_max": 3, "array_max": None}},
        )
        assert merged.backend == "pseudo"
        assert merged.oracle == "brute-force"
        assert (merged.domain.int_min, merged.domain.int_max) == (0, 3)
        assert merged.domain.array_max == 3

    def test_overrides_are_validated(self):
        with pytest.raises(ConfigError):
            merge_overrides(PlstarConfig(), {"domain": {"int_min": 10, "int_max": 0}})


class TestOverlayDomain:
    def test_named_entries_only(self):
        """Flagged entries replace the matching bounds; the rest of the domain is kept."""
        base = Domain(int_range=(0, 5), array_max=4, array_values=(1, 4))
        overlaid = overlay_domain(base, parse_domain_flag("int:0..2"))
        assert overlaid == Domain(int_range=(0, 2), array_max=4, array_values=(1, 4))
        assert overlay_domain(base, {}) is base

    def test_empty_result(self):
        with pytest.raises(ConfigError):
            overlay_domain(Domain(int_range=(0, 5)), {"int_min": 6})
