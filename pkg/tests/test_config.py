import pytest

from gramdisp.config import DEFAULT_STOP_POS, RunConfig, env_overrides, resolve_config
from gramdisp.errors import ConfigError


def test_defaults():
    config = RunConfig(threads=1)
    assert config.window == 2
    assert config.log_base == 2.0
    assert config.stop_pos == DEFAULT_STOP_POS
    assert config.match_field == "surface"
    assert config.include_missing
    assert config.allowed_pos is None


def test_fingerprint_ignores_run_settings(tmp_path):
    a = RunConfig(output_dir=tmp_path / "a", threads=1, batch_size=10, progress=True)
    b = RunConfig(output_dir=tmp_path / "b", threads=8, ledger_url="sqlite://")
    assert a.fingerprint == b.fingerprint
    assert a.fingerprint != RunConfig(window=1, threads=1).fingerprint


def test_pos_lists_from_strings():
    config = RunConfig(stop_pos="KON, ART,ART", allowed_pos="APPR", threads=1)
    assert config.stop_pos == ("ART", "KON")
    assert config.allowed_pos == ("APPR",)
    assert RunConfig(stop_pos="none", allowed_pos="", threads=1).stop_pos == ()
    assert RunConfig(allowed_pos="", threads=1).allowed_pos is None


def test_echo_lines_cover_analysis_fields():
    lines = RunConfig(threads=1).echo_lines()
    keys = [line.split("=", 1)[0] for line in lines]
    assert keys == sorted(keys)
    assert "window=2" in lines
    assert "allowed_pos=none" in lines
    assert "case_fold=true" in lines


def test_resolution_order(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# comment\nwindow=3\nmin-count=4\nlog_base=10\n", encoding="utf-8")
    environ = {"GRAMDISP_WINDOW": "5", "GRAMDISP_MIN_COUNT": "6", "HOME": "/root"}
    config = resolve_config(path, {"window": 7, "threads": None}, environ)
    assert config.window == 7
    assert config.min_count == 6
    assert config.log_base == 10.0


def test_env_overrides_prefix():
    assert env_overrides({"GRAMDISP_AP_TIES": "expected", "PATH": "/bin"}) == {"ap_ties": "expected"}


def test_unknown_key(tmp_path):
    with pytest.raises(ConfigError, match="windw"):
        resolve_config(overrides={"windw": 3}, environ={})


@pytest.mark.parametrize(
    "overrides",
    [{"window": 0}, {"log_base": 1}, {"min_count": -1}, {"match_field": "pos"}, {"ap_ties": "random"}],
)
def test_invalid_values(overrides):
    with pytest.raises(ConfigError):
        resolve_config(overrides=overrides, environ={})


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        resolve_config(tmp_path / "absent.conf", environ={})
