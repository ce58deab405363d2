import pytest

from nrollpyutils.envcfg import DefaultValue, load_env_file, resolve_defaults

pytestmark = [pytest.mark.unit]

SCHEMA = {
    "COTRAIN_THREADS": DefaultValue(None, int),
    "NROLL_RUNS_DIR": DefaultValue("runs", str),
    "NROLL_FLAG": DefaultValue("no", bool),
}


class TestDefaultValue:
    @pytest.mark.parametrize("raw, expected", [("4", 4), (" 1_000 ", 1000), ("", None), ("None", None), ("-2", -2)])
    def test_int(self, raw, expected):
        assert DefaultValue(None, int).coerce_value(raw) == expected

    def test_bad_int(self):
        with pytest.raises(ValueError, match="not an integer"):
            DefaultValue(None, int).coerce_value("four")

    @pytest.mark.parametrize("raw, expected", [("yes", True), ("0", False), ("On", True)])
    def test_bool(self, raw, expected):
        assert DefaultValue(None, bool).coerce_value(raw) is expected

    def test_bad_bool(self):
        with pytest.raises(ValueError):
            DefaultValue(None, bool).coerce_value("maybe")

    def test_default_is_coerced(self):
        assert SCHEMA["NROLL_FLAG"].default_value is False


def test_precedence(tmp_path):
    env_file = tmp_path / "run.env"
    env_file.write_text("NROLL_RUNS_DIR=/data/runs\n# comment\nOTHER=x\n", encoding="utf-8")
    file_cfg = load_env_file(env_file, SCHEMA)
    assert file_cfg == {"NROLL_RUNS_DIR": "/data/runs", "OTHER": "x"}

    got = resolve_defaults(SCHEMA, file_cfg, environ={"COTRAIN_THREADS": "3", "NROLL_RUNS_DIR": "/env/runs"})
    assert got == {"COTRAIN_THREADS": 3, "NROLL_RUNS_DIR": "/data/runs", "NROLL_FLAG": False}
    assert resolve_defaults(SCHEMA, environ={})["NROLL_RUNS_DIR"] == "runs"


def test_missing_env_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_env_file(tmp_path / "absent.env", SCHEMA)
