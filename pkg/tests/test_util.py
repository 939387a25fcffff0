import pytest

from painleve_gap.consts import THREADS_ENV_VAR
from painleve_gap.exceptions import ConfigError
from painleve_gap.util import parse_grid, smooth_max, thread_count, value_or_none


class TestValueOrNone:
    """Blank strings become None."""

    def test_values(self):
        assert value_or_none(None) is None
        assert value_or_none("   ") is None
        assert value_or_none(" a ") == "a"


class TestParseGrid:
    """Grid descriptions."""

    def test_range(self):
        assert parse_grid("-1:1:5") == [-1.0, -0.5, 0.0, 0.5, 1.0]

    def test_list(self):
        assert parse_grid("1, 2.5,,-3") == [1.0, 2.5, -3.0]

    @pytest.mark.parametrize("text", ["", "  ", ",", "0:1:0", "a,b", "0:1"])
    def test_bad(self, text):
        with pytest.raises(ConfigError):
            parse_grid(text)


class TestThreadCount:
    """Worker threads capped by the environment."""

    def test_cap(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "2")
        assert thread_count() == 2
        assert thread_count(8) == 2
        assert thread_count(0) == 1

    def test_bad_cap(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "many")
        with pytest.raises(ConfigError):
            thread_count()


def test_smooth_max():
    assert smooth_max(10.0, 0.0) == pytest.approx(10.0, abs=0.03)
    assert smooth_max(0.0, 0.0) == pytest.approx(0.5)
