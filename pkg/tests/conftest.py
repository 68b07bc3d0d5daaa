import pytest


@pytest.fixture
def write_file(tmp_path):
    """Factory writing a UTF-8 file under the test's tmp dir."""

    def _write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return _write
