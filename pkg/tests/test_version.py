import pytest

from kissing.types import FormatError
from kissing.version import FORMAT_VERSION, check_format_version, get_version


class TestVersion:
    def test_get_version_is_a_string(self):
        assert isinstance(get_version(), str)

    def test_current_format_accepted(self):
        assert str(check_format_version(FORMAT_VERSION)) == FORMAT_VERSION

    def test_older_minor_accepted(self):
        check_format_version("1.0.1")
        check_format_version("0.9")

    def test_newer_major_rejected(self):
        with pytest.raises(FormatError, match="newer"):
            check_format_version("2.0", "certificate")

    def test_invalid_version_rejected(self):
        with pytest.raises(FormatError):
            check_format_version("one")
