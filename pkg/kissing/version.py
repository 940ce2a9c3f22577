"""Version utilities for kissing-lp."""

from importlib.metadata import version as get_pkg_version, PackageNotFoundError

from packaging.version import InvalidVersion, Version

from .types import FormatError

FORMAT_VERSION = "1.0"


def get_version() -> str:
    """Return the installed version string, or ``'unknown'``."""
    try:
        return get_pkg_version("kissing-lp")
    except PackageNotFoundError:
        return "unknown"


def check_format_version(found: str, kind: str = "file") -> Version:
    """Accept files written by any format with the same major version or older."""
    try:
        parsed = Version(found)
    except InvalidVersion as e:
        raise FormatError(f"{kind} has an invalid format version {found!r}") from e
    if parsed.major > Version(FORMAT_VERSION).major:
        raise FormatError(
            f"{kind} format {parsed} is newer than supported format {FORMAT_VERSION}"
        )
    return parsed
