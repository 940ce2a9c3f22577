from fractions import Fraction

import pytest

from kissing.config import VerifierConfig
from kissing.proofcheck import default_constants, kissing_f
from kissing.ratcore import RationalInterval
from kissing.types import CliArgs


@pytest.fixture
def config():
    return VerifierConfig()


@pytest.fixture
def f_kissing():
    return kissing_f()


@pytest.fixture
def constants(config):
    return default_constants(config)


@pytest.fixture
def unit_interval():
    return RationalInterval(Fraction(-1), Fraction(1))


@pytest.fixture
def cli_args_factory():
    """Factory for creating CliArgs with sensible defaults."""

    def _make(command="verify", **overrides):
        return CliArgs(command=command, **overrides)

    return _make


@pytest.fixture
def expansion_file(tmp_path):
    """Write an expansion file and return its path."""

    def _write(text, name="f.expansion"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write
