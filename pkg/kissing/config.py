from dataclasses import asdict, dataclass, fields
from fractions import Fraction
import json
import os
import tempfile

from .ratcore import width_from_bits


def _load_config_json_file(file_name: str, defaults):
    path = os.path.expanduser(file_name)
    if not os.path.exists(path):
        return defaults
    with open(path, "r") as f:
        try:
            config = json.load(f)
        except (json.JSONDecodeError, ValueError):
            config = defaults
    if not isinstance(config, dict):
        return defaults
    return config


@dataclass
class VerifierConfig:
    enclosure_bits: int = 67
    bnb_eps_digits: int = 9
    bnb_max_depth: int = 60
    isolation_bits: int = 40
    classical_grid: int = 200
    extended_grid: int = 512
    refine_rounds: int = 8
    seed: int = 7
    workers: int = 1

    @property
    def enclosure_width(self) -> Fraction:
        """Width of every irrational endpoint enclosure (2**-67 < 1e-20 by default)."""
        return width_from_bits(self.enclosure_bits)

    @property
    def bnb_eps(self) -> Fraction:
        return Fraction(1, 10**self.bnb_eps_digits)

    @property
    def isolation_width(self) -> Fraction:
        return width_from_bits(self.isolation_bits)


def load_config(path: str | None = None) -> VerifierConfig:
    if path is None:
        return VerifierConfig()
    data = _load_config_json_file(path, {})
    # Only pass known fields to avoid errors from stale config keys
    known = {f.name for f in fields(VerifierConfig)}
    filtered = {k: v for k, v in data.items() if k in known and isinstance(v, int)}
    return VerifierConfig(**filtered)


def save_config(config: VerifierConfig, path: str):
    path = os.path.expanduser(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            json.dump(asdict(config), f, indent=4)
        os.replace(tmp_path, path)
    except BaseException:
        os.unlink(tmp_path)
        raise
