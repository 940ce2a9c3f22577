from dataclasses import dataclass, field
from enum import StrEnum


class KissingError(Exception):
    pass


class DomainError(KissingError, ValueError):
    """Mathematically invalid input (negative radicand, d < 3, c0 <= 0, ...)."""


class RationalParseError(KissingError, ValueError):
    pass


class PreconditionError(KissingError):
    """An algorithm was called outside its precondition (e.g. zero polynomial)."""


class ModeError(KissingError, TypeError):
    pass


class FormatError(KissingError, ValueError):
    """Unreadable expansion/certificate file or incompatible format version."""


class LPInfeasibleError(KissingError):
    pass


class RefinementError(KissingError):
    """Cutting-plane refinement ended without a certified polynomial."""


class SignTag(StrEnum):
    NONNEGATIVE = "NonnegativeOn"
    NONPOSITIVE = "NonpositiveOn"
    STRICTLY_NEGATIVE_INTERIOR = "StrictlyNegativeInterior"
    MIXED = "Mixed"


class Verdict(StrEnum):
    PASS = "Pass"
    FAIL = "Fail"
    INCONCLUSIVE = "Inconclusive"


class ClaimId(StrEnum):
    A_NEGATIVITY = "A_negativity"
    B_ONE_POINT = "B_one_point"
    C_MONOTONE_I = "C_monotone_I"
    D_TWO_POINT = "D_two_point"
    E_SHAPE_J = "E_shape_J"
    F_THREE_POINT = "F_three_point"


class Relation(StrEnum):
    LE = "<="
    EQ = "="
    GE = ">="


class LPStatus(StrEnum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class PointMode(StrEnum):
    EXACT = "ExactRational"
    FLOAT = "Float"


class GeomCheck(StrEnum):
    CAP_LEMMA = "cap-lemma"
    STRESS = "stress"
    ICOSAHEDRON = "icosahedron"
    PROP1 = "prop1"


class ExitCode:
    OK = 0
    FAILED = 1
    USAGE = 2
    INCONCLUSIVE = 3


@dataclass
class CliArgs:
    command: str
    out: str | None = None
    function: str | None = None
    threshold: str | None = None
    negate: list[int] = field(default_factory=list)
    compare: str | None = None
    precision_bits: int | None = None
    dim: int = 3
    cos_theta: str = "1/2"
    max_degree: int = 9
    grid: int | None = None
    refine_rounds: int | None = None
    dump: str | None = None
    support: list[int] = field(default_factory=list)
    t: str | None = None
    plot_from: str = "-1"
    plot_to: str = "1/2"
    samples: int = 500
    plot_format: str = "csv"
    check: str | None = None
    trials: int | None = None
    seed: int | None = None
    n_points: int = 12
    workers: int | None = None
    config: str | None = None
    save_config: str | None = None
    verbose: int = 0


@dataclass
class CommandOutcome:
    exit_code: int
    artifacts: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.exit_code == ExitCode.OK
