"""On-disk and on-stdout formats: expansion files, certificate JSON, plot
CSV/SVG, LP dumps and geometry reports.

Every writer renders exact rationals as ``num/den`` and keeps a fixed field
order, so repeated runs produce byte-identical output.
"""

from __future__ import annotations

import csv
import json
import logging
from collections.abc import Sequence
from fractions import Fraction
from typing import IO

from .gegenbauer import GegenbauerExpansion
from .lpbound import Constraint, LPProblem, LPSolution
from .proofcheck import Certificate, ClaimResult, IdentityCheck
from .ratcore import (
    RationalInterval,
    format_decimal,
    format_fixed,
    format_rational,
    parse_rational,
)
from .spheregeom import CapLemmaReport, IcosahedronReport, Prop1Report, StressReport
from .types import FormatError, LPStatus, RationalParseError, Relation
from .version import FORMAT_VERSION, check_format_version

logger = logging.getLogger(__name__)

RATIO_PLACES = 8
PLOT_DIGITS = 12


def _interval(iv: RationalInterval | None) -> list[str] | None:
    if iv is None:
        return None
    return [format_rational(iv.lo), format_rational(iv.hi)]


def _rational(q: Fraction | None) -> str | None:
    return None if q is None else format_rational(q)


# ── Expansion files ───────────────────────────────────────────────────


def write_expansion(f: GegenbauerExpansion, fd: IO[str]) -> None:
    """``format``/``dim`` header, then one ``k num/den`` line per nonzero
    coefficient in increasing ``k``."""
    fd.write(f"format {FORMAT_VERSION}\n")
    fd.write(f"dim {f.dim}\n")
    for k, c in f.pairs():
        fd.write(f"{k} {c}\n")


def parse_expansion(text: str, source: str = "<expansion>") -> GegenbauerExpansion:
    dim: int | None = None
    coeffs: dict[int, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        where = f"{source}:{lineno}"
        if parts[0] == "format":
            if len(parts) != 2:
                raise FormatError(f"{where}: expected 'format <version>'")
            check_format_version(parts[1], "expansion file")
            continue
        if parts[0] == "dim":
            if len(parts) != 2 or not parts[1].isdigit():
                raise FormatError(f"{where}: expected 'dim <integer>'")
            dim = int(parts[1])
            continue
        if len(parts) != 2 or not parts[0].isdigit():
            raise FormatError(f"{where}: expected 'k num/den', got {raw.strip()!r}")
        k = int(parts[0])
        if k in coeffs:
            raise FormatError(f"{where}: duplicate coefficient for k={k}")
        try:
            coeffs[k] = parse_rational(parts[1])
        except RationalParseError as e:
            raise FormatError(f"{where}: {e}") from e
    if dim is None:
        raise FormatError(f"{source}: missing 'dim' header")
    return GegenbauerExpansion(dim, coeffs)


def read_expansion(path: str) -> GegenbauerExpansion:
    try:
        with open(path) as fd:
            text = fd.read()
    except OSError as e:
        raise FormatError(f"cannot read expansion file {path}: {e.strerror}") from e
    return parse_expansion(text, path)


# ── Certificates ──────────────────────────────────────────────────────


def _claim_dict(r: ClaimResult) -> dict:
    return {
        "id": str(r.claim_id),
        "verdict": str(r.verdict),
        "quantity": r.quantity,
        "interval": _interval(r.interval),
        "enclosure": _interval(r.enclosure),
        "bound": _rational(r.bound),
        "slack": _rational(r.slack),
        "evidence": r.evidence,
    }


def _identity_dict(i: IdentityCheck) -> dict:
    return {
        "name": i.name,
        "computed": _interval(i.computed),
        "expected": _interval(i.expected),
        "verdict": str(i.verdict),
        "holds": i.holds,
    }


def icosahedron_dict(r: IcosahedronReport) -> dict:
    return {
        "vertices": r.vertices,
        "max_cos": r.max_cos,
        "min_separation": r.min_separation,
        "worst_master_sum": r.worst_master_sum,
        "certified_master_sum": _interval(r.certified_master_sum),
        "threshold": format_rational(r.threshold),
        "ok": r.ok,
    }


def certificate_to_dict(cert: Certificate) -> dict:
    c = cert.constants
    ratio = cert.bound_ratio
    return {
        "format_version": FORMAT_VERSION,
        "verdict": str(cert.verdict),
        "function": {
            "dim": c.f.dim,
            "coefficients": [{"k": k, "c": v} for k, v in c.f.pairs()],
        },
        "threshold": format_rational(c.threshold),
        "enclosure_width": format_rational(c.enclosure_width),
        "intervals": {
            "negativity": _interval(c.negativity_interval),
            "one_point": _interval(c.one_point_interval),
            "two_point": _interval(c.two_point_interval),
            "shape": _interval(c.shape_interval),
            "three_point": _interval(c.three_point_interval),
        },
        "admissibility": {
            "ok": cert.admissibility.ok,
            "negative_indices": cert.admissibility.negative_indices,
        },
        "claims": [_claim_dict(r) for r in cert.claims],
        "identities": [_identity_dict(i) for i in cert.identities],
        "icosahedron": icosahedron_dict(cert.icosahedron),
        "bound": {
            "ratio": _rational(ratio),
            "decimal": None if ratio is None else format_fixed(ratio, RATIO_PLACES),
            "conclusion": cert.conclusion,
            "counting_slack": _rational(cert.counting_slack),
        },
        "assumptions": list(cert.assumptions),
    }


def render_certificate(cert: Certificate) -> str:
    return json.dumps(certificate_to_dict(cert), indent=2) + "\n"


def write_certificate(cert: Certificate, path: str) -> None:
    with open(path, "w") as fd:
        fd.write(render_certificate(cert))


def read_certificate(path: str) -> dict:
    try:
        with open(path) as fd:
            data = json.load(fd)
    except OSError as e:
        raise FormatError(f"cannot read certificate {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"certificate {path} is not valid JSON: {e.msg}") from e
    if not isinstance(data, dict) or "format_version" not in data:
        raise FormatError(f"certificate {path} has no format_version")
    check_format_version(str(data["format_version"]), "certificate")
    return data


# ── Plot data ─────────────────────────────────────────────────────────


def write_plot_csv(points: Sequence[tuple[Fraction, Fraction]], fd: IO[str]) -> None:
    writer = csv.writer(fd, lineterminator="\n")
    writer.writerow(["t", "f"])
    for t, v in points:
        writer.writerow([format_decimal(t, PLOT_DIGITS), format_decimal(v, PLOT_DIGITS)])


def write_plot_svg(points: Sequence[tuple[Fraction, Fraction]], path: str, title: str = "f(t)") -> None:
    """Standalone SVG line chart; hash salt and date are pinned."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "kissing-lp", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(8, 5))
        ax.plot([float(t) for t, _ in points], [float(v) for _, v in points], linewidth=1.5)
        ax.axhline(0.0, color="grey", linewidth=0.8)
        ax.set_xlabel("t")
        ax.set_ylabel("f(t)")
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


# ── LP dumps ──────────────────────────────────────────────────────────


def _row_line(con: Constraint) -> str:
    coeffs = " ".join(format_rational(a) for a in con.coeffs)
    return f"row {con.label or '-'} {con.relation} {format_rational(con.rhs)} : {coeffs}"


def write_lp_dump(problem: LPProblem, solution: LPSolution | None, fd: IO[str]) -> None:
    fd.write(f"format {FORMAT_VERSION}\n")
    fd.write(f"maximize {' '.join(format_rational(c) for c in problem.objective)}\n")
    for name, lb in zip(problem.var_names, problem.var_lower_bounds):
        fd.write(f"var {name} >= {format_rational(lb)}\n")
    for con in problem.constraints:
        fd.write(_row_line(con) + "\n")
    if solution is None:
        return
    fd.write(f"status {solution.status}\n")
    if solution.status == LPStatus.OPTIMAL:
        for name, v in zip(problem.var_names, solution.x):
            fd.write(f"x {name} {format_rational(v)}\n")
        fd.write(f"objective {format_rational(solution.objective_value)}\n")
    fd.write(f"active {' '.join(str(i) for i in solution.active)}\n")


def parse_lp_problem(text: str) -> LPProblem:
    """Read back the problem part of an LP dump."""
    objective: list[Fraction] | None = None
    names: list[str] = []
    bounds: list[Fraction] = []
    rows: list[Constraint] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        try:
            match parts[0]:
                case "format":
                    check_format_version(parts[1], "LP dump")
                case "maximize":
                    objective = [parse_rational(s) for s in parts[1:]]
                case "var":
                    names.append(parts[1])
                    bounds.append(parse_rational(parts[3]))
                case "row":
                    head, _, tail = raw.partition(" : ")
                    _, label, rel, rhs = head.split()
                    rows.append(
                        Constraint(
                            tuple(parse_rational(s) for s in tail.split()),
                            Relation(rel),
                            parse_rational(rhs),
                            "" if label == "-" else label,
                        )
                    )
                case _:
                    continue
        except (IndexError, ValueError) as e:
            raise FormatError(f"LP dump line {lineno}: {raw.strip()!r}") from e
    if objective is None:
        raise FormatError("LP dump has no 'maximize' line")
    return LPProblem(len(objective), objective, rows, bounds, names)


# ── Geometry reports ──────────────────────────────────────────────────


def cap_lemma_dict(r: CapLemmaReport) -> dict:
    return {
        "check": "cap-lemma",
        "verdict": str(r.verdict),
        "infimum": _interval(r.infimum),
        "minimizer_boxes": r.minimizer_boxes,
        "boxes_touch_corner": r.boxes_touch_corner,
        "nodes": r.nodes,
        "samples": r.samples,
        "seed": r.seed,
        "counterexamples": r.counterexamples,
        "worst_max_cos": r.worst_max_cos,
    }


def stress_dict(r: StressReport) -> dict:
    return {
        "check": "stress",
        "n_points": r.n_points,
        "trials": r.trials,
        "seed": r.seed,
        "worst": r.worst,
        "worst_trial": r.worst_trial,
        "exhausted": r.exhausted,
        "threshold": r.threshold,
        "ok": r.ok,
    }


def prop1_dict(r: Prop1Report) -> dict:
    return {
        "check": "prop1",
        "trials": r.trials,
        "seed": r.seed,
        "minimum": _rational(r.minimum),
        "failures": r.failures,
        "dims": {str(d): n for d, n in r.dims.items()},
        "ok": r.ok,
    }


def render_report(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"
