"""Headless command runners behind the ``kissing`` CLI.

Each runner takes the parsed :class:`CliArgs`, the effective
:class:`VerifierConfig` and a console, and returns a :class:`CommandOutcome`.
Data goes to stdout or to the requested file; progress goes to the log.
"""

from __future__ import annotations

import dataclasses
import logging
import sys
from collections.abc import Callable
from fractions import Fraction

from rich.console import Console

from .config import VerifierConfig
from .formats import (
    cap_lemma_dict,
    icosahedron_dict,
    prop1_dict,
    read_expansion,
    render_certificate,
    render_report,
    stress_dict,
    write_expansion,
    write_lp_dump,
    write_plot_csv,
    write_plot_svg,
)
from .gegenbauer import GegenbauerExpansion, expansion_to_poly
from .lpbound import classical_bound, extended_search
from .proofcheck import (
    THRESHOLD,
    default_constants,
    kissing_f,
    run_full_verification,
    with_function,
    with_negated,
    with_threshold,
)
from .ratcore import format_decimal, format_fixed, format_rational, parse_rational
from .spheregeom import config_stress, icosahedron_report, prop1_trials, verify_cap_lemma
from .types import (
    CliArgs,
    CommandOutcome,
    DomainError,
    ExitCode,
    FormatError,
    GeomCheck,
    KissingError,
    LPInfeasibleError,
    LPStatus,
    RationalParseError,
    RefinementError,
    Verdict,
)

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = {
    GeomCheck.CAP_LEMMA: 100_000,
    GeomCheck.STRESS: 200,
    GeomCheck.ICOSAHEDRON: 1,
    GeomCheck.PROP1: 500,
}


def _load_function(args: CliArgs) -> GegenbauerExpansion:
    return read_expansion(args.function) if args.function else kissing_f()


def _threshold(args: CliArgs) -> Fraction:
    return parse_rational(args.threshold) if args.threshold else THRESHOLD


def _write_text(path: str, text: str) -> None:
    with open(path, "w") as fd:
        fd.write(text)


def cmd_verify(args: CliArgs, config: VerifierConfig, console: Console) -> CommandOutcome:
    if args.precision_bits is not None:
        if args.precision_bits < 1:
            raise DomainError(f"precision must be a positive number of bits, got {args.precision_bits}")
        config = dataclasses.replace(config, enclosure_bits=args.precision_bits)
    constants = default_constants(config)
    if args.function:
        constants = with_function(constants, read_expansion(args.function))
    if args.threshold:
        constants = with_threshold(constants, parse_rational(args.threshold))
    for k in args.negate:
        constants = with_negated(constants, k)

    cert = run_full_verification(constants, config)
    text = render_certificate(cert)
    artifacts = []
    if args.out:
        try:
            _write_text(args.out, text)
        except OSError as e:
            console.print(f"cannot write certificate to {args.out}: {e.strerror}")
            return CommandOutcome(ExitCode.USAGE)
        artifacts.append(args.out)

    for claim in cert.claims:
        slack = "" if claim.slack is None else f"  slack {format_decimal(claim.slack, 4)}"
        console.print(f"{claim.claim_id:<14} {claim.verdict}{slack}")
    if not cert.admissibility.ok:
        console.print(f"negative Gegenbauer coefficients at k = {cert.admissibility.negative_indices}")
    if not cert.has_positive_c0:
        console.print("no positive constant term: no bound follows")
    for identity in cert.identities:
        if not identity.holds:
            console.print(f"endpoint identity {identity.name}: {identity.verdict}")
    if not cert.icosahedron.ok:
        console.print("icosahedron witness exceeds the threshold")
    if cert.bound_ratio is not None:
        console.print(
            f"N <= {format_rational(cert.bound_ratio)} ~ {format_fixed(cert.bound_ratio, 8)}"
        )

    if args.compare:
        try:
            with open(args.compare) as fd:
                previous = fd.read()
        except OSError as e:
            console.print(f"cannot read {args.compare}: {e.strerror}")
            return CommandOutcome(ExitCode.USAGE, artifacts)
        if previous != text:
            console.print(f"certificate differs from {args.compare}")
            return CommandOutcome(ExitCode.FAILED, artifacts)
        console.print(f"certificate matches {args.compare}")

    match cert.verdict:
        case Verdict.PASS:
            console.print(f"kissing(3) ≤ {cert.conclusion} — CERTIFIED")
            return CommandOutcome(ExitCode.OK, artifacts)
        case Verdict.INCONCLUSIVE:
            console.print("verification INCONCLUSIVE")
            return CommandOutcome(ExitCode.INCONCLUSIVE, artifacts)
        case _:
            console.print("verification FAILED")
            return CommandOutcome(ExitCode.FAILED, artifacts)


def cmd_bound(args: CliArgs, config: VerifierConfig, console: Console) -> CommandOutcome:
    cos_theta = parse_rational(args.cos_theta)
    try:
        result = classical_bound(
            args.dim, cos_theta, args.max_degree, args.grid, args.refine_rounds, config
        )
    except LPInfeasibleError as e:
        console.print(str(e))
        return CommandOutcome(ExitCode.FAILED)
    except RefinementError as e:
        console.print(str(e))
        return CommandOutcome(ExitCode.INCONCLUSIVE)

    report = result.refine
    console.print(
        f"d={result.d} cos_theta={format_rational(result.cos_theta)} degree={result.degree}"
    )
    console.print(f"grid LP value {format_decimal(result.grid_value)}")
    console.print(
        f"refinement: {report.rounds} rounds, {report.cuts} cuts, c0 shift {format_rational(report.shift)}"
    )
    console.print(f"certified bound {format_rational(result.bound)}")
    console.print(f"certified bound ~ {format_decimal(result.bound)}")
    artifacts = []
    if args.dump:
        with open(args.dump, "w") as fd:
            write_lp_dump(report.problem, report.solution, fd)
        artifacts.append(args.dump)
    return CommandOutcome(ExitCode.OK, artifacts)


def cmd_search(args: CliArgs, config: VerifierConfig, console: Console) -> CommandOutcome:
    grids = args.grid if args.grid is not None else config.extended_grid
    if args.refine_rounds is not None:
        config = dataclasses.replace(config, refine_rounds=args.refine_rounds)
    result = extended_search(args.support, _threshold(args), grids, config)

    if result.solution.status != LPStatus.OPTIMAL:
        console.print(f"extended LP is {result.solution.status}")
        return CommandOutcome(ExitCode.FAILED)
    f = result.expansion
    if f is None or f.c0 <= 0:
        console.print("no positive constant term: no bound follows")
        return CommandOutcome(ExitCode.FAILED)
    if not result.certified:
        console.print(f"refinement failed: {result.refine.message}")
        return CommandOutcome(ExitCode.INCONCLUSIVE)

    console.print(f"c0 = {format_rational(f.c0)} ~ {format_decimal(f.c0)}")
    console.print(f"N <= {format_fixed(result.ratio, 8)}, floor {result.max_n}")
    if result.refine.rounds or result.refine.shift:
        console.print(
            f"refinement: {result.refine.rounds} rounds, {result.refine.cuts} cuts, "
            f"c0 shift {format_rational(result.refine.shift)}"
        )
    if args.out:
        with open(args.out, "w") as fd:
            write_expansion(f, fd)
        return CommandOutcome(ExitCode.OK, [args.out])
    write_expansion(f, sys.stdout)
    return CommandOutcome(ExitCode.OK)


def cmd_eval(args: CliArgs, config: VerifierConfig, console: Console) -> CommandOutcome:
    if args.t is None:
        raise DomainError("eval needs --t")
    t = parse_rational(args.t)
    if not -1 <= t <= 1:
        raise DomainError(f"t must lie in [-1, 1], got {format_rational(t)}")
    value = expansion_to_poly(_load_function(args))(t)
    console.print(format_rational(value))
    console.print(format_decimal(value))
    return CommandOutcome(ExitCode.OK)


def cmd_plot(args: CliArgs, config: VerifierConfig, console: Console) -> CommandOutcome:
    lo, hi = parse_rational(args.plot_from), parse_rational(args.plot_to)
    if lo >= hi:
        raise DomainError(f"empty plot range [{args.plot_from}, {args.plot_to}]")
    if args.samples < 2:
        raise DomainError(f"need at least 2 samples, got {args.samples}")
    p = expansion_to_poly(_load_function(args))
    n = args.samples
    ts = [lo + (hi - lo) * j / (n - 1) for j in range(n)]
    points = [(t, p(t)) for t in ts]

    if args.plot_format == "svg":
        path = args.out or "plot.svg"
        write_plot_svg(points, path)
        return CommandOutcome(ExitCode.OK, [path])
    if args.out:
        with open(args.out, "w", newline="") as fd:
            write_plot_csv(points, fd)
        return CommandOutcome(ExitCode.OK, [args.out])
    write_plot_csv(points, sys.stdout)
    return CommandOutcome(ExitCode.OK)


def cmd_geom(args: CliArgs, config: VerifierConfig, console: Console) -> CommandOutcome:
    try:
        check = GeomCheck(args.check)
    except ValueError:
        raise DomainError(f"unknown check {args.check!r}") from None
    trials = args.trials if args.trials is not None else DEFAULT_TRIALS[check]
    seed = args.seed if args.seed is not None else config.seed
    workers = config.workers
    threshold = _threshold(args)

    match check:
        case GeomCheck.CAP_LEMMA:
            cap = verify_cap_lemma(trials, seed, workers=workers)
            data = cap_lemma_dict(cap)
            ok = cap.verdict == Verdict.PASS
            console.print(
                f"cos-rule infimum {cap.infimum}, {cap.counterexamples} counterexamples in {cap.samples} samples"
            )
        case GeomCheck.STRESS:
            stress = config_stress(args.n_points, trials, seed, _load_function(args), threshold, workers)
            data = stress_dict(stress)
            ok = stress.ok
            console.print(f"worst master sum {stress.worst!r} over {stress.trials} trials")
        case GeomCheck.ICOSAHEDRON:
            ico = icosahedron_report(_load_function(args), threshold, config.enclosure_width)
            data = icosahedron_dict(ico) | {"check": "icosahedron"}
            ok = ico.ok
            console.print(
                f"{ico.vertices} vertices, max cos {ico.max_cos!r}, "
                f"master sum <= {format_decimal(ico.certified_master_sum.hi)}"
            )
        case GeomCheck.PROP1:
            prop1 = prop1_trials(trials, seed, workers)
            data = prop1_dict(prop1)
            ok = prop1.ok
            minimum = "-" if prop1.minimum is None else format_rational(prop1.minimum)
            console.print(f"{prop1.trials} exact trials, minimum quadratic form {minimum}")

    text = render_report(data)
    artifacts = []
    if args.out:
        _write_text(args.out, text)
        artifacts.append(args.out)
    else:
        sys.stdout.write(text)
    return CommandOutcome(ExitCode.OK if ok else ExitCode.FAILED, artifacts)


COMMANDS: dict[str, Callable[[CliArgs, VerifierConfig, Console], CommandOutcome]] = {
    "verify": cmd_verify,
    "bound": cmd_bound,
    "search": cmd_search,
    "eval": cmd_eval,
    "plot": cmd_plot,
    "geom": cmd_geom,
}


def run_command(args: CliArgs, config: VerifierConfig, console: Console) -> CommandOutcome:
    """Dispatch ``args.command``; user errors become exit codes, not tracebacks."""
    try:
        return COMMANDS[args.command](args, config, console)
    except (DomainError, RationalParseError, FormatError) as e:
        console.print(f"error: {e}")
        return CommandOutcome(ExitCode.USAGE)
    except OSError as e:
        console.print(f"error: {e.filename}: {e.strerror}")
        return CommandOutcome(ExitCode.USAGE)
    except KissingError as e:
        logger.debug("command failed", exc_info=True)
        console.print(f"error: {e}")
        return CommandOutcome(ExitCode.FAILED)
