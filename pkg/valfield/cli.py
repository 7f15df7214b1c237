"""Command line entry point; maps library errors and oracle disagreement to exit codes."""
import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import codec, config
from .errors import OracleMismatchError, ParseError, ValuedFieldError
from .exact_linalg import Matrix, characteristic_polynomial, check_vector, smith_normal_form
from .linprog import LPStatus, solve_lp
from .models import ProblemFile, Task
from .oracle import (
    OracleReport, SampleGrid, check_ball_form, check_direct_image, check_lp, check_snf, preimage_exists,
    random_scalar, sample_polyhedron, sample_scalars,
)
from .polyhedron import (
    AffineMap, as_polydisc_image, canonical_ball_form, contains, direct_image, is_empty, minkowski_sum,
)
from .spectra import (
    is_psd, polyannulus_sdr, psd_newton_crosscheck, semialgebraic_description, spectrahedron_contains,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_ORACLE_MISMATCH = 3

Result = Tuple[Dict[str, Any], List[OracleReport]]

# (command, action) -> task
COMMANDS: Dict[Tuple[str, Optional[str]], Task] = {
    ("lp", None): Task.LP,
    ("snf", None): Task.SNF,
    ("psd", None): Task.PSD,
    ("poly", "project"): Task.POLY_PROJECT,
    ("poly", "member"): Task.POLY_MEMBER,
    ("poly", "empty"): Task.POLY_EMPTY,
    ("poly", "minkowski"): Task.POLY_MINKOWSKI,
    ("poly", "ball-form"): Task.BALL_FORM,
    ("poly", "polydisc"): Task.POLYDISC,
    ("sdr", "annulus"): Task.SDR_ANNULUS,
    ("spectra", "member"): Task.SPECTRA_MEMBER,
    ("spectra", "describe"): Task.SPECTRA_DESCRIBE,
}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", help="problem file (JSON), or - for standard input")
    common.add_argument("--verify", action="store_true", help="cross-check the result with the brute-force oracles")
    common.add_argument("--seed", type=int, default=None, help="seed for oracle sampling")
    common.add_argument("--field", default=None, help='field descriptor JSON, e.g. \'{"kind": "p-adic", "p": 5}\'')
    common.add_argument("-o", "--output", default=None, help="write the result JSON here instead of standard output")
    common.add_argument("--summary", action="store_true", help="print a human summary to standard error")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="valfield", description="Exact optimization and convex geometry over valued fields")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("lp", parents=[common], help="solve min/max val<c, x> s.t. Ax + b >= 0, Dx = e")
    commands.add_parser("snf", parents=[common], help="Smith Normal Form over the valuation ring")
    commands.add_parser("psd", parents=[common], help="positive semidefiniteness via the characteristic polynomial")
    groups = {
        "poly": ("polyhedron operations", ["project", "member", "empty", "minkowski", "ball-form", "polydisc"]),
        "sdr": ("semidefinite representations", ["annulus"]),
        "spectra": ("spectrahedra", ["member", "describe"]),
    }
    for name, (help_text, actions) in groups.items():
        group = commands.add_parser(name, help=help_text)
        sub = group.add_subparsers(dest="action", required=True)
        for action in actions:
            sub.add_parser(action, parents=[common])
    return parser


def load_problem(args: argparse.Namespace) -> ProblemFile:
    task = COMMANDS[(args.command, getattr(args, "action", None))]
    try:
        if args.problem == "-":
            text = sys.stdin.read()
        else:
            with open(args.problem, encoding="utf-8") as handle:
                text = handle.read()
    except UnicodeDecodeError as e:
        raise ParseError(f"{args.problem} is not valid UTF-8: {e}") from e
    return ProblemFile.from_json(json.loads(text), task, args.field, args.problem)


# Handlers return the result document and, when a sample grid is given, the oracle reports


def _solve_lp(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    instance = codec.lp_from_json(problem.field, problem.payload)
    outcome = solve_lp(instance)
    logger.info(f"LP over {problem.field} in {instance.n} variables: {outcome.status.value}")
    reports = [check_lp(instance, outcome, grid)] if grid else []
    return codec.outcome_to_json(outcome), reports


def _snf(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    M = codec.matrix_from_json(problem.field, problem.get("matrix"))
    decomposition = smith_normal_form(M)
    return codec.snf_to_json(decomposition), [check_snf(M, decomposition)] if grid else []


def _psd(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    M = codec.matrix_from_json(problem.field, problem.get("matrix"))
    verdict = is_psd(M)
    result = {"psd": verdict, "charpoly": codec.polynomial_to_json(characteristic_polynomial(M))}
    if not grid:
        return result, []
    crosscheck = psd_newton_crosscheck(M)
    violations = () if crosscheck == verdict else (f"Newton polygon gives psd={crosscheck}",)
    return result, [OracleReport("psd_newton", 1, violations)]


def _project(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    P = codec.polyhedron_from_json(problem.field, problem.get("polyhedron"))
    f = codec.affine_map_from_json(problem.field, problem.get("map"), P.n)
    image = direct_image(f, P)
    reports = [check_direct_image(f, P, image, grid)] if grid else []
    return {"polyhedron": codec.polyhedron_to_json(image)}, reports


def _member(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    P = codec.polyhedron_from_json(problem.field, problem.get("polyhedron"))
    x = codec.vector_from_json(problem.field, problem.get("point"), "point")
    inside = contains(P, x)
    if not grid:
        return {"contains": inside}, []
    # x lies in P exactly when the fibre of the identity map over x meets P
    fibre = preimage_exists(AffineMap.linear(Matrix.identity(problem.field, P.n)), P, x)
    violations = () if fibre == inside else (f"fibre test gives {fibre}",)
    return {"contains": inside}, [OracleReport("membership", 1, violations)]


def _empty(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    P = codec.polyhedron_from_json(problem.field, problem.get("polyhedron"))
    result = is_empty(P)
    if not grid:
        return codec.emptiness_to_json(result), []
    violations = ()
    if result.witness is not None and not contains(P, result.witness):
        violations = ("witness lies outside the polyhedron",)
    return codec.emptiness_to_json(result), [OracleReport("emptiness_witness", 1, violations)]


def _minkowski(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    left = codec.polyhedron_from_json(problem.field, problem.get("left"), "left")
    right = codec.polyhedron_from_json(problem.field, problem.get("right"), "right")
    total = minkowski_sum(left, right)
    result = {"polyhedron": codec.polyhedron_to_json(total)}
    if not grid:
        return result, []
    identity = Matrix.identity(problem.field, left.n)
    sum_map = AffineMap.linear(Matrix.hstack(identity, identity))
    return result, [check_direct_image(sum_map, left.product(right), total, grid)]


def _ball_form(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    P = codec.polyhedron_from_json(problem.field, problem.get("polyhedron"))
    ball = canonical_ball_form(P)
    return {"ball": codec.ball_to_json(ball)}, [check_ball_form(P, ball, grid)] if grid else []


def _polydisc(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    P = codec.polyhedron_from_json(problem.field, problem.get("polyhedron"))
    result = {"polydisc": codec.polydisc_to_json(as_polydisc_image(P))}
    if not grid:
        return result, []
    try:
        points = sample_polyhedron(P, grid)
    except OracleMismatchError as e:
        return result, [OracleReport("polydisc", 1, (str(e),))]
    return result, [OracleReport("polydisc", len(points))]


def _sdr_annulus(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    annuli = codec.annuli_from_json(problem.payload)
    sdr = polyannulus_sdr(problem.field, annuli)
    result = codec.sdr_to_json(sdr)
    if "point" in problem.payload:
        result["contains"] = sdr.contains(codec.vector_from_json(problem.field, problem.get("point"), "point"))
    if not grid:
        return result, []
    samples = list(sample_scalars(grid))
    violations = tuple(
        f"membership of {s} in every coordinate differs"
        for s in samples
        if sdr.contains(tuple(s for _ in annuli)) != all(annulus.contains(s) for annulus in annuli)
    )
    return result, [OracleReport("sdr_annulus", len(samples), violations)]


def _spectra_member(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    pencil = codec.pencil_from_json(problem.field, problem.get("pencil"))
    section = None
    if "section" in problem.payload:
        section = codec.polyhedron_from_json(problem.field, problem.get("section"), "section")
    x = check_vector(codec.vector_from_json(problem.field, problem.get("point"), "point"), pencil.n, problem.field)
    inside = spectrahedron_contains(pencil, x, section)
    if not grid:
        return {"contains": inside}, []
    expected = semialgebraic_description(pencil).contains(x) and (section is None or contains(section, x))
    violations = () if inside == expected else ("characteristic polynomial coefficients disagree",)
    return {"contains": inside}, [OracleReport("spectra_member", 1, violations)]


def _spectra_describe(problem: ProblemFile, grid: Optional[SampleGrid]) -> Result:
    pencil = codec.pencil_from_json(problem.field, problem.get("pencil"))
    description = semialgebraic_description(pencil)
    result = codec.description_to_json(description)
    if not grid:
        return result, []
    rng = grid.rng()
    points = [tuple(random_scalar(grid, rng) for _ in range(pencil.n)) for _ in range(config.ORACLE_RANDOM_POINTS)]
    violations = tuple(
        f"membership of {[str(v) for v in x]} differs"
        for x in points if description.contains(x) != spectrahedron_contains(pencil, x)
    )
    return result, [OracleReport("spectra_describe", len(points), violations)]


HANDLERS: Dict[Task, Callable[[ProblemFile, Optional[SampleGrid]], Result]] = {
    Task.LP: _solve_lp,
    Task.SNF: _snf,
    Task.PSD: _psd,
    Task.POLY_PROJECT: _project,
    Task.POLY_MEMBER: _member,
    Task.POLY_EMPTY: _empty,
    Task.POLY_MINKOWSKI: _minkowski,
    Task.BALL_FORM: _ball_form,
    Task.POLYDISC: _polydisc,
    Task.SDR_ANNULUS: _sdr_annulus,
    Task.SPECTRA_MEMBER: _spectra_member,
    Task.SPECTRA_DESCRIBE: _spectra_describe,
}


def _join(values: Sequence[str]) -> str:
    return "(" + ", ".join(values) + ")"


def _ball_summary(ball: Dict[str, Any]) -> str:
    if ball["kind"] == "empty":
        return "the empty set"
    if ball["kind"] == "all":
        return "the whole field"
    return f"the ball of centre {ball['center']} and radius valuation {ball['radius']}"


def render_summary(result: Dict[str, Any]) -> str:
    """One-paragraph human reading of a result document"""
    if "type" in result:
        status = result["type"]
        if status == LPStatus.FEAS.value:
            text = f"feasible; optimal valuation {result['value']}; attained at x = {_join(result['x'])}"
        elif status == LPStatus.INFEAS.value:
            text = f"infeasible: {result['reason']}" if result.get("reason") else "infeasible"
        else:
            text = f"unbounded: {result['reason']}" if result.get("reason") else "unbounded"
    elif "exponents" in result:
        text = f"Smith normal form of rank {result['rank']}; invariant exponents {result['exponents']}"
    elif "psd" in result:
        verdict = "positive semidefinite" if result["psd"] else "not positive semidefinite"
        text = f"{verdict}; characteristic polynomial coefficients {_join(result['charpoly'])}"
    elif "ball" in result:
        text = _ball_summary(result["ball"])
    elif "empty" in result:
        text = "empty" if result["empty"] else f"nonempty; witness x = {_join(result['witness'])}"
    elif "polydisc" in result:
        text = f"image of a polydisc in {len(result['polydisc']['discs'])} coordinates"
    elif "polyhedron" in result:
        P = result["polyhedron"]
        text = f"polyhedron in K^{P['n']} with {P['A']['rows']} inequalities and {P['B']['rows']} equalities"
    elif "height" in result:
        text = f"semidefinite representation of degree {result['d']} and height {result['height']}"
        if "contains" in result:
            text += "; the point is a member" if result["contains"] else "; the point is not a member"
    elif "coefficients" in result:
        text = f"spectrahedron cut out by {len(result['coefficients'])} integrality conditions"
    elif "contains" in result:
        text = "member" if result["contains"] else "not a member"
    else:
        text = "no summary available"
    if "oracle" in result:
        text += "; oracle agrees" if result["oracle"]["agree"] else "; oracle disagrees"
    return text


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, solve the problem file and print the result JSON; returns the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR

    try:
        problem = load_problem(args)
        grid = SampleGrid.default(problem.field, seed=args.seed) if args.verify else None
        logger.info(f"Running {problem.task.value} over {problem.field}")
        result, reports = HANDLERS[problem.task](problem, grid)
    except OracleMismatchError as e:
        logger.error(f"Oracle failure: {e}")
        print(f"valfield: oracle mismatch: {e}", file=sys.stderr)
        return EXIT_ORACLE_MISMATCH
    except (ValuedFieldError, json.JSONDecodeError, OSError) as e:
        logger.error(f"Cannot process {args.problem}: {e}")
        print(f"valfield: error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    if args.verify:
        result["oracle"] = codec.reports_to_json(reports)
    _emit(json.dumps(result, sort_keys=True, separators=(",", ":")), args.output)
    if args.summary:
        print(render_summary(result), file=sys.stderr)
    if args.verify and not result["oracle"]["agree"]:
        logger.warning(f"Oracle disagreement on {problem.task.value}")
        return EXIT_ORACLE_MISMATCH
    return EXIT_OK
