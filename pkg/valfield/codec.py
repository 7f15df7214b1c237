"""JSON shapes read and written by the command line.

Scalars travel as canonical strings (integers are accepted on input),
valuations as integers or "inf".
"""
from typing import Any, Dict, List, Optional, Sequence

from .errors import ParseError
from .exact_linalg import Matrix, SNFDecomposition, UniPolynomial, Vector
from .linprog import MINIMIZE, LPInstance, LPOutcome, LPStatus
from .oracle import OracleReport
from .polyhedron import BALL_FINITE, AffineMap, Ball, EmptinessResult, Polyhedron, PolydiscImage
from .spectra import Annulus, Pencil, SDRepresentation, SemialgebraicDescription
from .valued_scalar import ExtValuation, FieldDescriptor, ValuedScalar, parse_scalar, render_scalar


def _expect(raw: Any, kind: type, what: str) -> Any:
    if not isinstance(raw, kind) or isinstance(raw, bool):
        raise ParseError(f"{what} must be a JSON {kind.__name__}, got {raw!r}")
    return raw


def scalar_from_json(descriptor: FieldDescriptor, raw: Any) -> ValuedScalar:
    return parse_scalar(descriptor, raw)


def vector_from_json(descriptor: FieldDescriptor, raw: Any, what: str = "vector") -> Vector:
    return tuple(scalar_from_json(descriptor, x) for x in _expect(raw, list, what))


def vector_to_json(x: Sequence[ValuedScalar]) -> List[str]:
    return [render_scalar(value) for value in x]


def matrix_from_json(descriptor: FieldDescriptor, raw: Any, cols: Optional[int] = None,
                     what: str = "matrix") -> Matrix:
    """{"rows", "cols", "entries"} or a bare list of rows; ``cols`` fixes the width of an empty list"""
    if isinstance(raw, dict):
        try:
            rows, width, entries = raw["rows"], raw["cols"], raw["entries"]
        except KeyError as e:
            raise ParseError(f"{what} is missing {e.args[0]!r}") from e
        entries = _expect(entries, list, f"{what} entries")
        if len(entries) != _expect(rows, int, f"{what} rows"):
            raise ParseError(f"{what} declares {rows} rows but lists {len(entries)}")
        cols = _expect(width, int, f"{what} cols")
    else:
        entries = _expect(raw, list, what)
    parsed = [vector_from_json(descriptor, row, f"{what} row") for row in entries]
    return Matrix.from_rows(descriptor, parsed, cols=cols)


def matrix_to_json(M: Matrix) -> Dict[str, Any]:
    return {"rows": M.rows, "cols": M.cols, "entries": [vector_to_json(M.row(i)) for i in range(M.rows)]}


def polyhedron_from_json(descriptor: FieldDescriptor, raw: Any, what: str = "polyhedron") -> Polyhedron:
    raw = _expect(raw, dict, what)
    if "n" not in raw:
        raise ParseError(f"{what} needs the ambient dimension n")
    n = _expect(raw["n"], int, f"{what} n")
    A = matrix_from_json(descriptor, raw.get("A", []), cols=n, what=f"{what} A")
    B = matrix_from_json(descriptor, raw.get("B", []), cols=n, what=f"{what} B")
    v = vector_from_json(descriptor, raw.get("v", []), f"{what} v")
    w = vector_from_json(descriptor, raw.get("w", []), f"{what} w")
    return Polyhedron(descriptor, n, A, v, B, w)


def polyhedron_to_json(P: Polyhedron) -> Dict[str, Any]:
    return {
        "n": P.n,
        "A": matrix_to_json(P.A), "v": vector_to_json(P.v),
        "B": matrix_to_json(P.B), "w": vector_to_json(P.w),
    }


def affine_map_from_json(descriptor: FieldDescriptor, raw: Any, source_dim: int) -> AffineMap:
    raw = _expect(raw, dict, "map")
    if "F" not in raw:
        raise ParseError("map needs a linear part F")
    F = matrix_from_json(descriptor, raw["F"], cols=source_dim, what="map F")
    g = vector_from_json(descriptor, raw["g"], "map g") if "g" in raw else tuple(descriptor.zero for _ in range(F.rows))
    return AffineMap(F, g)


def lp_from_json(descriptor: FieldDescriptor, payload: Dict[str, Any]) -> LPInstance:
    c = vector_from_json(descriptor, payload["c"], "c")
    n = len(c)
    return LPInstance(
        matrix_from_json(descriptor, payload["A"], cols=n, what="A"),
        vector_from_json(descriptor, payload["b"], "b"),
        c,
        matrix_from_json(descriptor, payload.get("D", []), cols=n, what="D"),
        vector_from_json(descriptor, payload.get("e", []), "e"),
        payload.get("sense", MINIMIZE),
    )


def valuation_to_json(value: ExtValuation) -> Any:
    return value.to_json()


def outcome_to_json(outcome: LPOutcome) -> Dict[str, Any]:
    result: Dict[str, Any] = {"type": outcome.status.value}
    if outcome.status == LPStatus.FEAS:
        result["x"] = vector_to_json(outcome.point)
        result["value"] = valuation_to_json(outcome.value)
        return result
    result["reason"] = outcome.reason
    if outcome.ray is not None:
        result["ray"] = {
            "base": vector_to_json(outcome.ray.base),
            "direction": vector_to_json(outcome.ray.direction),
            "index": outcome.ray.index,
        }
    return result


def snf_to_json(decomposition: SNFDecomposition) -> Dict[str, Any]:
    return {
        "Q": matrix_to_json(decomposition.Q),
        "S": matrix_to_json(decomposition.S),
        "P": matrix_to_json(decomposition.P),
        "exponents": list(decomposition.invariant_exponents),
        "rank": decomposition.rank,
    }


def polynomial_to_json(f: UniPolynomial) -> List[str]:
    return f.render()


def ball_to_json(ball: Ball) -> Dict[str, Any]:
    if ball.kind != BALL_FINITE:
        return {"kind": ball.kind}
    return {"kind": ball.kind, "center": render_scalar(ball.center), "radius": valuation_to_json(ball.radius)}


def emptiness_to_json(result: EmptinessResult) -> Dict[str, Any]:
    return {"empty": result.empty, "witness": None if result.witness is None else vector_to_json(result.witness)}


def polydisc_to_json(image: PolydiscImage) -> Dict[str, Any]:
    return {
        "base_point": vector_to_json(image.base_point),
        "linear_part": matrix_to_json(image.linear_part),
        "discs": [[render_scalar(s), render_scalar(c)] for s, c in image.discs],
    }


def pencil_from_json(descriptor: FieldDescriptor, raw: Any) -> Pencil:
    raw = _expect(raw, dict, "pencil")
    for key in ("d", "n", "A"):
        if key not in raw:
            raise ParseError(f"pencil is missing {key!r}")
    d = _expect(raw["d"], int, "pencil d")
    matrices = [
        matrix_from_json(descriptor, M, cols=d, what=f"pencil matrix {k}")
        for k, M in enumerate(_expect(raw["A"], list, "pencil A"))
    ]
    return Pencil(descriptor, d, _expect(raw["n"], int, "pencil n"), tuple(matrices))


def pencil_to_json(pencil: Pencil) -> Dict[str, Any]:
    return {"d": pencil.size, "n": pencil.n, "A": [matrix_to_json(M) for M in pencil.matrices]}


def sdr_to_json(sdr: SDRepresentation) -> Dict[str, Any]:
    result = pencil_to_json(sdr.pencil)
    result["height"] = sdr.height
    return result


def annuli_from_json(payload: Dict[str, Any]) -> List[Annulus]:
    """Either "annuli": [[a, b], ...] or a single pair "a", "b" """
    if "annuli" in payload:
        pairs = _expect(payload["annuli"], list, "annuli")
        if not pairs:
            raise ParseError("annuli must not be empty")
        annuli = []
        for pair in pairs:
            if not isinstance(pair, list) or len(pair) != 2:
                raise ParseError(f"annulus must be a pair [a, b], got {pair!r}")
            annuli.append(Annulus(pair[0], pair[1]))
        return annuli
    if "a" not in payload or "b" not in payload:
        raise ParseError("sdr-annulus needs annuli or the bounds a and b")
    return [Annulus(payload["a"], payload["b"])]


def description_to_json(description: SemialgebraicDescription) -> Dict[str, Any]:
    return {"variables": list(description.variables[:description.n]), "coefficients": description.render()}


def reports_to_json(reports: Sequence[OracleReport]) -> Dict[str, Any]:
    return {"agree": all(report.agrees for report in reports), "checks": [report.to_json() for report in reports]}
