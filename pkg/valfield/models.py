"""Problem files and the tasks they declare."""
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from .config import DEFAULT_FIELD
from .errors import ParseError, ValidationError
from .valued_scalar import FieldDescriptor


class Task(str, Enum):
    """Task tags a problem file may declare"""
    LP = "lp"
    SNF = "snf"
    PSD = "psd"
    POLY_PROJECT = "poly-project"
    POLY_MEMBER = "poly-member"
    POLY_EMPTY = "poly-empty"
    POLY_MINKOWSKI = "poly-minkowski"
    BALL_FORM = "ball-form"
    POLYDISC = "polydisc"
    SDR_ANNULUS = "sdr-annulus"
    SPECTRA_MEMBER = "spectra-member"
    SPECTRA_DESCRIBE = "spectra-describe"


# Payload keys every task needs
REQUIRED_KEYS: Dict[Task, Tuple[str, ...]] = {
    Task.LP: ("A", "b", "c"),
    Task.SNF: ("matrix",),
    Task.PSD: ("matrix",),
    Task.POLY_PROJECT: ("polyhedron", "map"),
    Task.POLY_MEMBER: ("polyhedron", "point"),
    Task.POLY_EMPTY: ("polyhedron",),
    Task.POLY_MINKOWSKI: ("left", "right"),
    Task.BALL_FORM: ("polyhedron",),
    Task.POLYDISC: ("polyhedron",),
    Task.SDR_ANNULUS: (),
    Task.SPECTRA_MEMBER: ("pencil", "point"),
    Task.SPECTRA_DESCRIBE: ("pencil",),
}


def parse_field(raw: Any) -> FieldDescriptor:
    """Field descriptor from a JSON string or an already decoded object"""
    if isinstance(raw, str):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ParseError(f"Field descriptor is not valid JSON: {e}") from e
    return FieldDescriptor.from_json(raw)


@dataclass
class ProblemFile:
    """A decoded problem file: the field, the task and its payload"""
    field: FieldDescriptor
    task: Task
    payload: Dict[str, Any] = field(default_factory=dict)
    source: str = "-"

    @classmethod
    def from_json(cls, data: Any, task: Task, field_override: Optional[str] = None,
                  source: str = "-") -> "ProblemFile":
        """Validate the top-level shape; the field comes from --field, the file, or the configured default"""
        if not isinstance(data, dict):
            raise ParseError(f"{source}: problem file must hold a JSON object")
        declared = data.get("task")
        if declared is not None and declared != task.value:
            raise ValidationError(f"{source}: file declares task {declared!r} but {task.value!r} was requested")
        if field_override is not None:
            descriptor = parse_field(field_override)
        elif "field" in data:
            descriptor = parse_field(data["field"])
        else:
            descriptor = parse_field(DEFAULT_FIELD)
        payload = {key: value for key, value in data.items() if key not in ("field", "task")}
        problem = cls(descriptor, task, payload, source)
        problem.require(*REQUIRED_KEYS[task])
        return problem

    def require(self, *keys: str) -> None:
        missing = [key for key in keys if key not in self.payload]
        if missing:
            raise ParseError(f"{self.source}: task {self.task.value} needs {', '.join(missing)}")

    def get(self, key: str, default: Any = None) -> Any:
        return self.payload.get(key, default)
