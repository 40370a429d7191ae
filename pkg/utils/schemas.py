"""JSON scenario files: pydantic models and conversion to workbench objects."""

import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from aps.boundary import BoundaryCondition, aps, nearly_aps
from aps.solver import CylinderProblem
from config import MAIN_SUITES, SCHEMA_VERSION, SUITE_CONFIGS
from numeric.fields import field_for_ell
from numeric.subspaces import Subspace
from numeric.tolerances import ToleranceConfig, get_tolerances
from operators.adapted import AdaptedOperator
from operators.cylinders import make_cylinder
from orientation.bordism import BordismScenario
from utils.errors import DimensionMismatchError, UsageError

logger = logging.getLogger(__name__)

SCENARIO_KINDS = ("operator", "cylinder_problem", "bordism_scenario", "suite_config")

Matrix = List[List[float]]


def _as_matrix(rows: Optional[Matrix], shape: Optional[List[int]] = None) -> Optional[np.ndarray]:
    if rows is None:
        return None
    M = np.asarray(rows, dtype=float)
    if shape is not None:
        M = M.reshape(shape)
    elif M.ndim == 1:
        M = M.reshape((M.shape[0], 0) if M.size == 0 else (1, -1))
    return M


class OperatorPayload(BaseModel):
    """Real entries of an l-adapted model with its field tag and optional structure maps."""

    model_config = ConfigDict(extra="forbid")

    ell: int = Field(ge=0, le=7)
    field: Optional[Literal["R", "C", "H"]] = None
    entries: Matrix
    shape: Optional[List[int]] = None
    struct_I: Optional[Matrix] = None
    struct_J: Optional[Matrix] = None
    target_I: Optional[Matrix] = None
    target_J: Optional[Matrix] = None

    @field_validator("entries")
    @classmethod
    def _rectangular(cls, rows: Matrix) -> Matrix:
        if len({len(r) for r in rows}) > 1:
            raise ValueError("entries must be a rectangular matrix")
        return rows

    @model_validator(mode="after")
    def _field_matches(self) -> "OperatorPayload":
        expected = field_for_ell(self.ell).value
        if self.field is not None and self.field != expected:
            raise ValueError(f"l={self.ell} needs field {expected}, got {self.field}")
        if self.shape is not None and len(self.shape) != 2:
            raise ValueError("shape must have two entries")
        return self

    def to_operator(self) -> AdaptedOperator:
        data = self.model_dump()
        data["field"] = self.field or field_for_ell(self.ell).value
        if self.shape is None and not self.entries:
            data["shape"] = [0, 0]
        return AdaptedOperator.from_dict(data)

    @classmethod
    def from_operator(cls, D: AdaptedOperator) -> "OperatorPayload":
        data = D.to_dict()
        data.pop("components", None)
        return cls(**data)


class EndCondition(BaseModel):
    """One boundary condition: APS(delta), nearly APS with a basis of L, or a spanned subspace."""

    model_config = ConfigDict(extra="forbid")

    type: Literal["aps", "nearly_aps", "subspace"]
    delta: Optional[float] = None
    side: Optional[Literal["minus", "plus"]] = None
    basis: Optional[Matrix] = None

    @model_validator(mode="after")
    def _complete(self) -> "EndCondition":
        if self.type in ("aps", "nearly_aps") and self.delta is None:
            raise ValueError(f"{self.type} condition needs delta")
        if self.type == "subspace" and self.basis is None:
            raise ValueError("subspace condition needs a basis")
        return self

    def build(self, A: np.ndarray, cfg: ToleranceConfig) -> BoundaryCondition:
        """The condition on the boundary whose operator is A; basis rows are vectors."""
        n = A.shape[0]
        vectors = np.asarray(self.basis or [], dtype=float).reshape(-1, n).T
        if self.type == "aps":
            return aps(A, self.delta, cfg, self.side)
        span = Subspace.span(vectors, cfg.rank_tol) if vectors.shape[1] else Subspace.zero(n, cfg.rank_tol)
        if self.type == "nearly_aps":
            return nearly_aps(A, self.delta, span, cfg)
        return BoundaryCondition(span, label="subspace")


class CylinderProblemPayload(BaseModel):
    """Cyl(D) on [0, length] with end conditions, a gluing map or a full boundary condition."""

    model_config = ConfigDict(extra="forbid")

    operator: OperatorPayload
    length: float = Field(gt=0)
    end0: Optional[EndCondition] = None
    endL: Optional[EndCondition] = None
    monodromy: Optional[Matrix] = None
    boundary: Optional[EndCondition] = None

    @model_validator(mode="after")
    def _one_condition(self) -> "CylinderProblemPayload":
        separated = self.end0 is not None and self.endL is not None
        given = sum([separated, self.monodromy is not None, self.boundary is not None])
        if given != 1 and self.operator.entries:
            raise ValueError("give exactly one of end0+endL, monodromy or boundary")
        return self

    def to_problem(self, cfg: ToleranceConfig) -> CylinderProblem:
        cyl = make_cylinder(self.operator.to_operator())
        n = cyl.dim
        if n == 0:
            return CylinderProblem(cyl, self.length, boundary=BoundaryCondition(Subspace.zero(0), label="empty"))
        if self.monodromy is not None:
            g = _as_matrix(self.monodromy)
            if g.shape != (n, n):
                raise DimensionMismatchError(f"Monodromy of shape {g.shape} on W of dim {n}")
            return CylinderProblem(cyl, self.length, monodromy=g)
        if self.boundary is not None:
            A_b = np.block([[cyl.A, np.zeros((n, n))], [np.zeros((n, n)), -cyl.A]])
            return CylinderProblem(cyl, self.length, boundary=self.boundary.build(A_b, cfg))
        return CylinderProblem(cyl, self.length, end0=self.end0.build(cyl.A, cfg),
                               endL=self.endL.build(-cyl.A, cfg))


class SegmentPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    operator: OperatorPayload
    length: float = Field(gt=0)


class BordismScenarioPayload(BaseModel):
    """Piecewise constant collar, near end first."""

    model_config = ConfigDict(extra="forbid")

    segments: List[SegmentPayload] = Field(min_length=1)
    label: str = ""

    def to_scenario(self) -> BordismScenario:
        return BordismScenario(tuple((s.operator.to_operator(), s.length) for s in self.segments), self.label)


class SuiteConfigPayload(BaseModel):
    """Which suites to run; trials and seed fall back to the command line."""

    model_config = ConfigDict(extra="forbid")

    suites: List[str] = Field(default_factory=lambda: ["all"])
    trials: Optional[int] = Field(default=None, ge=1)
    ells: Optional[List[int]] = None
    mutate_sign: bool = False

    @field_validator("suites")
    @classmethod
    def _known(cls, suites: List[str]) -> List[str]:
        known = set(SUITE_CONFIGS) | set(MAIN_SUITES) | {"all"}
        unknown = [s for s in suites if s not in known]
        if unknown:
            raise ValueError(f"unknown suites {unknown}")
        return suites

    @field_validator("ells")
    @classmethod
    def _residues(cls, ells: Optional[List[int]]) -> Optional[List[int]]:
        if ells is not None and any(not 0 <= e <= 7 for e in ells):
            raise ValueError("ells must lie in 0..7")
        return ells


PAYLOAD_MODELS = {
    "operator": OperatorPayload,
    "cylinder_problem": CylinderProblemPayload,
    "bordism_scenario": BordismScenarioPayload,
    "suite_config": SuiteConfigPayload
}

Payload = Union[OperatorPayload, CylinderProblemPayload, BordismScenarioPayload, SuiteConfigPayload]


class ScenarioFile(BaseModel):
    """Self-describing input file for every command."""

    model_config = ConfigDict(extra="forbid")

    schema_version: int = SCHEMA_VERSION
    kind: Literal["operator", "cylinder_problem", "bordism_scenario", "suite_config"]
    payload: Payload
    seed: Optional[int] = None
    tolerances: Optional[Union[str, ToleranceConfig]] = None

    @model_validator(mode="before")
    @classmethod
    def _typed_payload(cls, data: Any) -> Any:
        if isinstance(data, dict) and isinstance(data.get("payload"), dict):
            model = PAYLOAD_MODELS.get(data.get("kind"))
            if model is not None:
                data = {**data, "payload": model.model_validate(data["payload"])}
        return data

    @model_validator(mode="after")
    def _version(self) -> "ScenarioFile":
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"schema_version {self.schema_version} is not supported (expected {SCHEMA_VERSION})")
        if not isinstance(self.payload, PAYLOAD_MODELS[self.kind]):
            raise ValueError(f"payload does not match kind '{self.kind}'")
        return self

    def resolve_tolerances(self) -> ToleranceConfig:
        if isinstance(self.tolerances, ToleranceConfig):
            return self.tolerances
        return get_tolerances(self.tolerances)


def load_scenario_file(path: Union[str, Path], expected_kind: Optional[str] = None) -> ScenarioFile:
    """Read and validate a scenario file; I/O and schema problems become usage errors."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"Cannot read scenario file {path}: {e}")
    try:
        scenario = ScenarioFile.model_validate_json(text)
    except ValidationError as e:
        raise UsageError(f"Invalid scenario file {path}", {"errors": e.errors(include_url=False,
                                                                               include_context=False)})
    if expected_kind is not None and scenario.kind != expected_kind:
        raise UsageError(f"Expected a '{expected_kind}' scenario, got '{scenario.kind}'")
    logger.info(f"Loaded {scenario.kind} scenario from {path}")
    return scenario
