"""Request and response models for the scenario-driven API.

The scenario schema is strict: unknown fields are rejected so typos
surface as parse errors rather than silently ignored options.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DecompositionSpec(StrictModel):
    values: list[float] = Field(min_length=2, max_length=2)
    measurementAxis: Literal["x", "y", "z"]


class HamiltonianSpec(StrictModel):
    vector: list[float] = Field(min_length=3, max_length=3)
    offset: float = 0.0
    decomposition: Optional[DecompositionSpec] = None


class TimeSpec(StrictModel):
    mode: Literal["auto", "continuous", "discrete"] = "auto"
    tMax: float = Field(gt=0.0)
    dt: Optional[float] = Field(default=None, gt=0.0)
    steps: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _one_resolution(self):
        if self.dt is None and self.steps is None:
            raise ValueError("time requires dt or steps")
        return self


class InlineTheory(StrictModel):
    name: str = "custom"
    vertices: Optional[list[list[float]]] = None
    constraints: Optional[list[dict]] = None

    @model_validator(mode="after")
    def _one_body(self):
        if (self.vertices is None) == (self.constraints is None):
            raise ValueError("inline theory takes exactly one of vertices/constraints")
        return self


class Scenario(StrictModel):
    theory: Union[str, InlineTheory]
    hamiltonian: HamiltonianSpec
    time: TimeSpec
    initialState: list[float] = Field(min_length=3, max_length=3)
    checks: list[Literal["OBS", "GEN", "INV", "QUAN"]] = Field(
        default_factory=lambda: ["OBS", "GEN", "INV", "QUAN"]
    )
    seed: int = 0


# ---------------------------------------------------------------------------
# responses


class EvolutionSpecOut(BaseModel):
    mode: str
    minimalTime: Optional[float] = None
    minimalAngle: Optional[float] = None
    description: str = ""
    trivial: bool = False


class TheoryInfo(BaseModel):
    name: str
    body: str
    continuousAxes: Union[str, list[list[float]]]
    groupOrder: Optional[int] = None
    rotationOrder: Optional[int] = None
    restriction: Optional[str] = None


class TheoriesResponse(BaseModel):
    theories: list[TheoryInfo]


class TrajectoryOut(BaseModel):
    times: list[float]
    states: list[list[float]]
    energies: list[float]
    energyDrift: float


class EvolveResponse(BaseModel):
    theory: str
    evolutionSpec: EvolutionSpecOut
    trajectory: TrajectoryOut
    energyConstant: bool


class DesideratumOut(BaseModel):
    name: str
    passed: Optional[bool]
    diagnostics: dict


class VerifyResponse(BaseModel):
    theory: str
    evolutionSpec: EvolutionSpecOut
    desiderata: list[DesideratumOut]
    requested: list[str]
    allRequestedPass: bool


class GroupElementOut(BaseModel):
    matrix: list[list[float]]
    kind: str
    axis: Optional[list[float]]
    angle: float
    det: float


class SymmetryResponse(BaseModel):
    theory: str
    continuousAxes: Union[str, list[list[float]]]
    groupOrder: Optional[int] = None
    rotationOrder: Optional[int] = None
    elements: list[GroupElementOut] = Field(default_factory=list)


class PhaseGroupResponse(BaseModel):
    theory: str
    measurement: str
    finiteOrder: int
    finiteElements: list[GroupElementOut]
    continuousDimension: int
    continuousBasis: list[list[list[float]]]


class EnergyPairIn(StrictModel):
    i: int
    j: int
    tau: float


class EnergyRequest(StrictModel):
    pairs: list[EnergyPairIn] = Field(min_length=1)


class EnergyResponse(BaseModel):
    labels: list[int]
    energies: list[float]
    residual: float
    note: str


class LiouvilleRequest(StrictModel):
    potential: Literal["free", "harmonic"] = "free"
    grid: int = 16
    tMax: float = 1.0


class LiouvilleResponse(BaseModel):
    potential: str
    gridSize: int
    antisymmetryDefect: float
    orthogonalityDefect: float
    l2Drift: float
