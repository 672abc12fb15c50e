"""Scenario execution shared by the HTTP service and the CLI.

Every endpoint body lives here as a pure function from request models
to response models, so the CLI can run in-process with identical
behavior to the network service.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .. import dynamics, liouville, phase, statespace, symmetry
from ..errors import UnsupportedSpaceError
from .schemas import (
    DesideratumOut,
    EnergyRequest,
    EnergyResponse,
    EvolutionSpecOut,
    EvolveResponse,
    GroupElementOut,
    HamiltonianSpec,
    LiouvilleRequest,
    LiouvilleResponse,
    PhaseGroupResponse,
    Scenario,
    SymmetryResponse,
    TheoriesResponse,
    TheoryInfo,
    TimeSpec,
    TrajectoryOut,
    VerifyResponse,
)

_ENERGY_TOL = 1e-9


# ---------------------------------------------------------------------------
# scenario assembly


def space_from_theory(theory) -> statespace.StateSpace:
    if isinstance(theory, str):
        return statespace.builtin_theory(theory)
    if theory.vertices is not None:
        return statespace.polytope_space(theory.vertices, name=theory.name)
    return statespace.constraint_space(theory.constraints, name=theory.name)


def hamiltonian_from_spec(spec: HamiltonianSpec) -> dynamics.Hamiltonian:
    vector = np.asarray(spec.vector, dtype=float)
    decomposition = None
    if spec.decomposition is not None:
        meas = statespace.canonical_measurements()[spec.decomposition.measurementAxis]
        decomposition = statespace.observable_from_values(
            spec.decomposition.values, meas
        )
        if np.max(np.abs(decomposition.weight - 0.5 * vector)) > 1e-10:
            raise ValueError(
                "decomposition weight does not equal half the Hamiltonian vector"
            )
    return dynamics.Hamiltonian(
        vector=vector, offset=spec.offset, decomposition=decomposition
    )


def build_grid(time: TimeSpec) -> np.ndarray:
    if time.dt is not None:
        count = int(math.floor(time.tMax / time.dt + 1e-9))
        return time.dt * np.arange(count + 1)
    return np.linspace(0.0, time.tMax, time.steps + 1)


def _spec_out(spec: dynamics.EvolutionSpec) -> EvolutionSpecOut:
    return EvolutionSpecOut(
        mode=spec.mode,
        minimalTime=spec.minimal_time,
        minimalAngle=spec.minimal_angle,
        description=spec.description,
        trivial=spec.trivial,
    )


# ---------------------------------------------------------------------------
# endpoints


def evolve_scenario(scenario: Scenario) -> EvolveResponse:
    space = space_from_theory(scenario.theory)
    hamiltonian = hamiltonian_from_spec(scenario.hamiltonian)
    spec = dynamics.allowed_times(space, hamiltonian)
    grid = build_grid(scenario.time)
    traj = dynamics.trajectory(space, hamiltonian, scenario.initialState, grid)
    drift = float(np.max(np.abs(traj.energies - traj.energies[0])))
    return EvolveResponse(
        theory=space.name,
        evolutionSpec=_spec_out(spec),
        trajectory=TrajectoryOut(
            times=[float(t) for t in traj.times],
            states=[[float(x) for x in row] for row in traj.states],
            energies=[float(e) for e in traj.energies],
            energyDrift=drift,
        ),
        energyConstant=drift <= _ENERGY_TOL,
    )


def verify_scenario(scenario: Scenario) -> VerifyResponse:
    space = space_from_theory(scenario.theory)
    hamiltonian = hamiltonian_from_spec(scenario.hamiltonian)
    spec = dynamics.allowed_times(space, hamiltonian)
    report = dynamics.verify_desiderata(space, hamiltonian, seed=scenario.seed)
    outcomes = [
        DesideratumOut(
            name=r.name, passed=r.passed, diagnostics=_jsonable(r.diagnostics)
        )
        for r in report.results
    ]
    requested = list(scenario.checks)
    ok = all(r.passed is not False for r in report.results if r.name in requested)
    return VerifyResponse(
        theory=space.name,
        evolutionSpec=_spec_out(spec),
        desiderata=outcomes,
        requested=requested,
        allRequestedPass=ok,
    )


def theories_info() -> TheoriesResponse:
    infos = []
    for name in statespace.BUILTIN_THEORIES:
        space = statespace.builtin_theory(name)
        axes = symmetry.continuous_axes(space)
        entry = TheoryInfo(
            name=name,
            body=type(space.body).__name__.lower(),
            continuousAxes=axes if axes == "all" else [list(a) for a in axes],
            restriction=space.transform_restriction,
        )
        if space.vertices is not None:
            group = symmetry.full_symmetry_group(space)
            entry = entry.model_copy(
                update={
                    "groupOrder": group.order,
                    "rotationOrder": group.rotation_subgroup().order,
                }
            )
        infos.append(entry)
    return TheoriesResponse(theories=infos)


def _element_out(matrix: np.ndarray) -> GroupElementOut:
    cls = symmetry.axis_angle(matrix)
    return GroupElementOut(
        matrix=[[float(x) for x in row] for row in matrix],
        kind=cls.kind,
        axis=None if cls.axis is None else [float(x) for x in cls.axis],
        angle=float(cls.angle),
        det=float(round(cls.det)),
    )


def symmetry_info(theory: str, rotations_only: bool = False) -> SymmetryResponse:
    space = statespace.builtin_theory(theory)
    axes = symmetry.continuous_axes(space)
    out = SymmetryResponse(
        theory=space.name,
        continuousAxes=axes if axes == "all" else [list(a) for a in axes],
    )
    if space.vertices is None:
        return out
    group = symmetry.full_symmetry_group(space)
    rotations = group.rotation_subgroup()
    listed = rotations if rotations_only else group
    return out.model_copy(
        update={
            "groupOrder": group.order,
            "rotationOrder": rotations.order,
            "elements": [_element_out(g) for g in listed.elements],
        }
    )


def phase_group_info(theory: str, measurement: str) -> PhaseGroupResponse:
    space = statespace.builtin_theory(theory)
    if measurement not in space.measurements:
        raise UnsupportedSpaceError(
            f"theory {theory!r} has no measurement {measurement!r}"
        )
    result = phase.phase_group(space, space.measurements[measurement])
    return PhaseGroupResponse(
        theory=space.name,
        measurement=measurement,
        finiteOrder=result.finite_part.order,
        finiteElements=[_element_out(g) for g in result.finite_part.elements],
        continuousDimension=result.continuous_part.dimension,
        continuousBasis=[
            [[float(x) for x in row] for row in g] for g in result.continuous_part.basis
        ],
    )


def energy_info(request: EnergyRequest) -> EnergyResponse:
    assignment = phase.assign_energies([(p.i, p.j, p.tau) for p in request.pairs])
    return EnergyResponse(
        labels=[int(x) for x in assignment.labels],
        energies=[float(e) for e in assignment.energies],
        residual=assignment.residual,
        note=assignment.note,
    )


def liouville_info(request: LiouvilleRequest) -> LiouvilleResponse:
    grid = liouville.PhaseSpaceGrid(nx=request.grid, np_=request.grid)
    if request.potential == "free":
        vprime = liouville.free_particle_vprime
    else:
        vprime = liouville.harmonic_vprime(grid.x_length)
    lmat = liouville.liouville_matrix(grid, vprime, name=request.potential)

    from scipy.linalg import expm

    flow = expm(-request.tMax * lmat.matrix)
    ortho = float(np.max(np.abs(flow.T @ flow - np.eye(grid.size))))
    values = np.zeros(grid.size)
    values[(grid.nx // 4) * grid.np_ + (3 * grid.np_) // 4] = 1.0
    rho0 = liouville.DensityField(values=values, grid=grid)
    evolved = liouville.liouville_evolve(lmat, rho0, request.tMax)
    drift = abs(float(np.linalg.norm(evolved)) - rho0.l2_norm)
    return LiouvilleResponse(
        potential=request.potential,
        gridSize=grid.size,
        antisymmetryDefect=lmat.antisymmetry_defect,
        orthogonalityDefect=ortho,
        l2Drift=drift,
    )


# ---------------------------------------------------------------------------
# serialization helpers


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return _jsonable(dataclasses.asdict(value))
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    return repr(value)
