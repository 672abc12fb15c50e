"""HTTP facade over the runner functions.

Error mapping: invalid scenarios and unknown names produce 400/422,
inadmissible dynamics (off-lattice times, no admissible evolution,
inconsistent period data) produce 409 so clients can distinguish bad
input from physically rejected requests.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query

from ..errors import (
    DimensionError,
    DisconnectedGraphError,
    GptHamError,
    InconsistentCycleError,
    InvalidTimeError,
    NoAdmissibleEvolutionError,
    NotAStateError,
    UnsupportedSpaceError,
)
from . import runner
from .schemas import (
    EnergyRequest,
    EnergyResponse,
    EvolveResponse,
    LiouvilleRequest,
    LiouvilleResponse,
    PhaseGroupResponse,
    Scenario,
    SymmetryResponse,
    TheoriesResponse,
    VerifyResponse,
)

_BAD_REQUEST = (
    DimensionError,
    DisconnectedGraphError,
    NotAStateError,
    UnsupportedSpaceError,
    ValueError,
)
_REJECTED = (InvalidTimeError, NoAdmissibleEvolutionError, InconsistentCycleError)


def _run(fn, *args):
    try:
        return fn(*args)
    except _REJECTED as exc:
        detail = {"message": str(exc)}
        if isinstance(exc, InvalidTimeError) and exc.minimal_time is not None:
            detail["minimalTime"] = exc.minimal_time
        raise HTTPException(status_code=409, detail=detail) from exc
    except _BAD_REQUEST as exc:
        raise HTTPException(status_code=400, detail={"message": str(exc)}) from exc
    except GptHamError as exc:
        raise HTTPException(status_code=400, detail={"message": str(exc)}) from exc


def create_app() -> FastAPI:
    app = FastAPI(title="gptham", version="1.0")

    @app.get("/v1/theories", response_model=TheoriesResponse)
    def theories():
        return _run(runner.theories_info)

    @app.post("/v1/evolve", response_model=EvolveResponse)
    def evolve(scenario: Scenario):
        return _run(runner.evolve_scenario, scenario)

    @app.post("/v1/verify", response_model=VerifyResponse)
    def verify(scenario: Scenario):
        return _run(runner.verify_scenario, scenario)

    @app.get("/v1/symmetry", response_model=SymmetryResponse)
    def symmetry(theory: str = Query(...), rotations_only: bool = Query(False)):
        return _run(runner.symmetry_info, theory, rotations_only)

    @app.get("/v1/phase-group", response_model=PhaseGroupResponse)
    def phase_group(theory: str = Query(...), measurement: str = Query(...)):
        return _run(runner.phase_group_info, theory, measurement)

    @app.post("/v1/energy", response_model=EnergyResponse)
    def energy(request: EnergyRequest):
        return _run(runner.energy_info, request)

    @app.post("/v1/liouville", response_model=LiouvilleResponse)
    def liouville(request: LiouvilleRequest):
        return _run(runner.liouville_info, request)

    return app


app = create_app()
