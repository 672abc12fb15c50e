"""Scenario-driven command line.

Subcommands wrap the service runner; by default everything runs
in-process, while ``--server URL`` sends the same requests to a running
HTTP service.  Exit codes: 0 success, 2 check failure, 64 usage or
parse error, 65 inadmissible dynamics.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import plotting
from .errors import (
    GptHamError,
    InconsistentCycleError,
    InvalidTimeError,
    NoAdmissibleEvolutionError,
)
from .service import runner
from .service.schemas import (
    EnergyPairIn,
    EnergyRequest,
    LiouvilleRequest,
    Scenario,
)

EXIT_OK = 0
EXIT_CHECK = 2
EXIT_USAGE = 64
EXIT_DYNAMICS = 65


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default; the contract reserves 2 for
    # failed checks and uses 64 for usage problems
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    common.add_argument("--server", default=None,
                        help="base URL of a running service; default is in-process")

    parser = _Parser(prog="gptham", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("list-theories", parents=[common]).set_defaults(fn=cmd_list_theories)

    p = sub.add_parser("evolve", parents=[common])
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.add_argument("--plane", choices=sorted(plotting.PLANES), default="xy")
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--scenario", required=True)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("symmetry", parents=[common])
    p.add_argument("--theory", required=True)
    p.add_argument("--rotations-only", action="store_true")
    p.set_defaults(fn=cmd_symmetry)

    p = sub.add_parser("phase-group", parents=[common])
    p.add_argument("--theory", required=True)
    p.add_argument("--measurement", required=True, choices=("x", "y", "z"))
    p.set_defaults(fn=cmd_phase_group)

    p = sub.add_parser("energy", parents=[common])
    p.add_argument("--periods", required=True,
                   help="CSV of rows i,j,tau (one observed period per row)")
    p.set_defaults(fn=cmd_energy)

    p = sub.add_parser("liouville", parents=[common])
    p.add_argument("--potential", choices=("free", "harmonic"), default="free")
    p.add_argument("--grid", type=int, default=16)
    p.add_argument("--t-max", type=float, default=1.0)
    p.set_defaults(fn=cmd_liouville)

    p = sub.add_parser("serve", parents=[common])
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InvalidTimeError, NoAdmissibleEvolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if getattr(exc, "minimal_time", None) is not None:
            print(f"minimal admissible time: {exc.minimal_time!r}", file=sys.stderr)
        return EXIT_DYNAMICS
    except InconsistentCycleError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (_UsageError, ValidationError, GptHamError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


# ---------------------------------------------------------------------------
# transport


class _Client:
    """Dispatches to the runner, in-process or over HTTP."""

    def __init__(self, server: str | None):
        self.server = server

    def call(self, fn, *args, route=None, payload=None, params=None, model=None):
        if self.server is None:
            return fn(*args)
        import httpx

        with httpx.Client(base_url=self.server, timeout=60.0) as http:
            if payload is not None:
                resp = http.post(route, json=payload)
            else:
                resp = http.get(route, params=params or {})
        if resp.status_code == 409:
            detail = resp.json().get("detail", {})
            message = detail.get("message", "rejected dynamics")
            if "minimalTime" in detail:
                raise InvalidTimeError(message, minimal_time=detail["minimalTime"])
            if "inconsistent" in message:
                raise InconsistentCycleError(message)
            raise NoAdmissibleEvolutionError(message)
        if resp.status_code >= 400:
            raise _UsageError(f"server rejected request ({resp.status_code}): {resp.text}")
        return model.model_validate(resp.json())


# ---------------------------------------------------------------------------
# commands


def cmd_list_theories(args) -> int:
    from .service.schemas import TheoriesResponse

    resp = _Client(args.server).call(
        runner.theories_info, route="/v1/theories", params={}, model=TheoriesResponse
    )
    if args.format == "json":
        print(resp.model_dump_json(indent=2))
        return EXIT_OK
    for t in resp.theories:
        if t.continuousAxes == "all":
            line = f"{t.name}: all axes continuous"
        elif t.groupOrder is not None:
            line = f"{t.name}: finite group order {t.groupOrder}, rotations {t.rotationOrder}"
            if t.restriction:
                line += f" (restricted: {t.restriction})"
        else:
            axes = ", ".join("xyz"[int(np.argmax(np.abs(a)))] for a in t.continuousAxes)
            line = f"{t.name}: continuous axis {axes}"
        print(line)
    return EXIT_OK


def _load_scenario(path: str, seed: int | None) -> Scenario:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise _UsageError(f"cannot read scenario: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _UsageError(f"scenario is not valid JSON: {exc}") from exc
    scenario = Scenario.model_validate(raw)
    if seed is not None:
        scenario = scenario.model_copy(update={"seed": seed})
    return scenario


def _write_atomic(path: str, data: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_lines(traj) -> str:
    lines = ["t,u1,u2,u3,energy"]
    for t, u, e in zip(traj.times, traj.states, traj.energies):
        row = [t, u[0], u[1], u[2], e]
        lines.append(",".join(f"{x:.12g}" for x in row))
    return "\n".join(lines) + "\n"


def cmd_evolve(args) -> int:
    from .service.schemas import EvolveResponse

    scenario = _load_scenario(args.scenario, args.seed)
    resp = _Client(args.server).call(
        runner.evolve_scenario,
        scenario,
        route="/v1/evolve",
        payload=scenario.model_dump(),
        model=EvolveResponse,
    )
    _write_atomic(args.out, _csv_lines(resp.trajectory))
    outputs = [args.out]
    if args.svg is not None:
        space = runner.space_from_theory(scenario.theory)
        svg = plotting.trajectory_svg(space, np.array(resp.trajectory.states), args.plane)
        _write_atomic(args.svg, svg)
        outputs.append(args.svg)
    code = EXIT_OK if resp.energyConstant else EXIT_CHECK
    report = {
        "evolutionSpec": resp.evolutionSpec.model_dump(),
        "energyConstant": resp.energyConstant,
        "energyDrift": resp.trajectory.energyDrift,
        "outputs": outputs,
        "exitCode": code,
    }
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        print(f"wrote {len(resp.trajectory.times)} samples to {args.out}")
        print(f"mode: {resp.evolutionSpec.mode}  energy constant: {resp.energyConstant}")
    return code


def cmd_verify(args) -> int:
    from .service.schemas import VerifyResponse

    scenario = _load_scenario(args.scenario, args.seed)
    resp = _Client(args.server).call(
        runner.verify_scenario,
        scenario,
        route="/v1/verify",
        payload=scenario.model_dump(),
        model=VerifyResponse,
    )
    code = EXIT_OK if resp.allRequestedPass else EXIT_CHECK
    if args.format == "json":
        body = resp.model_dump()
        body["exitCode"] = code
        print(json.dumps(body, indent=2))
    else:
        for d in resp.desiderata:
            status = "not-applicable" if d.passed is None else (
                "pass" if d.passed else "FAIL"
            )
            print(f"{d.name}: {status}")
        print(f"requested checks pass: {resp.allRequestedPass}")
    return code


def cmd_symmetry(args) -> int:
    from .service.schemas import SymmetryResponse

    resp = _Client(args.server).call(
        runner.symmetry_info,
        args.theory,
        args.rotations_only,
        route="/v1/symmetry",
        params={"theory": args.theory, "rotations_only": args.rotations_only},
        model=SymmetryResponse,
    )
    if args.format == "json":
        print(resp.model_dump_json(indent=2))
        return EXIT_OK
    axes = resp.continuousAxes
    print(f"theory: {resp.theory}")
    print(f"continuous axes: {'all' if axes == 'all' else axes}")
    if resp.groupOrder is not None:
        print(f"group order {resp.groupOrder}, rotations {resp.rotationOrder}")
        for el in resp.elements:
            axis = "none" if el.axis is None else np.round(el.axis, 6).tolist()
            print(f"  {el.kind:<14} angle {el.angle:.6f}  axis {axis}")
    return EXIT_OK


def cmd_phase_group(args) -> int:
    from .service.schemas import PhaseGroupResponse

    resp = _Client(args.server).call(
        runner.phase_group_info,
        args.theory,
        args.measurement,
        route="/v1/phase-group",
        params={"theory": args.theory, "measurement": args.measurement},
        model=PhaseGroupResponse,
    )
    if args.format == "json":
        print(resp.model_dump_json(indent=2))
        return EXIT_OK
    print(f"phase group of {resp.measurement}-measurement on {resp.theory}")
    print(f"finite part order {resp.finiteOrder}")
    for el in resp.finiteElements:
        axis = "none" if el.axis is None else np.round(el.axis, 6).tolist()
        print(f"  {el.kind:<14} angle {el.angle:.6f}  axis {axis}")
    print(f"continuous part dimension {resp.continuousDimension}")
    return EXIT_OK


def cmd_energy(args) -> int:
    from .service.schemas import EnergyResponse

    pairs = []
    try:
        text = Path(args.periods).read_text()
    except OSError as exc:
        raise _UsageError(f"cannot read periods file: {exc}") from exc
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        try:
            pairs.append(EnergyPairIn(i=int(cells[0]), j=int(cells[1]),
                                      tau=float(cells[2])))
        except (ValueError, IndexError):
            if not pairs and line.lower().replace(" ", "").startswith(("i,", "level")):
                continue  # header row
            raise _UsageError(f"bad periods row: {line!r}") from None
    if not pairs:
        raise _UsageError("periods file contains no data rows")
    resp = _Client(args.server).call(
        runner.energy_info,
        EnergyRequest(pairs=pairs),
        route="/v1/energy",
        payload=EnergyRequest(pairs=pairs).model_dump(),
        model=EnergyResponse,
    )
    if args.format == "json":
        print(resp.model_dump_json(indent=2))
        return EXIT_OK
    for label, energy in zip(resp.labels, resp.energies):
        print(f"E_{label} = {energy:.7f}")
    print(f"residual {resp.residual:.3e}")
    print(resp.note)
    return EXIT_OK


def cmd_liouville(args) -> int:
    from .service.schemas import LiouvilleResponse

    request = LiouvilleRequest(potential=args.potential, grid=args.grid,
                               tMax=args.t_max)
    resp = _Client(args.server).call(
        runner.liouville_info,
        request,
        route="/v1/liouville",
        payload=request.model_dump(),
        model=LiouvilleResponse,
    )
    if args.format == "json":
        print(resp.model_dump_json(indent=2))
    else:
        print(f"potential {resp.potential}, dimension {resp.gridSize}")
        print(f"antisymmetry defect {resp.antisymmetryDefect:.3e}")
        print(f"orthogonality defect {resp.orthogonalityDefect:.3e}")
        print(f"density L2 drift {resp.l2Drift:.3e}")
    ok = resp.antisymmetryDefect == 0.0 and resp.orthogonalityDefect < 1e-9
    return EXIT_OK if ok else EXIT_CHECK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main(argv=None))
