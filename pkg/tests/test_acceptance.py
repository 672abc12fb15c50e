"""Acceptance gate: one test per release criterion.

Each test pins the advertised behavior at its stated tolerance; the
terminal summary prints a PASS/FAIL line per criterion.  Keep these
independent of the unit suites so a regression points at the criterion
it breaks.
"""

import json
import math

import numpy as np
import pytest
from scipy.linalg import expm

from gptham import dynamics, liouville, phase, realrep, symmetry
from gptham.cli import main as cli_main
from gptham.errors import InconsistentCycleError
from gptham.statespace import BUILTIN_THEORIES

TWO_PI = 2.0 * math.pi


def _random_density(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2.0


def _coefficients(hm, basis):
    # v_k = Tr(H L_k); the traceful part shifts energy only
    return np.real(np.einsum("ab,iba->i", hm, basis.elements))


def test_criterion_01_basis_validity():
    for d in (2, 3, 4, 5):
        basis = realrep.gellmann_basis(d)
        n = len(basis)
        gram = np.einsum("iab,jba->ij", basis.elements, basis.elements)
        assert np.max(np.abs(gram - 2.0 * np.eye(n))) < 1e-12

    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[j, i, k] = -1.0
    f = realrep.structure_constants(realrep.gellmann_basis(2))
    assert np.max(np.abs(f.values - eps)) < 1e-12


def test_criterion_02_qubit_reduction(theories, rng):
    basis = realrep.gellmann_basis(2)
    ball = theories["ball"]
    grid = np.linspace(0.0, 10.0, 21)
    worst = 0.0
    for _ in range(100):
        rho = _random_density(rng, 2)
        hm = _random_hermitian(rng, 2)
        u0 = realrep.bloch_from_density(rho, basis)
        recipe = dynamics.trajectory(
            ball, dynamics.Hamiltonian(_coefficients(hm, basis)), u0, grid
        )
        quantum = np.array([
            realrep.bloch_from_density(realrep.von_neumann_evolve(rho, hm, t), basis)
            for t in grid
        ])
        worst = max(worst, float(np.max(np.abs(recipe.states - quantum))))
    assert worst < 1e-8


def test_criterion_03_qutrit_equivalence(rng):
    basis = realrep.gellmann_basis(3)
    tensor = realrep.structure_constants(basis)
    worst = 0.0
    for _ in range(50):
        rho = _random_density(rng, 3)
        hm = _random_hermitian(rng, 3)
        u0 = realrep.bloch_from_density(rho, basis)
        v = _coefficients(hm, basis)
        u1 = realrep.bloch_ode_evolve(u0, v, tensor, [1.0], step=1e-3)[-1]
        expected = realrep.bloch_from_density(
            realrep.von_neumann_evolve(rho, hm, 1.0), basis
        )
        worst = max(worst, float(np.max(np.abs(u1 - expected))))
    assert worst < 1e-6


def test_criterion_04_energy_conservation(theories, rng):
    worst = 0.0
    for _ in range(1000):
        h = rng.normal(size=3)
        a = dynamics.recipe_generator(dynamics.Hamiltonian(h)).matrix
        worst = max(worst, float(np.max(np.abs(h @ a))))
    assert worst < 1e-14

    quarter = (math.pi / 2.0) * np.arange(8)
    cases = {
        "ball": ((0.3, -1.1, 0.7), 0.25, (0.2, 0.1, -0.3), np.linspace(0, 5, 41)),
        "cylinder": ((0, 0, 1.3), 0.0, (0.5, 0.2, 0.4), np.linspace(0, 4, 33)),
        "cone": ((0, 0, 0.9), -1.0, (0.1, 0.05, 0.2), np.linspace(0, 3, 25)),
        "octahedron": ((0, 0, 1.0), 0.0, (0.25, 0.25, 0.25), quarter),
        "cube": ((0, 0, 1.0), 0.5, (0.5, -0.3, 0.8), quarter),
        "spekkens": ((0, 0, 1.0), 0.0, (0.25, 0.25, 0.25), math.pi * np.arange(6)),
    }
    assert set(cases) == set(BUILTIN_THEORIES)
    for name, (h, h0, u0, grid) in cases.items():
        traj = dynamics.trajectory(
            theories[name], dynamics.Hamiltonian(h, h0), u0, grid
        )
        assert float(np.max(np.abs(traj.energies - traj.energies[0]))) < 1e-9, name


def test_criterion_05_group_orders(theories):
    for name in ("cube", "octahedron"):
        group = symmetry.full_symmetry_group(theories[name])
        assert group.order == 48
        assert group.rotation_subgroup().order == 24
    spek = symmetry.full_symmetry_group(theories["spekkens"])
    assert spek.order == 24
    assert spek.rotation_subgroup().order == 12

    rotations = symmetry.full_symmetry_group(theories["cube"]).rotation_subgroup()
    angles = symmetry.angles_about_axis(rotations, [0.0, 0.0, 1.0])
    np.testing.assert_allclose(
        angles,
        [0.0, math.pi / 2.0, math.pi, 3.0 * math.pi / 2.0],
        rtol=0.0,
        atol=1e-12,
    )


def test_criterion_06_allowed_time_classification(theories):
    ball, cyl, cone, cube = (
        theories[n] for n in ("ball", "cylinder", "cone", "cube")
    )
    for axis in ([0, 0, 1], [1, 0, 0], [0.3, -0.7, 0.2]):
        assert dynamics.allowed_times(ball, dynamics.Hamiltonian(axis)).mode == "continuous"

    assert dynamics.allowed_times(cyl, dynamics.Hamiltonian([0, 0, 2.0])).mode == "continuous"
    for axis in ([1, 0, 0], [0, 1, 0], [1, 1, 0]):
        spec = dynamics.allowed_times(cyl, dynamics.Hamiltonian(axis))
        assert spec.mode == "discrete"
        assert abs(spec.minimal_angle - math.pi) < 1e-12

    assert dynamics.allowed_times(cone, dynamics.Hamiltonian([0, 0, 1.5])).mode == "continuous"
    for axis in ([1, 0, 0], [0, 1, 0], [1, 0, 1], [0.2, 0.5, -0.8]):
        assert dynamics.allowed_times(cone, dynamics.Hamiltonian(axis)).mode == "none"

    for axis in np.eye(3):
        spec = dynamics.allowed_times(cube, dynamics.Hamiltonian(axis))
        assert spec.mode == "discrete"
        assert abs(spec.minimal_angle - math.pi / 2.0) < 1e-12
    for diagonal in ([1, 1, 1], [1, 1, -1], [1, -1, 1], [-1, 1, 1]):
        spec = dynamics.allowed_times(cube, dynamics.Hamiltonian(diagonal))
        assert spec.mode == "discrete"
        assert abs(spec.minimal_angle - 2.0 * math.pi / 3.0) < 1e-12


def _symmetry_candidates(name):
    z_rotations = [
        symmetry.rotation_about([0.0, 0.0, 1.0], t)
        for t in (0.0, 0.7, math.pi / 2.0, 2.0)
    ]
    if name == "ball":
        return z_rotations + [
            symmetry.rotation_about([1.0, 0.0, 0.0], 0.9),
            symmetry.rotation_about([0.6, 0.0, 0.8], 1.1),
        ]
    if name == "cylinder":
        return z_rotations + [
            symmetry.rotation_about([1.0, 0.0, 0.0], math.pi),
            symmetry.rotation_about([0.0, 1.0, 0.0], math.pi),
        ]
    return z_rotations  # cone: z rotations are its only reversible maps


def test_criterion_07_phase_groups_and_branch_locality(theories):
    cube = theories["cube"]
    m_cube = cube.measurements["z"]
    face = phase.well_defined_states(cube, m_cube, "+")
    assert not face.is_empty
    report = phase.stationary_under(cube, dynamics.Hamiltonian([0, 0, 1.0]), face)
    assert not report.all_stationary
    assert report.moving_witness is not None
    assert abs(report.moving_witness[2] - 1.0) < 1e-12

    # among the cube phase transformations only the identity stays
    # inside a single energy branch
    cube_phase = phase.phase_group(cube, m_cube)
    assert cube_phase.finite_part.order == 4
    for outcome in ("+", "-"):
        localized = [
            g
            for g in cube_phase.finite_part.elements
            if phase.is_branch_localized(g, cube, m_cube, (outcome,))
        ]
        assert len(localized) == 1
        np.testing.assert_allclose(localized[0], np.eye(3), atol=1e-12)

    ball = theories["ball"]
    m_ball = ball.measurements["z"]
    for theta in (0.4, math.pi / 2.0, 2.5):
        rz = symmetry.rotation_about([0.0, 0.0, 1.0], theta)
        for outcome in ("+", "-"):
            assert phase.is_branch_localized(rz, ball, m_ball, (outcome,)).localized

    # with two outcomes, expectation invariance must already force
    # membership in the phase group, element by element
    for name in BUILTIN_THEORIES:
        space = theories[name]
        m = space.measurements["z"]
        if space.vertices is not None:
            candidates = symmetry.full_symmetry_group(space).rotation_subgroup().elements
            members = phase.phase_group(space, m).finite_part
        else:
            candidates = _symmetry_candidates(name)
            members = None
        for g in candidates:
            rep = phase.check_inv_star(space, m, g, (1.0, 0.0))
            assert rep.outcome_count == 2
            assert rep.two_outcome_consistent, name
            assert rep.inv_star_holds or not rep.inv_holds, name
            if members is not None:
                assert rep.inv_star_holds == members.contains(g), name

    # nontrivial smooth member: the in-plane half turn preserves the
    # cylinder's x measurement outcome by outcome
    cyl = theories["cylinder"]
    flip = symmetry.rotation_about([1.0, 0.0, 0.0], math.pi)
    rep = phase.check_inv_star(cyl, cyl.measurements["x"], flip, (1.0, 0.0))
    assert rep.inv_holds and rep.inv_star_holds


def test_criterion_08_energy_assignment(theories):
    assignment = phase.assign_energies([(1, 2, TWO_PI)])
    assert abs((assignment.energy_of(2) - assignment.energy_of(1)) - 1.0) < 1e-7

    with pytest.raises(InconsistentCycleError):
        phase.assign_energies([(1, 2, TWO_PI), (2, 3, TWO_PI), (1, 3, TWO_PI)])

    group = symmetry.full_symmetry_group(theories["cube"])
    classes = phase.alias_classes(math.pi / 2.0, group, [0.0, 0.0, 1.0])
    assert classes.count == 4


def test_criterion_09_liouville_orthogonality():
    grid = liouville.PhaseSpaceGrid(16, 16)
    xg, pg = np.meshgrid(grid.x, grid.p, indexing="ij")
    bump = np.exp(-((xg - math.pi) ** 2 + (pg - 0.2) ** 2) / 0.1).ravel()
    rho0 = liouville.DensityField(bump, grid)
    potentials = (
        ("free", liouville.free_particle_vprime),
        ("harmonic", liouville.harmonic_vprime(grid.x_length)),
    )
    for name, vprime in potentials:
        lmat = liouville.liouville_matrix(grid, vprime, name=name)
        assert lmat.antisymmetry_defect == 0.0, name
        for t in (0.1, 1.0, 10.0):
            u = expm(lmat.matrix * t)
            assert np.max(np.abs(u.T @ u - np.eye(grid.size))) < 1e-9
            evolved = liouville.liouville_evolve(lmat, rho0, t)
            assert abs(np.linalg.norm(evolved) - rho0.l2_norm) < 1e-9


def _cli(argv):
    try:
        return cli_main(argv)
    except SystemExit as exc:
        return exc.code


def test_criterion_10_cli_contract(tmp_path, capsys):
    ball_scenario = {
        "theory": "ball",
        "hamiltonian": {"vector": [0.0, 0.0, 1.0]},
        "time": {"tMax": TWO_PI, "steps": 32},
        "initialState": [1.0, 0.0, 0.0],
        "seed": 11,
    }
    spath = tmp_path / "ball.json"
    spath.write_text(json.dumps(ball_scenario))

    out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    assert _cli(["evolve", "--scenario", str(spath), "--out", str(out1)]) == 0
    assert _cli(["evolve", "--scenario", str(spath), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_text().splitlines()[0] == "t,u1,u2,u3,energy"

    off_lattice = {
        "theory": "cube",
        "hamiltonian": {"vector": [0.0, 0.0, 1.0]},
        "time": {"tMax": 1.0, "dt": 0.4},
        "initialState": [1.0, 1.0, 1.0],
    }
    bpath = tmp_path / "off.json"
    bpath.write_text(json.dumps(off_lattice))
    assert _cli(["evolve", "--scenario", str(bpath), "--out", str(tmp_path / "x.csv")]) == 65

    missing = str(tmp_path / "missing.json")
    assert _cli(["evolve", "--scenario", missing, "--out", str(tmp_path / "y.csv")]) == 64
    assert _cli(["list-theories", "--bogus"]) == 64

    failing = {
        "theory": "cone",
        "hamiltonian": {"vector": [1.0, 0.0, 0.0]},
        "time": {"tMax": 1.0, "dt": 0.5},
        "initialState": [0.0, 0.0, 0.0],
        "checks": ["GEN"],
    }
    cpath = tmp_path / "cone.json"
    cpath.write_text(json.dumps(failing))
    assert _cli(["verify", "--scenario", str(cpath)]) == 2

    capsys.readouterr()
    assert _cli(["verify", "--scenario", str(spath)]) == 0
    out = capsys.readouterr().out
    for name in ("OBS", "GEN", "INV", "QUAN"):
        assert f"{name}: pass" in out
