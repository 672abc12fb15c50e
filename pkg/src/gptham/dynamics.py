"""Hamiltonians, generators and time evolution on 3D state spaces.

The central recipe: a Hamiltonian with vector ``H`` generates the
antisymmetric matrix ``A = H1 Lx + H2 Ly + H3 Lz``, so states obey
``rho_dot = A rho = H x rho`` and evolve by rotation about ``H`` with
angular speed ``|H|``.  Which times are admissible depends on the state
space: all times when the axis is a continuous symmetry, multiples of a
minimal time when only a finite rotation subgroup fixes the axis, and
none otherwise.

The offset ``H0`` shifts the zero of energy and never enters the
dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import realrep
from .errors import (
    DimensionError,
    InvalidTimeError,
    NoAdmissibleEvolutionError,
    NotAStateError,
    SymmetryError,
    UnsupportedSpaceError,
)
from .statespace import (
    Measurement,
    Effect,
    Observable,
    Polytope,
    StateSpace,
    boundary_samples,
    contains,
    sample_states,
    support,
    validate_measurement,
)
from .symmetry import (
    angles_about_axis,
    full_symmetry_group,
    rotation_about,
)

__all__ = [
    "L_MATRICES",
    "l_matrices",
    "Hamiltonian",
    "Generator",
    "EvolutionSpec",
    "Trajectory",
    "DesideratumResult",
    "DesiderataReport",
    "recipe_generator",
    "hamiltonian_from_generator",
    "evolve_map",
    "allowed_times",
    "trajectory",
    "canonical_decomposition",
    "verify_desiderata",
    "generator_dof_report",
]

_AXIS_TOL = 1e-9

# infinitesimal rotation generators: (L_k) v = e_k x v
L_MATRICES = (
    np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
    np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
    np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
)


def l_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return tuple(m.copy() for m in L_MATRICES)


@dataclass(frozen=True)
class Hamiltonian:
    """Hamiltonian observable: vector part, energy offset, optional
    two-outcome decomposition whose weight is half the vector."""

    vector: np.ndarray
    offset: float = 0.0
    decomposition: Observable | None = None

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        if v.shape != (3,):
            raise DimensionError(
                f"the recipe applies to 3D state spaces, got vector shape {v.shape}"
            )
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    @property
    def direction(self) -> np.ndarray:
        n = self.norm
        if n == 0.0:
            raise ValueError("zero Hamiltonian has no direction")
        return self.vector / n

    def energy(self, rho) -> float:
        rho = np.asarray(rho, dtype=float)
        return float(self.vector @ rho + self.offset)


@dataclass(frozen=True)
class Generator:
    """Antisymmetric generating matrix with its source Hamiltonian."""

    matrix: np.ndarray
    source: Hamiltonian


def recipe_generator(hamiltonian: Hamiltonian) -> Generator:
    """``A = H1 Lx + H2 Ly + H3 Lz``; the offset plays no role."""
    h = hamiltonian.vector
    a = h[0] * L_MATRICES[0] + h[1] * L_MATRICES[1] + h[2] * L_MATRICES[2]
    return Generator(matrix=a, source=hamiltonian)


def hamiltonian_from_generator(matrix, tol: float = 1e-12) -> Hamiltonian:
    """Read the vector back off an antisymmetric matrix."""
    a = np.asarray(matrix, dtype=float)
    if a.shape != (3, 3):
        raise DimensionError(f"expected a 3x3 generator, got shape {a.shape}")
    if np.max(np.abs(a + a.T)) > tol:
        raise SymmetryError("generator is not antisymmetric within tolerance")
    return Hamiltonian(vector=np.array([a[2, 1], a[0, 2], a[1, 0]]))


def evolve_map(generator: Generator, t: float) -> np.ndarray:
    """``exp(A t)`` in Rodrigues closed form: rotation about ``H/|H|``
    by angle ``|H| t``."""
    h = generator.source.vector
    speed = float(np.linalg.norm(h))
    if speed == 0.0:
        return np.eye(3)
    return rotation_about(h / speed, speed * t)


# ---------------------------------------------------------------------------
# admissible times


@dataclass(frozen=True)
class EvolutionSpec:
    """Admissible evolution times for a Hamiltonian on a space.

    ``mode`` is continuous, discrete or none.  Discrete mode carries the
    minimal angle about the axis and the minimal time ``tau = theta/|H|``;
    ``trivial`` flags the zero Hamiltonian.  ``reflections`` lists
    improper maps fixing the axis when explicitly requested; they have
    no generator and are never produced by the continuous recipe.
    """

    mode: str
    minimal_time: float | None = None
    minimal_angle: float | None = None
    angles: tuple = ()
    description: str = ""
    trivial: bool = False
    reflections: tuple = ()


def allowed_times(
    space: StateSpace, hamiltonian: Hamiltonian, include_reflections: bool = False
) -> EvolutionSpec:
    """Classify the admissible evolution times of ``hamiltonian``.

    The axis must be a continuous symmetry axis (mode continuous), or be
    fixed by nontrivial rotations of the finite symmetry group or the
    cylinder's in-plane half turns (mode discrete), else only the
    identity survives (mode none).
    """
    if hamiltonian.norm == 0.0:
        return EvolutionSpec(mode="continuous", description="all t (trivial dynamics)",
                             trivial=True)
    axis = hamiltonian.direction

    if _is_continuous_axis(space, axis):
        return EvolutionSpec(mode="continuous", description="all t")

    angles, reflections = _discrete_angles(space, axis, include_reflections)
    positive = angles[angles > _AXIS_TOL]
    if positive.size == 0:
        return EvolutionSpec(mode="none", angles=(0.0,),
                             description="no admissible evolution",
                             reflections=tuple(reflections))
    theta = float(positive.min())
    tau = theta / hamiltonian.norm
    return EvolutionSpec(
        mode="discrete",
        minimal_time=tau,
        minimal_angle=theta,
        angles=tuple(float(a) for a in angles),
        description=f"n*tau, n integer, tau = {tau!r}",
        reflections=tuple(reflections),
    )


def _is_continuous_axis(space: StateSpace, axis: np.ndarray) -> bool:
    meta = space.symmetry
    if meta is None or isinstance(space.body, Polytope):
        return False
    if meta.continuous == "all":
        return True
    for candidate in meta.continuous:
        unit = candidate / np.linalg.norm(candidate)
        if min(np.linalg.norm(unit - axis), np.linalg.norm(unit + axis)) <= _AXIS_TOL:
            return True
    return False


def _discrete_angles(space: StateSpace, axis: np.ndarray, include_reflections: bool):
    reflections: list[np.ndarray] = []
    if isinstance(space.body, Polytope):
        group = full_symmetry_group(space)
        angles = angles_about_axis(group.rotation_subgroup(), axis)
        if include_reflections:
            for g in group.elements:
                if np.linalg.det(g) < 0.0 and np.linalg.norm(g @ axis - axis) <= _AXIS_TOL:
                    reflections.append(g)
        return angles, reflections
    meta = space.symmetry
    if meta is None:
        raise UnsupportedSpaceError(
            f"cannot classify evolution times on {space.name!r}: "
            "no finite group and no symmetry metadata"
        )
    angles = {0.0}
    if meta.inplane_flip_normal is not None:
        normal = meta.inplane_flip_normal / np.linalg.norm(meta.inplane_flip_normal)
        if abs(float(normal @ axis)) <= _AXIS_TOL:
            angles.add(math.pi)
    return np.array(sorted(angles)), reflections


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    hamiltonian: Hamiltonian
    space_name: str

    def __len__(self) -> int:
        return len(self.times)


def trajectory(space: StateSpace, hamiltonian: Hamiltonian, rho0, grid) -> Trajectory:
    """Evolve ``rho0`` over the time grid, enforcing admissibility.

    Discrete-mode grids must sit on the lattice of the minimal time
    within 1e-9 (relative to tau); mode none admits only whole turns.
    Energies are ``H . rho(t) + H0`` and are conserved by construction.
    """
    rho0 = np.asarray(rho0, dtype=float)
    if not contains(space, rho0):
        raise NotAStateError(
            f"initial state {rho0.tolist()} lies outside the {space.name} body"
        )
    times = np.asarray(grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise DimensionError("time grid must be a nonempty 1-D array")

    spec = allowed_times(space, hamiltonian)
    _check_grid_admissible(spec, hamiltonian, times)

    gen = recipe_generator(hamiltonian)
    states = np.array([evolve_map(gen, t) @ rho0 for t in times])
    energies = states @ hamiltonian.vector + hamiltonian.offset
    bad = [t for t, s in zip(times, states) if not contains(space, s)]
    if bad:
        raise NotAStateError(f"evolved state left the body at t = {bad[0]}")
    return Trajectory(times=times, states=states, energies=energies,
                      hamiltonian=hamiltonian, space_name=space.name)


def _check_grid_admissible(spec: EvolutionSpec, hamiltonian: Hamiltonian,
                           times: np.ndarray) -> None:
    if spec.mode == "continuous":
        return
    if spec.mode == "discrete":
        tau = spec.minimal_time
        ratio = times / tau
        off = np.abs(ratio - np.round(ratio))
        if np.any(off > 1e-9):
            t_bad = float(times[int(np.argmax(off > 1e-9))])
            raise InvalidTimeError(
                f"t = {t_bad} is not a multiple of the minimal time {tau}",
                minimal_time=tau,
            )
        return
    # mode none: only whole turns (identity maps) are admissible
    turns = times * hamiltonian.norm / (2.0 * math.pi)
    if np.any(np.abs(turns - np.round(turns)) > 1e-9):
        raise NoAdmissibleEvolutionError(
            "this Hamiltonian admits no evolution on this space"
        )


# ---------------------------------------------------------------------------
# canonical decomposition (OBS)


def canonical_decomposition(space: StateSpace, hamiltonian: Hamiltonian) -> Observable:
    """Two-outcome decomposition of the Hamiltonian along its axis.

    The effect pair is tight on the body: with support values
    ``h+ = h(axis)`` and ``h- = h(-axis)`` the weights are
    ``+-axis / (h+ + h-)``, spanning probabilities exactly [0, 1].  The
    outcome values place the lower level at the offset and give the pair
    a vector form with weight equal to half the Hamiltonian vector.
    """
    if hamiltonian.norm == 0.0:
        unit = Measurement(
            effects=(Effect(np.zeros(3), 1.0),), labels=("1",), name="trivial"
        )
        return Observable(values=(hamiltonian.offset,), measurement=unit)
    axis = hamiltonian.direction
    h_plus = support(space, axis)
    h_minus = support(space, -axis)
    alpha = 1.0 / (h_plus + h_minus)
    plus = Effect(alpha * axis, alpha * h_minus)
    minus = Effect(-alpha * axis, alpha * h_plus)
    meas = Measurement(effects=(plus, minus), labels=("+", "-"), name="hamiltonian")
    gap = hamiltonian.norm * (h_plus + h_minus) / 2.0
    values = (hamiltonian.offset + gap, hamiltonian.offset)
    return Observable(values=values, measurement=meas)


# ---------------------------------------------------------------------------
# desiderata


@dataclass(frozen=True)
class DesideratumResult:
    name: str
    passed: bool | None  # None marks not-applicable
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DesiderataReport:
    results: tuple[DesideratumResult, ...]

    def __getitem__(self, name: str) -> DesideratumResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def all_passed(self) -> bool:
        return all(r.passed is not False for r in self.results)


def verify_desiderata(
    space: StateSpace, hamiltonian: Hamiltonian, samples: int = 100, seed: int = 0
) -> DesiderataReport:
    """Check the four Hamiltonian desiderata on a space.

    OBS: a valid measurement decomposition exists with the right vector
    form.  GEN: the recipe generator exponentiates to allowed
    transformations for admissible times.  INV: the energy functional is
    conserved, algebraically and on sampled trajectories.  QUAN: on the
    ball only, the recipe matches von Neumann evolution through the
    Bloch correspondence.
    """
    rng = np.random.default_rng(seed)
    results = [
        _check_obs(space, hamiltonian, rng),
        _check_gen(space, hamiltonian),
        _check_inv(space, hamiltonian, samples, rng),
        _check_quan(space, hamiltonian, rng),
    ]
    return DesiderataReport(results=tuple(results))


def _check_obs(space, hamiltonian, rng) -> DesideratumResult:
    obs = canonical_decomposition(space, hamiltonian)
    report = validate_measurement(obs.measurement, space)
    states = sample_states(space, 100, rng=rng)
    half = 0.5 * hamiltonian.vector
    defect = float(np.max(np.abs(states @ (obs.weight - half)))) if len(states) else 0.0
    passed = report.passed and defect <= 1e-10
    return DesideratumResult(
        "OBS",
        passed,
        {
            "measurement_report": report,
            "weight_agreement_defect": defect,
            "values": obs.values,
        },
    )


def _check_gen(space, hamiltonian) -> DesideratumResult:
    gen = recipe_generator(hamiltonian)
    spec = allowed_times(space, hamiltonian)
    if spec.mode == "none":
        return DesideratumResult(
            "GEN", False, {"mode": spec.mode, "reason": "no admissible times"}
        )
    probes = boundary_samples(space, 400)
    if spec.mode == "continuous":
        test_times = [0.3, 1.7, math.pi]
    else:
        test_times = [spec.minimal_time * k for k in (1, 2, 5)]
    worst = 0.0
    for t in test_times:
        m = evolve_map(gen, t)
        moved = probes @ m.T
        worst = max(
            worst, max(space.body.constraint_defect(p) for p in moved)
        )
    passed = worst <= 1e-9
    return DesideratumResult(
        "GEN", passed, {"mode": spec.mode, "worst_containment_defect": worst}
    )


def _check_inv(space, hamiltonian, samples, rng) -> DesideratumResult:
    gen = recipe_generator(hamiltonian)
    algebraic = float(np.max(np.abs(hamiltonian.vector @ gen.matrix)))
    spec = allowed_times(space, hamiltonian)
    if spec.mode == "continuous":
        grid = np.linspace(0.0, 10.0, 41)
    elif spec.mode == "discrete":
        grid = spec.minimal_time * np.arange(8)
    else:
        grid = np.array([0.0])
    states = sample_states(space, samples, rng=rng)
    drift = 0.0
    for rho in states:
        tr = trajectory(space, hamiltonian, rho, grid)
        drift = max(drift, float(np.max(np.abs(tr.energies - tr.energies[0]))))
    passed = algebraic <= 1e-12 and drift <= 1e-9
    return DesideratumResult(
        "INV", passed, {"algebraic_defect": algebraic, "max_energy_drift": drift}
    )


def _check_quan(space, hamiltonian, rng) -> DesideratumResult:
    from .statespace import Ball

    if not isinstance(space.body, Ball):
        return DesideratumResult("QUAN", None, {"reason": "ball body only"})
    basis = realrep.gellmann_basis(2)
    gen = recipe_generator(hamiltonian)
    # H = (1/2) sum_k v_k sigma_k precesses Bloch vectors at angular speed |v|
    hmat = 0.5 * np.einsum("k,kab->ab", hamiltonian.vector, basis.elements)
    times = np.sort(rng.uniform(0.0, 10.0, size=12))
    sup = 0.0
    for _ in range(20):
        u0 = rng.normal(size=3)
        u0 *= rng.uniform(0.0, 1.0) ** (1 / 3) / np.linalg.norm(u0)
        rho0 = realrep.density_from_bloch(u0, basis)
        for t in times:
            u_recipe = evolve_map(gen, t) @ u0
            rho_t = realrep.von_neumann_evolve(rho0, hmat, t)
            u_quantum = realrep.bloch_from_density(rho_t, basis)
            sup = max(sup, float(np.linalg.norm(u_recipe - u_quantum)))
    passed = sup <= 1e-8
    return DesideratumResult("QUAN", passed, {"sup_error": sup})


def generator_dof_report(n: int) -> dict:
    """Degrees of freedom of antisymmetric generators vs observables."""
    if n < 2:
        raise DimensionError("state dimension must be at least 2")
    generator_dof = n * (n - 1) // 2
    return {
        "generatorDOF": generator_dof,
        "observableDOF": n,
        "mismatch": generator_dof - n,
    }
