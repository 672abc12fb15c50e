"""Phase groups, energy faces, branch locality and energy assignment.

A measurement's phase group collects the reversible transformations
that preserve every outcome probability.  States returning a definite
outcome form faces of the body; their (non-)stationarity under a
Hamiltonian, the locality of transformations to outcome branches, the
reconstruction of energies from observed periods, and the aliasing of
energies in discrete-time theories are all derived from these faces and
groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .dynamics import (
    Hamiltonian,
    allowed_times,
    evolve_map,
    recipe_generator,
)
from .errors import (
    DisconnectedGraphError,
    InconsistentCycleError,
    NoAdmissibleEvolutionError,
    UnsupportedSpaceError,
)
from .statespace import (
    Ball,
    Cone,
    Cylinder,
    Effect,
    Measurement,
    Observable,
    Polytope,
    StateSpace,
    sample_states,
)
from .symmetry import (
    FiniteGroup,
    LieSubalgebra,
    angles_about_axis,
    full_symmetry_group,
    rotation_about,
)

__all__ = [
    "PhaseGroupResult",
    "Face",
    "EnergyAssignment",
    "AliasClasses",
    "StationarityReport",
    "BranchLocalizationResult",
    "InvStarReport",
    "phase_group",
    "well_defined_states",
    "stationary_under",
    "is_branch_localized",
    "assign_energies",
    "alias_classes",
    "check_inv_star",
]

_FACE_TOL = 1e-10
_L_BASIS = (
    np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
    np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
    np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
)


# ---------------------------------------------------------------------------
# phase groups


@dataclass(frozen=True)
class PhaseGroupResult:
    finite_part: FiniteGroup
    continuous_part: LieSubalgebra


def phase_group(space: StateSpace, m: Measurement) -> PhaseGroupResult:
    """Transformations preserving every outcome statistic of ``m``.

    The finite part filters the space's discrete reversible rotations by
    exact effect preservation (``w^T T = w^T`` for every effect).  The
    continuous part is the null space of ``G -> (w^T G)`` inside the
    body's continuous rotation generators.
    """
    weights = [e.weight for e in m.effects]
    kept: list[np.ndarray] = []
    for t in _finite_probes(space, weights):
        if _preserves(t, weights) and all(np.max(np.abs(t - g)) > 1e-9 for g in kept):
            kept.append(t)
    kept.sort(key=lambda g: tuple(np.round(g.ravel(), 9)))
    finite = FiniteGroup(np.array(kept))
    finite.verify_closure()
    continuous = LieSubalgebra(basis=_continuous_phase_basis(space, weights))
    return PhaseGroupResult(finite_part=finite, continuous_part=continuous)


def _preserves(t: np.ndarray, weights, tol: float = 1e-10) -> bool:
    return all(np.max(np.abs(w @ t - w)) <= tol for w in weights)


def _finite_probes(space: StateSpace, weights) -> np.ndarray:
    """Discrete reversible rotations not already inside a continuous
    one-parameter subgroup of the body."""
    if isinstance(space.body, Polytope):
        return full_symmetry_group(space).rotation_subgroup().elements
    meta = space.symmetry
    if meta is None:
        raise UnsupportedSpaceError(
            f"no transformation-group data for space {space.name!r}"
        )
    probes = [np.eye(3)]
    if meta.inplane_flip_normal is not None:
        # an in-plane half turn preserves an effect weight only when its
        # axis is aligned with the weight's in-plane component, so those
        # are the only candidates worth probing
        normal = meta.inplane_flip_normal / np.linalg.norm(meta.inplane_flip_normal)
        for w in weights:
            axis = w - (w @ normal) * normal
            norm = np.linalg.norm(axis)
            if norm > 1e-12:
                probes.append(rotation_about(axis / norm, math.pi))
    return np.array(probes)


def _continuous_phase_basis(space: StateSpace, weights) -> tuple:
    meta = space.symmetry
    if isinstance(space.body, Polytope) or meta is None:
        return ()
    if meta.continuous == "all":
        allowed = np.eye(3)
    else:
        allowed = np.array([a / np.linalg.norm(a) for a in meta.continuous])
        if allowed.size == 0:
            return ()
    # generator vector g (rotation axis); w^T G = -(g x w)^T must vanish
    rows = []
    for w in weights:
        rows.append(_skew(w) @ allowed.T)
    stacked = np.vstack(rows) if rows else np.zeros((0, len(allowed)))
    if stacked.size == 0:
        coeffs = np.eye(len(allowed))
    else:
        coeffs = null_space(stacked, rcond=1e-12).T
    basis = []
    for c in coeffs:
        g = c @ allowed
        basis.append(sum(g[k] * _L_BASIS[k] for k in range(3)))
    return tuple(basis)


def _skew(v: np.ndarray) -> np.ndarray:
    return np.array(
        [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]]
    )


# ---------------------------------------------------------------------------
# well-defined-energy faces


@dataclass(frozen=True)
class Face:
    """States where an effect attains a definite level (0 or 1).

    Polytope faces carry their exact extreme points.  Smooth faces carry
    a descriptor plus 64 boundary samples standing in for the extreme
    set; a disk face, for instance, samples its rim circle.
    """

    defining_effect: Effect
    level: float
    descriptor: str
    extreme_points: np.ndarray
    samples: np.ndarray

    @property
    def is_empty(self) -> bool:
        return self.samples.size == 0


def well_defined_states(space: StateSpace, m: Measurement, outcome) -> Face:
    """Face of states certain to give ``outcome`` (effect value 1)."""
    effect = _effect_for(m, outcome)
    points, descriptor = _level_one_set(space, effect.weight, effect.bias)
    samples = points if len(points) <= 64 else points[:64]
    return Face(
        defining_effect=effect,
        level=1.0,
        descriptor=descriptor,
        extreme_points=points,
        samples=samples,
    )


def _effect_for(m: Measurement, outcome) -> Effect:
    if isinstance(outcome, str):
        if outcome not in m.labels:
            raise KeyError(f"no outcome labeled {outcome!r} in {m.labels}")
        return m.effects[m.labels.index(outcome)]
    return m.effects[int(outcome)]


def _level_one_set(space: StateSpace, w: np.ndarray, c: float):
    """Points where ``w . rho + c = 1``, i.e. the face maximizing ``w``
    when the maximum probability is exactly one."""
    body = space.body
    empty = np.zeros((0, space.dimension))
    if isinstance(body, Polytope):
        values = body.vertices @ w + c
        points = body.vertices[values >= 1.0 - _FACE_TOL]
        return points, ("vertices" if len(points) else "empty")
    wnorm = float(np.linalg.norm(w))
    if wnorm <= 1e-14:
        if abs(c - 1.0) <= _FACE_TOL:
            return _body_samples_64(space), "body"
        return empty, "empty"
    if isinstance(body, Ball):
        if abs(body.radius * wnorm + c - 1.0) > _FACE_TOL:
            return empty, "empty"
        return (body.radius / wnorm) * w[None, :], "point"
    if isinstance(body, Cylinder):
        return _cylinder_face(body, w, c, empty)
    if isinstance(body, Cone):
        return _cone_face(body, w, c, empty)
    raise UnsupportedSpaceError(
        f"no face extraction for body {type(body).__name__}"
    )


def _cylinder_face(body: Cylinder, w, c, empty):
    if abs(body.support(w) + c - 1.0) > _FACE_TOL:
        return empty, "empty"
    radial = math.hypot(w[0], w[1])
    if radial <= 1e-14:
        z = 1.0 if w[2] > 0 else -1.0
        return _circle(body.radius, z), "disk-rim"
    x, y = body.radius * w[0] / radial, body.radius * w[1] / radial
    if abs(w[2]) <= 1e-14:
        return np.array([[x, y, -1.0], [x, y, 1.0]]), "segment"
    z = 1.0 if w[2] > 0 else -1.0
    return np.array([[x, y, z]]), "point"


def _cone_face(body: Cone, w, c, empty):
    if abs(body.support(w) + c - 1.0) > _FACE_TOL:
        return empty, "empty"
    radial = math.hypot(w[0], w[1])
    if radial <= 1e-14:
        if w[2] > 0:
            return _circle(1.0, 1.0), "disk-rim"
        return np.array([[0.0, 0.0, -1.0]]), "point"
    # with a radial component the maximum sits at a unique boundary point:
    # the top rim for w3 >= 0, else the lateral critical height or apex
    candidates = [1.0]
    if w[2] < 0.0:
        candidates.append(-1.0)
        z_star = radial * radial / (8.0 * w[2] * w[2]) - 1.0
        if -1.0 < z_star < 1.0:
            candidates.append(z_star)
    best, best_val = None, -math.inf
    for z in candidates:
        r = math.sqrt(0.5 * (1.0 + z))
        val = r * radial + w[2] * z
        if val > best_val:
            best_val, best = val, np.array([r * w[0] / radial, r * w[1] / radial, z])
    return best[None, :], "point"


def _circle(radius: float, z: float, count: int = 64) -> np.ndarray:
    theta = 2.0 * math.pi * np.arange(count) / count
    return np.column_stack(
        [radius * np.cos(theta), radius * np.sin(theta), np.full(count, z)]
    )


def _body_samples_64(space: StateSpace) -> np.ndarray:
    from .statespace import boundary_samples

    pts = boundary_samples(space, 64)
    return pts[:64]


# ---------------------------------------------------------------------------
# stationarity and branch locality


@dataclass(frozen=True)
class StationarityReport:
    all_stationary: bool
    moving_witness: np.ndarray | None
    max_displacement: float
    mode: str


def stationary_under(
    space: StateSpace, hamiltonian: Hamiltonian, face: Face
) -> StationarityReport:
    """Whether every state of the face is fixed by the evolution.

    Continuous mode checks ``H x rho = 0``; discrete mode applies the
    minimal-time map.  Raises when no evolution is admissible.
    """
    spec = allowed_times(space, hamiltonian)
    if spec.mode == "none":
        raise NoAdmissibleEvolutionError(
            f"no admissible evolution for this Hamiltonian on {space.name!r}"
        )
    points = face.samples
    if points.size == 0:
        return StationarityReport(True, None, 0.0, spec.mode)
    if spec.mode == "continuous":
        moved = np.cross(np.broadcast_to(hamiltonian.vector, points.shape), points)
    else:
        m = evolve_map(recipe_generator(hamiltonian), spec.minimal_time)
        moved = points @ m.T - points
    norms = np.linalg.norm(moved, axis=1)
    worst = int(np.argmax(norms))
    if norms[worst] <= 1e-10:
        return StationarityReport(True, None, float(norms[worst]), spec.mode)
    return StationarityReport(False, points[worst].copy(), float(norms[worst]), spec.mode)


@dataclass(frozen=True)
class BranchLocalizationResult:
    localized: bool
    vacuous: bool
    witness: np.ndarray | None

    def __bool__(self) -> bool:
        return self.localized


def is_branch_localized(
    t_map, space: StateSpace, m: Measurement, outcomes
) -> BranchLocalizationResult:
    """Branch locality: a transformation localized to the outcome set
    must fix every state with zero probability of landing in it.

    The zero-support states form the level-one face of the complementary
    summed effect; an empty face makes the test vacuously true.
    """
    t_map = np.asarray(t_map, dtype=float)
    selected = [_effect_for(m, o) for o in outcomes]
    w = sum((e.weight for e in selected), start=np.zeros(space.dimension))
    c = math.fsum(e.bias for e in selected)
    # complement effect (1 - sum) at level 1 is the sum's zero set
    points, _ = _level_one_set(space, -w, 1.0 - c)
    if points.size == 0:
        return BranchLocalizationResult(localized=True, vacuous=True, witness=None)
    moved = points @ t_map.T - points
    norms = np.linalg.norm(moved, axis=1)
    worst = int(np.argmax(norms))
    if norms[worst] <= 1e-10:
        return BranchLocalizationResult(True, False, None)
    return BranchLocalizationResult(False, False, points[worst].copy())


# ---------------------------------------------------------------------------
# energies from periods


@dataclass(frozen=True)
class EnergyAssignment:
    labels: tuple
    energies: tuple
    residual: float
    note: str = "energy differences use Delta = 2*pi/tau with hbar = 1"

    def energy_of(self, label) -> float:
        return self.energies[self.labels.index(label)]


def assign_energies(pairs) -> EnergyAssignment:
    """Least-squares energies from observed periods.

    Each pair ``(i, j, tau)`` asserts ``E_j - E_i = 2*pi/tau``.  The
    lowest-labeled level is gauged to zero.  Disconnected level graphs
    and inconsistent cycles are rejected.
    """
    pairs = list(pairs)
    if not pairs:
        raise DisconnectedGraphError("no period data supplied")
    for i, j, tau in pairs:
        if not tau > 0.0:
            raise ValueError(f"period must be positive, got tau = {tau}")
    labels = sorted({i for i, _, _ in pairs} | {j for _, j, _ in pairs})
    index = {label: k for k, label in enumerate(labels)}
    _check_connected(pairs, labels, index)

    deltas = np.array([2.0 * math.pi / tau for _, _, tau in pairs])
    a = np.zeros((len(pairs), len(labels)))
    for row, (i, j, _) in enumerate(pairs):
        a[row, index[j]] = 1.0
        a[row, index[i]] = -1.0
    # gauge: drop the first column, fixing E_1 = 0
    solution, *_ = np.linalg.lstsq(a[:, 1:], deltas, rcond=None)
    energies = np.concatenate([[0.0], solution])
    residual = float(np.max(np.abs(a @ energies - deltas)))
    if residual > 1e-9 * float(np.max(np.abs(deltas))):
        raise InconsistentCycleError(
            f"period data is cyclically inconsistent (residual {residual:.3e})"
        )
    return EnergyAssignment(
        labels=tuple(labels),
        energies=tuple(float(e) for e in energies),
        residual=residual,
    )


def _check_connected(pairs, labels, index) -> None:
    adjacency = {k: set() for k in range(len(labels))}
    for i, j, _ in pairs:
        adjacency[index[i]].add(index[j])
        adjacency[index[j]].add(index[i])
    seen = {0}
    frontier = [0]
    while frontier:
        node = frontier.pop()
        for other in adjacency[node]:
            if other not in seen:
                seen.add(other)
                frontier.append(other)
    if len(seen) < len(labels):
        missing = [labels[k] for k in range(len(labels)) if k not in seen]
        raise DisconnectedGraphError(
            f"levels {missing} are not connected to level {labels[0]} by any period"
        )


# ---------------------------------------------------------------------------
# aliasing


@dataclass(frozen=True)
class AliasClasses:
    representatives: tuple
    modulus: float

    @property
    def count(self) -> int:
        return len(self.representatives)


def alias_classes(tau_step: float, group: FiniteGroup, axis) -> AliasClasses:
    """Distinguishable energies in a discrete-time theory.

    With time advancing in steps of ``tau_step``, energies separated by
    ``2*pi/tau_step`` are indistinguishable; the realizable rotation
    angles about the axis leave one energy class per angle.
    """
    if not tau_step > 0.0:
        raise ValueError(f"time step must be positive, got {tau_step}")
    angles = angles_about_axis(group.rotation_subgroup(), axis)
    if angles.size == 0:
        angles = np.array([0.0])
    modulus = 2.0 * math.pi / tau_step
    reps = sorted({round(float(a / tau_step) % modulus, 12) for a in angles})
    return AliasClasses(representatives=tuple(reps), modulus=modulus)


# ---------------------------------------------------------------------------
# INV versus INV*


@dataclass(frozen=True)
class InvStarReport:
    inv_holds: bool
    inv_star_holds: bool
    max_expectation_defect: float
    max_effect_defect: float
    outcome_count: int

    @property
    def two_outcome_consistent(self) -> bool:
        # with two outcomes the single expectation constraint is the
        # whole phase-group condition, so INV must imply INV*
        return self.outcome_count != 2 or self.inv_star_holds or not self.inv_holds


def check_inv_star(
    space: StateSpace,
    m: Measurement,
    t_map,
    values,
    samples: int = 100,
    seed: int = 0,
) -> InvStarReport:
    """Expectation invariance (INV) versus statistics invariance (INV*).

    INV holds when the observable built from ``values`` has the same
    expectation before and after the map on sampled member states; INV*
    requires every individual effect to be preserved.
    """
    t_map = np.asarray(t_map, dtype=float)
    obs = Observable(values=tuple(values), measurement=m)
    states = sample_states(space, samples, rng=seed)
    moved = states @ t_map.T
    defect = float(np.max(np.abs((moved - states) @ obs.weight))) if len(states) else 0.0
    effect_defect = max(
        float(np.max(np.abs(e.weight @ t_map - e.weight))) for e in m.effects
    )
    return InvStarReport(
        inv_holds=defect <= 1e-10,
        inv_star_holds=effect_defect <= 1e-10,
        max_expectation_defect=defect,
        max_effect_defect=effect_defect,
        outcome_count=len(m),
    )
