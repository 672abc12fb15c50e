"""Convex state spaces, effects, measurements and observables.

States are plain real vectors in normalized-state coordinates
``(<X>, <Y>, <Z>)``.  An effect is an affine functional ``w . rho + c``
returning an outcome probability; a measurement is a family of effects
whose weights sum to zero and biases to one, so probabilities always sum
to one on normalized states.  Observables are value-weighted effect sums
with an assembled vector form ``(W, C)``.

Six builtin example theories are provided: ball, cylinder, cone,
octahedron, cube and spekkens (octahedron body, transformations
restricted to those induced by permutations of four underlying ontic
states).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .errors import DimensionError, UnsupportedSpaceError

__all__ = [
    "Effect",
    "Measurement",
    "MeasurementReport",
    "Observable",
    "Ball",
    "Polytope",
    "Cylinder",
    "Cone",
    "ConstraintBody",
    "SymmetryMeta",
    "StateSpace",
    "BUILTIN_THEORIES",
    "builtin_theory",
    "polytope_space",
    "constraint_space",
    "unit_effect",
    "effect_value",
    "validate_measurement",
    "observable_from_values",
    "contains",
    "support",
    "boundary_samples",
    "sample_states",
]

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def as_state(rho, dimension: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D float vector, optionally of fixed length."""
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 1:
        raise DimensionError(f"state must be a 1-D vector, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise DimensionError("state has non-finite entries")
    if dimension is not None and rho.shape != (dimension,):
        raise DimensionError(f"state has length {rho.shape[0]}, expected {dimension}")
    return rho


# ---------------------------------------------------------------------------
# effects / measurements / observables


@dataclass(frozen=True)
class Effect:
    """Affine outcome functional ``rho -> weight . rho + bias``."""

    weight: np.ndarray
    bias: float

    def __post_init__(self):
        object.__setattr__(self, "weight", np.asarray(self.weight, dtype=float))
        object.__setattr__(self, "bias", float(self.bias))

    def value(self, rho) -> float:
        rho = as_state(rho, self.weight.shape[0])
        return float(self.weight @ rho + self.bias)


def unit_effect(dimension: int) -> Effect:
    """The effect returning 1 on every normalized state."""
    return Effect(np.zeros(dimension), 1.0)


def effect_value(effect: Effect, rho) -> float:
    return effect.value(rho)


@dataclass(frozen=True)
class Measurement:
    """Ordered effects summing to the unit effect, with outcome labels."""

    effects: tuple[Effect, ...]
    labels: tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "effects", tuple(self.effects))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.effects) != len(self.labels):
            raise DimensionError("one label per effect required")

    def __len__(self) -> int:
        return len(self.effects)

    def probabilities(self, rho) -> np.ndarray:
        return np.array([e.value(rho) for e in self.effects])


@dataclass(frozen=True)
class MeasurementReport:
    passed: bool
    weight_sum_defect: float
    bias_sum_defect: float
    min_value: float
    max_value: float
    states_checked: int

    @property
    def worst_violation(self) -> float:
        return max(
            self.weight_sum_defect,
            self.bias_sum_defect,
            -self.min_value,
            self.max_value - 1.0,
            0.0,
        )


@dataclass(frozen=True)
class Observable:
    """Value-weighted effect sum with vector form ``(W, C)``."""

    values: tuple[float, ...]
    measurement: Measurement
    weight: np.ndarray = field(init=False)
    bias: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))
        if len(self.values) != len(self.measurement):
            raise DimensionError(
                f"{len(self.values)} values for {len(self.measurement)} effects"
            )
        w = sum(
            (x * e.weight for x, e in zip(self.values, self.measurement.effects)),
            start=np.zeros_like(self.measurement.effects[0].weight),
        )
        c = math.fsum(x * e.bias for x, e in zip(self.values, self.measurement.effects))
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", c)

    def expectation(self, rho) -> float:
        rho = as_state(rho, self.weight.shape[0])
        return float(self.weight @ rho + self.bias)


def observable_from_values(values, measurement: Measurement) -> Observable:
    return Observable(values=tuple(values), measurement=measurement)


# ---------------------------------------------------------------------------
# convex bodies


@dataclass(frozen=True)
class Ball:
    radius: float = 1.0

    dimension = 3

    def constraint_defect(self, rho: np.ndarray) -> float:
        return float(np.linalg.norm(rho) - self.radius)

    def support(self, direction: np.ndarray) -> float:
        return self.radius * float(np.linalg.norm(direction))


@dataclass(frozen=True)
class Polytope:
    """Convex hull of a vertex list; membership via qhull facet normals."""

    vertices: np.ndarray
    facet_normals: np.ndarray = field(init=False, repr=False)
    facet_offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] < verts.shape[1] + 1:
            raise DimensionError(
                f"need at least n+1 vertices spanning the space, got {verts.shape}"
            )
        object.__setattr__(self, "vertices", verts)
        try:
            hull = ConvexHull(verts)
        except Exception as exc:  # qhull error: degenerate vertex set
            raise DimensionError(f"vertex set is not full-dimensional: {exc}") from exc
        # qhull equations are [unit normal, offset] with n.x + b <= 0 inside
        object.__setattr__(self, "facet_normals", hull.equations[:, :-1].copy())
        object.__setattr__(self, "facet_offsets", hull.equations[:, -1].copy())

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    def constraint_defect(self, rho: np.ndarray) -> float:
        return float(np.max(self.facet_normals @ rho + self.facet_offsets))

    def support(self, direction: np.ndarray) -> float:
        return float(np.max(self.vertices @ direction))


@dataclass(frozen=True)
class Cylinder:
    """``x^2 + y^2 <= radius^2`` with ``|z| <= 1``."""

    radius: float = 1.0

    dimension = 3

    def constraint_defect(self, rho: np.ndarray) -> float:
        radial = math.hypot(rho[0], rho[1]) - self.radius
        return max(radial, abs(rho[2]) - 1.0)

    def support(self, direction: np.ndarray) -> float:
        return self.radius * math.hypot(direction[0], direction[1]) + abs(direction[2])


@dataclass(frozen=True)
class Cone:
    """``x^2 + y^2 <= (1 + z) / 2`` with ``-1 <= z <= 1``.

    A single state sits at ``z = -1`` and a unit disk of states at
    ``z = +1``; the z symmetry of the other smooth bodies is broken.
    """

    dimension = 3

    def constraint_defect(self, rho: np.ndarray) -> float:
        radial = rho[0] ** 2 + rho[1] ** 2 - 0.5 * (1.0 + rho[2])
        return max(radial, abs(rho[2]) - 1.0)

    def support(self, direction: np.ndarray) -> float:
        a = math.hypot(direction[0], direction[1])
        b = direction[2]
        candidates = [a * 1.0 + b, -b]  # top rim / apex
        if b < 0.0:
            z_star = a * a / (8.0 * b * b) - 1.0
            if -1.0 < z_star < 1.0:
                candidates.append(a * math.sqrt(0.5 * (1.0 + z_star)) + b * z_star)
        return max(candidates)


@dataclass(frozen=True)
class ConstraintBody:
    """Intersection of named convex inequality constraints.

    Supported forms (each a mapping with a ``type`` key):

    - ``{"type": "ball", "radius": r}``            -> ``|rho| <= r``
    - ``{"type": "disk_xy", "radius": r}``          -> ``x^2 + y^2 <= r^2``
    - ``{"type": "cone_z"}``                        -> ``x^2 + y^2 <= (1+z)/2``
    - ``{"type": "zrange", "min": a, "max": b}``    -> ``a <= z <= b``
    - ``{"type": "halfspace", "normal": n, "offset": d}`` -> ``n . rho <= d``
    """

    constraints: tuple

    dimension = 3

    def constraint_defect(self, rho: np.ndarray) -> float:
        worst = -math.inf
        for spec in self.constraints:
            kind = spec["type"]
            if kind == "ball":
                g = np.linalg.norm(rho) - float(spec["radius"])
            elif kind == "disk_xy":
                g = math.hypot(rho[0], rho[1]) - float(spec["radius"])
            elif kind == "cone_z":
                g = rho[0] ** 2 + rho[1] ** 2 - 0.5 * (1.0 + rho[2])
            elif kind == "zrange":
                g = max(float(spec["min"]) - rho[2], rho[2] - float(spec["max"]))
            elif kind == "halfspace":
                g = float(np.asarray(spec["normal"], dtype=float) @ rho) - float(
                    spec["offset"]
                )
            else:
                raise UnsupportedSpaceError(f"unknown constraint type {kind!r}")
            worst = max(worst, float(g))
        return worst

    def support(self, direction: np.ndarray) -> float:
        pts = _box_grid_points(17)
        inside = pts[[self.constraint_defect(p) <= 1e-9 for p in pts]]
        if inside.size == 0:
            raise UnsupportedSpaceError("constraint body appears empty in [-1,1]^3")
        return float(np.max(inside @ direction))


def _box_grid_points(n: int) -> np.ndarray:
    axis = np.linspace(-1.0, 1.0, n)
    g = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1)
    return g.reshape(-1, 3)


# ---------------------------------------------------------------------------
# state spaces


@dataclass(frozen=True)
class SymmetryMeta:
    """Continuous rotation axes of a body plus extra discrete structure.

    ``continuous`` is either the marker string ``"all"`` or a tuple of
    unit axes.  ``inplane_flip_normal`` marks bodies (the cylinder) that
    additionally allow half-turn rotations about every axis orthogonal to
    the given normal.
    """

    continuous: str | tuple = ()
    inplane_flip_normal: np.ndarray | None = None

    def __post_init__(self):
        if self.continuous != "all":
            axes = tuple(np.asarray(a, dtype=float) for a in self.continuous)
            object.__setattr__(self, "continuous", axes)
        if self.inplane_flip_normal is not None:
            object.__setattr__(
                self,
                "inplane_flip_normal",
                np.asarray(self.inplane_flip_normal, dtype=float),
            )


@dataclass(frozen=True)
class StateSpace:
    name: str
    body: object
    measurements: dict = field(default_factory=dict)
    symmetry: SymmetryMeta | None = None
    transform_restriction: str | None = None

    @property
    def dimension(self) -> int:
        return self.body.dimension

    @property
    def vertices(self) -> np.ndarray | None:
        return self.body.vertices if isinstance(self.body, Polytope) else None


def contains(space: StateSpace, rho, tol: float = 1e-9) -> bool:
    """Membership test against the body's defining constraints."""
    rho = as_state(rho, space.dimension)
    return space.body.constraint_defect(rho) <= tol


def support(space: StateSpace, direction) -> float:
    """Support value ``max_{rho in body} direction . rho``."""
    direction = np.asarray(direction, dtype=float)
    return space.body.support(direction)


# ---------------------------------------------------------------------------
# builtin theories

_CUBE_VERTICES = np.array(
    [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], dtype=float
)
_OCTAHEDRON_VERTICES = np.array(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float
)

_AXES = {"x": np.array([1.0, 0, 0]), "y": np.array([0, 1.0, 0]), "z": np.array([0, 0, 1.0])}


def canonical_measurements(dimension: int = 3) -> dict[str, Measurement]:
    """Two-outcome measurement per coordinate axis: ``e+- = (+-axis/2, 1/2)``."""
    out = {}
    for key, axis in _AXES.items():
        plus = Effect(0.5 * axis, 0.5)
        minus = Effect(-0.5 * axis, 0.5)
        out[key] = Measurement(effects=(plus, minus), labels=("+", "-"), name=key)
    return out


def builtin_theory(name: str) -> StateSpace:
    """One of ball, cylinder, cone, octahedron, cube, spekkens."""
    key = name.lower()
    meas = canonical_measurements()
    if key == "ball":
        return StateSpace("ball", Ball(), meas, SymmetryMeta(continuous="all"))
    if key == "cylinder":
        sym = SymmetryMeta(continuous=(_AXES["z"],), inplane_flip_normal=_AXES["z"])
        return StateSpace("cylinder", Cylinder(), meas, sym)
    if key == "cone":
        return StateSpace("cone", Cone(), meas, SymmetryMeta(continuous=(_AXES["z"],)))
    if key == "octahedron":
        return StateSpace("octahedron", Polytope(_OCTAHEDRON_VERTICES), meas, SymmetryMeta())
    if key == "cube":
        return StateSpace("cube", Polytope(_CUBE_VERTICES), meas, SymmetryMeta())
    if key == "spekkens":
        return StateSpace(
            "spekkens",
            Polytope(_OCTAHEDRON_VERTICES),
            meas,
            SymmetryMeta(),
            transform_restriction="spekkens",
        )
    raise UnsupportedSpaceError(f"unknown builtin theory {name!r}")


BUILTIN_THEORIES = ("ball", "cylinder", "cone", "octahedron", "cube", "spekkens")


def polytope_space(vertices, name: str = "polytope") -> StateSpace:
    return StateSpace(name, Polytope(np.asarray(vertices, dtype=float)),
                      canonical_measurements(), SymmetryMeta())


def constraint_space(constraints, name: str = "custom") -> StateSpace:
    body = ConstraintBody(tuple(constraints))
    body.constraint_defect(np.zeros(3))  # reject unknown forms eagerly
    return StateSpace(name, body, canonical_measurements(), symmetry=None)


# ---------------------------------------------------------------------------
# sampling


def boundary_samples(space: StateSpace, count: int = 10_000) -> np.ndarray:
    """Deterministic samples on the body boundary (smooth bodies) or the
    vertex set (polytopes)."""
    body = space.body
    if isinstance(body, Polytope):
        return body.vertices.copy()
    if isinstance(body, Ball):
        return body.radius * _fibonacci_sphere(count)
    if isinstance(body, Cylinder):
        side = _spiral(count * 2 // 3, lambda s: body.radius, lambda s: 2.0 * s - 1.0)
        cap = _sunflower_disk((count - len(side)) // 2, body.radius)
        return np.vstack([side, _with_z(cap, 1.0), _with_z(cap, -1.0)])
    if isinstance(body, Cone):
        lateral = _spiral(
            count * 2 // 3,
            lambda s: math.sqrt(max(s, 0.0)),  # radius at z: sqrt((1+z)/2), s=(1+z)/2
            lambda s: 2.0 * s - 1.0,
        )
        cap = _sunflower_disk(count - len(lateral), 1.0)
        return np.vstack([lateral, _with_z(cap, 1.0)])
    raise UnsupportedSpaceError(
        f"no boundary sampler for body {type(body).__name__}"
    )


def _fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    theta = _GOLDEN_ANGLE * i
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


def _spiral(count, radius_of_s, z_of_s) -> np.ndarray:
    i = np.arange(count)
    s = (i + 0.5) / count
    theta = _GOLDEN_ANGLE * i
    r = np.array([radius_of_s(v) for v in s])
    z = np.array([z_of_s(v) for v in s])
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


def _sunflower_disk(count: int, radius: float) -> np.ndarray:
    i = np.arange(count)
    r = radius * np.sqrt((i + 0.5) / count)
    theta = _GOLDEN_ANGLE * i
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def _with_z(xy: np.ndarray, z: float) -> np.ndarray:
    return np.column_stack([xy, np.full(len(xy), z)])


def sample_states(space: StateSpace, count: int, rng=None) -> np.ndarray:
    """Random member states: convex combinations on polytopes, rejection
    sampling inside ``[-1, 1]^3`` otherwise."""
    rng = np.random.default_rng(rng)
    body = space.body
    if isinstance(body, Polytope):
        weights = rng.dirichlet(np.ones(len(body.vertices)), size=count)
        return weights @ body.vertices
    out = np.empty((count, space.dimension))
    filled = 0
    while filled < count:
        batch = rng.uniform(-1.0, 1.0, size=(4 * (count - filled) + 16, space.dimension))
        good = batch[[body.constraint_defect(p) <= 0.0 for p in batch]]
        take = min(len(good), count - filled)
        out[filled : filled + take] = good[:take]
        filled += take
    return out


# ---------------------------------------------------------------------------
# validation


def validate_measurement(
    m: Measurement, space: StateSpace, tol: float = 1e-9
) -> MeasurementReport:
    """Check the unit-effect sum rule and 0..1 effect range on the body.

    The range scan uses polytope vertices where available and 10^4
    deterministic boundary samples on smooth bodies; bodies without a
    boundary sampler fall back to seeded interior samples.
    """
    dim = space.dimension
    wsum = np.zeros(dim)
    for e in m.effects:
        wsum = wsum + e.weight
    weight_defect = float(np.max(np.abs(wsum)))
    bias_defect = abs(math.fsum(e.bias for e in m.effects) - 1.0)

    try:
        probes = boundary_samples(space)
    except UnsupportedSpaceError:
        probes = sample_states(space, 10_000, rng=0)
    values = np.column_stack([probes @ e.weight + e.bias for e in m.effects])
    lo, hi = float(values.min()), float(values.max())
    passed = (
        weight_defect <= 1e-12
        and bias_defect <= 1e-12
        and lo >= -tol
        and hi <= 1.0 + tol
    )
    return MeasurementReport(
        passed=passed,
        weight_sum_defect=weight_defect,
        bias_sum_defect=bias_defect,
        min_value=lo,
        max_value=hi,
        states_checked=len(probes),
    )
