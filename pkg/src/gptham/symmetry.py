"""Reversible transformations of convex state spaces.

Finite symmetry groups of polytopes are enumerated exactly from the
vertex set; smooth builtin bodies carry their continuous rotation axes
as metadata.  The spekkens space restricts the octahedron group to the
transformations induced by permutations of four underlying ontic
states.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SymmetryError, UnsupportedSpaceError
from .statespace import StateSpace, Polytope, contains, sample_states

__all__ = [
    "FiniteGroup",
    "LieSubalgebra",
    "MapClassification",
    "polytope_symmetries",
    "spekkens_group",
    "full_symmetry_group",
    "rotation_subgroup",
    "axis_angle",
    "rotation_angle_about",
    "angles_about_axis",
    "continuous_axes",
    "rotation_about",
]

_TOL = 1e-9


def rotation_about(axis, angle: float) -> np.ndarray:
    """Rotation matrix about a unit axis, Rodrigues form."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    k = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


@dataclass(frozen=True)
class FiniteGroup:
    """Orthogonal matrices closed under composition, in canonical order."""

    elements: np.ndarray  # (m, n, n)
    labels: tuple = ()

    def __post_init__(self):
        elems = np.asarray(self.elements, dtype=float)
        object.__setattr__(self, "elements", elems)

    @property
    def order(self) -> int:
        return len(self.elements)

    def contains(self, matrix, tol: float = _TOL) -> bool:
        return _index_of(self.elements, np.asarray(matrix, dtype=float), tol) >= 0

    def verify_closure(self, tol: float = _TOL) -> None:
        for a in self.elements:
            for b in self.elements:
                if _index_of(self.elements, a @ b, tol) < 0:
                    raise SymmetryError("element set is not closed under products")
            if _index_of(self.elements, a.T, tol) < 0:
                raise SymmetryError("element set is not closed under inverses")

    def rotation_subgroup(self) -> FiniteGroup:
        keep = [i for i, g in enumerate(self.elements) if np.linalg.det(g) > 0.0]
        labels = tuple(self.labels[i] for i in keep) if self.labels else ()
        return FiniteGroup(self.elements[keep], labels)


@dataclass(frozen=True)
class LieSubalgebra:
    """Linearly independent antisymmetric generators."""

    basis: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(np.asarray(g, dtype=float) for g in self.basis)
        for g in mats:
            if np.any(g != -g.T):
                raise SymmetryError("Lie algebra basis element is not antisymmetric")
        if mats:
            flat = np.stack([g.ravel() for g in mats])
            if np.linalg.matrix_rank(flat) < len(mats):
                raise SymmetryError("Lie algebra basis is linearly dependent")
        object.__setattr__(self, "basis", mats)

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _index_of(elements: np.ndarray, matrix: np.ndarray, tol: float) -> int:
    if len(elements) == 0:
        return -1
    diffs = np.max(np.abs(elements - matrix[None, :, :]), axis=(1, 2))
    i = int(np.argmin(diffs))
    return i if diffs[i] <= tol else -1


def _canonical_order(elements: list[np.ndarray]) -> list[int]:
    """Deterministic order: lexicographic on rounded matrix entries."""
    return sorted(
        range(len(elements)), key=lambda i: tuple(np.round(elements[i].ravel(), 9))
    )


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class MapClassification:
    """Axis/angle decomposition of an orthogonal map.

    ``kind`` is one of ``identity``, ``rotation``, ``reflection``
    (improper with zero rotation part) or ``rotoreflection``.  Improper
    maps use the mirror-normal eigenvector as axis; the pure inversion
    reports a z axis by convention.
    """

    kind: str
    det: float
    angle: float
    axis: np.ndarray | None


def axis_angle(matrix, tol: float = 1e-9) -> MapClassification:
    m = np.asarray(matrix, dtype=float)
    if m.shape != (3, 3):
        raise SymmetryError(f"expected a 3x3 matrix, got shape {m.shape}")
    if np.max(np.abs(m.T @ m - np.eye(3))) > 1e-7:
        raise SymmetryError("matrix is not orthogonal")
    det = float(np.linalg.det(m))
    if det > 0.0:
        if np.max(np.abs(m - np.eye(3))) <= tol:
            return MapClassification("identity", det, 0.0, None)
        axis = _fixed_axis(m, eigenvalue=1.0)
        angle = rotation_angle_about(m, axis)
        if angle < 0.0:
            axis, angle = -axis, -angle
        if angle >= math.pi - tol:
            axis = _sign_fix(axis)  # half turns leave the sign free
        return MapClassification("rotation", det, angle, axis)
    # improper: rotation about the -1 eigenvector composed with the
    # reflection through the plane orthogonal to it
    axis = _fixed_axis(m, eigenvalue=-1.0)
    rot = m @ (np.eye(3) - 2.0 * np.outer(axis, axis))
    angle = rotation_angle_about(rot, axis)
    if angle < 0.0:
        axis, angle = -axis, -angle
    if angle <= tol or angle >= math.pi - tol:
        axis = _sign_fix(axis)
    kind = "reflection" if angle <= tol else "rotoreflection"
    return MapClassification(kind, det, angle, axis)


def _fixed_axis(m: np.ndarray, eigenvalue: float) -> np.ndarray:
    vals, vecs = np.linalg.eig(m)
    i = int(np.argmin(np.abs(vals - eigenvalue)))
    axis = np.real(vecs[:, i])
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        raise SymmetryError("no real fixed axis found")
    return axis / norm


def _sign_fix(axis: np.ndarray) -> np.ndarray:
    for component in axis:
        if abs(component) > 1e-9:
            return axis if component > 0 else -axis
    return axis


def rotation_angle_about(matrix, axis) -> float:
    """Signed angle of a rotation about a given fixed unit axis.

    Counterclockwise about the axis is positive; raises if the matrix
    does not fix the axis.
    """
    m = np.asarray(matrix, dtype=float)
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    if np.linalg.norm(m @ n - n) > 1e-7:
        raise SymmetryError("matrix does not fix the given axis")
    u = np.cross(n, [1.0, 0.0, 0.0])
    if np.linalg.norm(u) < 1e-6:
        u = np.cross(n, [0.0, 1.0, 0.0])
    u /= np.linalg.norm(u)
    v = m @ u
    return math.atan2(float(n @ np.cross(u, v)), float(u @ v))


def angles_about_axis(group: FiniteGroup, axis, tol: float = _TOL) -> np.ndarray:
    """Sorted rotation angles in [0, 2pi) of group elements fixing an axis."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    angles = set()
    for g in group.elements:
        if np.linalg.det(g) < 0.0 or np.linalg.norm(g @ n - n) > tol:
            continue
        theta = rotation_angle_about(g, n) % (2.0 * math.pi)
        if theta > 2.0 * math.pi - 1e-12:
            theta = 0.0
        angles.add(round(theta, 12))
    return np.array(sorted(angles))


# ---------------------------------------------------------------------------
# polytope groups


def polytope_symmetries(vertices, tol: float = _TOL) -> FiniteGroup:
    """All orthogonal maps permuting the vertex set.

    Candidate maps are solved from images of one linearly independent
    anchor triple, prefiltered by Gram-matrix agreement, then kept only
    if they permute the full vertex set within ``tol``.
    """
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 3:
        raise SymmetryError(f"expected (m, 3) vertices, got {verts.shape}")
    centroid = verts.mean(axis=0)
    if np.linalg.norm(centroid) > tol:
        raise SymmetryError(
            f"vertex centroid {centroid.tolist()} is not the origin; "
            "affine symmetries are unsupported"
        )
    anchor = _independent_triple(verts, tol)
    basis = verts[anchor].T  # columns
    gram = basis.T @ basis
    inv_basis = np.linalg.inv(basis)

    found: list[np.ndarray] = []
    for image in itertools.permutations(range(len(verts)), 3):
        w = verts[list(image)].T
        if np.max(np.abs(w.T @ w - gram)) > 1e-7:
            continue
        m = w @ inv_basis
        if np.max(np.abs(m.T @ m - np.eye(3))) > 1e-7:
            continue
        if not _permutes_vertices(m, verts, tol):
            continue
        if all(np.max(np.abs(m - g)) > tol for g in found):
            found.append(m)
    order = _canonical_order(found)
    group = FiniteGroup(np.array([found[i] for i in order]))
    group.verify_closure(tol)
    return group


def _independent_triple(verts: np.ndarray, tol: float) -> list[int]:
    idx = [0]
    for i in range(1, len(verts)):
        if np.linalg.norm(np.cross(verts[0], verts[i])) > 1e-7:
            idx.append(i)
            break
    for i in range(1, len(verts)):
        if i in idx:
            continue
        if abs(np.linalg.det(verts[[idx[0], idx[1], i]])) > 1e-7:
            idx.append(i)
            return idx
    raise SymmetryError("vertices do not span three dimensions")


def _permutes_vertices(m: np.ndarray, verts: np.ndarray, tol: float) -> bool:
    images = verts @ m.T
    dist = np.linalg.norm(images[:, None, :] - verts[None, :, :], axis=2)
    match = dist.argmin(axis=1)
    if np.any(dist[np.arange(len(verts)), match] > tol):
        return False
    return len(set(match.tolist())) == len(verts)


# spekkens: epistemic states of four ontic states, pairs mapped to the
# octahedron vertices; the vertex order matches statespace octahedron
_SPEKKENS_PAIRS = {
    (1, 2): np.array([0.0, 0.0, 1.0]),
    (3, 4): np.array([0.0, 0.0, -1.0]),
    (1, 3): np.array([1.0, 0.0, 0.0]),
    (2, 4): np.array([-1.0, 0.0, 0.0]),
    (1, 4): np.array([0.0, 1.0, 0.0]),
    (2, 3): np.array([0.0, -1.0, 0.0]),
}


def spekkens_group() -> FiniteGroup:
    """Octahedron maps induced by the 24 ontic permutations.

    Each permutation of {1, 2, 3, 4} acts on two-element subsets, hence
    on the six octahedron vertices.  The action is faithful, giving a
    group of order 24 whose rotation part has order 12.
    """
    axis_pairs = {tuple(np.round(v, 9)): pair for pair, v in _SPEKKENS_PAIRS.items()}
    elements = []
    labels = []
    for perm in itertools.permutations((1, 2, 3, 4)):
        relabel = dict(zip((1, 2, 3, 4), perm))
        columns = []
        for axis in np.eye(3):
            pair = axis_pairs[tuple(np.round(axis, 9))]
            image_pair = tuple(sorted(relabel[k] for k in pair))
            columns.append(_SPEKKENS_PAIRS[image_pair])
        elements.append(np.column_stack(columns))
        labels.append(perm)
    order = _canonical_order(elements)
    group = FiniteGroup(
        np.array([elements[i] for i in order]),
        labels=tuple(labels[i] for i in order),
    )
    group.verify_closure()
    return group


_GROUP_CACHE: dict[str, FiniteGroup] = {}


def full_symmetry_group(space: StateSpace) -> FiniteGroup:
    """Allowed reversible transformations of a polytope space."""
    cached = _GROUP_CACHE.get(space.name) if space.name in _BUILTIN_NAMES else None
    if cached is not None:
        return cached
    if space.transform_restriction == "spekkens":
        group = spekkens_group()
    elif isinstance(space.body, Polytope):
        group = polytope_symmetries(space.body.vertices)
    else:
        raise UnsupportedSpaceError(
            f"symmetries of {space.name!r} form a continuous group; "
            "finite enumeration applies to polytopes only"
        )
    if space.name in _BUILTIN_NAMES:
        _GROUP_CACHE[space.name] = group
    return group


_BUILTIN_NAMES = frozenset({"octahedron", "cube", "spekkens"})


def rotation_subgroup(group: FiniteGroup) -> FiniteGroup:
    return group.rotation_subgroup()


# ---------------------------------------------------------------------------
# continuous axes


def continuous_axes(space: StateSpace, verify: bool = False):
    """Axes about which every rotation preserves the body.

    Returns the marker string ``"all"`` for the ball, a tuple of unit
    axes otherwise.  Polytopes admit no continuous rotations.  With
    ``verify=True`` the claim is confirmed by rotating boundary samples
    at several angles and testing membership.
    """
    if isinstance(space.body, Polytope):
        return ()
    if space.symmetry is None:
        raise UnsupportedSpaceError(
            f"no symmetry metadata for space {space.name!r}"
        )
    axes = space.symmetry.continuous
    if verify:
        probe_axes = (np.eye(3) if axes == "all" else np.asarray(axes)).reshape(-1, 3)
        rng = np.random.default_rng(0)
        states = sample_states(space, 100, rng=rng)
        angles = rng.uniform(0.0, 2.0 * math.pi, size=100)
        for axis in probe_axes:
            for angle in angles:
                rotated = states @ rotation_about(axis, angle).T
                if not all(contains(space, p) for p in rotated):
                    raise SymmetryError(
                        f"axis {axis} fails rotation invariance for {space.name!r}"
                    )
    return axes
