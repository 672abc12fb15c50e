"""Real-vector representation of finite-dimensional quantum mechanics.

A ``d``-level state ``rho`` maps to the real vector ``u_i = Tr(rho L_i)``
over the generalized Gell-Mann basis ``{L_i}``, and a Hermitian Hamiltonian
maps to ``(v_0, v)`` the same way.  Two evolution routes are provided and
must agree:

* matrix route: ``rho(t) = exp(-i H t) rho(0) exp(+i H t)``  (hbar = 1),
* vector route: ``du_l/dt = sum_{kj} f_kjl v_k u_j`` integrated with RK4,

where ``f`` are the antisymmetric structure constants of the basis.  For
d = 2 the vector route reduces to precession ``du/dt = v x u``.

Note the index order in the vector equation: the Hamiltonian index comes
first.  Contracting the other way round flips the sign of time and no
longer matches the matrix route.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvalidBasisError, NonMonotoneGridError, NotAStateError

__all__ = [
    "HermitianBasis",
    "StructureTensor",
    "gellmann_basis",
    "structure_constants",
    "bloch_from_density",
    "density_from_bloch",
    "check_density_matrix",
    "von_neumann_evolve",
    "bloch_ode_evolve",
]

_HERMITICITY_TOL = 1e-12
_POSITIVITY_TOL = 1e-10


@dataclass(frozen=True)
class HermitianBasis:
    """Ordered traceless Hermitian basis with ``Tr(L_i L_j) = 2 delta_ij``."""

    d: int
    elements: np.ndarray  # shape (d*d - 1, d, d), complex

    def __post_init__(self):
        elems = np.asarray(self.elements, dtype=complex)
        if elems.shape != (self.d * self.d - 1, self.d, self.d):
            raise DimensionError(
                f"expected {self.d * self.d - 1} matrices of shape "
                f"({self.d}, {self.d}), got {elems.shape}"
            )
        object.__setattr__(self, "elements", elems)

    def __len__(self) -> int:
        return self.elements.shape[0]

    def validate(self, tol: float = _HERMITICITY_TOL) -> None:
        """Raise ``InvalidBasisError`` unless Hermitian, traceless and
        pairwise trace-orthogonal with normalization 2."""
        elems = self.elements
        herm = np.max(np.abs(elems - elems.conj().transpose(0, 2, 1)))
        if herm > tol:
            raise InvalidBasisError(f"not Hermitian (defect {herm:.3e})")
        tr = np.max(np.abs(np.trace(elems, axis1=1, axis2=2)))
        if tr > tol:
            raise InvalidBasisError(f"not traceless (defect {tr:.3e})")
        gram = np.einsum("iab,jba->ij", elems, elems)
        defect = np.max(np.abs(gram - 2.0 * np.eye(len(self))))
        if defect > tol:
            raise InvalidBasisError(f"not trace-orthonormal (defect {defect:.3e})")


@dataclass(frozen=True)
class StructureTensor:
    """Totally antisymmetric structure constants ``f[j, k, l]`` of a basis."""

    d: int
    values: np.ndarray = field(repr=False)  # shape (n, n, n) with n = d*d - 1

    def antisymmetry_defect(self) -> float:
        f = self.values
        return max(
            np.max(np.abs(f + f.transpose(1, 0, 2))),
            np.max(np.abs(f + f.transpose(0, 2, 1))),
        )


def gellmann_basis(d: int) -> HermitianBasis:
    """Generalized Gell-Mann matrices for a ``d``-level system.

    Ordering follows the textbook d = 3 list (and the Pauli matrices for
    d = 2): for each column k = 2..d, first the symmetric then the
    antisymmetric off-diagonal element for every row j < k, then the
    diagonal element completing that subspace.
    """
    if d < 2:
        raise DimensionError(f"level count must be >= 2, got {d}")
    out = []
    for k in range(1, d):  # zero based column index
        for j in range(k):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = 1.0
            sym[k, j] = 1.0
            out.append(sym)
            asym = np.zeros((d, d), dtype=complex)
            asym[j, k] = -1.0j
            asym[k, j] = 1.0j
            out.append(asym)
        diag = np.zeros((d, d), dtype=complex)
        scale = np.sqrt(2.0 / ((k + 1) * k))
        diag[np.arange(k), np.arange(k)] = scale
        diag[k, k] = -k * scale
        out.append(diag)
    return HermitianBasis(d=d, elements=np.stack(out))


def structure_constants(basis: HermitianBasis) -> StructureTensor:
    """Antisymmetric structure constants ``f_jkl = Tr([L_j, L_k] L_l) / 4i``."""
    basis.validate()
    elems = basis.elements
    prod = np.einsum("jab,kbc->jkac", elems, elems)
    comm = prod - prod.transpose(1, 0, 2, 3)
    f = np.einsum("jkab,lba->jkl", comm, elems) / 4.0j
    resid = np.max(np.abs(f.imag))
    if resid > _HERMITICITY_TOL:
        raise InvalidBasisError(f"structure constants not real (residue {resid:.3e})")
    return StructureTensor(d=basis.d, values=np.ascontiguousarray(f.real))


def check_density_matrix(rho: np.ndarray, tol: float = _POSITIVITY_TOL) -> None:
    """Raise unless ``rho`` is Hermitian, unit trace and positive within tol."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > _HERMITICITY_TOL:
        raise NotAStateError("density matrix is not Hermitian", float("nan"))
    if abs(np.trace(rho).real - 1.0) > _HERMITICITY_TOL:
        raise NotAStateError(f"trace is {np.trace(rho).real!r}, not 1", float("nan"))
    lo = float(np.linalg.eigvalsh(rho)[0])
    if lo < -tol:
        raise NotAStateError(f"minimum eigenvalue {lo:.3e} below -{tol:.0e}", lo)


def bloch_from_density(rho: np.ndarray, basis: HermitianBasis) -> np.ndarray:
    """Coordinates ``u_i = Tr(rho L_i)`` of a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (basis.d, basis.d):
        raise DimensionError(f"state shape {rho.shape} does not match d={basis.d}")
    u = np.einsum("ab,iba->i", rho, basis.elements)
    return np.ascontiguousarray(u.real)


def density_from_bloch(u: np.ndarray, basis: HermitianBasis) -> np.ndarray:
    """Reconstruct ``rho = 1/d + (1/2) sum_j u_j L_j`` and check positivity.

    The valid coordinate region is strictly smaller than the unit ball for
    d > 2; reconstruction therefore checks the smallest eigenvalue and
    raises ``NotAStateError`` when it dips below the tolerance.
    """
    u = np.asarray(u, dtype=float)
    n = basis.d * basis.d - 1
    if u.shape != (n,):
        raise DimensionError(f"coordinate vector must have length {n}, got {u.shape}")
    rho = np.eye(basis.d, dtype=complex) / basis.d
    rho += 0.5 * np.einsum("i,iab->ab", u, basis.elements)
    lo = float(np.linalg.eigvalsh(rho)[0])
    if lo < -_POSITIVITY_TOL:
        raise NotAStateError(
            f"coordinates give minimum eigenvalue {lo:.3e}; not a state", lo
        )
    return rho


def von_neumann_evolve(rho: np.ndarray, hm: np.ndarray, t: float) -> np.ndarray:
    """Unitary evolution ``exp(-i H t) rho exp(+i H t)`` with hbar = 1."""
    rho = np.asarray(rho, dtype=complex)
    hm = np.asarray(hm, dtype=complex)
    if hm.shape != rho.shape:
        raise DimensionError(f"shapes differ: rho {rho.shape}, H {hm.shape}")
    if np.max(np.abs(hm - hm.conj().T)) > _HERMITICITY_TOL:
        raise InvalidBasisError("Hamiltonian matrix is not Hermitian")
    evals, vecs = np.linalg.eigh(hm)
    phases = np.exp(-1.0j * evals * t)
    unitary = (vecs * phases) @ vecs.conj().T
    return unitary @ rho @ unitary.conj().T


def _rk4(rhs, u0: np.ndarray, t0: float, t1: float, step: float) -> np.ndarray:
    span = t1 - t0
    nsteps = max(1, int(np.ceil(span / step - 1e-12)))
    h = span / nsteps
    u = u0
    for _ in range(nsteps):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * h * k1)
        k3 = rhs(u + 0.5 * h * k2)
        k4 = rhs(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u


def bloch_ode_evolve(
    u0: np.ndarray,
    v: np.ndarray,
    tensor: StructureTensor,
    grid,
    step: float = 1e-3,
) -> list[np.ndarray]:
    """Integrate ``du_l/dt = f_kjl v_k u_j`` through the given time grid.

    Classical fixed-step RK4; each grid interval is subdivided so the
    effective step never exceeds ``step``.  The grid must be strictly
    increasing and start at a nonnegative time; integration starts at 0.
    """
    u0 = np.asarray(u0, dtype=float)
    v = np.asarray(v, dtype=float)
    n = tensor.values.shape[0]
    if u0.shape != (n,) or v.shape != (n,):
        raise DimensionError(
            f"vectors must have length {n}, got {u0.shape} and {v.shape}"
        )
    grid = [float(t) for t in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])) or (grid and grid[0] < 0):
        raise NonMonotoneGridError("time grid must be strictly increasing from 0")

    # Hamiltonian index contracts first: du/dt = B u with B[l, j] = f[k, j, l] v_k.
    bmat = np.einsum("kjl,k->lj", tensor.values, v)
    rhs = lambda u: bmat @ u

    out = []
    t_prev, u = 0.0, u0
    for t in grid:
        if t > t_prev:
            u = _rk4(rhs, u, t_prev, t, step)
            t_prev = t
        out.append(u.copy())
    return out
