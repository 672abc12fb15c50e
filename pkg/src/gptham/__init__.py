"""Hamiltonians and reversible dynamics on convex state spaces.

The package follows one recipe end to end: represent states as real
vectors, read a Hamiltonian off as an observable with a vector part,
exponentiate the induced antisymmetric generator, and ask each state
space which evolution times it admits.  Quantum theory (the ball body)
recovers von Neumann dynamics exactly; other bodies discretize or
forbid time evolution, reshape phase groups, and alias energies.
"""

from .dynamics import (
    Generator,
    Hamiltonian,
    allowed_times,
    canonical_decomposition,
    evolve_map,
    hamiltonian_from_generator,
    recipe_generator,
    trajectory,
    verify_desiderata,
)
from .phase import (
    alias_classes,
    assign_energies,
    check_inv_star,
    is_branch_localized,
    phase_group,
    stationary_under,
    well_defined_states,
)
from .statespace import (
    Effect,
    Measurement,
    Observable,
    StateSpace,
    builtin_theory,
    contains,
    observable_from_values,
    validate_measurement,
)
from .symmetry import (
    FiniteGroup,
    axis_angle,
    continuous_axes,
    polytope_symmetries,
    rotation_subgroup,
    spekkens_group,
)

__version__ = "0.1.0"

__all__ = [
    "Hamiltonian",
    "Generator",
    "recipe_generator",
    "hamiltonian_from_generator",
    "evolve_map",
    "allowed_times",
    "trajectory",
    "canonical_decomposition",
    "verify_desiderata",
    "StateSpace",
    "Effect",
    "Measurement",
    "Observable",
    "builtin_theory",
    "contains",
    "observable_from_values",
    "validate_measurement",
    "FiniteGroup",
    "polytope_symmetries",
    "rotation_subgroup",
    "spekkens_group",
    "axis_angle",
    "continuous_axes",
    "phase_group",
    "well_defined_states",
    "stationary_under",
    "is_branch_localized",
    "assign_energies",
    "alias_classes",
    "check_inv_star",
    "__version__",
]
