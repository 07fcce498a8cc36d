"""Discrete 1-D function spaces on (0, L): P1 mass/stiffness/coupling operators.

All fields live on one uniform mesh of linear (hat-function) elements. Each
field carries a flavor encoding its boundary treatment:

- "dirichlet": both endpoint values removed;
- "neumann_zero_mean": all nodes kept, natural boundary condition, mean
  constrained to zero (the discrete H¹ ∩ {∫f = 0});
- "free": all nodes, no constraint;
- "free_zero_mean": all nodes, zero-mean constraint only (the discrete L²
  with vanishing integral).

Constrained flavors are realized by an explicit basis of the admissible
subspace (an orthonormal null-space basis of the mean functional), so every
reduced operator is an ordinary dense matrix and generalized eigensolvers
need no Lagrange multipliers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "BoundarySet",
    "Mesh",
    "FieldSpace",
    "Flavor",
    "field_space",
    "field_flavors",
    "build_mass_matrix",
    "build_stiffness_matrix",
    "build_gradient_coupling",
    "zero_mean_projector",
    "nodal_mass",
    "nodal_stiffness",
    "nodal_gradient",
    "cell_derivative",
]


class BoundarySet(str, enum.Enum):
    """Boundary-condition family for the coupled beam system."""

    MIXED_DN = "mixed_dn"
    FULL_DIRICHLET = "full_dirichlet"


class Flavor(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN_ZERO_MEAN = "neumann_zero_mean"
    FREE = "free"
    FREE_ZERO_MEAN = "free_zero_mean"


_ZERO_MEAN = (Flavor.NEUMANN_ZERO_MEAN, Flavor.FREE_ZERO_MEAN)


@dataclass(frozen=True)
class Mesh:
    """Uniform mesh of n cells on (0, L); n+1 nodes x_j = j·L/n."""

    L: float
    n: int

    def __post_init__(self):
        if self.L <= 0.0:
            raise ValueError("beam length must be > 0, got %g" % self.L)
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("cell count must be an integer >= 2, got %r" % (self.n,))
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return self.L / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.n + 1)


def field_flavors(bcs: BoundarySet) -> dict[str, Flavor]:
    """Flavor of each physical field under the given boundary set.

    Mixed Dirichlet–Neumann: displacement clamped, rotation and longitudinal
    temperature insulated with zero mean, vertical temperature clamped. Full
    Dirichlet: everything clamped. Velocity fields pair with their primal
    field; memory fields pair with their temperature.
    """
    bcs = BoundarySet(bcs)
    if bcs is BoundarySet.MIXED_DN:
        return {
            "phi": Flavor.DIRICHLET,
            "Phi": Flavor.DIRICHLET,
            "psi": Flavor.NEUMANN_ZERO_MEAN,
            "Psi": Flavor.FREE_ZERO_MEAN,
            "theta": Flavor.NEUMANN_ZERO_MEAN,
            "eta": Flavor.NEUMANN_ZERO_MEAN,
            "xi": Flavor.DIRICHLET,
            "zeta": Flavor.DIRICHLET,
        }
    return {name: Flavor.DIRICHLET for name in ("phi", "Phi", "psi", "Psi", "theta", "eta", "xi", "zeta")}


def nodal_mass(mesh: Mesh) -> np.ndarray:
    """P1 mass matrix on all n+1 nodes: (h/6)·tridiag(1, 4, 1), ends h/3."""
    n, h = mesh.n, mesh.h
    m = np.zeros((n + 1, n + 1))
    i = np.arange(n)
    m[i, i + 1] = h / 6.0
    m[i + 1, i] = h / 6.0
    m[np.arange(n + 1), np.arange(n + 1)] = 2.0 * h / 3.0
    m[0, 0] = m[n, n] = h / 3.0
    return m


def nodal_stiffness(mesh: Mesh) -> np.ndarray:
    """P1 stiffness matrix on all nodes: (1/h)·tridiag(−1, 2, −1), ends 1/h."""
    n, h = mesh.n, mesh.h
    k = np.zeros((n + 1, n + 1))
    i = np.arange(n)
    k[i, i + 1] = -1.0 / h
    k[i + 1, i] = -1.0 / h
    k[np.arange(n + 1), np.arange(n + 1)] = 2.0 / h
    k[0, 0] = k[n, n] = 1.0 / h
    return k


def nodal_gradient(mesh: Mesh) -> np.ndarray:
    """First-derivative coupling G[i, j] = ∫ hatⱼ'(x)·hatᵢ(x) dx.

    Exact for P1 (piecewise-constant derivative against piecewise-linear);
    entries are mesh-independent: ±1/2 off the diagonal, ∓1/2 at the corners.
    """
    n = mesh.n
    g = np.zeros((n + 1, n + 1))
    i = np.arange(n)
    g[i, i + 1] = 0.5
    g[i + 1, i] = -0.5
    g[0, 0] = -0.5
    g[n, n] = 0.5
    return g


def cell_derivative(mesh: Mesh) -> np.ndarray:
    """Map nodal P1 coefficients to the n per-cell derivative values."""
    n, h = mesh.n, mesh.h
    d = np.zeros((n, n + 1))
    i = np.arange(n)
    d[i, i] = -1.0 / h
    d[i, i + 1] = 1.0 / h
    return d


def _zero_mean_basis(mesh: Mesh) -> np.ndarray:
    # Constraint row is the vector of hat integrals, c = M·1; the orthonormal
    # null-space basis keeps reduced Gram matrices well conditioned.
    weights = nodal_mass(mesh) @ np.ones(mesh.n + 1)
    basis = scipy.linalg.null_space(weights[None, :])
    if basis.shape != (mesh.n + 1, mesh.n):
        raise RuntimeError("zero-mean basis has unexpected shape %r" % (basis.shape,))
    return basis


@dataclass(frozen=True)
class FieldSpace:
    """One field's discrete space: flavor, dof count, nodal embedding basis.

    basis has shape (n_nodes, dim); its columns span the admissible subspace,
    so nodal values of a member are basis @ coefficients.
    """

    flavor: Flavor
    n_cells: int
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def field_space(mesh: Mesh, flavor: Flavor) -> FieldSpace:
    """Build the discrete space of the given flavor on the mesh."""
    flavor = Flavor(flavor)
    n = mesh.n
    if flavor is Flavor.DIRICHLET:
        basis = np.eye(n + 1)[:, 1:n]
    elif flavor is Flavor.FREE:
        basis = np.eye(n + 1)
    else:
        basis = _zero_mean_basis(mesh)
    return FieldSpace(flavor=flavor, n_cells=n, basis=basis)


def _check_mesh(mesh: Mesh, *spaces: FieldSpace):
    for sp in spaces:
        if sp.n_cells != mesh.n:
            raise ValueError("space built on %d cells used with a %d-cell mesh" % (sp.n_cells, mesh.n))


def build_mass_matrix(mesh: Mesh, space: FieldSpace) -> np.ndarray:
    """Reduced L² Gram matrix EᵀM E on the space's degrees of freedom."""
    _check_mesh(mesh, space)
    return space.basis.T @ nodal_mass(mesh) @ space.basis


def build_stiffness_matrix(mesh: Mesh, space: FieldSpace) -> np.ndarray:
    """Reduced H¹-seminorm Gram matrix EᵀK E (∫ u'v' dx)."""
    _check_mesh(mesh, space)
    return space.basis.T @ nodal_stiffness(mesh) @ space.basis


def build_gradient_coupling(mesh: Mesh, from_space: FieldSpace, to_space: FieldSpace) -> np.ndarray:
    """Mixed form ∫ (d/dx basis_from)·basis_to dx, reduced to both spaces.

    Returns a (to_space.dim, from_space.dim) matrix; vᵀ·G·u = ∫ u' v dx for
    coefficient vectors u, v. For two Dirichlet spaces the integration-by-parts
    boundary terms vanish identically and G_from,to = −G_to,fromᵀ exactly.
    """
    _check_mesh(mesh, from_space, to_space)
    return to_space.basis.T @ nodal_gradient(mesh) @ from_space.basis


def zero_mean_projector(mesh: Mesh, space: FieldSpace) -> np.ndarray:
    """Nodal mean-removal projector P = I − 1·cᵀ/(cᵀ1), c = M·1.

    Idempotent and self-adjoint in the mass inner product; P·v has zero
    mass-weighted mean for every nodal vector v.
    """
    _check_mesh(mesh, space)
    if space.flavor is Flavor.DIRICHLET:
        raise ValueError("zero-mean projector undefined for a Dirichlet space (no mean constraint there)")
    ones = np.ones(mesh.n + 1)
    c = nodal_mass(mesh) @ ones
    return np.eye(mesh.n + 1) - np.outer(ones, c) / float(c @ ones)
