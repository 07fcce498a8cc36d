"""Semidiscrete assembly of the coupled beam/heat system.

State vector blocks, in order: displacement phi, its velocity Phi, rotation
psi, its velocity Psi, longitudinal temperature theta, memory fields
eta_1..eta_m (one per kernel term), vertical temperature xi, memory fields
zeta_1..zeta_m'. The continuous equations are

    rho1·phi_tt = k·(phi_x + psi)_x − gamma·theta_x
    rho2·psi_tt = b·psi_xx − k·(phi_x + psi) + gamma·theta − sigma·xi_x
    rho3·theta_t = varpi1·[ i1·theta_xx + m1·Σ wᵢ·(etaᵢ)_xx ] − gamma·(Phi_x + Psi)
    (etaᵢ)_t = −bᵢ·etaᵢ + theta
    rho4·xi_t = varpi2·[ i2·xi_xx + m2·Σ w̃ⱼ·(zetaⱼ)_xx ] − sigma·Psi_x
    (zetaⱼ)_t = −b̃ⱼ·zetaⱼ + xi

where (i, m) are the instantaneous/memory weights of each channel's law and
wᵢ = cᵢ/bᵢ. The memory fields are the exponentially weighted history averages
etaᵢ(x,t) = ∫₀^∞ bᵢ·e^{−bᵢ s}·(accumulated past temperature)(x,s) ds, which for
exponential-sum kernels reduce the history convolution exactly.

The assembled triple (M, A, D) satisfies, by construction and to rounding,

    Re(Uᴴ A U) = −Uᴴ D U   for every state U,

with M the energy Gram matrix (squared energy norm = Uᴴ M U), A the weak-form
generator (the evolution is M·U' = A·U) and D the positive-semidefinite
dissipation form supported on the memory blocks plus, for laws with an
instantaneous part, the temperature blocks. Every coupling block of A is
written once and mirrored as its negative transpose; the mirrored identities
hold exactly because the phi and xi bases vanish at the endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg

from .kernels import KernelSpec, flux_weights
from .spaces import (
    BoundarySet,
    FieldSpace,
    Flavor,
    Mesh,
    build_gradient_coupling,
    build_mass_matrix,
    build_stiffness_matrix,
    cell_derivative,
    field_flavors,
    field_space,
    nodal_mass,
)

__all__ = [
    "PhysicalParams",
    "ModelConfig",
    "BlockLayout",
    "SemidiscreteSystem",
    "assemble",
    "assemble_cattaneo_flux",
    "elastic_subsystem",
    "energy",
    "dissipation",
    "apply_generator",
    "history_lift",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Structural parameters of the model.

    Densities/capacities rho1..rho4, elastic moduli k and b, thermal coupling
    coefficients gamma and sigma, conductivities varpi1 and varpi2, length L.
    gamma, sigma and the varpis admit 0 for diagnostic (undamped/decoupled)
    configurations; everything else is strictly positive.
    """

    rho1: float = 1.0
    rho2: float = 1.0
    rho3: float = 1.0
    rho4: float = 1.0
    k: float = 1.0
    b: float = 1.0
    gamma: float = 1.0
    sigma: float = 1.0
    varpi1: float = 1.0
    varpi2: float = 1.0
    L: float = 1.0

    def __post_init__(self):
        for name in ("rho1", "rho2", "rho3", "rho4", "k", "b", "L"):
            if getattr(self, name) <= 0.0:
                raise ValueError("parameter %s must be > 0, got %g" % (name, getattr(self, name)))
        for name in ("gamma", "sigma", "varpi1", "varpi2"):
            if getattr(self, name) < 0.0:
                raise ValueError("parameter %s must be >= 0, got %g" % (name, getattr(self, name)))

    def as_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in ("rho1", "rho2", "rho3", "rho4", "k", "b", "gamma", "sigma", "varpi1", "varpi2", "L")}


@dataclass(frozen=True)
class ModelConfig:
    """Full model description: parameters, per-channel law, boundary set, mesh size."""

    params: PhysicalParams
    law_theta: KernelSpec
    law_xi: KernelSpec
    bcs: BoundarySet
    n: int

    def __post_init__(self):
        object.__setattr__(self, "bcs", BoundarySet(self.bcs))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("mesh cell count must be an integer >= 2, got %r" % (self.n,))
        object.__setattr__(self, "n", int(self.n))

    @property
    def mesh(self) -> Mesh:
        return Mesh(L=self.params.L, n=self.n)

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "law_theta": self.law_theta.as_dict(),
            "law_xi": self.law_xi.as_dict(),
            "bcs": self.bcs.value,
            "mesh_n": self.n,
        }


@dataclass(frozen=True)
class BlockLayout:
    """Contiguous block offsets of the state vector."""

    names: tuple[str, ...]
    offsets: tuple[int, ...]
    sizes: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.offsets[-1] + self.sizes[-1]

    def block_slice(self, name: str, index: int | None = None) -> slice:
        """Slice of a named block; memory blocks take an index, e.g. ("eta", 2)."""
        key = name if index is None else "%s%d" % (name, index)
        try:
            i = self.names.index(key)
        except ValueError:
            raise KeyError("no block %r in layout %r" % (key, self.names)) from None
        return slice(self.offsets[i], self.offsets[i] + self.sizes[i])

    def block_count(self, prefix: str) -> int:
        return sum(1 for nm in self.names if nm.rstrip("0123456789") == prefix and nm != prefix)


def _layout(names_sizes: list[tuple[str, int]]) -> BlockLayout:
    names, sizes = zip(*names_sizes)
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)
    return BlockLayout(tuple(names), tuple(int(o) for o in offsets), tuple(int(s) for s in sizes))


@dataclass(frozen=True)
class _Channel:
    """Resolved conduction law of one temperature channel."""

    varpi: float
    instantaneous: float
    rates: np.ndarray
    weights: np.ndarray  # per-mode energy/flux weights, memory factor included

    @property
    def modes(self) -> int:
        return len(self.rates)


def _resolve_channel(law: KernelSpec, varpi: float) -> _Channel:
    # varpi = 0 switches the channel's conduction off entirely (diagnostic);
    # keeping energy-null memory blocks would make the Gram matrix singular.
    if varpi == 0.0:
        return _Channel(0.0, 0.0, np.zeros(0), np.zeros(0))
    kernel = law.memory_kernel()
    mw = law.memory_weight()
    if kernel is None or mw == 0.0:
        return _Channel(varpi, law.instantaneous_weight(), np.zeros(0), np.zeros(0))
    return _Channel(varpi, law.instantaneous_weight(), kernel.rates, mw * flux_weights(kernel))


@dataclass
class SemidiscreteSystem:
    """Assembled Gram matrix M, generator A, dissipation form D and layout.

    Immutable after assembly (by convention); the Cholesky factor of M is
    computed once and shared, so concurrent simulations and scans can use one
    instance freely.
    """

    M: np.ndarray
    A: np.ndarray
    D: np.ndarray
    layout: BlockLayout
    config: ModelConfig
    spaces: dict[str, FieldSpace]
    m_chol_upper: np.ndarray  # R with M = RᵀR

    @property
    def dim(self) -> int:
        return self.layout.dim


def _new_block_writer(layout: BlockLayout):
    dim = layout.dim
    M = np.zeros((dim, dim))
    A = np.zeros((dim, dim))
    D = np.zeros((dim, dim))

    def put(mat, row, col, block, mirror=None):
        rs = layout.block_slice(*row) if isinstance(row, tuple) else layout.block_slice(row)
        cs = layout.block_slice(*col) if isinstance(col, tuple) else layout.block_slice(col)
        mat[rs, cs] += block
        if mirror == "sym":
            mat[cs, rs] += block.T
        elif mirror == "skew":
            mat[cs, rs] -= block.T

    return M, A, D, put


def assemble(config: ModelConfig) -> SemidiscreteSystem:
    """Assemble (M, A, D) for the configured model.

    M realizes the squared energy norm

        k‖phi_x + psi‖² + rho1‖Phi‖² + b‖psi_x‖² + rho2‖Psi‖² + rho3‖theta‖²
        + varpi1·m1·Σ wᵢ‖(etaᵢ)_x‖² + rho4‖xi‖² + varpi2·m2·Σ w̃ⱼ‖(zetaⱼ)_x‖²,

    A the weak form of the generator and D the dissipation form, with
    sym(A) = −D exactly.
    """
    p = config.params
    mesh = config.mesh
    flavors = field_flavors(config.bcs)
    ch_t = _resolve_channel(config.law_theta, p.varpi1)
    ch_x = _resolve_channel(config.law_xi, p.varpi2)

    sp = {name: field_space(mesh, flavors[name]) for name in ("phi", "psi", "theta", "xi")}
    sp["Phi"], sp["Psi"] = sp["phi"], sp["psi"]
    sp["eta"], sp["zeta"] = sp["theta"], sp["xi"]

    blocks = [("phi", sp["phi"].dim), ("Phi", sp["phi"].dim), ("psi", sp["psi"].dim), ("Psi", sp["psi"].dim)]
    blocks.append(("theta", sp["theta"].dim))
    blocks += [("eta%d" % i, sp["theta"].dim) for i in range(ch_t.modes)]
    blocks.append(("xi", sp["xi"].dim))
    blocks += [("zeta%d" % j, sp["xi"].dim) for j in range(ch_x.modes)]
    layout = _layout(blocks)

    M, A, D, put = _new_block_writer(layout)

    m_phi = build_mass_matrix(mesh, sp["phi"])
    k_phi = build_stiffness_matrix(mesh, sp["phi"])
    m_psi = build_mass_matrix(mesh, sp["psi"])
    k_psi = build_stiffness_matrix(mesh, sp["psi"])
    m_theta = build_mass_matrix(mesh, sp["theta"])
    k_theta = build_stiffness_matrix(mesh, sp["theta"])
    m_xi = build_mass_matrix(mesh, sp["xi"])
    k_xi = build_stiffness_matrix(mesh, sp["xi"])

    # vᵀ·P·u = ∫ u' v with u in the phi space, v in the psi space, etc.
    P = build_gradient_coupling(mesh, sp["phi"], sp["psi"])
    Q = build_gradient_coupling(mesh, sp["phi"], sp["theta"])
    R = build_gradient_coupling(mesh, sp["xi"], sp["psi"])
    N = sp["theta"].basis.T @ nodal_mass(mesh) @ sp["psi"].basis

    # --- Gram matrix of the energy norm.
    put(M, "phi", "phi", p.k * k_phi)
    put(M, "psi", "phi", p.k * P, mirror="sym")
    put(M, "psi", "psi", p.k * m_psi + p.b * k_psi)
    put(M, "Phi", "Phi", p.rho1 * m_phi)
    put(M, "Psi", "Psi", p.rho2 * m_psi)
    put(M, "theta", "theta", p.rho3 * m_theta)
    for i, w in enumerate(ch_t.weights):
        put(M, ("eta", i), ("eta", i), ch_t.varpi * w * k_theta)
    put(M, "xi", "xi", p.rho4 * m_xi)
    for j, w in enumerate(ch_x.weights):
        put(M, ("zeta", j), ("zeta", j), ch_x.varpi * w * k_xi)

    # --- Generator, elastic part. The first energy term pairs the phi/psi
    # test components with Phi_x + Psi, the velocity rows integrate by parts.
    put(A, "phi", "Phi", p.k * k_phi, mirror="skew")
    put(A, "phi", "Psi", p.k * P.T)
    put(A, "Psi", "phi", -p.k * P)
    put(A, "psi", "Phi", p.k * P)
    put(A, "Phi", "psi", -p.k * P.T)
    put(A, "psi", "Psi", p.k * m_psi + p.b * k_psi, mirror="skew")

    # --- Thermal coupling (antisymmetric: no energy exchange on its own).
    put(A, "theta", "Phi", -p.gamma * Q, mirror="skew")
    put(A, "theta", "Psi", -p.gamma * N, mirror="skew")
    put(A, "Psi", "xi", -p.sigma * R, mirror="skew")

    # --- Conduction: instantaneous part damps the temperature directly,
    # memory modes exchange with it and relax at their own rates.
    if ch_t.instantaneous > 0.0:
        put(A, "theta", "theta", -ch_t.varpi * ch_t.instantaneous * k_theta)
        put(D, "theta", "theta", ch_t.varpi * ch_t.instantaneous * k_theta)
    for i, (w, rate) in enumerate(zip(ch_t.weights, ch_t.rates)):
        coup = ch_t.varpi * w * k_theta
        put(A, ("eta", i), "theta", coup, mirror="skew")
        put(A, ("eta", i), ("eta", i), -rate * coup)
        put(D, ("eta", i), ("eta", i), rate * coup)
    if ch_x.instantaneous > 0.0:
        put(A, "xi", "xi", -ch_x.varpi * ch_x.instantaneous * k_xi)
        put(D, "xi", "xi", ch_x.varpi * ch_x.instantaneous * k_xi)
    for j, (w, rate) in enumerate(zip(ch_x.weights, ch_x.rates)):
        coup = ch_x.varpi * w * k_xi
        put(A, ("zeta", j), "xi", coup, mirror="skew")
        put(A, ("zeta", j), ("zeta", j), -rate * coup)
        put(D, ("zeta", j), ("zeta", j), rate * coup)

    return _finish(M, A, D, layout, config, sp)


def _finish(M, A, D, layout, config, spaces) -> SemidiscreteSystem:
    try:
        chol = scipy.linalg.cholesky(M, lower=False)
    except scipy.linalg.LinAlgError as exc:
        raise ValueError("energy Gram matrix is not positive definite: %s" % exc) from exc
    return SemidiscreteSystem(M=M, A=A, D=D, layout=layout, config=config, spaces=spaces, m_chol_upper=chol)


def assemble_cattaneo_flux(config: ModelConfig) -> SemidiscreteSystem:
    """Explicit first-order flux formulation of the relaxation-time law.

    Both channels must use the "cattaneo" law. The flux fields q, p solve

        tau·q_t + q + varpi1·theta_x = 0,     varsigma·p_t + p + varpi2·xi_x = 0,

    and enter the temperature equations via rho3·theta_t = −q_x − ... . They
    are discretized in piecewise constants (the image of the P1 derivative),
    with a zero-sum constraint exactly when the paired temperature is
    Dirichlet; that choice makes this assembly exactly isometric to the
    one-mode history assembly, so the two spectra agree to rounding. Energy
    weights are tau/varpi1 on q and varsigma/varpi2 on p.
    """
    p = config.params
    if config.law_theta.variant != "cattaneo" or config.law_xi.variant != "cattaneo":
        raise ValueError("flux assembly requires the cattaneo law on both channels")
    if p.varpi1 <= 0.0 or p.varpi2 <= 0.0:
        raise ValueError("flux assembly requires varpi1, varpi2 > 0")
    tau, varsigma = config.law_theta.tau, config.law_xi.tau

    mesh = config.mesh
    flavors = field_flavors(config.bcs)
    sp = {name: field_space(mesh, flavors[name]) for name in ("phi", "psi", "theta", "xi")}
    sp["Phi"], sp["Psi"] = sp["phi"], sp["psi"]

    h, n = mesh.h, mesh.n
    deriv = cell_derivative(mesh)

    def flux_basis(temp_space: FieldSpace) -> np.ndarray:
        if temp_space.flavor is Flavor.DIRICHLET:
            return scipy.linalg.null_space(np.ones((1, n)))
        return np.eye(n)

    Eq = flux_basis(sp["theta"])
    Ep = flux_basis(sp["xi"])

    blocks = [("phi", sp["phi"].dim), ("Phi", sp["phi"].dim), ("psi", sp["psi"].dim), ("Psi", sp["psi"].dim),
              ("theta", sp["theta"].dim), ("q", Eq.shape[1]), ("xi", sp["xi"].dim), ("p", Ep.shape[1])]
    layout = _layout(blocks)
    M, A, D, put = _new_block_writer(layout)

    m_phi = build_mass_matrix(mesh, sp["phi"])
    k_phi = build_stiffness_matrix(mesh, sp["phi"])
    m_psi = build_mass_matrix(mesh, sp["psi"])
    k_psi = build_stiffness_matrix(mesh, sp["psi"])
    m_theta = build_mass_matrix(mesh, sp["theta"])
    m_xi = build_mass_matrix(mesh, sp["xi"])
    P = build_gradient_coupling(mesh, sp["phi"], sp["psi"])
    Q = build_gradient_coupling(mesh, sp["phi"], sp["theta"])
    R = build_gradient_coupling(mesh, sp["xi"], sp["psi"])
    N = sp["theta"].basis.T @ nodal_mass(mesh) @ sp["psi"].basis
    m_q = h * (Eq.T @ Eq)
    m_p = h * (Ep.T @ Ep)

    put(M, "phi", "phi", p.k * k_phi)
    put(M, "psi", "phi", p.k * P, mirror="sym")
    put(M, "psi", "psi", p.k * m_psi + p.b * k_psi)
    put(M, "Phi", "Phi", p.rho1 * m_phi)
    put(M, "Psi", "Psi", p.rho2 * m_psi)
    put(M, "theta", "theta", p.rho3 * m_theta)
    put(M, "q", "q", (tau / p.varpi1) * m_q)
    put(M, "xi", "xi", p.rho4 * m_xi)
    put(M, "p", "p", (varsigma / p.varpi2) * m_p)

    put(A, "phi", "Phi", p.k * k_phi, mirror="skew")
    put(A, "phi", "Psi", p.k * P.T)
    put(A, "Psi", "phi", -p.k * P)
    put(A, "psi", "Phi", p.k * P)
    put(A, "Phi", "psi", -p.k * P.T)
    put(A, "psi", "Psi", p.k * m_psi + p.b * k_psi, mirror="skew")
    put(A, "theta", "Phi", -p.gamma * Q, mirror="skew")
    put(A, "theta", "Psi", -p.gamma * N, mirror="skew")
    put(A, "Psi", "xi", -p.sigma * R, mirror="skew")

    # Flux rows: −q_x tested against theta (weakly, via ∫q·v'), relaxation
    # −q/tau damping the flux itself.
    put(A, "theta", "q", h * ((deriv @ sp["theta"].basis).T @ Eq), mirror="skew")
    put(A, "q", "q", -(1.0 / p.varpi1) * m_q)
    put(D, "q", "q", (1.0 / p.varpi1) * m_q)
    put(A, "xi", "p", h * ((deriv @ sp["xi"].basis).T @ Ep), mirror="skew")
    put(A, "p", "p", -(1.0 / p.varpi2) * m_p)
    put(D, "p", "p", (1.0 / p.varpi2) * m_p)

    return _finish(M, A, D, layout, config, sp)


def elastic_subsystem(sys: SemidiscreteSystem) -> SemidiscreteSystem:
    """Restriction to the four elastic blocks (phi, Phi, psi, Psi).

    Only meaningful as a standalone system when gamma = sigma = 0 (the
    thermal coupling off), where it is the undamped skew-adjoint core.
    """
    p = sys.config.params
    if p.gamma != 0.0 or p.sigma != 0.0:
        raise ValueError("elastic subsystem requires gamma = sigma = 0")
    take = np.concatenate(
        [np.arange(s.start, s.stop) for s in (sys.layout.block_slice(nm) for nm in ("phi", "Phi", "psi", "Psi"))]
    )
    layout = _layout([(nm, sys.layout.sizes[sys.layout.names.index(nm)]) for nm in ("phi", "Phi", "psi", "Psi")])
    M = sys.M[np.ix_(take, take)]
    A = sys.A[np.ix_(take, take)]
    D = sys.D[np.ix_(take, take)]
    return _finish(M, A, D, layout, sys.config, sys.spaces)


def energy(sys: SemidiscreteSystem, state: np.ndarray) -> float:
    """Energy ½·stateᴴ·M·state (real, nonnegative)."""
    state = _check_state(sys, state)
    return 0.5 * float(np.real(np.vdot(state, sys.M @ state)))


def dissipation(sys: SemidiscreteSystem, state: np.ndarray) -> float:
    """Instantaneous dissipation rate stateᴴ·D·state = −dE/dt along the flow."""
    state = _check_state(sys, state)
    return float(np.real(np.vdot(state, sys.D @ state)))


def apply_generator(sys: SemidiscreteSystem, state: np.ndarray) -> np.ndarray:
    """Time derivative M⁻¹·A·state via the cached Cholesky factor of M."""
    state = _check_state(sys, state)
    rhs = sys.A @ state
    R = sys.m_chol_upper
    y = scipy.linalg.solve_triangular(R, rhs, trans="T", lower=False)
    return scipy.linalg.solve_triangular(R, y, lower=False)


def _check_state(sys: SemidiscreteSystem, state: np.ndarray) -> np.ndarray:
    state = np.asarray(state)
    if state.shape != (sys.dim,):
        raise ValueError("state has shape %r, expected (%d,)" % (state.shape, sys.dim))
    return state


def history_lift(p0, q0, sys: SemidiscreteSystem) -> tuple[np.ndarray, np.ndarray]:
    """Project past-temperature data onto the memory blocks.

    p0(x, s) and q0(x, s) are the temperatures at time −s (s > 0) of the two
    channels; mode i receives its exponentially weighted history average,
    which for the accumulated history reduces to the Laplace transform
    ∫₀^∞ e^{−bᵢ s}·p0(x, s) ds, evaluated by adaptive quadrature per node and
    L²-projected onto the field space. Returns arrays of shape
    (modes, block dim). Pass None for a channel with no memory blocks or
    identically zero past.
    """
    mesh = sys.config.mesh
    nodes = mesh.nodes
    m_nodal = nodal_mass(mesh)

    def lift(data, space: FieldSpace, rates: np.ndarray) -> np.ndarray:
        out = np.zeros((len(rates), space.dim))
        if data is None or len(rates) == 0:
            return out
        gram = space.basis.T @ m_nodal @ space.basis
        for i, rate in enumerate(rates):
            vals = np.empty(len(nodes))
            for j, x in enumerate(nodes):
                val, err = scipy.integrate.quad(
                    lambda s: np.exp(-rate * s) * data(x, s), 0.0, np.inf, limit=200
                )
                if not np.isfinite(val) or err > 1e-6 * (1.0 + abs(val)):
                    raise ValueError("history lift failed at x=%g, rate=%g (value %r, err %r)" % (x, rate, val, err))
                vals[j] = val
            out[i] = np.linalg.solve(gram, space.basis.T @ (m_nodal @ vals))
        return out

    th_rates = _resolve_channel(sys.config.law_theta, sys.config.params.varpi1).rates
    xi_rates = _resolve_channel(sys.config.law_xi, sys.config.params.varpi2).rates
    eta = lift(p0, sys.spaces["theta"], th_rates)
    zeta = lift(q0, sys.spaces["xi"], xi_rates)
    return eta, zeta
