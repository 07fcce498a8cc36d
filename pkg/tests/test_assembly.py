"""Assembled (M, A, D) triples: dissipativity, layouts, liftings, oracles."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

from thermobeam.assembly import (
    ModelConfig,
    PhysicalParams,
    apply_generator,
    assemble,
    assemble_cattaneo_flux,
    dissipation,
    elastic_subsystem,
    energy,
    history_lift,
)
from thermobeam.dynamics import MidpointStepper
from thermobeam.kernels import KernelSpec, make_cattaneo
from thermobeam.spaces import (
    BoundarySet,
    build_gradient_coupling,
    build_mass_matrix,
    build_stiffness_matrix,
    field_space,
    nodal_mass,
)
from thermobeam.spectra import eigenvalues
from conftest import BOTH_BCS, gp_config, law_table, two_mode_kernel


def dissipativity_residual(sys, state) -> float:
    lhs = float(np.real(np.vdot(state, sys.A @ state)))
    rhs = dissipation(sys, state)
    return abs(lhs + rhs) / (1.0 + abs(rhs))


class TestDissipativity:
    def test_all_law_pairs_both_bcs(self, rng):
        laws = law_table()
        for bcs in BOTH_BCS:
            for law_t in laws.values():
                for law_x in laws.values():
                    sys = assemble(ModelConfig(PhysicalParams(), law_t, law_x, bcs, 12))
                    for _ in range(3):
                        u = rng.standard_normal(sys.dim)
                        z = u + 1j * rng.standard_normal(sys.dim)
                        assert dissipativity_residual(sys, u) <= 1e-10
                        assert dissipativity_residual(sys, z) <= 1e-10

    def test_symmetric_part_is_minus_dissipation(self):
        sys = assemble(gp_config(n=10))
        resid = np.max(np.abs(0.5 * (sys.A + sys.A.T) + sys.D))
        assert resid <= 1e-12 * np.max(np.abs(sys.A))

    def test_dissipation_form_psd(self):
        for bcs in BOTH_BCS:
            sys = assemble(gp_config(bcs=bcs, n=10))
            w = scipy.linalg.eigvalsh(sys.D)
            assert w[0] >= -1e-12 * max(w[-1], 1.0)

    def test_random_params(self, rng):
        for _ in range(5):
            params = PhysicalParams(**{k: float(rng.uniform(0.1, 10.0))
                                       for k in ("rho1", "rho2", "rho3", "rho4", "k", "b",
                                                 "gamma", "sigma", "varpi1", "varpi2")})
            sys = assemble(gp_config(params=params, n=8))
            u = rng.standard_normal(sys.dim)
            assert dissipativity_residual(sys, u) <= 1e-10


class TestElasticCore:
    def test_skew_adjoint_and_undamped(self):
        params = PhysicalParams(gamma=0.0, sigma=0.0)
        for bcs in BOTH_BCS:
            law = KernelSpec.fourier()
            sub = elastic_subsystem(assemble(ModelConfig(params, law, law, bcs, 16)))
            assert np.max(np.abs(sub.A + sub.A.T)) <= 1e-10 * np.max(np.abs(sub.A))
            assert np.max(np.abs(sub.D)) == 0.0

    def test_requires_decoupled(self):
        with pytest.raises(ValueError):
            elastic_subsystem(assemble(gp_config(n=8)))


class TestLayout:
    def test_relaxation_pair_block_arithmetic(self):
        cfg = ModelConfig(PhysicalParams(), KernelSpec.cattaneo(1.0), KernelSpec.cattaneo(0.5),
                          BoundarySet.MIXED_DN, 10)
        sys = assemble(cfg)
        lay = sys.layout
        # phi/Phi Dirichlet (9), psi/Psi/theta zero-mean (10), one memory mode
        # per channel, xi/zeta Dirichlet (9)
        assert lay.names == ("phi", "Phi", "psi", "Psi", "theta", "eta0", "xi", "zeta0")
        assert lay.sizes == (9, 9, 10, 10, 10, 10, 9, 9)
        assert lay.dim == sum(lay.sizes) == sys.dim
        assert lay.block_count("eta") == 1 and lay.block_count("zeta") == 1

    def test_fourier_has_no_memory_blocks(self):
        law = KernelSpec.fourier()
        sys = assemble(ModelConfig(PhysicalParams(), law, law, BoundarySet.FULL_DIRICHLET, 8))
        assert sys.layout.block_count("eta") == 0
        assert sys.layout.block_count("zeta") == 0

    def test_zero_conductivity_drops_memory_blocks(self):
        params = PhysicalParams(varpi1=0.0, varpi2=0.0)
        sys = assemble(gp_config(params=params, n=8))
        assert sys.layout.block_count("eta") == 0
        assert np.max(np.abs(sys.D)) == 0.0

    def test_mode_counts_follow_kernel(self):
        sys = assemble(gp_config(n=8, kernel=two_mode_kernel()))
        assert sys.layout.block_count("eta") == 2
        assert sys.layout.block_count("zeta") == 2

    def test_unknown_block(self):
        sys = assemble(gp_config(n=8))
        with pytest.raises(KeyError):
            sys.layout.block_slice("nope")


class TestEnergy:
    def test_zero_state(self):
        sys = assemble(gp_config(n=8))
        assert energy(sys, np.zeros(sys.dim)) == 0.0

    def test_velocity_block_norm(self):
        sys = assemble(gp_config(n=12))
        sl = sys.layout.block_slice("Phi")
        m_phi = sys.M[sl, sl] / sys.config.params.rho1
        v = np.zeros(sys.dim)
        e = np.zeros(sl.stop - sl.start)
        e[2] = 1.0
        v[sl] = e / np.sqrt(e @ m_phi @ e)
        assert energy(sys, v) == pytest.approx(0.5 * sys.config.params.rho1, rel=1e-12)

    def test_sine_displacement_energy_converges(self):
        # pure phi = sin(pi x / L): energy -> k/2 (pi/L)^2 L/2 at second order
        params = PhysicalParams(k=2.0)
        errs = []
        for n in (16, 32, 64):
            cfg = ModelConfig(params, KernelSpec.fourier(), KernelSpec.fourier(),
                              BoundarySet.FULL_DIRICHLET, n)
            sys = assemble(cfg)
            mesh = cfg.mesh
            sl = sys.layout.block_slice("phi")
            v = np.zeros(sys.dim)
            v[sl] = np.sin(np.pi * mesh.nodes[1:-1] / params.L)
            exact = 0.5 * params.k * (np.pi / params.L) ** 2 * (params.L / 2.0)
            errs.append(abs(energy(sys, v) - exact) / exact)
        assert errs[0] < 1e-2
        order = np.log2(errs[0] / errs[1])
        assert order >= 1.8

    def test_dimension_mismatch(self):
        sys = assemble(gp_config(n=8))
        with pytest.raises(ValueError):
            energy(sys, np.zeros(sys.dim + 1))


class TestDissipationValues:
    def test_memory_free_states_undissipated(self, rng):
        sys = assemble(gp_config(n=10))
        u = rng.standard_normal(sys.dim)
        for i in range(sys.layout.block_count("eta")):
            u[sys.layout.block_slice("eta", i)] = 0.0
        for j in range(sys.layout.block_count("zeta")):
            u[sys.layout.block_slice("zeta", j)] = 0.0
        assert dissipation(sys, u) == 0.0

    def test_single_mode_closed_form(self, rng):
        # one relaxation mode: dissipation = varpi * b * w * v'Kv with w = c/b
        tau = 0.5
        cfg = ModelConfig(PhysicalParams(varpi1=3.0), KernelSpec.cattaneo(tau),
                          KernelSpec.fourier(), BoundarySet.MIXED_DN, 12)
        sys = assemble(cfg)
        sl = sys.layout.block_slice("eta", 0)
        v = rng.standard_normal(sl.stop - sl.start)
        u = np.zeros(sys.dim)
        u[sl] = v
        mesh = cfg.mesh
        k_theta = build_stiffness_matrix(mesh, sys.spaces["theta"])
        c, b = make_cattaneo(tau).terms[0]
        expected = 3.0 * b * (c / b) * (v @ k_theta @ v)
        assert dissipation(sys, u) == pytest.approx(expected, rel=1e-12)


class TestGenerator:
    def test_zero_and_linearity(self, rng):
        sys = assemble(gp_config(n=10))
        assert np.max(np.abs(apply_generator(sys, np.zeros(sys.dim)))) == 0.0
        u, v = rng.standard_normal(sys.dim), rng.standard_normal(sys.dim)
        lhs = apply_generator(sys, 2.0 * u - 3.0 * v)
        rhs = 2.0 * apply_generator(sys, u) - 3.0 * apply_generator(sys, v)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))

    def test_trivial_equilibrium_full_dirichlet(self):
        sys = assemble(gp_config(bcs=BoundarySet.FULL_DIRICHLET, n=10))
        assert eigenvalues(sys).abscissa < 0.0
        smin = scipy.linalg.svdvals(sys.A)[-1]
        assert smin > 1e-12 * scipy.linalg.svdvals(sys.A)[0]

    def test_zero_mean_preserved(self, rng):
        # mixed boundary set: generator output stays in the zero-mean subspaces
        cfg = gp_config(bcs=BoundarySet.MIXED_DN, n=12)
        sys = assemble(cfg)
        m0 = nodal_mass(cfg.mesh)
        ones = np.ones(cfg.mesh.n + 1)
        u = rng.standard_normal(sys.dim)
        du = apply_generator(sys, u)
        for name in ("psi", "Psi", "theta"):
            sl = sys.layout.block_slice(name)
            nodal = sys.spaces[name if name != "Psi" else "psi"].basis @ du[sl]
            assert abs(ones @ m0 @ nodal) <= 1e-12 * (1.0 + np.max(np.abs(nodal)))


class TestParamsValidation:
    def test_positive_required(self):
        with pytest.raises(ValueError):
            PhysicalParams(rho1=0.0)
        with pytest.raises(ValueError):
            PhysicalParams(k=-1.0)
        with pytest.raises(ValueError):
            PhysicalParams(L=0.0)

    def test_couplings_admit_zero_but_not_negative(self):
        PhysicalParams(gamma=0.0, sigma=0.0, varpi1=0.0, varpi2=0.0)
        with pytest.raises(ValueError):
            PhysicalParams(gamma=-0.1)

    def test_mesh_count(self):
        with pytest.raises(ValueError):
            ModelConfig(PhysicalParams(), KernelSpec.fourier(), KernelSpec.fourier(),
                        BoundarySet.MIXED_DN, 1)


class TestHistoryLift:
    def test_zero_past(self):
        sys = assemble(gp_config(n=8, kernel=two_mode_kernel()))
        eta, zeta = history_lift(None, None, sys)
        assert eta.shape == (2, sys.spaces["theta"].dim)
        assert np.max(np.abs(eta)) == 0.0 and np.max(np.abs(zeta)) == 0.0

    def test_constant_past_temperature(self):
        # past theta(x, s) = tbar(x): accumulated history lifts to tbar/b per mode
        kern = two_mode_kernel()
        sys = assemble(gp_config(n=10, kernel=kern))
        mesh = sys.config.mesh
        tbar = lambda x: np.sin(2.0 * np.pi * x / mesh.L)
        eta, _ = history_lift(lambda x, s: tbar(x), None, sys)
        space = sys.spaces["theta"]
        m0 = nodal_mass(mesh)
        gram = space.basis.T @ m0 @ space.basis
        proj = np.linalg.solve(gram, space.basis.T @ (m0 @ tbar(mesh.nodes)))
        for i, (_, b) in enumerate(kern.terms):
            np.testing.assert_allclose(eta[i], proj / b, rtol=1e-8, atol=1e-10)

    def test_compact_support_bound(self):
        s_star, amp = 0.7, 2.0
        kern = two_mode_kernel()
        sys = assemble(gp_config(n=8, kernel=kern))

        def q0(x, s):
            return amp if s <= s_star else 0.0

        _, zeta = history_lift(None, q0, sys)
        nodal = np.abs(sys.spaces["xi"].basis @ zeta.T)
        assert np.max(nodal) <= amp * s_star * 1.05


class TestFluxFormulation:
    def test_requires_relaxation_laws(self):
        with pytest.raises(ValueError):
            assemble_cattaneo_flux(gp_config(n=8))

    def test_dissipativity(self, rng):
        cfg = ModelConfig(PhysicalParams(), KernelSpec.cattaneo(0.4), KernelSpec.cattaneo(1.5),
                          BoundarySet.MIXED_DN, 12)
        sys = assemble_cattaneo_flux(cfg)
        for _ in range(4):
            u = rng.standard_normal(sys.dim)
            assert dissipativity_residual(sys, u) <= 1e-10

    def test_dimensions_match_history_form(self):
        for bcs in BOTH_BCS:
            cfg_f = ModelConfig(PhysicalParams(), KernelSpec.cattaneo(1.0), KernelSpec.cattaneo(1.0), bcs, 14)
            cfg_h = ModelConfig(PhysicalParams(), KernelSpec.gurtin_pipkin(make_cattaneo(1.0)),
                                KernelSpec.gurtin_pipkin(make_cattaneo(1.0)), bcs, 14)
            assert assemble_cattaneo_flux(cfg_f).dim == assemble(cfg_h).dim

    def test_relaxation_variant_equals_single_term_memory_form(self):
        # the "cattaneo" law is assembled as the one-term memory law, exactly
        p = PhysicalParams(varpi1=2.0)
        for bcs in BOTH_BCS:
            a = assemble(ModelConfig(p, KernelSpec.cattaneo(0.7), KernelSpec.cattaneo(1.3), bcs, 10))
            b = assemble(ModelConfig(p, KernelSpec.gurtin_pipkin(make_cattaneo(0.7)),
                                     KernelSpec.gurtin_pipkin(make_cattaneo(1.3)), bcs, 10))
            assert np.array_equal(a.M, b.M)
            assert np.array_equal(a.A, b.A)
            assert np.array_equal(a.D, b.D)


class TestFourierDirectAssembly:
    """Independent instantaneous-law assembly built from the spaces module only."""

    @staticmethod
    def direct_fourier(params: PhysicalParams, bcs: BoundarySet, n: int):
        from thermobeam.spaces import Mesh, field_flavors

        mesh = Mesh(params.L, n)
        fl = field_flavors(bcs)
        s_phi = field_space(mesh, fl["phi"])
        s_psi = field_space(mesh, fl["psi"])
        s_th = field_space(mesh, fl["theta"])
        s_xi = field_space(mesh, fl["xi"])
        mp, kp = build_mass_matrix(mesh, s_phi), build_stiffness_matrix(mesh, s_phi)
        ms, ks = build_mass_matrix(mesh, s_psi), build_stiffness_matrix(mesh, s_psi)
        mt, kt = build_mass_matrix(mesh, s_th), build_stiffness_matrix(mesh, s_th)
        mx, kx = build_mass_matrix(mesh, s_xi), build_stiffness_matrix(mesh, s_xi)
        P = build_gradient_coupling(mesh, s_phi, s_psi)
        Q = build_gradient_coupling(mesh, s_phi, s_th)
        R = build_gradient_coupling(mesh, s_xi, s_psi)
        N = s_th.basis.T @ nodal_mass(mesh) @ s_psi.basis
        dims = [s_phi.dim, s_phi.dim, s_psi.dim, s_psi.dim, s_th.dim, s_xi.dim]
        off = np.concatenate([[0], np.cumsum(dims)]).astype(int)
        sl = [slice(off[i], off[i + 1]) for i in range(6)]
        dim = off[-1]
        M = np.zeros((dim, dim))
        A = np.zeros((dim, dim))
        i_phi, i_Phi, i_psi, i_Psi, i_th, i_xi = range(6)
        p = params
        M[sl[i_phi], sl[i_phi]] = p.k * kp
        M[sl[i_psi], sl[i_phi]] = p.k * P
        M[sl[i_phi], sl[i_psi]] = p.k * P.T
        M[sl[i_psi], sl[i_psi]] = p.k * ms + p.b * ks
        M[sl[i_Phi], sl[i_Phi]] = p.rho1 * mp
        M[sl[i_Psi], sl[i_Psi]] = p.rho2 * ms
        M[sl[i_th], sl[i_th]] = p.rho3 * mt
        M[sl[i_xi], sl[i_xi]] = p.rho4 * mx
        A[sl[i_phi], sl[i_Phi]] = p.k * kp
        A[sl[i_Phi], sl[i_phi]] = -p.k * kp
        A[sl[i_phi], sl[i_Psi]] = p.k * P.T
        A[sl[i_Psi], sl[i_phi]] = -p.k * P
        A[sl[i_psi], sl[i_Phi]] = p.k * P
        A[sl[i_Phi], sl[i_psi]] = -p.k * P.T
        A[sl[i_psi], sl[i_Psi]] = p.k * ms + p.b * ks
        A[sl[i_Psi], sl[i_psi]] = -(p.k * ms + p.b * ks)
        A[sl[i_th], sl[i_Phi]] = -p.gamma * Q
        A[sl[i_Phi], sl[i_th]] = p.gamma * Q.T
        A[sl[i_th], sl[i_Psi]] = -p.gamma * N
        A[sl[i_Psi], sl[i_th]] = p.gamma * N.T
        A[sl[i_Psi], sl[i_xi]] = -p.sigma * R
        A[sl[i_xi], sl[i_Psi]] = p.sigma * R.T
        A[sl[i_th], sl[i_th]] = -p.varpi1 * kt
        A[sl[i_xi], sl[i_xi]] = -p.varpi2 * kx
        return M, A

    def test_spectra_match_production_path(self):
        from thermobeam.studies import match_spectra

        params = PhysicalParams(rho3=1.3, varpi1=0.8, sigma=1.7)
        for bcs in BOTH_BCS:
            law = KernelSpec.fourier()
            sys = assemble(ModelConfig(params, law, law, bcs, 12))
            M, A = self.direct_fourier(params, bcs, 12)
            ref = scipy.linalg.eig(A, M, right=False)
            got = eigenvalues(sys).eigenvalues
            assert match_spectra(got, ref) <= 1e-9 * np.max(np.abs(ref))


class TestHistoryGridOracle:
    """Cross-check of the mode reduction against an s-grid transport history.

    The accumulated-history field eta(x, s) is discretized on a uniform s-grid
    with upwind transport (inflow eta = 0 at s = 0) and trapezoid weights for
    the history energy and flux; the resulting semidiscrete system replaces
    the mode blocks. Trajectories of the physical fields must converge to the
    mode-reduced ones as the s-grid refines (first-order upwind).
    """

    @staticmethod
    def sgrid_system(params, n, kern, s_cells, s_max):
        from thermobeam.spaces import Mesh, field_flavors
        from thermobeam.kernels import evaluate_mu

        mesh = Mesh(params.L, n)
        fl = field_flavors(BoundarySet.MIXED_DN)
        s_phi = field_space(mesh, fl["phi"])
        s_psi = field_space(mesh, fl["psi"])
        s_th = field_space(mesh, fl["theta"])
        s_xi = field_space(mesh, fl["xi"])
        mp, kp = build_mass_matrix(mesh, s_phi), build_stiffness_matrix(mesh, s_phi)
        ms, ks = build_mass_matrix(mesh, s_psi), build_stiffness_matrix(mesh, s_psi)
        mt, kt = build_mass_matrix(mesh, s_th), build_stiffness_matrix(mesh, s_th)
        mx, kx = build_mass_matrix(mesh, s_xi), build_stiffness_matrix(mesh, s_xi)
        P = build_gradient_coupling(mesh, s_phi, s_psi)
        Q = build_gradient_coupling(mesh, s_phi, s_th)
        R = build_gradient_coupling(mesh, s_xi, s_psi)
        N = s_th.basis.T @ nodal_mass(mesh) @ s_psi.basis

        ds = s_max / s_cells
        s_nodes = ds * np.arange(1, s_cells + 1)  # eta(0) = 0 is eliminated
        w_s = np.full(s_cells, ds)
        w_s[-1] *= 0.5
        mu_s = evaluate_mu(kern, s_nodes)
        d_th = s_th.dim
        dims = [s_phi.dim, s_phi.dim, s_psi.dim, s_psi.dim, d_th, s_cells * d_th, s_xi.dim]
        off = np.concatenate([[0], np.cumsum(dims)]).astype(int)
        sl = [slice(off[i], off[i + 1]) for i in range(len(dims))]
        dim = off[-1]
        i_phi, i_Phi, i_psi, i_Psi, i_th, i_eta, i_xi = range(7)

        def eta_sl(a):
            return slice(off[i_eta] + a * d_th, off[i_eta] + (a + 1) * d_th)

        p = params
        M = np.zeros((dim, dim))
        A = np.zeros((dim, dim))
        M[sl[i_phi], sl[i_phi]] = p.k * kp
        M[sl[i_psi], sl[i_phi]] = p.k * P
        M[sl[i_phi], sl[i_psi]] = p.k * P.T
        M[sl[i_psi], sl[i_psi]] = p.k * ms + p.b * ks
        M[sl[i_Phi], sl[i_Phi]] = p.rho1 * mp
        M[sl[i_Psi], sl[i_Psi]] = p.rho2 * ms
        M[sl[i_th], sl[i_th]] = p.rho3 * mt
        M[sl[i_xi], sl[i_xi]] = p.rho4 * mx
        for a in range(s_cells):
            M[eta_sl(a), eta_sl(a)] = p.varpi1 * w_s[a] * mu_s[a] * kt

        A[sl[i_phi], sl[i_Phi]] = p.k * kp
        A[sl[i_Phi], sl[i_phi]] = -p.k * kp
        A[sl[i_phi], sl[i_Psi]] = p.k * P.T
        A[sl[i_Psi], sl[i_phi]] = -p.k * P
        A[sl[i_psi], sl[i_Phi]] = p.k * P
        A[sl[i_Phi], sl[i_psi]] = -p.k * P.T
        A[sl[i_psi], sl[i_Psi]] = p.k * ms + p.b * ks
        A[sl[i_Psi], sl[i_psi]] = -(p.k * ms + p.b * ks)
        A[sl[i_th], sl[i_Phi]] = -p.gamma * Q
        A[sl[i_Phi], sl[i_th]] = p.gamma * Q.T
        A[sl[i_th], sl[i_Psi]] = -p.gamma * N
        A[sl[i_Psi], sl[i_th]] = p.gamma * N.T
        A[sl[i_Psi], sl[i_xi]] = -p.sigma * R
        A[sl[i_xi], sl[i_Psi]] = p.sigma * R.T
        A[sl[i_xi], sl[i_xi]] = -p.varpi2 * kx
        # flux row: varpi1 * sum_a w_a mu_a (eta_a)_xx tested against theta
        for a in range(s_cells):
            A[sl[i_th], eta_sl(a)] = -p.varpi1 * w_s[a] * mu_s[a] * kt
        # history rows (weight varpi1 w_a mu_a): source theta, upwind -d/ds
        for a in range(s_cells):
            wgt = p.varpi1 * w_s[a] * mu_s[a]
            A[eta_sl(a), sl[i_th]] = wgt * kt
            A[eta_sl(a), eta_sl(a)] += -(wgt / ds) * kt
            if a > 0:
                A[eta_sl(a), eta_sl(a - 1)] = (wgt / ds) * kt
        return M, A, sl

    def test_trajectories_converge_to_mode_reduction(self):
        kern = two_mode_kernel()
        params = PhysicalParams()
        n = 6
        cfg = ModelConfig(params, KernelSpec.gurtin_pipkin(kern), KernelSpec.fourier(),
                          BoundarySet.MIXED_DN, n)
        sys = assemble(cfg)
        mesh = cfg.mesh
        # zero history; smooth (first trig mode) physical fields, so the
        # history stays resolvable on the s-grid
        u0 = np.zeros(sys.dim)
        profiles = {
            "phi": np.sin(np.pi * mesh.nodes), "Phi": 0.5 * np.sin(np.pi * mesh.nodes),
            "psi": np.cos(np.pi * mesh.nodes), "Psi": -0.3 * np.cos(np.pi * mesh.nodes),
            "theta": 0.7 * np.cos(np.pi * mesh.nodes), "xi": 0.4 * np.sin(np.pi * mesh.nodes),
        }
        for name, prof in profiles.items():
            sp = sys.spaces[{"Phi": "phi", "Psi": "psi"}.get(name, name)]
            coef, *_ = np.linalg.lstsq(sp.basis, prof, rcond=None)
            u0[sys.layout.block_slice(name)] = coef
        dt, t_final = 0.01, 2.0
        steps = int(round(t_final / dt))
        stepper = MidpointStepper(sys, dt)
        u = u0.copy()
        for _ in range(steps):
            u = stepper.step(u)
        theta_ref = u[sys.layout.block_slice("theta")]

        errs = []
        for s_cells in (40, 80, 160):
            M, A, sl = self.sgrid_system(params, n, kern, s_cells, s_max=12.0)
            lu = scipy.linalg.lu_factor(M - 0.5 * dt * A)
            rhs = M + 0.5 * dt * A
            v = np.zeros(M.shape[0])
            for i, name in ((0, "phi"), (1, "Phi"), (2, "psi"), (3, "Psi"), (4, "theta"), (6, "xi")):
                v[sl[i]] = u0[sys.layout.block_slice(name)]
            for _ in range(steps):
                v = scipy.linalg.lu_solve(lu, rhs @ v)
            errs.append(np.linalg.norm(v[sl[4]] - theta_ref) / np.linalg.norm(theta_ref))
        # first-order upwind: errors shrink roughly linearly in the s-step
        assert errs[0] > errs[1] > errs[2]
        assert np.log2(errs[1] / errs[2]) >= 0.8
        assert errs[2] <= 0.12
