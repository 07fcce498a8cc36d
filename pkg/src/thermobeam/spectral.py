"""Trigonometric per-mode assembly for the mixed Dirichlet-Neumann case.

Under the mixed boundary set the continuous system block-diagonalizes over
the trig family sin(jπx/L) (displacement, vertical temperature and its
memory) and cos(jπx/L), j ≥ 1 (rotation, longitudinal temperature and its
memory: zero-mean, insulated ends). Each mode j reduces to a small dense
ODE block, so the union over j of the block spectra samples the *continuous*
spectrum exactly on the first J modes. Used as a convergence oracle against
the finite-element assembly; not available for the full-Dirichlet set, where
the trig families couple across modes.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .assembly import ModelConfig, PhysicalParams, _resolve_channel
from .spaces import BoundarySet

__all__ = [
    "mode_generator",
    "spectral_eigenvalues",
    "spectral_abscissa",
    "elastic_frequencies",
]


def _check_mixed(config: ModelConfig):
    if config.bcs is not BoundarySet.MIXED_DN:
        raise ValueError("trig-spectral assembly is defined for the mixed Dirichlet-Neumann set only")


def mode_generator(config: ModelConfig, j: int) -> np.ndarray:
    """Dense generator block of trig mode j >= 1.

    Rows follow the state order (phi, Phi, psi, Psi, theta, eta.., xi, zeta..)
    with amplitudes relative to sin/cos of wavenumber jπ/L.
    """
    _check_mixed(config)
    if j < 1:
        raise ValueError("mode index must be >= 1")
    p = config.params
    kap = j * np.pi / p.L
    ch_t = _resolve_channel(config.law_theta, p.varpi1)
    ch_x = _resolve_channel(config.law_xi, p.varpi2)
    mt, mx = ch_t.modes, ch_x.modes
    dim = 6 + mt + mx
    i_phi, i_Phi, i_psi, i_Psi, i_th = 0, 1, 2, 3, 4
    i_eta = 5 + np.arange(mt)
    i_xi = 5 + mt
    i_zeta = 6 + mt + np.arange(mx)

    G = np.zeros((dim, dim))
    G[i_phi, i_Phi] = 1.0
    G[i_Phi, i_phi] = -p.k * kap**2 / p.rho1
    G[i_Phi, i_psi] = -p.k * kap / p.rho1
    G[i_Phi, i_th] = p.gamma * kap / p.rho1
    G[i_psi, i_Psi] = 1.0
    G[i_Psi, i_phi] = -p.k * kap / p.rho2
    G[i_Psi, i_psi] = -(p.k + p.b * kap**2) / p.rho2
    G[i_Psi, i_th] = p.gamma / p.rho2
    G[i_Psi, i_xi] = -p.sigma * kap / p.rho2
    G[i_th, i_Phi] = -p.gamma * kap / p.rho3
    G[i_th, i_Psi] = -p.gamma / p.rho3
    G[i_th, i_th] = -ch_t.varpi * ch_t.instantaneous * kap**2 / p.rho3
    for idx, w in zip(i_eta, ch_t.weights):
        G[i_th, idx] = -ch_t.varpi * w * kap**2 / p.rho3
    for idx, rate in zip(i_eta, ch_t.rates):
        G[idx, i_th] = 1.0
        G[idx, idx] = -rate
    G[i_xi, i_Psi] = p.sigma * kap / p.rho4
    G[i_xi, i_xi] = -ch_x.varpi * ch_x.instantaneous * kap**2 / p.rho4
    for idx, w in zip(i_zeta, ch_x.weights):
        G[i_xi, idx] = -ch_x.varpi * w * kap**2 / p.rho4
    for idx, rate in zip(i_zeta, ch_x.rates):
        G[idx, i_xi] = 1.0
        G[idx, idx] = -rate
    return G


def spectral_eigenvalues(config: ModelConfig, n_modes: int) -> np.ndarray:
    """Union of the per-mode spectra for j = 1..n_modes."""
    _check_mixed(config)
    vals = [scipy.linalg.eigvals(mode_generator(config, j)) for j in range(1, n_modes + 1)]
    return np.concatenate(vals)


def spectral_abscissa(config: ModelConfig, n_modes: int) -> float:
    """Largest real part over the first n_modes trig modes."""
    return float(np.max(np.real(spectral_eigenvalues(config, n_modes))))


def elastic_frequencies(params: PhysicalParams, j: int) -> tuple[float, float]:
    """Undamped beam frequencies of trig mode j (both dispersion branches).

    Solves the 2x2 generalized problem det(K − ω²·diag(rho1, rho2)) = 0 with
    K = [[k·κ², k·κ], [k·κ, k + b·κ²]], κ = jπ/L.
    """
    kap = j * np.pi / params.L
    K = np.array([[params.k * kap**2, params.k * kap], [params.k * kap, params.k + params.b * kap**2]])
    Mm = np.diag([params.rho1, params.rho2])
    om2 = scipy.linalg.eigh(K, Mm, eigvals_only=True)
    om = np.sqrt(np.maximum(om2, 0.0))
    return float(om[0]), float(om[1])
