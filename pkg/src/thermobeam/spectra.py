"""Spectrum, spectral abscissa and resolvent norms of the assembled pencil.

The generalized problem A·x = λ·M·x is reduced with the Cholesky factor
M = RᵀR to the standard dense problem for S = R⁻ᵀ·A·R⁻¹, which is similar to
M⁻¹A. The same transform makes the energy metric Euclidean, so the resolvent
norm in the energy metric is 1/σ_min(iλ·I − S) — the Cholesky similarity is
mandatory, not cosmetic: the plain Euclidean norm answers a different
question.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .assembly import SemidiscreteSystem

__all__ = [
    "DIM_CAP",
    "SpectrumReport",
    "ResolventScan",
    "hnorm_transform",
    "eigenvalues",
    "spectral_abscissa",
    "resolvent_norm",
    "resolvent_scan",
    "default_scan_grid",
]

DIM_CAP = 5000  # dense eigensolves/SVDs only; keep runs at desk scale

_NEAR_SINGULAR = 1e-12


@dataclass
class SpectrumReport:
    """All pencil eigenvalues, sorted by descending real part."""

    eigenvalues: np.ndarray
    abscissa: float
    dim: int
    config: dict

    def write_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("re,im\n")
            for lam in self.eigenvalues:
                f.write("%.17g,%.17g\n" % (lam.real, lam.imag))


@dataclass
class ResolventScan:
    """Energy-metric resolvent norms sampled along the imaginary axis."""

    lambdas: np.ndarray
    norms: np.ndarray
    sup_norm: float
    argmax_lambda: float

    def write_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("lambda,norm\n")
            for lam, nrm in zip(self.lambdas, self.norms):
                f.write("%.17g,%.17g\n" % (lam, nrm))


def _check_dim(sys: SemidiscreteSystem):
    if sys.dim > DIM_CAP:
        raise ValueError("state dimension %d exceeds the dense desk-scale cap %d" % (sys.dim, DIM_CAP))


def hnorm_transform(sys: SemidiscreteSystem) -> np.ndarray:
    """S = R⁻ᵀ·A·R⁻¹ with M = RᵀR; similar to M⁻¹A, isometric for the energy norm."""
    R = sys.m_chol_upper
    Y = scipy.linalg.solve_triangular(R, sys.A, trans="T", lower=False)
    return scipy.linalg.solve_triangular(R, Y.T, trans="T", lower=False).T


def eigenvalues(sys: SemidiscreteSystem) -> SpectrumReport:
    """Full spectrum of the pencil (A, M); closed under conjugation."""
    _check_dim(sys)
    vals = scipy.linalg.eigvals(hnorm_transform(sys))
    order = np.lexsort((vals.imag, -vals.real))
    vals = vals[order]
    return SpectrumReport(
        eigenvalues=vals,
        abscissa=float(np.max(vals.real)),
        dim=sys.dim,
        config=sys.config.as_dict(),
    )


def spectral_abscissa(sys: SemidiscreteSystem) -> float:
    """max Re λ over the spectrum; < 0 means exponential decay of the semigroup."""
    return eigenvalues(sys).abscissa


def resolvent_norm(sys: SemidiscreteSystem, lam: float, transform: np.ndarray | None = None) -> float:
    """Energy-metric norm of (iλ − generator)⁻¹ at real frequency λ.

    Computed as 1/σ_min of iλ·I − S on the Cholesky-transformed generator S.
    Within ~1e-12 of an eigenvalue the value is a large finite number and a
    warning is emitted.
    """
    _check_dim(sys)
    S = hnorm_transform(sys) if transform is None else transform
    shifted = 1j * float(lam) * np.eye(S.shape[0]) - S
    smin = float(scipy.linalg.svdvals(shifted)[-1])
    scale = max(1.0, float(np.max(np.abs(S))))
    if smin < _NEAR_SINGULAR * scale:
        warnings.warn(
            "iλ with λ=%g is within %.1e of the spectrum; resolvent norm is a large finite surrogate" % (lam, smin),
            RuntimeWarning,
        )
        smin = max(smin, np.finfo(float).tiny)
    return 1.0 / smin


def default_scan_grid(report: SpectrumReport, lo: float = 1e-2, hi: float = 1e3, count: int = 61) -> np.ndarray:
    """Log-spaced |λ| grid plus linear refinement near eigenvalue frequencies.

    Refines around the imaginary parts of the 12 least-damped oscillatory
    eigenvalues (±5%, 7 points each); the spectrum is conjugate-symmetric, so
    only λ ≥ 0 is scanned.
    """
    grid = [np.geomspace(lo, hi, count)]
    vals = report.eigenvalues
    osc = vals[vals.imag > 0.0]
    osc = osc[np.argsort(-osc.real)][:12]
    for lam in osc:
        center = lam.imag
        if lo <= center <= hi:
            grid.append(np.linspace(0.95 * center, 1.05 * center, 7))
    out = np.unique(np.concatenate(grid))
    return out


def resolvent_scan(sys: SemidiscreteSystem, lambdas=None, report: SpectrumReport | None = None) -> ResolventScan:
    """Sample the resolvent norm on a frequency grid; report sup and argmax."""
    _check_dim(sys)
    if lambdas is None:
        if report is None:
            report = eigenvalues(sys)
        lambdas = default_scan_grid(report)
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.size == 0:
        raise ValueError("empty frequency grid: scan sup is undefined")
    S = hnorm_transform(sys)
    norms = np.array([resolvent_norm(sys, lam, transform=S) for lam in lambdas])
    imax = int(np.argmax(norms))
    return ResolventScan(
        lambdas=lambdas,
        norms=norms,
        sup_norm=float(norms[imax]),
        argmax_lambda=float(lambdas[imax]),
    )
