"""Exponential-sum (Prony) memory kernels and heat-conduction law variants.

The hyperbolic heat laws used here convolve the temperature-gradient history
against a relaxation kernel g(s) = Σᵢ (cᵢ/bᵢ)·exp(−bᵢ·s), whose density
μ(s) = −g'(s) = Σᵢ cᵢ·exp(−bᵢ·s) weights the history energy. Restricting to
finite exponential sums keeps every convolution reducible to a handful of
auxiliary relaxation fields (one per term) while covering the
relaxation-time law exactly (single term c = 1/τ², b = 1/τ).

Conventions:

- terms are (c, b) pairs with c ≥ 0, b > 0, so μ is non-increasing and g is
  convex;
- total mass means ∫₀^∞ g(s) ds = Σ cᵢ/bᵢ²; unit mass is what the beam model
  assumes for its conduction coefficients to be meaningful;
- the exponential-domination rate (largest δ with μ' + δ·μ ≤ 0) is min bᵢ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PronyKernel",
    "KernelSpec",
    "evaluate_g",
    "evaluate_mu",
    "total_mass",
    "normalize_unit_mass",
    "dafermos_rate",
    "rescale",
    "make_cattaneo",
    "flux_weights",
]

UNIT_MASS_RTOL = 1e-12

GURTIN_PIPKIN = "gurtin_pipkin"
FOURIER = "fourier"
CATTANEO = "cattaneo"
COLEMAN_GURTIN = "coleman_gurtin"

_VARIANTS = (GURTIN_PIPKIN, FOURIER, CATTANEO, COLEMAN_GURTIN)


@dataclass(frozen=True)
class PronyKernel:
    """Memory kernel μ(s) = Σᵢ cᵢ·exp(−bᵢ·s) as a tuple of (c, b) terms.

    Immutable after construction; safe to share between threads.

    Parameters
    ----------
    terms : tuple of (c, b)
        Amplitudes c ≥ 0 and decay rates b > 0.
    unit_mass : bool
        If True, assert Σ cᵢ/bᵢ² = 1 to relative precision 1e-12.
    """

    terms: tuple[tuple[float, float], ...]
    unit_mass: bool = False

    def __post_init__(self):
        terms = tuple((float(c), float(b)) for c, b in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("invalid kernel: empty term list")
        for c, b in terms:
            if not np.isfinite(c) or not np.isfinite(b):
                raise ValueError("invalid kernel: non-finite term (c=%r, b=%r)" % (c, b))
            if c < 0.0:
                raise ValueError("invalid kernel: amplitude c=%g must be >= 0" % c)
            if b <= 0.0:
                raise ValueError("invalid kernel: decay rate b=%g must be > 0" % b)
        if self.unit_mass:
            mass = total_mass(self)
            if abs(mass - 1.0) > UNIT_MASS_RTOL:
                raise ValueError("kernel flagged unit-mass but has mass %.17g" % mass)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms])

    @property
    def rates(self) -> np.ndarray:
        return np.array([b for _, b in self.terms])

    @property
    def mode_count(self) -> int:
        return len(self.terms)

    def as_pairs(self) -> list[list[float]]:
        """Serialization form: plain list of [c, b] pairs."""
        return [[c, b] for c, b in self.terms]

    @classmethod
    def from_pairs(cls, pairs, unit_mass: bool = False) -> "PronyKernel":
        return cls(tuple((float(c), float(b)) for c, b in pairs), unit_mass=unit_mass)


def _check_s(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0):
        raise ValueError("kernel argument s must be >= 0")
    return s


def evaluate_mu(kernel: PronyKernel, s) -> np.ndarray | float:
    """Memory density μ(s) = Σ cᵢ·exp(−bᵢ·s), non-increasing in s."""
    s = _check_s(s)
    c, b = kernel.amplitudes, kernel.rates
    out = np.exp(-np.multiply.outer(s, b)) @ c
    return float(out) if out.ndim == 0 else out


def evaluate_g(kernel: PronyKernel, s) -> np.ndarray | float:
    """Relaxation kernel g(s) = ∫ₛ^∞ μ(r) dr = Σ (cᵢ/bᵢ)·exp(−bᵢ·s).

    Non-increasing and convex; g(0) equals the total mass of μ.
    """
    s = _check_s(s)
    c, b = kernel.amplitudes, kernel.rates
    out = np.exp(-np.multiply.outer(s, b)) @ (c / b)
    return float(out) if out.ndim == 0 else out


def total_mass(kernel: PronyKernel) -> float:
    """∫₀^∞ g(s) ds = Σ cᵢ/bᵢ² (closed form)."""
    c, b = kernel.amplitudes, kernel.rates
    return float(np.sum(c / b**2))


def normalize_unit_mass(kernel: PronyKernel) -> PronyKernel:
    """Rescale amplitudes so the total mass is exactly 1; ratios cᵢ/cⱼ kept."""
    mass = total_mass(kernel)
    if mass <= 0.0:
        raise ValueError("invalid kernel: cannot normalize zero total mass")
    scale = 1.0 / mass
    return PronyKernel(tuple((c * scale, b) for c, b in kernel.terms), unit_mass=True)


def dafermos_rate(kernel: PronyKernel) -> float:
    """Largest δ > 0 with μ'(s) + δ·μ(s) ≤ 0 for all s.

    For exponential sums this is min bᵢ over the terms with cᵢ > 0: each term
    contributes cᵢ(δ − bᵢ)·exp(−bᵢ·s), and the slowest active term dominates
    as s → ∞.
    """
    active = [b for c, b in kernel.terms if c > 0.0]
    if not active:
        raise ValueError("invalid kernel: all amplitudes are zero")
    return float(min(active))


def rescale(kernel: PronyKernel, eps: float) -> PronyKernel:
    """Kernel of g_ε(s) = (1/ε)·g(s/ε): each c → c/ε², each b → b/ε.

    Total mass is preserved; the domination rate scales as 1/ε. As ε → 0 the
    relaxation kernel concentrates at s = 0 (instantaneous-conduction limit).
    """
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise ValueError("rescale factor must lie in (0, 1], got %g" % eps)
    return PronyKernel(
        tuple((c / eps**2, b / eps) for c, b in kernel.terms),
        unit_mass=kernel.unit_mass,
    )


def make_cattaneo(tau: float) -> PronyKernel:
    """Single-term kernel of the relaxation-time law: g(s) = (1/τ)·exp(−s/τ)."""
    tau = float(tau)
    if tau <= 0.0:
        raise ValueError("relaxation time must be > 0, got %g" % tau)
    return PronyKernel(((1.0 / tau**2, 1.0 / tau),), unit_mass=True)


def flux_weights(kernel: PronyKernel) -> np.ndarray:
    """Per-term weights wᵢ = cᵢ/bᵢ of the reduced flux Σ wᵢ·∂ₓₓηᵢ.

    The same weights carry the history energy Σ wᵢ‖∂ₓηᵢ‖²; their sum is g(0).
    """
    return kernel.amplitudes / kernel.rates


@dataclass(frozen=True)
class KernelSpec:
    """Heat-conduction law of one temperature channel.

    variant is one of "gurtin_pipkin" (full memory), "fourier" (instantaneous),
    "cattaneo" (relaxation time tau > 0) or "coleman_gurtin" (convex mix with
    weight ell in (0,1) on the memory part).
    """

    variant: str
    kernel: PronyKernel | None = None
    tau: float | None = None
    ell: float | None = None

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError("unknown law variant %r (expected one of %s)" % (self.variant, ", ".join(_VARIANTS)))
        if self.variant == GURTIN_PIPKIN and self.kernel is None:
            raise ValueError("gurtin_pipkin law requires a kernel")
        if self.variant == FOURIER and (self.kernel is not None or self.tau is not None):
            raise ValueError("fourier law carries no kernel or relaxation time")
        if self.variant == CATTANEO:
            if self.tau is None or self.tau <= 0.0:
                raise ValueError("cattaneo law requires relaxation time tau > 0")
        if self.variant == COLEMAN_GURTIN:
            if self.kernel is None:
                raise ValueError("coleman_gurtin law requires a kernel")
            if self.ell is None or not 0.0 < self.ell < 1.0:
                raise ValueError("coleman_gurtin mixing weight must lie in (0, 1)")

    @classmethod
    def gurtin_pipkin(cls, kernel: PronyKernel) -> "KernelSpec":
        return cls(GURTIN_PIPKIN, kernel=kernel)

    @classmethod
    def fourier(cls) -> "KernelSpec":
        return cls(FOURIER)

    @classmethod
    def cattaneo(cls, tau: float) -> "KernelSpec":
        return cls(CATTANEO, tau=float(tau))

    @classmethod
    def coleman_gurtin(cls, ell: float, kernel: PronyKernel) -> "KernelSpec":
        return cls(COLEMAN_GURTIN, kernel=kernel, ell=float(ell))

    def memory_kernel(self) -> PronyKernel | None:
        """Prony kernel backing the memory part (None for the Fourier law)."""
        if self.variant == FOURIER:
            return None
        if self.variant == CATTANEO:
            return make_cattaneo(self.tau)
        return self.kernel

    def memory_weight(self) -> float:
        """Multiplier on the convolution part of the conduction term."""
        if self.variant == FOURIER:
            return 0.0
        if self.variant == COLEMAN_GURTIN:
            return float(self.ell)
        return 1.0

    def instantaneous_weight(self) -> float:
        """Multiplier on the parabolic ∂ₓₓ part of the conduction term."""
        if self.variant == FOURIER:
            return 1.0
        if self.variant == COLEMAN_GURTIN:
            return 1.0 - float(self.ell)
        return 0.0

    def mode_count(self) -> int:
        """Number of auxiliary memory fields this law induces."""
        k = self.memory_kernel()
        return 0 if k is None else k.mode_count

    def as_dict(self) -> dict:
        d: dict = {"variant": self.variant}
        if self.kernel is not None:
            d["kernel"] = self.kernel.as_pairs()
        if self.tau is not None:
            d["tau"] = self.tau
        if self.ell is not None:
            d["ell"] = self.ell
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        kernel = d.get("kernel")
        return cls(
            d["variant"],
            kernel=None if kernel is None else PronyKernel.from_pairs(kernel),
            tau=d.get("tau"),
            ell=d.get("ell"),
        )
