"""thermobeam: a numerical laboratory for thermoelastic Timoshenko beams
with fading-memory (exponential-sum) heat conduction.

Core pipeline: build a ModelConfig (parameters, per-channel conduction law,
boundary set, mesh), assemble the energy Gram matrix / generator /
dissipation triple, then integrate in time (dynamics), eigensolve and scan
resolvents (spectra), or run batch studies from the CLI (studies, cli).
"""

__version__ = "0.1.0"

from .kernels import (
    KernelSpec,
    PronyKernel,
    dafermos_rate,
    evaluate_g,
    evaluate_mu,
    make_cattaneo,
    normalize_unit_mass,
    rescale,
    total_mass,
)
from .spaces import BoundarySet, FieldSpace, Flavor, Mesh, field_space
from .assembly import (
    ModelConfig,
    PhysicalParams,
    SemidiscreteSystem,
    apply_generator,
    assemble,
    assemble_cattaneo_flux,
    dissipation,
    elastic_subsystem,
    energy,
    history_lift,
)
from .dynamics import MidpointStepper, TrajectoryReport, fit_decay_rate, simulate, step_midpoint
from .spectra import ResolventScan, SpectrumReport, eigenvalues, resolvent_norm, resolvent_scan, spectral_abscissa

__all__ = [
    "__version__",
    "KernelSpec", "PronyKernel", "dafermos_rate", "evaluate_g", "evaluate_mu",
    "make_cattaneo", "normalize_unit_mass", "rescale", "total_mass",
    "BoundarySet", "FieldSpace", "Flavor", "Mesh", "field_space",
    "ModelConfig", "PhysicalParams", "SemidiscreteSystem", "apply_generator",
    "assemble", "assemble_cattaneo_flux", "dissipation", "elastic_subsystem",
    "energy", "history_lift",
    "MidpointStepper", "TrajectoryReport", "fit_decay_rate", "simulate", "step_midpoint",
    "ResolventScan", "SpectrumReport", "eigenvalues", "resolvent_norm",
    "resolvent_scan", "spectral_abscissa",
]
