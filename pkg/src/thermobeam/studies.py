"""Batch experiment runner: config files, sweeps, limit studies, records.

Studies consume a flat key/value config file (see parse_config) and emit
JSON-lines records plus CSV curves. Every record echoes the configuration it
was produced from, so any FAILURE is reproducible standalone. Outputs are
deterministic for a fixed seed except for the generated_at provenance field.
"""

from __future__ import annotations

import datetime
import json
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from . import __version__
from .assembly import (
    ModelConfig,
    PhysicalParams,
    assemble,
    assemble_cattaneo_flux,
    energy,
)
from .dynamics import simulate
from .kernels import (
    CATTANEO,
    COLEMAN_GURTIN,
    FOURIER,
    GURTIN_PIPKIN,
    KernelSpec,
    PronyKernel,
    rescale,
)
from .spaces import BoundarySet
from .spectra import SpectrumReport, eigenvalues, hnorm_transform, resolvent_scan

__all__ = [
    "ConfigError",
    "StudySpec",
    "STABILITY_THRESHOLD",
    "default_kernel",
    "parse_config",
    "load_study",
    "write_records",
    "match_spectra",
    "tracked_target_modes",
    "run_spectrum",
    "run_simulate",
    "run_resolvent",
    "run_parameter_sweep",
    "run_combination_matrix",
    "run_cattaneo_equivalence",
    "run_singular_limit",
]

# Abscissas above this are flagged FAILURE in stability studies.
STABILITY_THRESHOLD = -1e-6
# Gates for the spectral-equivalence and limit studies.
EQUIVALENCE_TOL = 1e-8
LIMIT_FINAL_TOL = 1e-2

STUDY_KINDS = ("simulate", "spectrum", "resolvent", "sweep", "combo", "cattaneo_eq", "limit")

_LAW_ALIASES = {
    "gp": GURTIN_PIPKIN, "gurtin_pipkin": GURTIN_PIPKIN,
    "f": FOURIER, "fourier": FOURIER,
    "c": CATTANEO, "cattaneo": CATTANEO,
    "cg": COLEMAN_GURTIN, "coleman_gurtin": COLEMAN_GURTIN,
}
_BCS_ALIASES = {
    "mixed_dn": BoundarySet.MIXED_DN, "mixed": BoundarySet.MIXED_DN,
    "full_dirichlet": BoundarySet.FULL_DIRICHLET, "dirichlet": BoundarySet.FULL_DIRICHLET,
}


class ConfigError(ValueError):
    """Malformed or inconsistent study configuration."""


def default_kernel(modes: int = 4) -> PronyKernel:
    """Equal-mass-share unit-mass kernel with octave-spaced rates 0.5·2^i."""
    if modes < 1:
        raise ConfigError("kernel needs at least one mode")
    rates = [0.5 * 2.0**i for i in range(modes)]
    return PronyKernel(tuple((b * b / modes, b) for b in rates), unit_mass=True)


@dataclass(frozen=True)
class StudySpec:
    """One study: kind, base model config, study knobs, output stem."""

    kind: str
    config: ModelConfig
    seed: int = 0
    out: str | None = None
    plot: bool = True
    # simulate
    dt: float = 0.01
    t_final: float = 10.0
    init: str = "random"
    # sweep
    draws: int = 50
    sweep_lo: float = 0.1
    sweep_hi: float = 10.0
    # resolvent
    lambda_min: float = 1e-2
    lambda_max: float = 1e3
    lambda_count: int = 61
    # combo / limit
    ell: float = 0.5
    eps_ladder: tuple[float, ...] = tuple(0.5**k for k in range(7))
    limit_target: str = "fourier"
    # cattaneo_eq
    tau: float = 1.0
    varsigma: float = 1.0

    def __post_init__(self):
        if self.kind not in STUDY_KINDS:
            raise ConfigError("unknown study kind %r (expected one of %s)" % (self.kind, ", ".join(STUDY_KINDS)))
        if self.kind == "sweep":
            if self.draws < 1:
                raise ConfigError("sweep needs draws >= 1")
            if not (0.0 < self.sweep_lo < self.sweep_hi):
                raise ConfigError("sweep range must satisfy 0 < lo < hi")
        if self.kind == "limit":
            lad = tuple(float(e) for e in self.eps_ladder)
            if not lad:
                raise ConfigError("empty rescale ladder")
            if any(not 0.0 < e <= 1.0 for e in lad):
                raise ConfigError("rescale ladder values must lie in (0, 1]")
            if not all(b < a for a, b in zip(lad, lad[1:])):
                raise ConfigError("rescale ladder must be strictly decreasing")
            if self.limit_target not in ("fourier", "coleman_gurtin"):
                raise ConfigError("limit target must be fourier or coleman_gurtin")
        if self.kind == "cattaneo_eq" and (self.tau <= 0.0 or self.varsigma <= 0.0):
            raise ConfigError("relaxation times must be > 0")
        if self.kind == "simulate":
            if self.dt <= 0.0 or self.t_final <= 0.0:
                raise ConfigError("simulate needs dt > 0 and t_final > 0")
            if self.init not in ("random", "dominant"):
                raise ConfigError("init must be random or dominant")


# ---------------------------------------------------------------------------
# configuration file handling

_KNOWN_KEYS = {
    "params.rho1", "params.rho2", "params.rho3", "params.rho4",
    "params.k", "params.b", "params.gamma", "params.sigma",
    "params.varpi1", "params.varpi2", "params.L",
    "bcs", "mesh.n",
    "law.theta.variant", "law.theta.kernel.terms", "law.theta.tau", "law.theta.ell",
    "law.xi.variant", "law.xi.kernel.terms", "law.xi.tau", "law.xi.ell",
    "study.kind", "study.seed", "study.out", "study.plot",
    "study.dt", "study.t_final", "study.init",
    "study.draws", "study.sweep_lo", "study.sweep_hi",
    "study.lambda_min", "study.lambda_max", "study.lambda_count",
    "study.ell", "study.eps_ladder", "study.limit_target",
    "study.tau", "study.varsigma",
}


def parse_config(text: str) -> dict[str, str]:
    """Parse 'key = value' lines; '#' starts a comment; unknown keys rejected."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected 'key = value', got %r" % (lineno, raw.strip()))
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError("line %d: unknown configuration key %r" % (lineno, key))
        if key in out:
            raise ConfigError("line %d: duplicate key %r" % (lineno, key))
        out[key] = value
    return out


def _parse_terms(value: str) -> PronyKernel:
    pairs = []
    for chunk in value.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise ConfigError("kernel term %r is not of the form c:b" % chunk)
        c, b = chunk.split(":", 1)
        pairs.append((float(c), float(b)))
    if not pairs:
        raise ConfigError("kernel term list is empty")
    return PronyKernel.from_pairs(pairs)


def _parse_law(kv: dict[str, str], channel: str) -> KernelSpec:
    variant = _LAW_ALIASES.get(kv.get("law.%s.variant" % channel, "gurtin_pipkin").lower())
    if variant is None:
        raise ConfigError("unknown law variant %r for channel %s" % (kv.get("law.%s.variant" % channel), channel))
    kern_key = "law.%s.kernel.terms" % channel
    kernel = _parse_terms(kv[kern_key]) if kern_key in kv else None
    if variant == GURTIN_PIPKIN:
        return KernelSpec.gurtin_pipkin(kernel if kernel is not None else default_kernel())
    if variant == FOURIER:
        return KernelSpec.fourier()
    if variant == CATTANEO:
        return KernelSpec.cattaneo(float(kv.get("law.%s.tau" % channel, 1.0)))
    ell = float(kv.get("law.%s.ell" % channel, 0.5))
    return KernelSpec.coleman_gurtin(ell, kernel if kernel is not None else default_kernel())


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ConfigError("expected a boolean, got %r" % value)


def load_study(path, kind: str | None = None, out: str | None = None, seed: int | None = None,
               plot: bool | None = None) -> StudySpec:
    """Read a config file, returning the StudySpec (CLI overrides applied).

    kind must come from the file's study.kind or the kind argument; when both
    are present they must agree.
    """
    with open(path) as f:
        kv = parse_config(f.read())
    try:
        params = PhysicalParams(**{name: float(kv["params.%s" % name])
                                   for name in ("rho1", "rho2", "rho3", "rho4", "k", "b",
                                                "gamma", "sigma", "varpi1", "varpi2", "L")
                                   if ("params.%s" % name) in kv})
        bcs = _BCS_ALIASES.get(kv.get("bcs", "mixed_dn").lower())
        if bcs is None:
            raise ConfigError("unknown boundary set %r" % kv.get("bcs"))
        config = ModelConfig(
            params=params,
            law_theta=_parse_law(kv, "theta"),
            law_xi=_parse_law(kv, "xi"),
            bcs=bcs,
            n=int(kv.get("mesh.n", 64)),
        )
        file_kind = kv.get("study.kind")
        if kind is not None and file_kind is not None and kind != file_kind:
            raise ConfigError("study.kind=%r conflicts with requested study %r" % (file_kind, kind))
        use_kind = kind or file_kind
        if use_kind is None:
            raise ConfigError("no study kind given (study.kind key or CLI subcommand)")
        eps = kv.get("study.eps_ladder")
        spec = StudySpec(
            kind=use_kind,
            config=config,
            seed=int(kv.get("study.seed", 0)) if seed is None else seed,
            out=out if out is not None else kv.get("study.out"),
            plot=_parse_bool(kv["study.plot"]) if (plot is None and "study.plot" in kv) else (True if plot is None else plot),
            dt=float(kv.get("study.dt", 0.01)),
            t_final=float(kv.get("study.t_final", 10.0)),
            init=kv.get("study.init", "random"),
            draws=int(kv.get("study.draws", 50)),
            sweep_lo=float(kv.get("study.sweep_lo", 0.1)),
            sweep_hi=float(kv.get("study.sweep_hi", 10.0)),
            lambda_min=float(kv.get("study.lambda_min", 1e-2)),
            lambda_max=float(kv.get("study.lambda_max", 1e3)),
            lambda_count=int(kv.get("study.lambda_count", 61)),
            ell=float(kv.get("study.ell", 0.5)),
            eps_ladder=tuple(float(x) for x in eps.split(",")) if eps else tuple(0.5**k for k in range(7)),
            limit_target=kv.get("study.limit_target", "fourier"),
            tau=float(kv.get("study.tau", 1.0)),
            varsigma=float(kv.get("study.varsigma", 1.0)),
        )
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    return spec


# ---------------------------------------------------------------------------
# record plumbing

def _provenance(spec: StudySpec) -> dict:
    return {
        "study": spec.kind,
        "seed": spec.seed,
        "code_version": __version__,
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def _echo(config: ModelConfig) -> dict:
    d = config.as_dict()
    flat = {"params.%s" % k: v for k, v in d["params"].items()}
    flat["bcs"] = d["bcs"]
    flat["mesh_n"] = d["mesh_n"]
    flat["law_theta"] = d["law_theta"]
    flat["law_xi"] = d["law_xi"]
    return flat


def write_records(path, records: list[dict]) -> None:
    """JSON-lines, sorted keys; byte-identical across runs up to generated_at."""
    with open(path, "w") as f:
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True))
            f.write("\n")


def match_spectra(vals_a: np.ndarray, vals_b: np.ndarray) -> float:
    """Max eigenvalue distance under the optimal one-to-one matching.

    Assignment matching is stable where plain sorted comparison reorders
    near-degenerate conjugate clusters.
    """
    if len(vals_a) != len(vals_b):
        raise ValueError("spectra have different sizes %d and %d" % (len(vals_a), len(vals_b)))
    cost = np.abs(vals_a[:, None] - vals_b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def tracked_target_modes(report: SpectrumReport, count: int = 5) -> np.ndarray:
    """The count lowest-frequency oscillatory eigenvalues (positive-Im half).

    With their conjugates these are the "10 tracked low eigenvalues" of the
    limit studies; purely real eigenvalues are excluded, since the parabolic
    branch of an instantaneous-law target is not approached by the rescaled
    memory model at practical ladder depths.
    """
    vals = report.eigenvalues
    scale = float(np.max(np.abs(vals))) if len(vals) else 1.0
    osc = vals[vals.imag > 1e-8 * scale]
    osc = osc[np.argsort(osc.imag)]
    if len(osc) < count:
        raise ValueError("target spectrum has only %d oscillatory pairs, need %d" % (len(osc), count))
    return osc[:count]


# ---------------------------------------------------------------------------
# runners

def run_spectrum(spec: StudySpec):
    """Eigensolve the configured model; returns (SpectrumReport, records)."""
    report = eigenvalues(assemble(spec.config))
    rec = {**_provenance(spec), **_echo(spec.config),
           "dim": report.dim, "abscissa": report.abscissa,
           "status": "ok" if report.abscissa < 0.0 else "failure"}
    return report, [rec]


def _random_state(sys, rng) -> np.ndarray:
    u = rng.standard_normal(sys.dim)
    return u / math.sqrt(2.0 * energy(sys, u))


def _dominant_state(sys) -> np.ndarray:
    S = hnorm_transform(sys)
    vals, vecs = scipy.linalg.eig(S)
    i = int(np.argmax(vals.real))
    v = scipy.linalg.solve_triangular(sys.m_chol_upper, vecs[:, i], lower=False)
    return v / math.sqrt(2.0 * energy(sys, v))


def run_simulate(spec: StudySpec):
    """Time-integrate from a seeded random or dominant-eigenvector state."""
    sys = assemble(spec.config)
    rng = np.random.default_rng(spec.seed)
    state0 = _random_state(sys, rng) if spec.init == "random" else _dominant_state(sys)
    report = simulate(sys, state0, spec.dt, spec.t_final)
    rec = {**_provenance(spec), **_echo(spec.config),
           "dt": spec.dt, "t_final": spec.t_final, "init": spec.init,
           "energy_initial": float(report.energies[0]),
           "energy_final": float(report.energies[-1]),
           "fitted_rate": report.fitted_rate,
           "fit_residual": report.residual,
           "status": "ok"}
    return report, [rec]


def run_resolvent(spec: StudySpec):
    """Scan the resolvent norm along the imaginary axis."""
    sys = assemble(spec.config)
    report = eigenvalues(sys)
    from .spectra import default_scan_grid

    grid = default_scan_grid(report, lo=spec.lambda_min, hi=spec.lambda_max, count=spec.lambda_count)
    scan = resolvent_scan(sys, lambdas=grid, report=report)
    rec = {**_provenance(spec), **_echo(spec.config),
           "sup_norm": scan.sup_norm, "argmax_lambda": scan.argmax_lambda,
           "samples": int(len(scan.lambdas)), "abscissa": report.abscissa,
           "status": "ok"}
    return scan, [rec]


# The eight drawn sweep parameters, in the order the model lists them.
SWEEP_PARAMS = ("rho1", "rho2", "k", "b", "gamma", "sigma", "rho3", "rho4")


def _sweep_draws(spec: StudySpec) -> list[tuple[str, PhysicalParams]]:
    rng = np.random.default_rng(spec.seed)
    lo, hi = math.log(spec.sweep_lo), math.log(spec.sweep_hi)
    base = spec.config.params.as_dict()
    draws: list[tuple[str, PhysicalParams]] = []
    for _ in range(spec.draws):
        vals = dict(base)
        for name, u in zip(SWEEP_PARAMS, rng.uniform(lo, hi, size=len(SWEEP_PARAMS))):
            vals[name] = math.exp(u)
        draws.append(("random", PhysicalParams(**vals)))
    # forced slices: one equal-wave-speed draw (rho1*b = rho2*k, realized as
    # rho1 = rho2 = 1, b = k drawn) and one with the squared wave speeds 100x
    # apart, both inside the sweep range
    eq = dict(base)
    for name, u in zip(SWEEP_PARAMS, rng.uniform(lo, hi, size=len(SWEEP_PARAMS))):
        eq[name] = math.exp(u)
    eq.update(rho1=1.0, rho2=1.0, b=eq["k"])
    draws.append(("equal_wave_speed", PhysicalParams(**eq)))
    sep = dict(base)
    sep.update(rho1=1.0, rho2=1.0, k=spec.sweep_lo, b=min(100.0 * spec.sweep_lo, spec.sweep_hi))
    draws.append(("separated_wave_speed", PhysicalParams(**sep)))
    return draws


def run_parameter_sweep(spec: StudySpec) -> list[dict]:
    """Stability sweep: abscissa per draw and boundary set, FAILURE when the
    abscissa exceeds the stability threshold (the falsifiable stability gate)."""
    records = []
    draws = _sweep_draws(spec)
    for bcs in (BoundarySet.MIXED_DN, BoundarySet.FULL_DIRICHLET):
        for index, (draw_kind, params) in enumerate(draws):
            config = replace(spec.config, params=params, bcs=bcs)
            absc = eigenvalues(assemble(config)).abscissa
            records.append({
                **_provenance(spec), **_echo(config),
                "index": index, "draw": draw_kind,
                "abscissa": absc, "threshold": STABILITY_THRESHOLD,
                "status": "ok" if absc <= STABILITY_THRESHOLD else "failure",
            })
    return records


def _combo_laws(spec: StudySpec) -> dict[str, KernelSpec]:
    kernel = spec.config.law_theta.memory_kernel() or default_kernel()
    return {
        "gurtin_pipkin": KernelSpec.gurtin_pipkin(kernel),
        "fourier": KernelSpec.fourier(),
        "cattaneo": KernelSpec.cattaneo(spec.tau),
        "coleman_gurtin": KernelSpec.coleman_gurtin(spec.ell, kernel),
    }


def run_combination_matrix(spec: StudySpec) -> list[dict]:
    """All 16 conduction-law pairs at the base parameters and boundary set."""
    laws = _combo_laws(spec)
    records = []
    for name_t, law_t in laws.items():
        for name_x, law_x in laws.items():
            config = replace(spec.config, law_theta=law_t, law_xi=law_x)
            absc = eigenvalues(assemble(config)).abscissa
            records.append({
                **_provenance(spec), **_echo(config),
                "theta_law": name_t, "xi_law": name_x,
                "abscissa": absc, "threshold": 0.0,
                "status": "ok" if absc < 0.0 else "failure",
            })
    return records


def run_cattaneo_equivalence(spec: StudySpec):
    """History-form vs explicit-flux spectra of the relaxation-time model.

    Returns (records, history SpectrumReport, flux SpectrumReport).
    """
    from .kernels import make_cattaneo

    cfg_hist = replace(
        spec.config,
        law_theta=KernelSpec.gurtin_pipkin(make_cattaneo(spec.tau)),
        law_xi=KernelSpec.gurtin_pipkin(make_cattaneo(spec.varsigma)),
    )
    cfg_flux = replace(
        spec.config,
        law_theta=KernelSpec.cattaneo(spec.tau),
        law_xi=KernelSpec.cattaneo(spec.varsigma),
    )
    rep_hist = eigenvalues(assemble(cfg_hist))
    rep_flux = eigenvalues(assemble_cattaneo_flux(cfg_flux))
    mismatch = match_spectra(rep_hist.eigenvalues, rep_flux.eigenvalues)
    rec = {**_provenance(spec), **_echo(cfg_hist),
           "tau": spec.tau, "varsigma": spec.varsigma,
           "dim_history": rep_hist.dim, "dim_flux": rep_flux.dim,
           "max_mismatch": mismatch, "tolerance": EQUIVALENCE_TOL,
           "status": "ok" if mismatch <= EQUIVALENCE_TOL else "failure"}
    return [rec], rep_hist, rep_flux


def _limit_kernel(base: PronyKernel, eps: float, target: str, ell: float) -> PronyKernel:
    if target == "fourier":
        return rescale(base, eps)
    fast = rescale(base, eps)
    terms = tuple(((1.0 - ell) * c, b) for c, b in fast.terms)
    terms += tuple((ell * c, b) for c, b in base.terms)
    return PronyKernel(terms)


def run_singular_limit(spec: StudySpec) -> list[dict]:
    """Rescaled-kernel models against the instantaneous or mixed target.

    Tracks the target's 5 lowest-frequency oscillatory eigenvalue pairs and
    reports, per ladder rung, the worst relative distance from the rescaled
    model's spectrum to a tracked eigenvalue.
    """
    base = spec.config.law_theta.memory_kernel()
    if base is None:
        raise ConfigError("limit study needs a memory kernel on the theta law")
    if spec.limit_target == "fourier":
        target_law = KernelSpec.fourier()
    else:
        target_law = KernelSpec.coleman_gurtin(spec.ell, base)
    target_cfg = replace(spec.config, law_theta=target_law, law_xi=target_law)
    target_rep = eigenvalues(assemble(target_cfg))
    tracked = tracked_target_modes(target_rep)

    records = []
    distances = []
    for eps in spec.eps_ladder:
        kern = _limit_kernel(base, eps, spec.limit_target, spec.ell)
        law = KernelSpec.gurtin_pipkin(kern)
        cfg = replace(spec.config, law_theta=law, law_xi=law)
        vals = eigenvalues(assemble(cfg)).eigenvalues
        dist = max(float(np.min(np.abs(vals - t)) / abs(t)) for t in tracked)
        distances.append(dist)
        records.append({
            **_provenance(spec), **_echo(cfg),
            "target": spec.limit_target, "ell": spec.ell if spec.limit_target == "coleman_gurtin" else None,
            "eps": eps, "distance": dist, "tracked_pairs": len(tracked),
            "status": "ok",
        })
    final = distances[-1]
    tail_decreasing = len(distances) >= 3 and distances[-3] > distances[-2] > distances[-1]
    records.append({
        **_provenance(spec), **_echo(target_cfg),
        "target": spec.limit_target, "summary": True,
        "final_distance": final, "tail_decreasing": tail_decreasing,
        "tolerance": LIMIT_FINAL_TOL,
        "status": "ok" if (final <= LIMIT_FINAL_TOL and tail_decreasing) else "failure",
    })
    return records
