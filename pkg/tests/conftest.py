"""Shared fixtures and small independent oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from thermobeam.assembly import ModelConfig, PhysicalParams
from thermobeam.kernels import KernelSpec, PronyKernel
from thermobeam.spaces import BoundarySet

# One line per acceptance criterion, re-emitted after the run so the
# pass/fail summary survives pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

BOTH_BCS = (BoundarySet.MIXED_DN, BoundarySet.FULL_DIRICHLET)


def four_mode_kernel() -> PronyKernel:
    return PronyKernel(((0.0625, 0.5), (0.25, 1.0), (1.0, 2.0), (4.0, 4.0)), unit_mass=True)


def two_mode_kernel() -> PronyKernel:
    return PronyKernel(((0.5, 1.0), (2.0, 2.0)), unit_mass=True)


def law_table(kernel: PronyKernel | None = None, tau: float = 1.0, ell: float = 0.5):
    kern = kernel if kernel is not None else four_mode_kernel()
    return {
        "gp": KernelSpec.gurtin_pipkin(kern),
        "fourier": KernelSpec.fourier(),
        "cattaneo": KernelSpec.cattaneo(tau),
        "cg": KernelSpec.coleman_gurtin(ell, kern),
    }


def gp_config(bcs=BoundarySet.MIXED_DN, n=16, params=None, kernel=None) -> ModelConfig:
    law = KernelSpec.gurtin_pipkin(kernel if kernel is not None else four_mode_kernel())
    return ModelConfig(params or PhysicalParams(), law, law, bcs, n)


def random_kernel(rng, max_modes=5) -> PronyKernel:
    m = int(rng.integers(1, max_modes + 1))
    c = rng.uniform(0.1, 10.0, size=m)
    b = rng.uniform(0.1, 10.0, size=m)
    return PronyKernel(tuple(zip(c, b)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
