"""Figure rendering smoke tests: every plot function writes a readable PNG."""

from __future__ import annotations

import os

import numpy as np

from thermobeam import plotting
from thermobeam.dynamics import simulate
from thermobeam.spectra import eigenvalues, resolvent_scan
from thermobeam.assembly import assemble
from thermobeam.studies import StudySpec, run_cattaneo_equivalence, run_combination_matrix
from conftest import gp_config


def png_ok(path):
    assert os.path.exists(path)
    with open(path, "rb") as f:
        assert f.read(8).startswith(b"\x89PNG")


def test_spectrum_and_resolvent_figures(tmp_path):
    sys = assemble(gp_config(n=8))
    rep = eigenvalues(sys)
    plotting.plot_spectrum(rep, tmp_path / "s.png")
    png_ok(tmp_path / "s.png")
    scan = resolvent_scan(sys, lambdas=np.geomspace(0.1, 50.0, 12))
    plotting.plot_resolvent(scan, tmp_path / "r.png")
    png_ok(tmp_path / "r.png")


def test_trajectory_figure(tmp_path, rng):
    sys = assemble(gp_config(n=8))
    rep = simulate(sys, rng.standard_normal(sys.dim), 0.05, 3.0)
    plotting.plot_trajectory(rep, tmp_path / "t.png")
    png_ok(tmp_path / "t.png")


def test_study_figures(tmp_path):
    spec = StudySpec(kind="combo", config=gp_config(n=8))
    combo = run_combination_matrix(spec)
    plotting.plot_combo(combo, tmp_path / "c.png")
    png_ok(tmp_path / "c.png")
    plotting.plot_sweep(combo, tmp_path / "w.png")
    png_ok(tmp_path / "w.png")
    limit_records = [{"eps": 1.0, "distance": 0.5}, {"eps": 0.5, "distance": 0.2}]
    plotting.plot_limit(limit_records, tmp_path / "l.png")
    png_ok(tmp_path / "l.png")
    _, rep_h, rep_f = run_cattaneo_equivalence(StudySpec(kind="cattaneo_eq", config=gp_config(n=8)))
    plotting.plot_equivalence(rep_h, rep_f, tmp_path / "e.png")
    png_ok(tmp_path / "e.png")
