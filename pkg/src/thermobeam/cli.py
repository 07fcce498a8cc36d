"""Command-line interface.

    thermobeam <study> --config FILE [--out STEM] [--seed N] [--no-plot]

Studies: simulate, spectrum, resolvent, sweep, combo, cattaneo-eq, limit.
Each run writes JSON-lines records (<stem>.jsonl) plus, per study, a CSV
curve and a rendered PNG figure; a .csv/.jsonl/.png suffix on --out is
treated as the stem. Exit status: 0 on success, 1 if any record is a
FAILURE, 2 on configuration or I/O errors. The THERMOBEAM_OUTDIR
environment variable prefixes relative output stems.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import studies
from .studies import ConfigError, StudySpec, load_study, write_records

_SUBCOMMANDS = {
    "simulate": "simulate",
    "spectrum": "spectrum",
    "resolvent": "resolvent",
    "sweep": "sweep",
    "combo": "combo",
    "cattaneo-eq": "cattaneo_eq",
    "limit": "limit",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermobeam",
        description="Thermoelastic beam laboratory: assembly, simulation, spectra, stability studies.",
    )
    sub = parser.add_subparsers(dest="study", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name, help="run the %s study" % name)
        p.add_argument("--config", required=True, help="study configuration file")
        p.add_argument("--out", default=None, help="output stem (overrides study.out)")
        p.add_argument("--seed", type=int, default=None, help="draw seed (overrides study.seed)")
        p.add_argument("--plot", dest="plot", action="store_true", default=None, help="render PNG figures (default)")
        p.add_argument("--no-plot", dest="plot", action="store_false", help="skip figure rendering")
    return parser


def _out_stem(spec: StudySpec) -> str:
    stem = spec.out if spec.out else "thermobeam_%s" % spec.kind
    for suffix in (".csv", ".jsonl", ".png"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    outdir = os.environ.get("THERMOBEAM_OUTDIR")
    if outdir and not os.path.isabs(stem):
        stem = os.path.join(outdir, stem)
    parent = os.path.dirname(stem)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return stem


def _run(spec: StudySpec) -> list[dict]:
    from . import plotting

    stem = _out_stem(spec)
    if spec.kind == "spectrum":
        report, records = studies.run_spectrum(spec)
        report.write_csv(stem + ".csv")
        if spec.plot:
            plotting.plot_spectrum(report, stem + ".png")
        print("spectrum: dim=%d abscissa=%.6e -> %s.csv" % (report.dim, report.abscissa, stem))
    elif spec.kind == "simulate":
        report, records = studies.run_simulate(spec)
        report.write_csv(stem + ".csv")
        if spec.plot:
            plotting.plot_trajectory(report, stem + ".png")
        rate = "n/a" if report.fitted_rate is None else "%.6g" % report.fitted_rate
        print("simulate: E0=%.6e E(T)=%.6e fitted rate=%s -> %s.csv"
              % (report.energies[0], report.energies[-1], rate, stem))
    elif spec.kind == "resolvent":
        scan, records = studies.run_resolvent(spec)
        scan.write_csv(stem + ".csv")
        if spec.plot:
            plotting.plot_resolvent(scan, stem + ".png")
        print("resolvent: sup=%.6e at lambda=%.6g -> %s.csv" % (scan.sup_norm, scan.argmax_lambda, stem))
    elif spec.kind == "sweep":
        records = studies.run_parameter_sweep(spec)
        if spec.plot:
            plotting.plot_sweep(records, stem + ".png")
        n_fail = sum(1 for r in records if r.get("status") == "failure")
        print("sweep: %d cells, %d failures -> %s.jsonl" % (len(records), n_fail, stem))
    elif spec.kind == "combo":
        records = studies.run_combination_matrix(spec)
        _write_combo_csv(records, stem + ".csv")
        if spec.plot:
            plotting.plot_combo(records, stem + ".png")
        _print_combo(records)
    elif spec.kind == "cattaneo_eq":
        records, rep_hist, rep_flux = studies.run_cattaneo_equivalence(spec)
        if spec.plot:
            plotting.plot_equivalence(rep_hist, rep_flux, stem + ".png")
        rec = records[0]
        print("cattaneo-eq: dims %d/%d, max mismatch %.3e (tol %.1e)"
              % (rec["dim_history"], rec["dim_flux"], rec["max_mismatch"], rec["tolerance"]))
    elif spec.kind == "limit":
        records = studies.run_singular_limit(spec)
        _write_limit_csv(records, stem + ".csv")
        if spec.plot:
            plotting.plot_limit(records, stem + ".png")
        summary = records[-1]
        print("limit(%s): final distance %.3e, tail decreasing: %s"
              % (summary["target"], summary["final_distance"], summary["tail_decreasing"]))
    else:  # pragma: no cover - parser restricts kinds
        raise ConfigError("unknown study kind %r" % spec.kind)

    write_records(stem + ".jsonl", records)
    return records


def _write_combo_csv(records, path):
    with open(path, "w") as f:
        f.write("theta_law,xi_law,abscissa\n")
        for r in records:
            f.write("%s,%s,%.17g\n" % (r["theta_law"], r["xi_law"], r["abscissa"]))


def _print_combo(records):
    laws = ["gurtin_pipkin", "fourier", "cattaneo", "coleman_gurtin"]
    short = {"gurtin_pipkin": "GP", "fourier": "F", "cattaneo": "C", "coleman_gurtin": "CG"}
    table = {(r["theta_law"], r["xi_law"]): r["abscissa"] for r in records}
    print("combo abscissas (rows: shear-force law, cols: bending-moment law)")
    print("      " + "".join("%12s" % short[c] for c in laws))
    for row in laws:
        print("%5s " % short[row] + "".join("%12.3e" % table[(row, c)] for c in laws))


def _write_limit_csv(records, path):
    with open(path, "w") as f:
        f.write("eps,distance\n")
        for r in records:
            if "eps" in r:
                f.write("%.17g,%.17g\n" % (r["eps"], r["distance"]))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = load_study(args.config, kind=_SUBCOMMANDS[args.study],
                          out=args.out, seed=args.seed, plot=args.plot)
        records = _run(spec)
    except (ConfigError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    if any(r.get("status") == "failure" for r in records):
        print("FAILURE records present; see the JSONL output", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
