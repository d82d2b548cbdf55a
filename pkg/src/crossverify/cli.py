"""Batch runner for the reproduction experiments.

Exit status is 0 on success, 2 for an invalid configuration and 3 when a
pipeline stage fails.  Outputs are deterministic for a given config and seed.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys

import numpy as np

from . import analysis, circuits, states
from .analysis import tables
from .config import ALIASES, EXPERIMENTS, ConfigError, ExperimentConfig, validate_config
from .noise import run_circuit
from .protocols import pipeline, unitary

EXIT_OK, EXIT_CONFIG, EXIT_PIPELINE = 0, 2, 3


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")
        self.stage = stage


@contextlib.contextmanager
def stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:  # noqa: BLE001 - every failure is reported with its stage
        raise PipelineError(name, exc) from exc


class Outputs:
    """Writes result files into one directory, each led by the resolved config."""

    def __init__(self, config: ExperimentConfig, echo=print):
        self.config = config
        self.dir = config.out
        self.echo = echo
        os.makedirs(self.dir, exist_ok=True)

    def header(self) -> dict:
        return {"config": self.config.resolved(), "seed": self.config.seed}

    def table(self, name: str, columns, rows) -> None:
        tables.write_table(os.path.join(self.dir, name), columns, rows, self.header())

    def reports(self, name: str, reports) -> None:
        with open(os.path.join(self.dir, name), "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"config": self.config.resolved()}, sort_keys=True) + "\n")
            for r in reports:
                fh.write(r.to_json() + "\n")

    def dataset(self, name: str, ds) -> None:
        ds.metadata["config"] = json.dumps(self.config.resolved(), sort_keys=True)
        subdir = os.path.join(self.dir, "datasets")
        os.makedirs(subdir, exist_ok=True)
        ds.save(os.path.join(subdir, name))


def _f(x: float) -> str:
    return f"{x:.4f}"


def run_ghz_fidelity(cfg: ExperimentConfig, out: Outputs) -> None:
    nm = cfg.noise_model()
    rows = []
    for n in cfg.n:
        with stage("simulate"):
            rho = run_circuit(circuits.ghz_prep_circuit(n), None, nm)
            f = states.fidelity(rho, states.dm(states.ghz_state(n)))
        rows.append((n, f))
        out.echo(f"ghz-fidelity n={n} fidelity={_f(f)}")
    with stage("write"):
        out.table("ghz_fidelity.csv", ("n", "fidelity"), rows)


def run_phase_sweep(cfg: ExperimentConfig, out: Outputs) -> None:
    nm = cfg.noise_model()
    phis = pipeline.default_phases(cfg.phases)
    reports, rows = [], []
    for protocol in cfg.protocol:
        for n in cfg.n:
            # separate seed streams per (protocol, n) keep results independent of run order
            seed = pipeline.derive_seed(cfg.seed, n, ord(protocol[0]))
            save = None
            if cfg.save_datasets:
                save = lambda i, ds, p=protocol, n=n: out.dataset(f"{p}_n{n}_phi{i:02d}.tsv", ds)  # noqa: E731
            with stage(f"phase-sweep {protocol} n={n}"):
                sweep = pipeline.phase_sweep(protocol, n, phis, nm, cfg.shots, seed, on_dataset=save)
            for r in sweep:
                theory = (1 + np.cos(r.phi)) / 2
                rows.append((protocol, n, r.phi, r.overlap, float(theory)))
                out.echo(f"phase-sweep {protocol} n={n} phi={_f(r.phi)} overlap={_f(r.overlap)} theory={_f(theory)}")
            reports += sweep
    with stage("write"):
        out.reports("reports.jsonl", reports)
        out.table("phase_sweep.csv", ("protocol", "n", "phi", "overlap", "theory"), rows)


def run_scaling(cfg: ExperimentConfig, out: Outputs) -> None:
    nm = cfg.noise_model()
    points = []
    for protocol in cfg.protocol:
        for n in cfg.n:
            with stage(f"scaling {protocol} n={n}"):
                p = analysis.scaling_point(
                    protocol, n, nm, cfg.seed, cfg.repetitions, cfg.target, cfg.resamples
                )
            points.append(p)
            out.echo(
                f"scaling {protocol} n={n} repetitions={p.repetitions} measurements={p.measurements} "
                f"a={p.curve.amplitude:.4g} b={p.curve.exponent:.4f}"
            )
    fits = []
    with stage("fit"):
        for protocol in cfg.protocol:
            pts = [p for p in points if p.protocol == protocol]
            if len(pts) < 3:
                continue
            model = "quadratic" if protocol == "bbm" else "exponential"
            fit = analysis.scaling_fit([p.n for p in pts], [p.measurements for p in pts], model)
            fits += [(protocol, model, k, v) for k, v in sorted(fit.items())]
            out.echo(f"scaling-fit {protocol} {model} " + " ".join(f"{k}={v:.4g}" for k, v in sorted(fit.items())))
    with stage("write"):
        out.table("variance_curves.csv", tables.VARIANCE_COLUMNS, tables.variance_rows(points))
        out.table("scaling.csv", tables.SCALING_COLUMNS, tables.scaling_rows(points))
        out.table("scaling_fits.csv", ("protocol", "model", "parameter", "value"), fits)


def run_budget(cfg: ExperimentConfig, out: Outputs) -> None:
    nm = cfg.noise_model()
    budgets = []
    for n in cfg.n:
        with stage(f"budget n={n}"):
            b = analysis.error_budget(nm, n)
        budgets.append(b)
        out.echo(f"budget n={n} error={_f(b.error)} " + " ".join(f"{s}={_f(b[s])}" for s in analysis.SOURCES))
    with stage("write"):
        out.table("budget.csv", tables.BUDGET_COLUMNS, tables.budget_rows(budgets))


def run_unitary_fidelity(cfg: ExperimentConfig, out: Outputs) -> None:
    nm = cfg.noise_model()
    phis = pipeline.default_phases(cfg.phases)
    rows = []
    for n in cfg.n:
        for ensemble in ("cardinal", "computational"):
            for i, phi in enumerate(phis):
                seed = pipeline.derive_seed(cfg.seed, n, ord(ensemble[0]), i)
                with stage(f"unitary-fidelity n={n} {ensemble}"):
                    value = float(unitary.ghz_unitary_overlaps(n, phi, ensemble, nm, cfg.shots, seed).mean())
                fp = unitary.process_fidelity_from_avg(value, 2) if (n == 1 and ensemble == "cardinal") else ""
                rows.append((n, ensemble, float(phi), value, fp))
                extra = f" process_fidelity={_f(fp)}" if fp != "" else ""
                out.echo(f"unitary-fidelity n={n} {ensemble} phi={_f(phi)} average_overlap={_f(value)}{extra}")
    with stage("write"):
        out.table("unitary_fidelity.csv", ("n", "ensemble", "phi", "average_overlap", "process_fidelity"), rows)


RUNNERS = {
    "ghz-fidelity": run_ghz_fidelity,
    "phase-sweep": run_phase_sweep,
    "scaling": run_scaling,
    "budget": run_budget,
    "unitary-fidelity": run_unitary_fidelity,
}


def run(config: ExperimentConfig, echo=print) -> int:
    """Execute one experiment; raises :class:`PipelineError` naming the failed stage."""
    with stage("setup"):
        out = Outputs(config, echo)
    RUNNERS[config.experiment](config, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    choices = ", ".join(EXPERIMENTS + tuple(ALIASES))
    ap = argparse.ArgumentParser(prog="crossverify", description="Run a cross-platform comparison experiment.")
    ap.add_argument("experiment_name", nargs="?", metavar="EXPERIMENT", help=f"one of: {choices}")
    ap.add_argument("--experiment", help="same as the positional argument")
    ap.add_argument("--config", help="flat key = value config file")
    ap.add_argument("--protocol", help="comma list of qst, rm, bbm")
    ap.add_argument("--n", help="qubits per module, comma list allowed")
    ap.add_argument("--shots", help="shots per setting")
    ap.add_argument("--seed")
    ap.add_argument("--phases", help="number of equally spaced phases in [0, 2 pi]")
    ap.add_argument("--noiseless", action="store_true", default=None)
    ap.add_argument("--save-datasets", action="store_true", default=None, help="write raw shot datasets")
    ap.add_argument("--out", metavar="DIR")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")
    return ap


def config_from_args(args) -> ExperimentConfig:
    from .config import parse_overrides

    raw = ""
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise ConfigError([("--config", str(exc))]) from exc
    overrides = parse_overrides(args.set)
    if args.experiment and args.experiment_name and args.experiment != args.experiment_name:
        raise ConfigError([("experiment", "given twice with different values")])
    flags = {
        "experiment": args.experiment or args.experiment_name,
        "protocol": args.protocol,
        "n": args.n,
        "shots": args.shots,
        "seed": args.seed,
        "phases": args.phases,
        "noiseless": args.noiseless,
        "save_datasets": args.save_datasets,
        "out": args.out,
    }
    overrides.update({k: v for k, v in flags.items() if v is not None})
    return validate_config(raw, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        for key, message in exc.errors:
            print(f"config error: {key}: {message}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg)
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
