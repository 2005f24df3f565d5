"""Experiment pipelines: simulate, analyze, export.

Each pipeline consumes a validated :class:`~leakqec.config.ExperimentConfig`,
runs its simulation and analysis stages, and writes deterministic CSV/JSON
artifacts plus a manifest (config hash, seed, package version, file list).
Outputs are named after the figure-style data they reproduce.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .code_sim import (
    Schedule,
    SyndromeDataset,
    export_population_csv,
    leakage_population_curve,
    run_experiment,
    sweep_leakage_growth,
)
from .config import ExperimentConfig
from .correlation import (
    autocorrelation_nodes,
    cross_correlation_nodes,
    detection_events,
    event_fraction,
    export_pij_json,
    pij_matrix,
)
from .decoder import (
    build_graph,
    decode_dataset,
    enumerate_placements,
    export_decode_report_json,
    export_lambda_scan_csv,
    lambda_fit,
    subsample,
)
from .leakage_fit import (
    export_rate_fits_csv,
    fit_rates,
    fit_rates_constrained,
)
from .reset_model import (
    error_landscape,
    export_landscape_csv,
    paper_pulse_params,
)

__all__ = [
    "PostselectionReport",
    "postselect",
    "run",
]


@dataclass(frozen=True)
class PostselectionReport:
    """What a postselection pass removed from a time-ordered shot stream."""

    window: int
    threshold: float
    removal_span: int
    removed_ranges: tuple[tuple[int, int], ...]
    removed_fraction: float
    n_shots: int

    def __post_init__(self) -> None:
        prev_end = -1
        for start, end in self.removed_ranges:
            if start < prev_end:
                raise ValueError("removed ranges must be non-overlapping")
            prev_end = end
        if not 0.0 <= self.removed_fraction <= 1.0:
            raise ValueError("removed_fraction must lie in [0, 1]")


def postselect(
    logical_errors: Sequence[int] | np.ndarray,
    window: int = 30,
    threshold: float = 0.25,
    removal_span: int = 1000,
) -> tuple[PostselectionReport, np.ndarray]:
    """Remove anomalous high-error stretches from a time-ordered stream.

    A trailing moving average of the per-shot logical error over ``window``
    shots marks an event whenever it crosses above ``threshold``; since the
    trailing average reacts up to window - 1 shots late, removal is
    anchored that far back from the crossing and extends ``removal_span``
    shots forward.  Returns the report and the indices of surviving shots.
    """
    errs = np.asarray(logical_errors, dtype=float)
    n = errs.size
    if window < 1 or window > n:
        raise ValueError("window must lie in [1, n_shots]")
    if removal_span < 1:
        raise ValueError("removal_span must be >= 1")
    kernel = np.ones(window) / window
    moving = np.convolve(errs, kernel, mode="valid")  # index i -> shots [i, i+w)
    above = moving > threshold
    crossings = np.nonzero(above & ~np.concatenate(([False], above[:-1])))[0]

    ranges: list[tuple[int, int]] = []
    for c in crossings:
        start = int(c)  # the window [c, c + window) crossed; the event began at c
        end = min(start + removal_span, n)
        if ranges and start <= ranges[-1][1]:
            ranges[-1] = (ranges[-1][0], max(ranges[-1][1], end))
        else:
            ranges.append((start, end))

    removed = np.zeros(n, dtype=bool)
    for start, end in ranges:
        removed[start:end] = True
    report = PostselectionReport(
        window=window,
        threshold=threshold,
        removal_span=removal_span,
        removed_ranges=tuple(ranges),
        removed_fraction=float(removed.mean()),
        n_shots=n,
    )
    return report, np.nonzero(~removed)[0]


def _write_manifest(cfg: ExperimentConfig, outdir: Path, files: list[str]) -> Path:
    manifest = {
        "schema": "leakqec.manifest/v1",
        "config_hash": cfg.hash(),
        "config": cfg.raw,
        "seed": cfg.seed,
        "version": __version__,
        "outputs": sorted(files),
    }
    path = outdir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return path


def _run_reset_sweep(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    pulse_doc = cfg.param("pulse", {})
    pulse = paper_pulse_params(**pulse_doc)
    swap_grid = [float(v) for v in cfg.param("swap_grid")]
    hold_grid = [float(v) for v in cfg.param("hold_grid")]
    level = int(cfg.param("initial_level", 1))
    land = error_landscape(
        pulse,
        swap_grid,
        hold_grid,
        initial_level=level,
        include_fringes=bool(cfg.param("include_fringes", False)),
        readout_floor=float(cfg.param("readout_floor", 0.0)),
    )
    out = outdir / "fig2_landscape.csv"
    with out.open("w") as fh:
        export_landscape_csv(swap_grid, hold_grid, land, fh)
    return [out.name]


def _run_leakage_growth(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    layout, noise = cfg.layout(), cfg.noise()
    k_values = cfg.param("k_values", list(range(1, 31)))
    n_bits, repeats = cfg.shots
    rows = []
    fits = []
    gamma_up_noreset = {}
    for reset in (False, True):
        sched = Schedule(
            n_rounds=max(k_values), reset_enabled=reset, final_leakage_readout=True
        )
        datasets = sweep_leakage_growth(
            layout, noise, sched, max(k_values), n_bits, repeats,
            (cfg.seed, int(reset)), k_values=k_values,
        )
        for role in ("data", "measure"):
            ks, pops = leakage_population_curve(datasets, role)
            rows.extend((reset, role, int(k), float(p)) for k, p in zip(ks, pops))
            if reset and role == "measure":
                fit = fit_rates_constrained(pops, gamma_up_noreset[role])
            else:
                fit = fit_rates(pops, rounds=ks)
            if not reset:
                gamma_up_noreset[role] = fit.gamma_up
            fits.append((role, reset, fit))
    growth = outdir / "fig3_growth.csv"
    with growth.open("w") as fh:
        export_population_csv(rows, fh)
    rates = outdir / "fig3_rates.csv"
    with rates.open("w") as fh:
        export_rate_fits_csv(fits, fh)
    return [growth.name, rates.name]


def _run_injection(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    layout, noise = cfg.layout(), cfg.noise()
    base = cfg.schedule()
    if base.injection is None:
        raise ValueError("injection config needs schedule.injection")
    n_bits, repeats = cfg.shots
    out = outdir / "fig4_injection.csv"
    with out.open("w") as fh:
        fh.write("reset,measure_qubit,round,event_fraction\n")
        for reset in (False, True):
            sched = Schedule(
                n_rounds=base.n_rounds,
                reset_enabled=reset,
                injection=base.injection,
                initial_bitstring=base.initial_bitstring,
            )
            ds = run_experiment(
                layout, noise, sched, n_bits, repeats, (cfg.seed, int(reset))
            )
            frac = event_fraction(detection_events(ds, include_terminal=False))
            for r in range(frac.shape[0]):
                for m in range(frac.shape[1]):
                    fh.write(f"{int(reset)},{m},{r + 1},{frac[r, m]:.6e}\n")
    return [out.name]


def _run_pij(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    layout, noise = cfg.layout(), cfg.noise()
    base = cfg.schedule()
    pij_doc = cfg.param("pij", {})
    qubit = int(pij_doc.get("qubit", layout.n_measure // 2))
    pair = pij_doc.get("pair", [max(qubit - 1, 0), qubit])
    n_bits, repeats = cfg.shots
    files = []
    long_rows = []
    for reset in (False, True):
        sched = Schedule(
            n_rounds=base.n_rounds,
            reset_enabled=reset,
            initial_bitstring=base.initial_bitstring,
        )
        ds = run_experiment(
            layout, noise, sched, n_bits, repeats, (cfg.seed, int(reset))
        )
        det = detection_events(ds, include_terminal=False)
        views = {
            "auto": pij_matrix(det, autocorrelation_nodes(det, qubit)),
            "cross": pij_matrix(
                det, cross_correlation_nodes(det, int(pair[0]), int(pair[1]))
            ),
        }
        for view, mat in views.items():
            tag = f"{view}_{'reset' if reset else 'noreset'}"
            jpath = outdir / f"fig5_pij_{tag}.json"
            with jpath.open("w") as fh:
                export_pij_json(mat, fh)
            files.append(jpath.name)
            for i, ni in enumerate(mat.nodes):
                for j, nj in enumerate(mat.nodes):
                    if j <= i or mat.undefined[i, j]:
                        continue
                    long_rows.append(
                        (view, int(reset), ni[0], ni[1], nj[0], nj[1],
                         mat.values[i, j])
                    )
    out = outdir / "fig5_pij.csv"
    with out.open("w") as fh:
        fh.write("view,reset,m_i,r_i,m_j,r_j,p_ij\n")
        for row in long_rows:
            fh.write(",".join(str(v) for v in row[:-1]) + f",{row[-1]:.6e}\n")
    files.append(out.name)
    return files


def _decode_sizes(
    ds: SyndromeDataset,
    sizes: Sequence[int],
    average_placements: bool,
):
    """Decode a dataset at several subsampled sizes with p_ij weights."""
    per_size = {}
    for size in sizes:
        placements = (
            enumerate_placements(ds.layout.n_qubits, size)
            if average_placements
            else [0]
        )
        eps_vals, pl_vals, errors = [], [], []
        for start in placements:
            sub = subsample(ds, start, size)
            det = detection_events(sub)
            graph = build_graph(det, sub.layout, sub.n_rounds)
            res = decode_dataset(sub, graph, det)
            eps_vals.append(res.eps)
            pl_vals.append(res.p_logical)
            errors.append(res.per_shot_errors)
        per_size[size] = {
            "eps": float(np.mean(eps_vals)),
            "p_logical": float(np.mean(pl_vals)),
            "placements": len(placements),
            "per_shot_errors": np.column_stack(errors),
        }
    return per_size


def _run_decode(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    layout, noise = cfg.layout(), cfg.noise()
    sched = cfg.schedule()
    n_bits, repeats = cfg.shots
    ds = run_experiment(layout, noise, sched, n_bits, repeats, cfg.seed)
    det = detection_events(ds)
    graph = build_graph(det, layout, sched.n_rounds)
    res = decode_dataset(ds, graph, det)
    report = {
        "n_qubits": layout.n_qubits,
        "rounds": sched.n_rounds,
        "reset": sched.reset_enabled,
        "shots": res.n_shots,
        "p_logical": res.p_logical,
        "eps": None if not res.eps_defined else res.eps,
        "graph_edges": len(graph.edges),
        "graph_boundary_edges": len(graph.boundary_edges),
    }
    jpath = outdir / "decode_report.json"
    with jpath.open("w") as fh:
        export_decode_report_json(report, fh)
    errs = outdir / "logical_errors.csv"
    with errs.open("w") as fh:
        fh.write("shot,logical_error\n")
        for i, e in enumerate(res.per_shot_errors):
            fh.write(f"{i},{int(e)}\n")
    return [jpath.name, errs.name]


def _run_lambda_scan(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    layout, noise = cfg.layout(), cfg.noise()
    sizes = [int(s) for s in cfg.param("sizes", [5, 9, 13, 17, 21])]
    rounds_scan = [int(k) for k in cfg.param("rounds_scan", [10, 20, 30])]
    n_bits, repeats = cfg.shots
    average = bool(cfg.param("average_placements", True))
    eps_rows, lambda_rows = [], []
    report: dict = {"sizes": sizes, "rounds_scan": rounds_scan, "by_reset": {}}
    for reset in (False, True):
        by_rounds = {}
        for k in rounds_scan:
            sched = Schedule(n_rounds=k, reset_enabled=reset)
            ds = run_experiment(
                layout, noise, sched, n_bits, repeats, (cfg.seed, int(reset), k)
            )
            per_size = _decode_sizes(ds, sizes, average)
            eps_by = {s: v["eps"] for s, v in per_size.items()}
            fit = lambda_fit(eps_by)
            by_rounds[k] = {
                "eps_by_size": eps_by,
                "lambda": fit.lam,
                "r_squared": fit.r_squared,
                "excluded_sizes": list(fit.excluded_sizes),
            }
            lambda_rows.append((k, reset, fit.lam))
            if k == max(rounds_scan) and not reset:
                eps_rows.extend((s, k, e) for s, e in sorted(eps_by.items()))
        report["by_reset"][str(reset)] = by_rounds
    jpath = outdir / "lambda_report.json"
    with jpath.open("w") as fh:
        export_decode_report_json(report, fh)
    cpath = outdir / "fig6_lambda.csv"
    with cpath.open("w") as fh:
        export_lambda_scan_csv(eps_rows, lambda_rows, fh)
    return [jpath.name, cpath.name]


def _run_postselect(cfg: ExperimentConfig, outdir: Path) -> list[str]:
    ps = cfg.param("postselect", {})
    source = cfg.param("input")
    if source is None:
        raise ValueError("postselect config needs 'input' (CSV of logical errors)")
    rows = Path(source).read_text().strip().splitlines()
    header_offset = 1 if rows and not rows[0].split(",")[-1].isdigit() else 0
    errors = np.array(
        [int(line.split(",")[-1]) for line in rows[header_offset:]], dtype=np.uint8
    )
    report, kept = postselect(
        errors,
        window=int(ps.get("window", 30)),
        threshold=float(ps.get("threshold", 0.25)),
        removal_span=int(ps.get("removal_span", 1000)),
    )
    jpath = outdir / "postselection_report.json"
    jpath.write_text(json.dumps(asdict(report), indent=2))
    kpath = outdir / "kept_indices.csv"
    with kpath.open("w") as fh:
        fh.write("shot\n")
        for i in kept:
            fh.write(f"{i}\n")
    return [jpath.name, kpath.name]


_PIPELINES = {
    "reset-sweep": _run_reset_sweep,
    "leakage-growth": _run_leakage_growth,
    "injection": _run_injection,
    "pij": _run_pij,
    "decode": _run_decode,
    "lambda-scan": _run_lambda_scan,
    "postselect": _run_postselect,
}


def run(cfg: ExperimentConfig, outdir: str | Path) -> list[Path]:
    """Execute a pipeline and write its artifacts plus the manifest."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = _PIPELINES[cfg.kind](cfg, outdir)
    manifest = _write_manifest(cfg, outdir, files)
    return [outdir / f for f in files] + [manifest]
