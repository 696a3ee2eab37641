"""Scan orchestration: coupling maps and spectrum sweeps over config axes.

Every scan point is a pure function of the config, so points can run in a
worker pool; results are merged in axis order regardless of completion
order, keeping output deterministic.
"""

from __future__ import annotations

import csv
import datetime
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .config import UNIT_TABLE, ScanConfig
from .couplings import (
    LoopParams,
    coupling_map,
    nv_pcq_coupling,
    pcq_cpw_coupling,
    pcq_frequency,
)
from .errors import IoError, SpinbusError, ValidationError
from .liouvillian import adaptive_truncation
from .model import DecoherenceRates, ModelParams
from .operators import partial_trace
from .spectrum import (
    PeakReport,
    Spectrum,
    find_spectral_peaks,
    full_liouvillian_spectrum,
    nv_sector_spectrum,
    sector_problem,
    spectrum_resolvent,
    validate_weights,
)
from .units import TWO_PI


@dataclass(frozen=True)
class ResultTable:
    """Column-schema'd rows plus the provenance needed to reproduce them."""

    columns: tuple[tuple[str, str], ...]   # (name, unit)
    rows: tuple[tuple, ...]
    provenance: dict

    @property
    def header(self) -> tuple[str, ...]:
        return tuple(f"{name} ({unit})" for name, unit in self.columns)


def _provenance(cfg: ScanConfig) -> dict:
    return {
        "spinbus": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc)
        .isoformat(timespec="seconds"),
        "config_hash": cfg.config_hash,
        "solver_tolerances": (
            f"steady_residual_tol={cfg.solver.steady_residual_tol:g} "
            f"truncation_tol={cfg.solver.truncation_tol:g}"
        ),
        "deterministic": str(cfg.deterministic).lower(),
    }


def _to_unit(value_si: float, unit: str) -> float:
    return value_si / UNIT_TABLE[unit][1] if unit else value_si


def run_couplings_scan(cfg: ScanConfig) -> ResultTable:
    """Coupling-strength map over r_loop and/or I_p axes.

    Axes not scanned fall back to the base loop value; rows run
    r_loop-major so declaring the axes in either order yields the same
    table.
    """
    allowed = {"r_loop", "I_p"}
    by_name = {a.name: a for a in cfg.axes}
    bad = set(by_name) - allowed
    if bad:
        raise ValidationError(
            f"couplings scan supports axes r_loop and I_p only, got {sorted(bad)}")
    r_vals = by_name["r_loop"].values if "r_loop" in by_name else (cfg.loop.r_loop,)
    i_vals = by_name["I_p"].values if "I_p" in by_name else (cfg.loop.I_p,)
    table = coupling_map(
        cfg.resonator, cfg.nv, r_vals, i_vals,
        d_rule=cfg.solver.distance_for,
        loop_template=cfg.loop,
    )
    rows = tuple(
        (row["r_loop"] / 1e-6, row["I_p"] / 1e-9,
         row["g"] / 1e6, row["eta"] / 1e3, row["gbar"] / 1e3)
        for row in table
    )
    columns = (("r_loop", "um"), ("I_p", "nA"), ("g_over_2pi", "MHz"),
               ("eta_over_2pi", "kHz"), ("gbar_over_2pi", "kHz"))
    return ResultTable(columns, rows, _provenance(cfg))


def _loop_at(cfg: ScanConfig, axis_name: str, value: float) -> LoopParams:
    loop = cfg.loop
    if axis_name == "r_loop":
        return replace(loop, r_loop=value)
    if axis_name == "I_p":
        return replace(loop, I_p=value)
    if axis_name == "n_turns":
        return replace(loop, n_turns=int(round(value)))
    if axis_name == "T1_pcq":
        return replace(loop, T1_pcq=value)
    if axis_name == "T2_pcq":
        return replace(loop, T2_pcq=value)
    if axis_name == "tau":
        return replace(loop, T1_pcq=value, T2_pcq=value)
    if axis_name == "epsilon":
        return replace(loop, T2_pcq=value * loop.T1_pcq)
    if axis_name == "d":
        return loop
    raise ValidationError(f"axis {axis_name!r} not usable in a spectrum scan")


def _point_model(cfg: ScanConfig, loop: LoopParams, d: float, n_fock: int
                 ) -> tuple[ModelParams, DecoherenceRates, float]:
    """(model, rates, frame_offset) for one scan point; frame is the upper
    Rabi peak omega_g = g."""
    g_cyc = pcq_cpw_coupling(cfg.resonator, loop, d)
    eta_cyc = nv_pcq_coupling(loop, cfg.nv)
    omega_0 = pcq_frequency(loop)
    model = ModelParams(
        omega_r=cfg.resonator.omega_r, omega_0=omega_0,
        g=TWO_PI * g_cyc, eta=TWO_PI * eta_cyc,
        zeta=cfg.resonator.zeta, N_fock=n_fock,
    )
    rates = DecoherenceRates.from_times(
        cfg.resonator.kappa, loop.T1_pcq, loop.T2_pcq,
        cfg.nv.T1_nv, cfg.nv.T2_nv, cfg.solver.rate_convention,
    )
    return model, rates, model.g


def _truncation_metric(cfg: ScanConfig, loop: LoopParams, d: float):
    """Metric for adaptive truncation: steady-state cavity populations
    (padded to n_fock_max) plus the normalized shape of a coarse spectrum."""
    solver = cfg.solver
    probe_points = 33
    span = solver.grid_span_kappa * cfg.resonator.kappa
    coarse = np.linspace(-span, span, probe_points)

    def metric(n_fock: int) -> np.ndarray:
        model, rates, offset = _point_model(cfg, loop, d, n_fock)
        pops = np.zeros(solver.n_fock_max + 1)
        if solver.nv_mode == "sectors":
            weights = validate_weights(solver.weights)
            vals = np.zeros(probe_points)
            for m_s, w in zip((1, 0, -1), weights):
                if w == 0.0:
                    continue
                lio, a_op, rho_ss = sector_problem(model, rates, m_s,
                                                   solver.pcq_relaxation)
                cavity = partial_trace(rho_ss.matrix, rho_ss.layout, ("cavity",))
                pops[:n_fock] += w * np.real(np.diag(cavity))
                s = spectrum_resolvent(lio, a_op, rho_ss, coarse,
                                       cfg.solver.spectrum_mode, offset)
                vals += w * s.values
        else:
            s = full_liouvillian_spectrum(
                model, rates, coarse, offset, solver.spectrum_mode,
                solver.nv_relaxation, solver.pcq_relaxation)
            vals = s.values
            # full-mode population metric comes through the spectrum shape
        peak = vals.max()
        shape = vals / peak if peak > 0 else vals
        return np.concatenate([pops, shape])

    return metric


def resolve_n_fock(cfg: ScanConfig, loop: LoopParams, d: float) -> int:
    if cfg.solver.n_fock is not None:
        return cfg.solver.n_fock
    return adaptive_truncation(
        _truncation_metric(cfg, loop, d),
        start=cfg.solver.n_fock_start,
        tolerance=cfg.solver.truncation_tol,
        n_max=cfg.solver.n_fock_max,
    )


def compute_point_spectrum(cfg: ScanConfig, axis_name: str, value: float
                           ) -> tuple[Spectrum, PeakReport]:
    """Spectrum and peak report at one axis point (pure; used by workers)."""
    loop = _loop_at(cfg, axis_name, value)
    d = value if axis_name == "d" else cfg.solver.distance_for(loop.r_loop)
    n_fock = resolve_n_fock(cfg, loop, d)
    model, rates, offset = _point_model(cfg, loop, d, n_fock)
    span = cfg.solver.grid_span_kappa * cfg.resonator.kappa
    grid = np.linspace(-span, span, cfg.solver.grid_points)
    if cfg.solver.nv_mode == "sectors":
        spec = nv_sector_spectrum(model, rates, cfg.solver.weights, grid,
                                  offset, cfg.solver.spectrum_mode,
                                  cfg.solver.pcq_relaxation)
    else:
        spec = full_liouvillian_spectrum(model, rates, grid, offset,
                                         cfg.solver.spectrum_mode,
                                         cfg.solver.nv_relaxation,
                                         cfg.solver.pcq_relaxation)
    spec.metadata.update(axis=axis_name, axis_value=value, n_fock=n_fock,
                         config_hash=cfg.config_hash)
    report = find_spectral_peaks(spec, cfg.solver.dip_fraction)
    return spec, report


def _point_job(args):
    cfg, axis_name, value = args
    try:
        return compute_point_spectrum(cfg, axis_name, value)
    except SpinbusError as exc:
        raise type(exc)(
            f"at scan point {axis_name}={value!r}: {exc}"
        ) from exc


@dataclass(frozen=True)
class SpectrumScanResult:
    spectra: ResultTable
    peaks: ResultTable | None


def run_spectrum_scan(cfg: ScanConfig, threads: int = 1) -> SpectrumScanResult:
    """Long-format spectrum table over the single configured axis.

    Columns: axis value (config unit), detuning from the tracked peak
    (cyclic kHz), S, log10 S. The analysis frame is centred on the upper
    vacuum-Rabi peak omega_g = g recomputed at each point. A peaks table is
    attached when the config requests the "peaks" product.
    """
    if len(cfg.axes) != 1:
        raise ValidationError("spectrum scan needs exactly one axis")
    axis = cfg.axes[0]
    jobs = [(cfg, axis.name, v) for v in axis.values]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_point_job, jobs))
    else:
        results = [_point_job(j) for j in jobs]

    axis_col = (axis.name, axis.unit or "1")
    rows = []
    peak_rows = []
    for value, (spec, report) in zip(axis.values, results):
        shown = _to_unit(value, axis.unit)
        log_vals = spec.log10_values()
        for w, s_val, ls in zip(spec.omega_grid, spec.values, log_vals):
            rows.append((shown, w / TWO_PI / 1e3, s_val, ls))
        peak_rows.append((
            shown,
            len(report.peaks),
            str(report.resolved).lower(),
            report.dip_depth,
            ";".join(f"{p / TWO_PI / 1e3:.6g}" for p, _, _ in report.peaks),
            ";".join(f"{w / TWO_PI / 1e3:.6g}" for _, _, w in report.peaks),
        ))

    spectra = ResultTable(
        (axis_col, ("delta_omega_over_2pi", "kHz"), ("S", "s"),
         ("log10_S", "1")),
        tuple(rows), _provenance(cfg),
    )
    peaks = None
    if "peaks" in cfg.products:
        peaks = ResultTable(
            (axis_col, ("n_peaks", "1"), ("resolved", "bool"),
             ("dip_depth", "1"), ("peak_positions_over_2pi", "kHz"),
             ("peak_fwhm_over_2pi", "kHz")),
            tuple(peak_rows), _provenance(cfg),
        )
    return SpectrumScanResult(spectra=spectra, peaks=peaks)


# ---------------------------------------------------------------------------
# emission

def _format_cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _provenance_lines(t: ResultTable) -> list[str]:
    return [f"# {k} = {v}" for k, v in t.provenance.items()]


def emit_csv(t: ResultTable, path: str) -> None:
    """RFC-4180 CSV with LF endings and a leading # provenance block."""
    buf = io.StringIO()
    for line in _provenance_lines(t):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(t.header)
    for row in t.rows:
        writer.writerow([_format_cell(x) for x in row])
    _write_text(path, buf.getvalue())


def emit_plotdata(t: ResultTable, path: str) -> None:
    """Gnuplot-style whitespace-delimited blocks, one per leading-axis value
    (blocks separated by two blank lines for `index` addressing)."""
    buf = io.StringIO()
    for line in _provenance_lines(t):
        buf.write(line + "\n")
    buf.write("# columns: " + " ".join(t.header) + "\n")
    current = object()
    first = True
    for row in t.rows:
        if row[0] != current:
            if not first:
                buf.write("\n\n")
            current = row[0]
            buf.write(f"# block {t.columns[0][0]} = {_format_cell(current)}\n")
            first = False
        buf.write(" ".join(_format_cell(x) for x in row) + "\n")
    _write_text(path, buf.getvalue())


def _write_text(path: str, content: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
    except OSError as exc:
        raise IoError(f"cannot write {path!r}: {exc}") from None


def read_csv(path: str) -> tuple[list[str], list[list[str]], dict]:
    """Parse an emit_csv file back into (header, rows, provenance)."""
    provenance = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    data_lines = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            provenance[key.strip()] = value.strip()
        else:
            data_lines.append(line)
    reader = csv.reader(io.StringIO("\n".join(data_lines)))
    parsed = list(reader)
    return parsed[0], parsed[1:], provenance


def data_section(path: str) -> str:
    """Everything except the # provenance block; the determinism contract
    compares these bytes."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return "".join(line for line in fh if not line.startswith("#"))
