"""Steady-state emission spectrum of the driven cavity.

The two-sided power spectrum is folded onto a one-sided integral using
stationarity of the steady state:

    S(omega) = (1/pi) * Re  Integral_0^inf e^{-i omega tau} g(tau) dtau,
    g(tau)   = Tr[ A_dag  e^{L tau} (A rho_ss) ],

with A = a in "full" mode or A = a - <a>_ss in "incoherent" mode (the
fluctuation spectrum, which removes the coherent drive's delta peak and is
the default: the Rabi/spin structure is the visible part). Two independent
evaluation routes are provided: the resolvent identity

    S(omega) = (1/pi) * Re  vec(A)^dag (i omega I - L)^{-1} vec(A rho_ss)

solved frequency by frequency, and direct quadrature/FFT of the propagated
correlation. They must agree; the tests enforce it.

Frequencies are measured in the rotating frame of the drive. A Spectrum
stores its grid relative to frame_offset (e.g. the upper vacuum-Rabi peak
at offset g), so the absolute frame frequency is frame_offset + grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.signal import find_peaks as _sp_find_peaks

from .errors import (
    GridTooCoarse,
    LayoutMismatch,
    SingularResolvent,
    WeightsInvalid,
    WindowTooShort,
)
from .liouvillian import (
    Superoperator,
    build_liouvillian,
    expm_action_grid,
    steady_state,
    trace_row,
    vectorize,
)
from .model import (
    DecoherenceRates,
    ModelParams,
    build_collapse_operators,
    build_interaction_hamiltonian,
    sector_collapse_operators,
    sector_interaction_hamiltonian,
)
from .operators import (
    DensityMatrix,
    LabeledOperator,
    cavity_qubit_layout,
    embed,
    fock_annihilation_matrix,
    full_layout,
)

logger = logging.getLogger(__name__)

SpectrumMode = Literal["full", "incoherent"]

# Dense per-frequency solves below this superoperator dimension, sparse above.
_DENSE_SOLVE_CAP = 2048


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Spectral density on a frequency grid relative to an analysis frame.

    Values are clipped to be nonnegative; anything more negative than
    ~1e-10 of the peak indicates a numerical problem and is logged before
    clipping. Metadata records every input needed to reproduce the run.
    """

    omega_grid: np.ndarray        # rad/s, relative to frame_offset
    values: np.ndarray            # >= 0
    frame_offset: float = 0.0     # rad/s
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.omega_grid, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or vals.shape != grid.shape:
            raise ValueError("grid and values must be matching 1-D arrays")
        if np.any(np.diff(grid) <= 0.0):
            raise ValueError("omega grid must be strictly increasing")
        peak = float(np.max(np.abs(vals))) if vals.size else 0.0
        floor = -1e-12 * max(peak, 1.0)
        most_negative = float(vals.min()) if vals.size else 0.0
        if peak > 0.0 and most_negative < -1e-10 * peak:
            logger.warning(
                "spectrum has negative values down to %.3e of peak; clipping",
                most_negative / peak,
            )
        elif most_negative < floor:
            logger.debug("clipping tiny negative spectrum values (min %.3e)",
                         most_negative)
        object.__setattr__(self, "omega_grid", grid)
        object.__setattr__(self, "values", np.clip(vals, 0.0, None))
        self.metadata.setdefault("min_raw_value", most_negative)

    @property
    def absolute_grid(self) -> np.ndarray:
        return self.omega_grid + self.frame_offset

    def log10_values(self, floor_exponent: float = -30.0) -> np.ndarray:
        return np.log10(np.maximum(self.values, 10.0**floor_exponent))


@dataclass(frozen=True)
class PeakReport:
    """Detected spectral peaks and whether they are mutually resolved."""

    peaks: tuple[tuple[float, float, float], ...]  # (position, height, fwhm)
    resolved: bool
    dip_depth: float

    @property
    def positions(self) -> np.ndarray:
        return np.array([p[0] for p in self.peaks])


def _fluctuation_operator(a_op: LabeledOperator, rho_ss: DensityMatrix,
                          mode: SpectrumMode) -> np.ndarray:
    if mode not in ("full", "incoherent"):
        raise ValueError(f"unknown spectrum mode {mode!r}")
    a = a_op.matrix
    if mode == "full":
        return a
    mean = np.trace(a @ rho_ss.matrix)
    return a - mean * np.eye(a.shape[0])


def two_time_correlation(lio: Superoperator, a_op: LabeledOperator,
                         rho: DensityMatrix, taus: np.ndarray,
                         mode: SpectrumMode = "incoherent") -> np.ndarray:
    """g(tau) = Tr[A_dag e^{L tau} (A rho)] on a uniform tau grid from 0."""
    taus = np.asarray(taus, dtype=float)
    if taus[0] != 0.0 or np.any(np.diff(taus) <= 0):
        raise ValueError("taus must start at 0 and increase")
    steps = np.diff(taus)
    if np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
        raise ValueError("taus must be uniform")
    a_fl = _fluctuation_operator(a_op, rho, mode)
    b = vectorize(a_fl @ rho.matrix)
    u = vectorize(a_fl).conj()
    states = expm_action_grid(lio, b, float(taus[-1]), taus.size)
    return states @ u


def _carrier_solve(lio: Superoperator, dense: np.ndarray | None,
                   b: np.ndarray, op_scale: float) -> np.ndarray:
    """Deflated solve of -L x = b at the carrier frequency (w = 0).

    (i w I - L) is singular at w = 0 through the steady-state kernel, but
    the resolvent limit exists whenever b carries no stationary component
    (t.b = tr(A rho) = 0, with t the trace functional): that is the
    incoherent case. Replacing the first diagonal row of -L by t removes
    exactly the trace kernel; a genuine stationary component (a coherent
    delta peak, gauged against the operator scale since |tr(A rho)| <=
    ||A||_F) or any further kernel direction is reported instead.
    """
    t = trace_row(lio.dim)
    bnorm = float(np.linalg.norm(b))
    if abs(t @ b) > 1e-10 * op_scale:
        raise SingularResolvent(
            0.0, "coherent delta peak at the carrier frequency")
    bb = b.copy()
    bb[0] = 0.0
    if dense is not None:
        m = -dense.copy()
        m[0, :] = t
        try:
            x = np.linalg.solve(m, bb)
        except np.linalg.LinAlgError:
            raise SingularResolvent(0.0) from None
    else:
        m = (-lio.matrix).tolil()
        m[0, :] = t
        try:
            x = spla.splu(m.tocsc()).solve(bb)
        except RuntimeError:
            raise SingularResolvent(0.0) from None
    residual = float(np.linalg.norm(lio.matrix @ x + b))
    if not np.isfinite(residual) or residual > 1e-8 * bnorm:
        raise SingularResolvent(0.0)
    return x


def _resolvent_values(lio: Superoperator, u: np.ndarray, b: np.ndarray,
                      omegas: np.ndarray) -> np.ndarray:
    """vec-form values u^dag (i w I - L)^{-1} b for each w, by direct solve.

    Every solve is residual-checked; numerically singular frequencies
    (undamped poles, or the coherent delta peak at the carrier) raise
    SingularResolvent rather than returning garbage.
    """
    d2 = lio.matrix.shape[0]
    out = np.empty(omegas.size, dtype=complex)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        out[:] = 0.0
        return out
    carrier_tol = 1e-12 * lio.norm_scale()
    dense = lio.matrix.toarray() if d2 <= _DENSE_SOLVE_CAP else None
    eye_d = np.eye(d2) if dense is not None else sp.identity(
        d2, dtype=complex, format="csc")
    op_scale = float(np.linalg.norm(u))
    for k, w in enumerate(omegas):
        if abs(w) < carrier_tol:
            x = _carrier_solve(lio, dense, b, op_scale)
            out[k] = u @ x
            continue
        if dense is not None:
            m = 1j * w * eye_d - dense
            try:
                x = np.linalg.solve(m, b)
            except np.linalg.LinAlgError:
                raise SingularResolvent(float(w)) from None
            residual = float(np.linalg.norm(m @ x - b))
        else:
            m = ((1j * w) * eye_d - lio.matrix).tocsc()
            try:
                x = spla.splu(m).solve(b)
            except RuntimeError:
                raise SingularResolvent(float(w)) from None
            residual = float(np.linalg.norm(m @ x - b))
        if not np.isfinite(residual) or residual > 1e-8 * bnorm:
            raise SingularResolvent(float(w))
        out[k] = u @ x
    return out


def spectrum_resolvent(lio: Superoperator, a_op: LabeledOperator,
                       rho_ss: DensityMatrix, omega_grid: Sequence[float],
                       mode: SpectrumMode = "incoherent",
                       frame_offset: float = 0.0,
                       metadata: dict | None = None) -> Spectrum:
    """Spectrum via per-frequency resolvent solves.

    omega_grid is relative to frame_offset; the resolvent is evaluated at
    the absolute frame frequency. In full mode the coherent component makes
    (i w - L) singular at the drive carrier (w_abs = 0); that frequency is
    reported via SingularResolvent, never interpolated over.
    """
    if a_op.layout != rho_ss.layout or a_op.layout != lio.layout:
        raise LayoutMismatch("operator, state and Liouvillian layouts differ")
    grid = np.asarray(omega_grid, dtype=float)
    a_fl = _fluctuation_operator(a_op, rho_ss, mode)
    b = vectorize(a_fl @ rho_ss.matrix)
    u = vectorize(a_fl).conj()
    raw = _resolvent_values(lio, u, b, grid + frame_offset)
    values = np.real(raw) / np.pi
    meta = dict(metadata or {})
    meta.update(mode=mode, method="resolvent", frame_offset=frame_offset)
    return Spectrum(grid, values, frame_offset, meta)


def _simpson_weights(n: int) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson rule needs an odd number of points >= 3")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def spectrum_fft_crosscheck(lio: Superoperator, a_op: LabeledOperator,
                            rho_ss: DensityMatrix, tmax: float, dt: float,
                            mode: SpectrumMode = "incoherent",
                            omega_grid: Sequence[float] | None = None,
                            frame_offset: float = 0.0,
                            decay_tol: float = 1e-3,
                            metadata: dict | None = None) -> Spectrum:
    """Spectrum from the propagated two-time correlation.

    The correlation is evaluated on a uniform tau grid with the exact
    exponential propagator, symmetrized by stationarity and transformed:
    on an explicit omega_grid via Simpson quadrature of the one-sided
    integral (usable for point-by-point comparison against the resolvent
    route), otherwise on the natural two-sided FFT grid.

    Raises WindowTooShort when |g(tmax)| > decay_tol * |g(0)|: a truncated
    correlation aliases into spectral ringing.
    """
    if tmax <= 0.0 or dt <= 0.0 or dt >= tmax:
        raise ValueError("need 0 < dt < tmax")
    num = int(round(tmax / dt)) + 1
    if num % 2 == 0:
        num += 1
    taus = np.linspace(0.0, tmax, num)
    g = two_time_correlation(lio, a_op, rho_ss, taus, mode)
    g0 = abs(g[0])
    if g0 > 0.0 and abs(g[-1]) > decay_tol * g0:
        raise WindowTooShort(
            f"|g(tmax)|/|g(0)| = {abs(g[-1]) / g0:.3e} exceeds {decay_tol:g}"
        )
    step = taus[1] - taus[0]
    meta = dict(metadata or {})
    meta.update(mode=mode, method="time-domain", tmax=tmax, dt=step,
                frame_offset=frame_offset)

    if omega_grid is not None:
        grid = np.asarray(omega_grid, dtype=float)
        wg = _simpson_weights(num) * step * g
        omegas = grid + frame_offset
        values = np.empty(grid.size)
        chunk = max(1, int(2**22 // num))
        for k0 in range(0, omegas.size, chunk):
            block = omegas[k0:k0 + chunk]
            phases = np.exp(-1j * np.outer(block, taus))
            values[k0:k0 + chunk] = np.real(phases @ wg) / np.pi
        return Spectrum(grid, values, frame_offset, meta)

    # FFT route: two-sided signal g(-tau) = conj(g(tau)) in wrap-around order.
    m = 2 * num - 1
    y = np.zeros(m, dtype=complex)
    y[:num] = g
    y[num:] = np.conj(g[1:][::-1])
    s_fft = np.fft.fft(y) * step / (2.0 * np.pi)
    freqs = np.fft.fftfreq(m, d=step) * 2.0 * np.pi
    order = np.argsort(freqs)
    return Spectrum(freqs[order] - frame_offset, np.real(s_fft[order]),
                    frame_offset, meta)


def validate_weights(weights: Sequence[float]) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (3,):
        raise WeightsInvalid("need exactly three sector weights (+1, 0, -1)")
    if np.any(w < 0.0):
        raise WeightsInvalid("sector weights must be nonnegative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise WeightsInvalid(f"sector weights sum to {w.sum()!r}, not 1")
    return w


def sector_problem(p: ModelParams, rates: DecoherenceRates, m_s: int,
                   pcq_relaxation: str = "lowering"
                   ) -> tuple[Superoperator, LabeledOperator, DensityMatrix]:
    """Cavity+qubit Liouvillian, annihilation operator and steady state for
    the spin frozen in sector m_s (spin decay channels do not act)."""
    layout = cavity_qubit_layout(p.N_fock)
    h = sector_interaction_hamiltonian(p, layout, m_s)
    c_ops = sector_collapse_operators(rates, layout, pcq_relaxation)
    lio = build_liouvillian(h, c_ops)
    a_op = embed(fock_annihilation_matrix(p.N_fock), "cavity", layout)
    return lio, a_op, steady_state(lio)


def nv_sector_spectrum(p: ModelParams, rates: DecoherenceRates,
                       weights: Sequence[float],
                       omega_grid: Sequence[float],
                       frame_offset: float = 0.0,
                       mode: SpectrumMode = "incoherent",
                       pcq_relaxation: str = "lowering",
                       metadata: dict | None = None) -> Spectrum:
    """Weighted sum of frozen-spin sector spectra.

    Each m_s sector is a cavity+qubit problem whose qubit detuning is
    shifted by eta*m_s through the sigma_z S_z coupling; the spin's own
    collapse channels are disabled (the sector populations are the weights,
    held fixed). This is the shipped default for reproducing the
    spin-induced multiplet: the printed raising relaxation channel would
    instead pin the spin in m_s = +1 and produce a single shifted line
    (available via full_liouvillian_spectrum).
    """
    w = validate_weights(weights)
    grid = np.asarray(omega_grid, dtype=float)
    total = np.zeros(grid.size)
    sector_meta = {}
    for m_s, weight in zip((1, 0, -1), w):
        if weight == 0.0:
            continue
        lio, a_op, rho_ss = sector_problem(p, rates, m_s, pcq_relaxation)
        s = spectrum_resolvent(lio, a_op, rho_ss, grid, mode, frame_offset)
        total += weight * s.values
        sector_meta[m_s] = {"weight": float(weight),
                            "photon_number": float(np.real(
                                rho_ss.expect(a_op.dag() @ a_op)))}
    meta = dict(metadata or {})
    meta.update(mode=mode, method="sector-resolvent", weights=tuple(map(float, w)),
                sectors=sector_meta, eta=p.eta, g=p.g)
    return Spectrum(grid, total, frame_offset, meta)


def full_liouvillian_spectrum(p: ModelParams, rates: DecoherenceRates,
                              omega_grid: Sequence[float],
                              frame_offset: float = 0.0,
                              mode: SpectrumMode = "incoherent",
                              nv_relaxation: str = "as_printed",
                              pcq_relaxation: str = "lowering",
                              metadata: dict | None = None) -> Spectrum:
    """Spectrum on the full cavity (x) qubit (x) spin space, all five
    collapse channels active."""
    layout = full_layout(p.N_fock)
    h = build_interaction_hamiltonian(p, layout)
    c_ops = build_collapse_operators(rates, layout, nv_relaxation,
                                     pcq_relaxation)
    lio = build_liouvillian(h, c_ops)
    a_op = embed(fock_annihilation_matrix(p.N_fock), "cavity", layout)
    rho_ss = steady_state(lio)
    meta = dict(metadata or {})
    meta.update(method="full-liouvillian", nv_relaxation=nv_relaxation,
                pcq_relaxation=pcq_relaxation)
    return spectrum_resolvent(lio, a_op, rho_ss, omega_grid, mode,
                              frame_offset, meta)


def _refine_peak_position(grid: np.ndarray, vals: np.ndarray, idx: int) -> float:
    """Sub-grid peak position from a quadratic through the top three samples."""
    if idx == 0 or idx == grid.size - 1:
        return float(grid[idx])
    y0, y1, y2 = vals[idx - 1], vals[idx], vals[idx + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0.0:
        return float(grid[idx])
    shift = 0.5 * (y0 - y2) / denom
    step = 0.5 * (grid[idx + 1] - grid[idx - 1])
    return float(grid[idx] + np.clip(shift, -1.0, 1.0) * step)


def _half_max_width(grid: np.ndarray, vals: np.ndarray, idx: int) -> float:
    """FWHM of the peak at sample idx by linear interpolation; clipped to
    the grid edges when the flanks do not come down to half height."""
    half = vals[idx] / 2.0
    left = grid[0]
    for j in range(idx, 0, -1):
        if vals[j - 1] <= half:
            frac = (vals[j] - half) / (vals[j] - vals[j - 1])
            left = grid[j] - frac * (grid[j] - grid[j - 1])
            break
    right = grid[-1]
    for j in range(idx, grid.size - 1):
        if vals[j + 1] <= half:
            frac = (vals[j] - half) / (vals[j] - vals[j + 1])
            right = grid[j] + frac * (grid[j + 1] - grid[j])
            break
    return float(right - left)


def find_spectral_peaks(s: Spectrum, dip_fraction: float = 0.1,
                        floor_fraction: float = 1e-9,
                        prominence_fraction: float = 1e-6) -> PeakReport:
    """Locate peaks and decide whether the multiplet is resolved.

    A pair of adjacent peaks is resolved when the valley between them drops
    by at least dip_fraction of the lower peak. Candidate maxima below
    floor_fraction of the global maximum, or with prominence below
    prominence_fraction of it, are treated as noise. GridTooCoarse is
    raised when a reported peak's half-maximum width spans fewer than four
    grid steps, since its position cannot be trusted at that sampling.
    """
    if not 0.0 < dip_fraction < 1.0:
        raise ValueError("dip_fraction must lie in (0, 1)")
    grid = s.omega_grid
    vals = s.values
    vmax = float(vals.max(initial=0.0))
    if vmax <= 0.0:
        return PeakReport(peaks=(), resolved=False, dip_depth=0.0)
    idx, _ = _sp_find_peaks(vals, height=floor_fraction * vmax,
                            prominence=prominence_fraction * vmax)
    step = float(np.max(np.diff(grid)))
    peaks = []
    for i in idx:
        width = _half_max_width(grid, vals, int(i))
        if width < 4.0 * step:
            raise GridTooCoarse(
                f"peak at {grid[i]:.6g} rad/s has FWHM {width:.3g} "
                f"< 4 grid steps ({4 * step:.3g})"
            )
        peaks.append((_refine_peak_position(grid, vals, int(i)),
                      float(vals[i]), width))

    dip_depth = 0.0
    resolved = False
    for (x1, h1, _), (x2, h2, _), (i1, i2) in zip(peaks, peaks[1:],
                                                  zip(idx, idx[1:])):
        valley = float(vals[i1:i2 + 1].min())
        lower = min(h1, h2)
        depth = (lower - valley) / lower if lower > 0 else 0.0
        dip_depth = max(dip_depth, depth)
        if depth >= dip_fraction:
            resolved = True
    return PeakReport(peaks=tuple(peaks), resolved=resolved,
                      dip_depth=dip_depth)
