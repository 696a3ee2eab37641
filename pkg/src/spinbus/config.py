"""Config-file grammar, validation, and defaulting.

The format is a line-based key-value tree with mandatory unit suffixes on
every dimensional quantity (frequencies are cyclic: "kappa = 26 kHz" means
kappa/2pi = 26 kHz). Sections group related keys; scan axes live under
[scan]. Example:

    [resonator]
    omega_r = 6 GHz
    L_r     = 2 nH
    kappa   = 26 kHz

    [loop]
    r_loop  = 0.4 um
    I_p     = 800 nA
    Delta   = 6 GHz

    [scan]
    axis r_loop = linspace 0.1 um to 1.0 um points 32
    axis tau    = list 0.5, 5, 10, 15, 20 us

    [output]
    products = spectrum, peaks

Bare numbers are accepted only for dimensionless keys; a dimensional key
without a unit is a validation error, as is a unit of the wrong dimension.
The full grammar, key table and defaults are documented in the README.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from .couplings import LoopParams, NVParams, ResonatorParams, static_bias_field
from .errors import ParseError, ValidationError
from .units import CONSTANTS, TWO_PI

# unit token -> (dimension, factor to SI)
UNIT_TABLE: dict[str, tuple[str, float]] = {
    "Hz": ("frequency", 1.0), "kHz": ("frequency", 1e3),
    "MHz": ("frequency", 1e6), "GHz": ("frequency", 1e9),
    "s": ("time", 1.0), "ms": ("time", 1e-3),
    "us": ("time", 1e-6), "ns": ("time", 1e-9),
    "m": ("length", 1.0), "mm": ("length", 1e-3),
    "um": ("length", 1e-6), "nm": ("length", 1e-9),
    "A": ("current", 1.0), "mA": ("current", 1e-3),
    "uA": ("current", 1e-6), "nA": ("current", 1e-9),
    "H": ("inductance", 1.0), "mH": ("inductance", 1e-3),
    "uH": ("inductance", 1e-6), "nH": ("inductance", 1e-9),
    "pH": ("inductance", 1e-12),
    "T": ("field", 1.0), "mT": ("field", 1e-3), "uT": ("field", 1e-6),
    "nT": ("field", 1e-9), "G": ("field", 1e-4), "mG": ("field", 1e-7),
    "Wb": ("flux", 1.0), "Phi0": ("flux", CONSTANTS.flux_quantum),
    "Hz/T": ("slope", 1.0), "kHz/T": ("slope", 1e3),
    "MHz/T": ("slope", 1e6), "GHz/T": ("slope", 1e9),
}

# (section, key) -> dimension ("none" marks dimensionless / enumerated keys)
KEY_TABLE: dict[tuple[str, str], str] = {
    ("resonator", "omega_r"): "frequency",
    ("resonator", "L_r"): "inductance",
    ("resonator", "kappa"): "frequency",
    ("resonator", "Q"): "none",
    ("resonator", "zeta"): "frequency",
    ("resonator", "omega_drive"): "frequency",
    ("loop", "r_loop"): "length",
    ("loop", "I_p"): "current",
    ("loop", "Delta"): "frequency",
    ("loop", "n_turns"): "none",
    ("loop", "Phi_x"): "flux",
    ("loop", "T1_pcq"): "time",
    ("loop", "T2_pcq"): "time",
    ("loop", "alpha"): "none",
    ("nv", "D"): "frequency",
    ("nv", "slope"): "slope",
    ("nv", "B_bias"): "field",
    ("nv", "T1_nv"): "time",
    ("nv", "T2_nv"): "time",
    ("solver", "n_fock"): "none",
    ("solver", "n_fock_start"): "none",
    ("solver", "n_fock_max"): "none",
    ("solver", "truncation_tol"): "none",
    ("solver", "rate_convention"): "none",
    ("solver", "nv_relaxation"): "none",
    ("solver", "pcq_relaxation"): "none",
    ("solver", "nv_mode"): "none",
    ("solver", "weights"): "none",
    ("solver", "spectrum_mode"): "none",
    ("solver", "grid_points"): "none",
    ("solver", "grid_span_kappa"): "none",
    ("solver", "dip_fraction"): "none",
    ("solver", "steady_residual_tol"): "none",
    ("solver", "d_rule"): "length-or-rule",
    ("output", "products"): "none",
    ("output", "deterministic"): "none",
}

AXIS_DIMENSIONS: dict[str, str] = {
    "r_loop": "length",
    "I_p": "current",
    "n_turns": "none",
    "T1_pcq": "time",
    "T2_pcq": "time",
    "tau": "time",       # sets T1_pcq = T2_pcq = tau
    "epsilon": "none",   # sets T2_pcq = epsilon * T1_pcq
    "d": "length",       # loop-conductor distance, overrides the d rule
}

_NUMBER_UNIT = re.compile(
    r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z][A-Za-z0-9/]*)?$"
)
_FRACTION = re.compile(r"^(\d+)\s*/\s*(\d+)$")


def parse_quantity(text: str, dimension: str, line_no: int | None = None) -> float:
    """Parse '<number> [unit]' into SI, enforcing the key's dimension."""
    text = text.strip()
    m = _NUMBER_UNIT.match(text)
    if not m:
        raise ParseError(f"cannot parse quantity {text!r}", line_no)
    value = float(m.group(1))
    unit = m.group(2)
    if dimension == "none":
        if unit:
            raise ValidationError(
                f"dimensionless key given unit {unit!r}" +
                (f" (line {line_no})" if line_no else "")
            )
        return value
    if not unit:
        raise ValidationError(
            f"physical quantity {text!r} needs a unit" +
            (f" (line {line_no})" if line_no else "")
        )
    if unit not in UNIT_TABLE:
        raise ParseError(f"unknown unit {unit!r}", line_no)
    dim, factor = UNIT_TABLE[unit]
    if dim != dimension:
        raise ValidationError(
            f"unit {unit!r} has dimension {dim!r}, expected {dimension!r}" +
            (f" (line {line_no})" if line_no else "")
        )
    return value * factor


def _parse_fraction(token: str, line_no: int | None = None) -> float:
    m = _FRACTION.match(token)
    if m:
        return float(m.group(1)) / float(m.group(2))
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"cannot parse number {token!r}", line_no) from None


@dataclass(frozen=True)
class ScanAxis:
    """One swept parameter: SI values plus the unit the config used."""

    name: str
    values: tuple[float, ...]
    unit: str = ""

    def __post_init__(self):
        if self.name not in AXIS_DIMENSIONS:
            raise ValidationError(
                f"unknown scan axis {self.name!r}; valid: "
                f"{sorted(AXIS_DIMENSIONS)}"
            )
        if len(self.values) == 0:
            raise ValidationError(f"axis {self.name!r} has no values")


@dataclass(frozen=True)
class SolverSettings:
    """Numerical knobs with their documented defaults."""

    n_fock: int | None = None          # None = adaptive
    n_fock_start: int = 4
    n_fock_max: int = 30
    truncation_tol: float = 1e-3
    rate_convention: str = "cyclic"
    nv_relaxation: str = "as_printed"
    pcq_relaxation: str = "lowering"
    nv_mode: str = "sectors"
    weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    spectrum_mode: str = "incoherent"
    grid_points: int = 2001
    grid_span_kappa: float = 20.0
    dip_fraction: float = 0.1
    steady_residual_tol: float = 1e-9
    d_rule: str = "r_loop"             # or "fixed:<meters>"

    def __post_init__(self):
        if self.rate_convention not in ("cyclic", "plain"):
            raise ValidationError(f"bad rate_convention {self.rate_convention!r}")
        if self.nv_relaxation not in ("as_printed", "lowering"):
            raise ValidationError(f"bad nv_relaxation {self.nv_relaxation!r}")
        if self.pcq_relaxation not in ("as_printed", "lowering"):
            raise ValidationError(f"bad pcq_relaxation {self.pcq_relaxation!r}")
        if self.nv_mode not in ("sectors", "full"):
            raise ValidationError(f"bad nv_mode {self.nv_mode!r}")
        if self.spectrum_mode not in ("incoherent", "full"):
            raise ValidationError(f"bad spectrum_mode {self.spectrum_mode!r}")
        if self.grid_points < 16:
            raise ValidationError("grid_points must be at least 16")
        if not 0.0 < self.dip_fraction < 1.0:
            raise ValidationError("dip_fraction must lie in (0, 1)")
        if self.d_rule != "r_loop" and not self.d_rule.startswith("fixed:"):
            raise ValidationError(f"bad d_rule {self.d_rule!r}")

    def distance_for(self, r_loop: float) -> float:
        if self.d_rule == "r_loop":
            return r_loop
        return float(self.d_rule.split(":", 1)[1])


@dataclass(frozen=True)
class ScanConfig:
    """Fully validated, fully defaulted scan description."""

    resonator: ResonatorParams
    loop: LoopParams
    nv: NVParams
    solver: SolverSettings
    axes: tuple[ScanAxis, ...] = ()
    products: tuple[str, ...] = ("couplings",)
    deterministic: bool = True
    config_hash: str = ""

    def __post_init__(self):
        for p in self.products:
            if p not in ("couplings", "spectrum", "peaks"):
                raise ValidationError(f"unknown product {p!r}")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate scan axes")

    def describe(self) -> str:
        """Echo of the resolved configuration in presentation units."""
        r, lp, nv, s = self.resonator, self.loop, self.nv, self.solver
        lines = [
            "[resonator]",
            f"  omega_r/2pi = {r.omega_r / TWO_PI / 1e9:.6g} GHz",
            f"  L_r = {r.L_r / 1e-9:.6g} nH",
            f"  kappa/2pi = {r.kappa / TWO_PI / 1e3:.6g} kHz",
            f"  zeta/2pi = {r.zeta / TWO_PI / 1e3:.6g} kHz",
            "[loop]",
            f"  r_loop = {lp.r_loop / 1e-6:.6g} um",
            f"  I_p = {lp.I_p / 1e-9:.6g} nA",
            f"  Delta/2pi = {lp.Delta / TWO_PI / 1e9:.6g} GHz",
            f"  n_turns = {lp.n_turns}",
            f"  Phi_x = {lp.Phi_x / CONSTANTS.flux_quantum:.6g} Phi0",
            f"  T1_pcq = {lp.T1_pcq / 1e-6:.6g} us",
            f"  T2_pcq = {lp.T2_pcq / 1e-6:.6g} us",
            "[nv]",
            f"  D/2pi = {nv.D / TWO_PI / 1e6:.6g} MHz",
            f"  slope = {nv.slope / 1e9:.6g} GHz/T",
            f"  B_bias = {nv.B_bias / 1e-4:.6g} G",
            f"  T1_nv = {nv.T1_nv / 1e-3:.6g} ms",
            f"  T2_nv = {nv.T2_nv / 1e-6:.6g} us",
            "[solver]",
            f"  n_fock = {'adaptive' if s.n_fock is None else s.n_fock}",
            f"  rate_convention = {s.rate_convention}",
            f"  nv_relaxation = {s.nv_relaxation}",
            f"  pcq_relaxation = {s.pcq_relaxation}",
            f"  nv_mode = {s.nv_mode}",
            f"  weights = {s.weights[0]:.6g} {s.weights[1]:.6g} {s.weights[2]:.6g}",
            f"  spectrum_mode = {s.spectrum_mode}",
            f"  grid_points = {s.grid_points}",
            f"  grid_span_kappa = {s.grid_span_kappa:.6g}",
            f"  d_rule = {s.d_rule}",
            "[scan]",
        ]
        for ax in self.axes:
            factor = UNIT_TABLE[ax.unit][1] if ax.unit else 1.0
            shown = ", ".join(f"{v / factor:.6g}" for v in ax.values[:6])
            if len(ax.values) > 6:
                shown += ", ..."
            lines.append(f"  axis {ax.name} = [{shown}] {ax.unit or '(1)'}")
        lines.append("[output]")
        lines.append(f"  products = {', '.join(self.products)}")
        return "\n".join(lines)


_SECTION_RE = re.compile(r"^\[([a-z0-9_]+)\]$")


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def parse_config_text(text: str) -> tuple[dict, list[tuple[str, str, int]]]:
    """First stage: the raw (section, key) -> (value text, line) tree.

    Returns (tree, axis specs); semantic validation happens in
    build_scan_config so CLI overrides can edit the tree in between.
    """
    tree: dict[tuple[str, str], tuple[str, int]] = {}
    axes: list[tuple[str, str, int]] = []
    section = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1)
            if section not in ("resonator", "loop", "nv", "solver",
                               "scan", "output"):
                raise ParseError(f"unknown section [{section}]", line_no)
            continue
        if section is None:
            raise ParseError("key outside of any [section]", line_no)
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", line_no)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not value:
            raise ParseError(f"empty value for key {key!r}", line_no)
        if section == "scan":
            if not key.startswith("axis "):
                raise ParseError("scan section entries look like "
                                 "'axis <name> = <spec>'", line_no)
            axes.append((key[5:].strip(), value, line_no))
            continue
        if (section, key) not in KEY_TABLE:
            raise ParseError(f"unknown key {key!r} in section [{section}]",
                             line_no)
        tree[(section, key)] = (value, line_no)
    return tree, axes


def _parse_axis_spec(name: str, spec: str, line_no: int | None) -> ScanAxis:
    if name not in AXIS_DIMENSIONS:
        raise ValidationError(f"unknown scan axis {name!r}")
    dim = AXIS_DIMENSIONS[name]
    parts = spec.split(None, 1)
    kind = parts[0]
    rest = parts[1] if len(parts) > 1 else ""
    if kind == "linspace":
        m = re.match(r"^(.*?)\s+to\s+(.*?)\s+points\s+(\d+)$", rest)
        if not m:
            raise ParseError(
                "linspace axis looks like 'linspace <lo> to <hi> points <n>'",
                line_no)
        lo = parse_quantity(m.group(1), dim, line_no)
        hi = parse_quantity(m.group(2), dim, line_no)
        n = int(m.group(3))
        if n < 1:
            raise ValidationError("axis needs at least one point")
        if n == 1:
            values = (lo,)
        else:
            step = (hi - lo) / (n - 1)
            values = tuple(lo + k * step for k in range(n))
        unit = _unit_of(m.group(2))
        return ScanAxis(name, values, unit)
    if kind == "list":
        tokens = [t.strip() for t in rest.split(",") if t.strip()]
        if not tokens:
            raise ParseError("empty axis list", line_no)
        # a unit token may trail the final number: "0.5, 5, 20 us"
        last_m = _NUMBER_UNIT.match(tokens[-1])
        if not last_m:
            raise ParseError(f"cannot parse axis value {tokens[-1]!r}", line_no)
        unit = last_m.group(2) or ""
        values = []
        for t in tokens[:-1]:
            values.append(parse_quantity(t + (" " + unit if unit else ""),
                                         dim, line_no))
        values.append(parse_quantity(tokens[-1], dim, line_no))
        return ScanAxis(name, tuple(values), unit)
    raise ParseError(f"axis spec must start with 'linspace' or 'list', "
                     f"got {kind!r}", line_no)


def _unit_of(text: str) -> str:
    m = _NUMBER_UNIT.match(text.strip())
    return (m.group(2) or "") if m else ""


def _get(tree: dict, section: str, key: str, default=None):
    entry = tree.get((section, key))
    if entry is None:
        return default, None
    return entry


def build_scan_config(tree: dict, axis_specs: list[tuple[str, str, int]],
                      source_text: str = "") -> ScanConfig:
    """Second stage: defaults, unit conversion, invariant validation."""

    def quantity(section, key, default=None):
        raw, line_no = _get(tree, section, key)
        if raw is None:
            return default
        return parse_quantity(raw, KEY_TABLE[(section, key)], line_no)

    # --- resonator; frequencies in config are cyclic, params are angular ---
    omega_r_hz = quantity("resonator", "omega_r", 6e9)
    kappa_hz = quantity("resonator", "kappa", 26e3)
    zeta_hz = quantity("resonator", "zeta")
    q_raw, _ = _get(tree, "resonator", "Q")
    try:
        resonator = ResonatorParams(
            omega_r=TWO_PI * omega_r_hz,
            L_r=quantity("resonator", "L_r", 2e-9),
            kappa=TWO_PI * kappa_hz,
            zeta=TWO_PI * (zeta_hz if zeta_hz is not None else 2.0 * kappa_hz),
            omega_drive=(TWO_PI * quantity("resonator", "omega_drive")
                         if ("resonator", "omega_drive") in tree else None),
            Q=float(q_raw) if q_raw is not None else None,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    # --- loop -------------------------------------------------------------
    n_turns_raw, _ = _get(tree, "loop", "n_turns")
    alpha_raw, _ = _get(tree, "loop", "alpha")
    t2_pcq = quantity("loop", "T2_pcq", 2e-6)
    t1_pcq = quantity("loop", "T1_pcq", 20e-6)
    if t2_pcq > 2.0 * t1_pcq:
        raise ValidationError(
            f"UnphysicalT2: T2_pcq={t2_pcq!r} exceeds 2*T1_pcq={2 * t1_pcq!r}")
    try:
        loop = LoopParams(
            r_loop=quantity("loop", "r_loop", 0.4e-6),
            I_p=quantity("loop", "I_p", 600e-9),
            Delta=TWO_PI * quantity("loop", "Delta", omega_r_hz),
            n_turns=int(n_turns_raw) if n_turns_raw is not None else 1,
            Phi_x=quantity("loop", "Phi_x"),
            T1_pcq=t1_pcq,
            T2_pcq=t2_pcq,
            alpha=float(alpha_raw) if alpha_raw is not None else None,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    # --- nv; B_bias defaults to the half-flux-quantum bias field -----------
    t2_nv = quantity("nv", "T2_nv", 600e-6)
    t1_nv = quantity("nv", "T1_nv", 4e-3)
    if t2_nv > 2.0 * t1_nv:
        raise ValidationError(
            f"UnphysicalT2: T2_nv={t2_nv!r} exceeds 2*T1_nv={2 * t1_nv!r}")
    try:
        nv = NVParams(
            D=TWO_PI * quantity("nv", "D", 2.87e9),
            slope=quantity("nv", "slope", 2.8e10),
            B_bias=quantity("nv", "B_bias", static_bias_field(loop)),
            T1_nv=t1_nv,
            T2_nv=t2_nv,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    # --- solver -------------------------------------------------------------
    def plain(section, key, default, cast=float):
        raw, line_no = _get(tree, section, key)
        if raw is None:
            return default
        try:
            return cast(raw)
        except ValueError:
            raise ParseError(f"cannot parse {key}={raw!r}", line_no) from None

    n_fock_raw, _ = _get(tree, "solver", "n_fock")
    if n_fock_raw is None or n_fock_raw == "adaptive":
        n_fock = None
    else:
        n_fock = int(n_fock_raw)
    weights_raw, w_line = _get(tree, "solver", "weights")
    if weights_raw is None:
        weights = (1 / 3, 1 / 3, 1 / 3)
    else:
        tokens = weights_raw.replace(",", " ").split()
        if len(tokens) != 3:
            raise ValidationError("weights needs exactly three entries")
        weights = tuple(_parse_fraction(t, w_line) for t in tokens)
    d_rule_raw, d_line = _get(tree, "solver", "d_rule")
    if d_rule_raw is None or d_rule_raw == "r_loop":
        d_rule = "r_loop"
    else:
        d_rule = f"fixed:{parse_quantity(d_rule_raw, 'length', d_line):.17g}"
    solver = SolverSettings(
        n_fock=n_fock,
        n_fock_start=plain("solver", "n_fock_start", 4, int),
        n_fock_max=plain("solver", "n_fock_max", 30, int),
        truncation_tol=plain("solver", "truncation_tol", 1e-3),
        rate_convention=plain("solver", "rate_convention", "cyclic", str),
        nv_relaxation=plain("solver", "nv_relaxation", "as_printed", str),
        pcq_relaxation=plain("solver", "pcq_relaxation", "lowering", str),
        nv_mode=plain("solver", "nv_mode", "sectors", str),
        weights=weights,
        spectrum_mode=plain("solver", "spectrum_mode", "incoherent", str),
        grid_points=plain("solver", "grid_points", 2001, int),
        grid_span_kappa=plain("solver", "grid_span_kappa", 20.0),
        dip_fraction=plain("solver", "dip_fraction", 0.1),
        steady_residual_tol=plain("solver", "steady_residual_tol", 1e-9),
        d_rule=d_rule,
    )

    axes = tuple(_parse_axis_spec(name, spec, line_no)
                 for name, spec, line_no in axis_specs)

    products_raw, _ = _get(tree, "output", "products")
    if products_raw is None:
        products = ("couplings",)
    else:
        products = tuple(p.strip() for p in products_raw.split(",") if p.strip())
    det_raw, _ = _get(tree, "output", "deterministic")
    deterministic = True if det_raw is None else det_raw.lower() in ("true", "1", "yes")

    canonical = _canonical_text(tree, axis_specs)
    config_hash = "sha256:" + hashlib.sha256(canonical.encode()).hexdigest()

    return ScanConfig(resonator=resonator, loop=loop, nv=nv, solver=solver,
                      axes=axes, products=products, deterministic=deterministic,
                      config_hash=config_hash)


def _canonical_text(tree: dict, axis_specs: list[tuple[str, str, int]]) -> str:
    entries = sorted((f"{s}.{k}", v) for (s, k), (v, _) in tree.items())
    lines = [f"{k} = {v}" for k, v in entries]
    lines += [f"scan.axis.{name} = {spec}" for name, spec, _ in
              sorted(axis_specs)]
    return "\n".join(lines)


def apply_overrides(tree: dict, axis_specs: list[tuple[str, str, int]],
                    overrides: list[str]) -> tuple[dict, list]:
    """Apply CLI 'key=value' overrides to the raw tree.

    A key naming a declared scan axis (e.g. tau=20us on a tau scan)
    collapses that axis to a single point; 'section.key' addresses a tree
    entry directly; a bare key resolves to its unique section, or becomes a
    new single-point axis for axis-only names like tau/epsilon.
    """
    tree = dict(tree)
    axis_specs = list(axis_specs)
    for ov in overrides:
        if "=" not in ov:
            raise ValidationError(f"override {ov!r} must look like key=value")
        key, _, value = ov.partition("=")
        key = key.strip()
        value = value.strip()
        axis_declared = any(n == key for n, _, _ in axis_specs)
        if key in AXIS_DIMENSIONS and axis_declared:
            axis_specs = [(n, s, ln) for n, s, ln in axis_specs if n != key]
            axis_specs.append((key, f"list {value}", 0))
            continue
        if "." in key:
            section, _, k = key.partition(".")
        else:
            matches = [(s, kk) for (s, kk) in KEY_TABLE if kk == key]
            if len(matches) == 1:
                section, k = matches[0]
            elif key in AXIS_DIMENSIONS:
                axis_specs.append((key, f"list {value}", 0))
                continue
            else:
                raise ValidationError(
                    f"override key {key!r} is ambiguous or unknown; "
                    f"use section.key")
        if (section, k) not in KEY_TABLE:
            raise ValidationError(f"unknown override target {section}.{k}")
        tree[(section, k)] = (value, 0)
    return tree, axis_specs


def load_config(path: str, overrides: list[str] | None = None) -> ScanConfig:
    """Parse, override, validate; errors carry line/field information."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {path!r}: {exc}") from None
    tree, axis_specs = parse_config_text(text)
    if overrides:
        tree, axis_specs = apply_overrides(tree, axis_specs, overrides)
    return build_scan_config(tree, axis_specs, text)


def load_config_text(text: str, overrides: list[str] | None = None) -> ScanConfig:
    tree, axis_specs = parse_config_text(text)
    if overrides:
        tree, axis_specs = apply_overrides(tree, axis_specs, overrides)
    return build_scan_config(tree, axis_specs, text)
