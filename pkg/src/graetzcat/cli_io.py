"""Config ingestion, CSV/report emission and the command-line driver.

The config format is line-oriented sections of key = value pairs, designed
to be hand-editable and diff-friendly:

    [grid]
    nr = 32
    nz = 64
    dt = 0.02
    t_end = 90

    [species.CO]
    beta_f = 1.0
    gamma_s = 1.0
    theta_s = 1.0
    delta = -1
    inlet = const:0.02
    wall_init = const:0.02

Profile values are either ``const:<number>`` or ``file:<path>`` where the
file holds one decimal per line, one line per grid node.  Unknown keys are
errors (typo protection); defaults exist only for the [coupler] section.

Exit codes of the CLI: 0 all checks passed, 2 config error, 3 coupling did
not converge, 4 a quality check failed.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .coupler import CouplerSettings, NonConvergedError, RunReport, run_simulation
from .fluid_march import march_fluid, wall_flux_gradient, wall_flux_integral
from .kinetics import (
    BUILTIN_MODELS,
    KineticsModel,
    co_oxidation,
    estimate_lipschitz,
    linear_consumption,
    verify_hypotheses,
    zero_model,
)
from .model import (
    FluidField,
    Grid,
    InitialData,
    ModelConfig,
    SpeciesParams,
    WallField,
    contraction_margin,
    validate_config,
)

log = logging.getLogger("graetzcat")

GRID_KEYS = ("nr", "nz", "dt", "t_end")
COUPLER_KEYS = ("tol", "max_iter", "flux_form", "relaxation")
SPECIES_KEYS = ("beta_f", "gamma_s", "theta_s", "delta", "inlet", "wall_init")
MODEL_CONSTANTS = {
    "zero": (),
    "linear_consumption": ("rate",),
    "co_oxidation": ("prefactor", "activation_temp", "heat_release"),
}


@dataclass(frozen=True)
class ConfigIssue:
    code: str  # MISSING_KEY | UNKNOWN_KEY | BAD_NUMBER | FILE_NOT_FOUND | LENGTH_MISMATCH
    section: str
    key: str
    line: int
    message: str

    def __str__(self) -> str:
        where = f"[{self.section}]" + (f".{self.key}" if self.key else "")
        return f"line {self.line}: {self.code} {where}: {self.message}"


class ConfigError(Exception):
    def __init__(self, issues: Sequence[ConfigIssue]):
        self.issues = tuple(issues)
        super().__init__("\n".join(str(i) for i in self.issues))


@dataclass
class _Entry:
    value: str
    line: int


@dataclass
class _Section:
    name: str
    line: int
    entries: dict[str, _Entry] = field(default_factory=dict)


@dataclass
class ConfigDocument:
    """Parsed but unresolved configuration: raw values with line numbers."""

    grid: _Section
    coupler: Optional[_Section]
    kinetics: _Section
    species: list[_Section]


def _known_keys(section: str, species_names: Sequence[str], model: str) -> tuple[str, ...]:
    if section == "grid":
        return GRID_KEYS
    if section == "coupler":
        return COUPLER_KEYS
    if section == "kinetics":
        base = ("model",) + MODEL_CONSTANTS.get(model, ())
        return base + tuple(f"box.{n}" for n in species_names)
    return SPECIES_KEYS


def parse_document(text: str) -> ConfigDocument:
    """Split the text into validated sections; all issues are collected."""
    issues: list[ConfigIssue] = []
    sections: dict[str, _Section] = {}
    order: list[_Section] = []
    current: Optional[_Section] = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            ok = name in ("grid", "coupler", "kinetics") or (
                name.startswith("species.") and len(name) > len("species.")
            )
            if not ok:
                issues.append(
                    ConfigIssue("UNKNOWN_KEY", name, "", lineno, "unknown section")
                )
                current = None
                continue
            if name in sections:
                issues.append(
                    ConfigIssue("UNKNOWN_KEY", name, "", lineno, "duplicate section")
                )
                current = sections[name]
                continue
            current = _Section(name=name, line=lineno)
            sections[name] = current
            order.append(current)
            continue
        if "=" not in line:
            sec = current.name if current else ""
            issues.append(
                ConfigIssue(
                    "UNKNOWN_KEY", sec, line, lineno, "expected key = value"
                )
            )
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if current is None:
            issues.append(
                ConfigIssue("UNKNOWN_KEY", "", key, lineno, "key outside any section")
            )
            continue
        if key in current.entries:
            issues.append(
                ConfigIssue("UNKNOWN_KEY", current.name, key, lineno, "duplicate key")
            )
            continue
        current.entries[key] = _Entry(value, lineno)

    species = [s for s in order if s.name.startswith("species.")]
    species_names = [s.name.split(".", 1)[1] for s in species]

    for required in ("grid", "kinetics"):
        if required not in sections:
            issues.append(
                ConfigIssue("MISSING_KEY", required, "", 0, "section is required")
            )
    if not species:
        issues.append(
            ConfigIssue("MISSING_KEY", "species.<name>", "", 0, "no species declared")
        )

    model = ""
    if "kinetics" in sections:
        ent = sections["kinetics"].entries.get("model")
        if ent is None:
            issues.append(
                ConfigIssue(
                    "MISSING_KEY",
                    "kinetics",
                    "model",
                    sections["kinetics"].line,
                    "kinetics model name is required",
                )
            )
        else:
            model = ent.value
            if model not in BUILTIN_MODELS:
                issues.append(
                    ConfigIssue(
                        "UNKNOWN_KEY",
                        "kinetics",
                        "model",
                        ent.line,
                        f"unknown model {model!r}; known: {', '.join(BUILTIN_MODELS)}",
                    )
                )

    # unknown / missing keys per section
    for sec in order:
        kind = "species" if sec.name.startswith("species.") else sec.name
        known = _known_keys(kind if kind != "species" else "species", species_names, model)
        for key, ent in sec.entries.items():
            if key not in known:
                issues.append(
                    ConfigIssue("UNKNOWN_KEY", sec.name, key, ent.line, "unknown key")
                )
        required: tuple[str, ...] = ()
        if kind == "grid":
            required = GRID_KEYS
        elif kind == "kinetics":
            required = ("model",) + MODEL_CONSTANTS.get(model, ())
        elif kind == "species":
            required = SPECIES_KEYS
        for key in required:
            if key not in sec.entries:
                issues.append(
                    ConfigIssue("MISSING_KEY", sec.name, key, sec.line, "key is required")
                )

    if issues:
        raise ConfigError(issues)
    return ConfigDocument(
        grid=sections["grid"],
        coupler=sections.get("coupler"),
        kinetics=sections["kinetics"],
        species=species,
    )


def _number(sec: _Section, key: str, issues: list[ConfigIssue], kind=float):
    ent = sec.entries[key]
    try:
        return kind(ent.value)
    except ValueError:
        issues.append(
            ConfigIssue(
                "BAD_NUMBER", sec.name, key, ent.line, f"cannot parse {ent.value!r}"
            )
        )
        return None


def _profile(
    sec: _Section,
    key: str,
    n_nodes: int,
    base_dir: Path,
    issues: list[ConfigIssue],
) -> Optional[np.ndarray]:
    ent = sec.entries[key]
    spec = ent.value
    if spec.startswith("const:"):
        try:
            return np.full(n_nodes, float(spec[len("const:"):]))
        except ValueError:
            issues.append(
                ConfigIssue("BAD_NUMBER", sec.name, key, ent.line, f"bad constant {spec!r}")
            )
            return None
    if spec.startswith("file:"):
        path = base_dir / spec[len("file:"):]
        if not path.is_file():
            issues.append(
                ConfigIssue("FILE_NOT_FOUND", sec.name, key, ent.line, str(path))
            )
            return None
        values = []
        for ln in path.read_text().splitlines():
            ln = ln.strip()
            if not ln:
                continue
            try:
                values.append(float(ln))
            except ValueError:
                issues.append(
                    ConfigIssue(
                        "BAD_NUMBER", sec.name, key, ent.line, f"bad value {ln!r} in {path}"
                    )
                )
                return None
        if len(values) != n_nodes:
            issues.append(
                ConfigIssue(
                    "LENGTH_MISMATCH",
                    sec.name,
                    key,
                    ent.line,
                    f"{path} has {len(values)} values, grid needs {n_nodes}",
                )
            )
            return None
        return np.array(values)
    issues.append(
        ConfigIssue(
            "BAD_NUMBER", sec.name, key, ent.line, f"expected const:<x> or file:<path>, got {spec!r}"
        )
    )
    return None


def resolve_document(
    doc: ConfigDocument, base_dir: Path
) -> tuple[ModelConfig, CouplerSettings]:
    issues: list[ConfigIssue] = []

    nr = _number(doc.grid, "nr", issues, int)
    nz = _number(doc.grid, "nz", issues, int)
    dt = _number(doc.grid, "dt", issues)
    t_end = _number(doc.grid, "t_end", issues)
    if issues:
        raise ConfigError(issues)
    grid = Grid(nr=nr, nz=nz, dt=dt, t_end=t_end)

    settings_kwargs = {}
    if doc.coupler is not None:
        c = doc.coupler
        if "tol" in c.entries:
            settings_kwargs["tol"] = _number(c, "tol", issues)
        if "max_iter" in c.entries:
            settings_kwargs["max_iter"] = _number(c, "max_iter", issues, int)
        if "relaxation" in c.entries:
            settings_kwargs["relaxation"] = _number(c, "relaxation", issues)
        if "flux_form" in c.entries:
            v = c.entries["flux_form"].value
            if v not in ("gradient", "integral"):
                issues.append(
                    ConfigIssue(
                        "UNKNOWN_KEY",
                        "coupler",
                        "flux_form",
                        c.entries["flux_form"].line,
                        f"expected gradient or integral, got {v!r}",
                    )
                )
            else:
                settings_kwargs["flux_form"] = v

    species: list[SpeciesParams] = []
    inlets: list[np.ndarray] = []
    walls: list[np.ndarray] = []
    for sec in doc.species:
        name = sec.name.split(".", 1)[1]
        beta = _number(sec, "beta_f", issues)
        gamma = _number(sec, "gamma_s", issues)
        theta = _number(sec, "theta_s", issues)
        delta = _number(sec, "delta", issues, int)
        inlet = _profile(sec, "inlet", grid.nr + 1, base_dir, issues)
        wall = _profile(sec, "wall_init", grid.nz + 1, base_dir, issues)
        if None in (beta, gamma, theta, delta) or inlet is None or wall is None:
            continue
        species.append(
            SpeciesParams(name=name, beta_f=beta, gamma_s=gamma, theta_s=theta, delta=delta)
        )
        inlets.append(inlet)
        walls.append(wall)
    if issues:
        raise ConfigError(issues)

    initial = InitialData(inlet=np.stack(inlets), wall_init=np.stack(walls))
    kin = _build_kinetics(doc.kinetics, species, initial, issues)
    if issues:
        raise ConfigError(issues)

    cfg = ModelConfig(
        species=tuple(species), grid=grid, initial=initial, kinetics=kin
    )
    return cfg, CouplerSettings(**settings_kwargs)


def _build_kinetics(
    sec: _Section,
    species: list[SpeciesParams],
    initial: InitialData,
    issues: list[ConfigIssue],
) -> Optional[KineticsModel]:
    model = sec.entries["model"].value
    ns = len(species)

    # evaluation box: explicit per-species entries win, otherwise derived
    # from the initial data (twice its sup, floor 1.0)
    hi = np.maximum(
        1.0,
        2.0 * np.maximum(initial.inlet.max(axis=1), initial.wall_init.max(axis=1)),
    )
    for i, s in enumerate(species):
        key = f"box.{s.name}"
        if key in sec.entries:
            ent = sec.entries[key]
            parts = [p.strip() for p in ent.value.split(",")]
            try:
                lo_v, hi_v = (float(parts[0]), float(parts[1]))
            except (ValueError, IndexError):
                issues.append(
                    ConfigIssue(
                        "BAD_NUMBER", sec.name, key, ent.line, f"expected lo,hi got {ent.value!r}"
                    )
                )
                continue
            if lo_v != 0.0:
                issues.append(
                    ConfigIssue(
                        "BAD_NUMBER", sec.name, key, ent.line, "box lower bound must be 0"
                    )
                )
                continue
            hi[i] = hi_v

    if model == "zero":
        return zero_model(ns, box_hi=hi)
    if model == "linear_consumption":
        k = _number(sec, "rate", issues)
        if k is None:
            return None
        return linear_consumption(ns, k=k, box_hi=hi)
    if model == "co_oxidation":
        if ns != 4:
            issues.append(
                ConfigIssue(
                    "UNKNOWN_KEY",
                    sec.name,
                    "model",
                    sec.entries["model"].line,
                    f"co_oxidation binds to exactly 4 species (CO, O2, CO2, T); got {ns}",
                )
            )
            return None
        a = _number(sec, "prefactor", issues)
        e = _number(sec, "activation_temp", issues)
        c = _number(sec, "heat_release", issues)
        if None in (a, e, c):
            return None
        return co_oxidation(a, e, c, box_hi=hi)
    return None


def parse_config(text: str, base_dir: Path | str = ".") -> tuple[ModelConfig, CouplerSettings]:
    """Full pipeline: text -> (ModelConfig, CouplerSettings) or ConfigError."""
    doc = parse_document(text)
    return resolve_document(doc, Path(base_dir))


def serialize_config(doc: ConfigDocument) -> str:
    """Canonical rendering: fixed section and key order, coupler defaults filled."""
    out: list[str] = []

    def emit(name: str, keys: Sequence[str], entries: dict[str, _Entry], defaults=None):
        out.append(f"[{name}]")
        for k in keys:
            if k in entries:
                out.append(f"{k} = {entries[k].value}")
            elif defaults and k in defaults:
                out.append(f"{k} = {defaults[k]}")
        out.append("")

    emit("grid", GRID_KEYS, doc.grid.entries)
    d = CouplerSettings()
    defaults = {
        "tol": repr(d.tol),
        "max_iter": str(d.max_iter),
        "flux_form": d.flux_form,
        "relaxation": repr(d.relaxation),
    }
    emit("coupler", COUPLER_KEYS, doc.coupler.entries if doc.coupler else {}, defaults)
    model = doc.kinetics.entries["model"].value
    kin_keys = ("model",) + MODEL_CONSTANTS.get(model, ()) + tuple(
        k for k in sorted(doc.kinetics.entries) if k.startswith("box.")
    )
    emit("kinetics", kin_keys, doc.kinetics.entries)
    for sec in doc.species:
        emit(sec.name, SPECIES_KEYS, sec.entries)
    return "\n".join(out)


# ---------------------------------------------------------------------------
# emission


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_snapshot_csv(
    field: FluidField, grid: Grid, species_names: Sequence[str], path: Path | str
) -> None:
    """Gnuplot-friendly dump: header r,z,<species...>, rows in z-major order."""
    path = Path(path)
    r, z = grid.r, grid.z
    lines = ["r,z," + ",".join(species_names)]
    v = field.values
    for k in range(grid.nz + 1):
        for j in range(grid.nr + 1):
            cells = [_fmt(r[j]), _fmt(z[k])] + [_fmt(v[i, j, k]) for i in range(len(species_names))]
            lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def write_probe_csv(
    times: Sequence[float],
    values: Sequence[Sequence[float]],
    species_names: Sequence[str],
    path: Path | str,
) -> None:
    """Outlet series: header t,<species...>, one row per sampled time."""
    path = Path(path)
    lines = ["t," + ",".join(species_names)]
    for n, t in enumerate(times):
        lines.append(",".join([_fmt(t)] + [_fmt(values[i][n]) for i in range(len(species_names))]))
    path.write_text("\n".join(lines) + "\n")


def write_report(report: RunReport, path: Path | str) -> None:
    """Human-readable summary with a machine-parsable KEY=VALUE footer."""
    path = Path(path)
    d = report.diagnostics
    h = report.hypothesis_report
    lines = [
        "simulation report",
        "=================",
        "",
        f"species: {', '.join(report.species)}",
        f"steps taken: {len(report.iterations)}",
        f"fixed-point iterations: max {max(report.iterations) if report.iterations else 0}, "
        f"total {sum(report.iterations)}",
        "",
        "contraction diagnostics",
        f"  mu = {d.mu!r}  (threshold 2/sqrt(e) = {d.threshold:.9f})",
        f"  margin mu*sqrt(e)/2 = {d.margin!r}",
        f"  optimal proof weight alpha = {d.alpha_opt!r}",
        f"  satisfied: {str(d.satisfied).lower()}",
        "",
        "rate-law hypotheses (sampled)",
        f"  H1 nonnegativity: {'PASS' if h.h1_pass else 'FAIL'}",
        f"  H2 absent-reactant cutoff: {'PASS' if h.h2_pass else 'FAIL'}",
        f"  H3 weighted monotonicity: {'PASS' if h.h3_pass else 'FAIL'}",
        f"  samples used: {h.samples_used}",
        f"  lipschitz constants: {', '.join(repr(v) for v in report.lipschitz)}",
        f"  lambda = {report.lam!r}",
        "",
        "quality checks",
        f"  nonnegativity: {'PASS' if report.nonneg.passed else 'FAIL'} "
        f"({report.nonneg.violation_count} violations)",
    ]
    for c in report.envelope_checks:
        lines.append(
            f"  envelope {c.species} {c.item}: {'PASS' if c.passed else 'FAIL'}"
            + ("" if c.passed else f" (worst {c.worst!r} at t = {c.t_worst!r})")
        )
    lines += [
        "  energy envelope slopes: "
        + ", ".join(repr(float(a)) for a in report.energy.slope),
        "",
        f"evolution settled (REACTION_ENDED): {report.reaction_ended!r}",
        "",
        "outlet probe (z = 1), final values",
    ]
    for i, name in enumerate(report.species):
        lines.append(f"  {name}: {report.probe_values[i][-1]!r}")
    lines += ["", "---"]

    footer = [
        f"MU={report.diagnostics.mu!r}",
        f"THRESHOLD={report.diagnostics.threshold:.9f}",
        f"SATISFIED={str(report.diagnostics.satisfied).lower()}",
        f"MARGIN={report.diagnostics.margin!r}",
        f"LAMBDA={report.lam!r}",
        f"H1={'PASS' if h.h1_pass else 'FAIL'}",
        f"H2={'PASS' if h.h2_pass else 'FAIL'}",
        f"H3={'PASS' if h.h3_pass else 'FAIL'}",
        f"NONNEG={'PASS' if report.nonneg.passed else 'FAIL'}",
    ]
    for c in report.envelope_checks:
        footer.append(f"ENVELOPE_{c.species}_{c.item.upper()}={'PASS' if c.passed else 'FAIL'}")
    footer.append(f"REACTION_ENDED={report.reaction_ended!r}")
    footer.append(f"MAX_ITERATIONS={max(report.iterations) if report.iterations else 0}")
    for i, name in enumerate(report.species):
        footer.append(f"OUTLET_{name}={report.probe_values[i][-1]!r}")

    path.write_text("\n".join(lines + footer) + "\n")


# ---------------------------------------------------------------------------
# refinement study


def _graetz_setup(nr: int, nz: int) -> tuple[Grid, InitialData, WallField, tuple[SpeciesParams, ...]]:
    grid = Grid(nr=nr, nz=nz, dt=1.0, t_end=1.0)
    params = (SpeciesParams(name="c", beta_f=1.0, gamma_s=1.0, theta_s=1.0, delta=-1),)
    init = InitialData(
        inlet=np.ones((1, nr + 1)), wall_init=np.zeros((1, nz + 1))
    )
    wall = WallField(values=np.zeros((1, nz + 1)), time_tag=0.0)
    return grid, init, wall, params


def graetz_centerline(nr: int, nz: int) -> float:
    """Outlet centerline value of the unit-inlet, cold-wall marching test."""
    grid, init, wall, params = _graetz_setup(nr, nz)
    field = march_fluid(wall, init, params, grid)
    return float(field.values[0, 0, -1])


FLUX_WINDOW_Z = 0.25


def flux_identity_gap(nr: int, nz: int, z_min: float = 0.0) -> float:
    """Discrete L2(z) distance between the two flux extractions.

    The norm runs over the interior nodes with z >= z_min.  The end nodes
    sit on the closure of the open surface segment, and the inlet data kink
    at z = 0 makes the true wall gradient singular there: restricting to a
    fixed window away from that corner measures the schemes rather than the
    data.
    """
    grid, init, wall, params = _graetz_setup(nr, nz)
    field = march_fluid(wall, init, params, grid)
    g = wall_flux_gradient(field, grid, params)[0]
    q = wall_flux_integral(field, grid, params)[0]
    k0 = max(1, int(math.ceil(z_min * nz)))
    diff = (g - q)[k0:-1]
    return float(np.sqrt(grid.dz * np.sum(diff * diff)))


def convergence_study(levels: int, nr0: int = 32, nz0: int = 64) -> dict:
    """Richardson orders for the marching scheme across doubling grids."""
    if levels < 3:
        raise ValueError("need at least 3 levels for an observed order")
    nz_fine = nz0 * 2 ** (levels + 1)
    centerline = [graetz_centerline(nr0 * 2**i, nz_fine) for i in range(levels)]
    diffs = [abs(a - b) for a, b in zip(centerline, centerline[1:])]
    orders_r = [math.log2(a / b) for a, b in zip(diffs, diffs[1:]) if b > 0]

    gaps = [flux_identity_gap(nr0 * 2**i, nz0 * 2**i) for i in range(levels)]
    orders_flux = [math.log2(a / b) for a, b in zip(gaps, gaps[1:]) if b > 0]
    win = [
        flux_identity_gap(nr0 * 2**i, nz0 * 2**i, z_min=FLUX_WINDOW_Z)
        for i in range(levels)
    ]
    orders_win = [math.log2(a / b) for a, b in zip(win, win[1:]) if b > 0]

    return {
        "centerline": centerline,
        "richardson_orders": orders_r,
        "flux_gaps": gaps,
        "flux_orders": orders_flux,
        "flux_gaps_windowed": win,
        "flux_orders_windowed": orders_win,
    }


# ---------------------------------------------------------------------------
# CLI


def _setup_logging() -> None:
    level = {"debug": logging.DEBUG, "info": logging.INFO}.get(
        os.environ.get("GC_LOG", "").lower(), logging.WARNING
    )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _load(config_path: str) -> tuple[ModelConfig, CouplerSettings]:
    text = Path(config_path).read_text()
    return parse_config(text, base_dir=Path(config_path).parent)


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    ap = argparse.ArgumentParser(prog="graetzcat")
    sub = ap.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario and emit outputs")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--probe-every", type=int, default=1)
    p_sim.add_argument("--seed", type=int, default=0)

    p_chk = sub.add_parser("check", help="validate a config and its rate law")
    p_chk.add_argument("--config", required=True)
    p_chk.add_argument("--seed", type=int, default=0)

    p_cnv = sub.add_parser("convergence", help="grid refinement study")
    p_cnv.add_argument("--levels", type=int, default=3)

    args = ap.parse_args(argv)

    if args.command == "convergence":
        study = convergence_study(args.levels)
        for i, v in enumerate(study["centerline"]):
            print(f"LEVEL_{i}_CENTERLINE={v!r}")
        for i, v in enumerate(study["richardson_orders"]):
            print(f"ORDER_CENTERLINE_{i}={v:.3f}")
        for i, v in enumerate(study["flux_gaps"]):
            print(f"LEVEL_{i}_FLUX_GAP={v!r}")
        for i, v in enumerate(study["flux_orders"]):
            print(f"ORDER_FLUX_IDENTITY_{i}={v:.3f}")
        for i, v in enumerate(study["flux_gaps_windowed"]):
            print(f"LEVEL_{i}_FLUX_GAP_WINDOWED={v!r}")
        for i, v in enumerate(study["flux_orders_windowed"]):
            print(f"ORDER_FLUX_IDENTITY_WINDOWED_{i}={v:.3f}")
        return 0

    try:
        cfg, settings = _load(args.config)
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        for issue in exc.issues:
            print(f"config error: {issue}", file=sys.stderr)
        return 2

    report = validate_config(cfg)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not report.ok:
        for e in report.errors:
            print(f"config error: {e}", file=sys.stderr)
        return 2

    if args.command == "check":
        diag = contraction_margin(cfg.species)
        print(f"MU={diag.mu!r}")
        print(f"THRESHOLD={diag.threshold:.9f}")
        print(f"SATISFIED={str(diag.satisfied).lower()}")
        hypo = verify_hypotheses(cfg.kinetics, cfg.species, seed=args.seed)
        k_vec, lam = estimate_lipschitz(cfg.kinetics, seed=args.seed)
        print(f"H1={'PASS' if hypo.h1_pass else 'FAIL'}")
        print(f"H2={'PASS' if hypo.h2_pass else 'FAIL'}")
        print(f"H3={'PASS' if hypo.h3_pass else 'FAIL'}")
        print(f"LAMBDA={lam!r}")
        for worst, tag in (
            (hypo.worst_h1, "H1"),
            (hypo.worst_h2, "H2"),
            (hypo.worst_h3, "H3"),
        ):
            if worst is not None:
                print(
                    f"{tag}_WORST species={worst.species} magnitude={worst.magnitude!r} "
                    f"x={tuple(round(v, 6) for v in worst.x)}"
                )
        return 0 if hypo.all_pass else 4

    # simulate
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        run_report, trajectory = run_simulation(
            cfg, settings, seed=args.seed, probe_every=args.probe_every
        )
    except NonConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3

    final_wall = WallField(values=trajectory[-1].wall, time_tag=trajectory[-1].time)
    final_fluid = march_fluid(final_wall, cfg.initial, cfg.species, cfg.grid)
    write_snapshot_csv(final_fluid, cfg.grid, cfg.species_names, out_dir / "snapshot_final.csv")
    write_probe_csv(
        run_report.probe_times, run_report.probe_values, cfg.species_names, out_dir / "probe.csv"
    )
    write_report(run_report, out_dir / "report.txt")

    return 0 if run_report.checks_pass else 4


if __name__ == "__main__":
    sys.exit(main())
