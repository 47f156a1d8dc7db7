"""Parameter sweeps over (chi, vx) for every solution method, written as CSV.

Grid points are evaluated independently (optionally in worker processes) and
written by a single writer in (chi, vx, method) order, so the output bytes do
not depend on the number of workers.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .lipkin import ModelError, ModelParams, ground_state, spin_moments
from .meanfield import NORMAL, mf_measures, mf_solve, pmf_measures, pmf_parity_at, pmfv_solve
from .measures import (
    MeasureSet,
    concurrence_closed,
    concurrence_oracle,
    k_state_measures,
    reduced_pair_state,
    state_measures,
)
from .rpa import CriticalRegionError, prpa_solve, rpa_concurrence_asymptotic

METHODS = ("exact", "mf", "pmf", "pmfv", "rpa", "prpa", "kstates")
EMITS = ("table", "plotscript")
COLUMNS = (
    "omega",
    "chi",
    "vx_over_eps",
    "method",
    "energy",
    "parity",
    "theta",
    "one_body_E_per_2omega",
    "updown_E_per_omega",
    "concurrence",
    "scaled_concurrence",
    "concurrence_kind",
    "negativity",
    "degenerate_flag",
    "k_level",
    "flag",
)
SPOT_CHECK_EVERY = 100


class ConfigError(ValueError):
    """A sweep configuration field is missing or invalid."""

    def __init__(self, name: str, message: str):
        super().__init__(f"{name}: {message}")
        self.field = name


class InvariantError(RuntimeError):
    """An exact-method row failed its spot check."""


@dataclass(frozen=True)
class SweepConfig:
    omega: int
    eps: float = 1.0
    chi_list: tuple[float, ...] = (0.0,)
    vx_min: float = 0.0
    vx_max: float = 3.0
    steps: int = 301
    methods: tuple[str, ...] = ("exact",)
    output_path: str = "-"
    emit: str = "table"

    def __post_init__(self):
        if isinstance(self.omega, bool) or int(self.omega) != self.omega or self.omega < 2:
            raise ConfigError("omega", f"must be an integer >= 2, got {self.omega!r}")
        object.__setattr__(self, "omega", int(self.omega))
        for name in ("eps", "vx_min", "vx_max"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ConfigError(name, "must be finite")
            object.__setattr__(self, name, val)
        if self.eps <= 0:
            raise ConfigError("eps", "must be > 0")
        if self.vx_min < 0 or self.vx_max < 0:
            raise ConfigError("vx_grid", "grid values must be >= 0")
        if self.vx_max < self.vx_min:
            raise ConfigError("vx_grid", "vx_max must be >= vx_min")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ConfigError("steps", f"must be an integer >= 1, got {self.steps!r}")
        object.__setattr__(self, "steps", int(self.steps))
        chis = tuple(float(c) for c in self.chi_list)
        if not chis:
            raise ConfigError("chi_list", "needs at least one value")
        for c in chis:
            if not -1.0 <= c <= 1.0:
                raise ConfigError("chi_list", f"value {c} outside [-1, 1]")
        object.__setattr__(self, "chi_list", chis)
        methods = tuple(self.methods)
        if not methods:
            raise ConfigError("methods", "needs at least one method")
        for m in methods:
            if m not in METHODS:
                raise ConfigError("methods", f"unknown method {m!r} (choose from {', '.join(METHODS)})")
        if len(set(methods)) != len(methods):
            raise ConfigError("methods", "duplicate method")
        object.__setattr__(self, "methods", methods)
        if self.emit not in EMITS:
            raise ConfigError("emit", f"must be one of {EMITS}, got {self.emit!r}")

    def vx_grid(self) -> np.ndarray:
        """vx/eps values; steps counts grid points, endpoints included."""
        if self.steps == 1:
            return np.array([self.vx_min])
        return np.linspace(self.vx_min, self.vx_max, self.steps)

    def expected_rows(self) -> int:
        grid_methods = [m for m in self.methods if m != "kstates"]
        extra = self.omega + 1 if "kstates" in self.methods else 0
        return len(self.chi_list) * self.steps * len(grid_methods) + extra


@dataclass
class ResultRow:
    omega: int
    chi: float | None
    vx_over_eps: float | None
    method: str
    energy: float | None = None
    parity: int | None = None
    theta: float | None = None
    one_body_E_per_2omega: float | None = None
    updown_E_per_omega: float | None = None
    concurrence: float | None = None
    scaled_concurrence: float | None = None
    concurrence_kind: str | None = None
    negativity: float | None = None
    degenerate_flag: bool | None = None
    k_level: int | None = None
    flag: str = ""

    def fill(self, m: MeasureSet) -> "ResultRow":
        self.one_body_E_per_2omega = m.one_body_E / (2 * self.omega)
        self.updown_E_per_omega = m.updown_E / self.omega
        self.set_concurrence(m.concurrence, m.concurrence_kind)
        self.negativity = m.negativity
        return self

    def set_concurrence(self, c: float, kind: str) -> None:
        self.concurrence = c
        self.scaled_concurrence = self.omega * c / 2
        self.concurrence_kind = kind

    def values(self) -> list[str]:
        return [format_cell(getattr(self, f.name)) for f in fields(self)]


def format_cell(value) -> str:
    """12 significant digits, no negative zero, empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise InvariantError(f"non-finite value {v} in output row")
        text = f"{v:.12g}"
        return "0" if text == "-0" else text
    return str(value)


def _spot_check(p: ModelParams, coeffs: np.ndarray, m: MeasureSet) -> None:
    pair = reduced_pair_state(spin_moments(coeffs, p.omega), p.omega)
    c_oracle = concurrence_oracle(pair)
    c_closed, _ = concurrence_closed(pair)
    problems = []
    if abs(pair.trace - 1) > 1e-10:
        problems.append(f"pair trace {pair.trace}")
    if abs(c_oracle - c_closed) > 1e-9:
        problems.append(f"concurrence {c_closed} vs oracle {c_oracle}")
    if not 0 <= m.one_body_E <= 2 * p.omega + 1e-9:
        problems.append(f"one-body entropy {m.one_body_E}")
    if not 0 <= m.concurrence <= 1 or m.negativity < 0:
        problems.append("concurrence or negativity out of range")
    if problems:
        raise InvariantError(f"omega={p.omega} chi={p.chi} vx={p.vx}: " + "; ".join(problems))


def _exact_row(p: ModelParams, base: dict, check: bool) -> ResultRow:
    gs = ground_state(p)
    m = state_measures(gs)
    if check:
        _spot_check(p, gs.coeffs, m)
    row = ResultRow(**base, method="exact", energy=gs.energy / p.eps, parity=gs.parity)
    row.degenerate_flag = gs.degenerate
    return row.fill(m)


def _mf_row(p: ModelParams, base: dict) -> ResultRow:
    sol = mf_solve(p)
    parity = 1 if sol.phase == NORMAL else 0
    row = ResultRow(**base, method="mf", energy=sol.energy / p.eps, parity=parity, theta=sol.theta)
    return row.fill(mf_measures(sol, p.chi, p.omega))


def _pmf_row(p: ModelParams, base: dict) -> ResultRow:
    theta = mf_solve(p).theta
    parity, energy = pmf_parity_at(p, theta)
    row = ResultRow(**base, method="pmf", energy=energy / p.eps, parity=parity, theta=theta)
    return row.fill(pmf_measures(theta, p.omega, parity))


def _pmfv_row(p: ModelParams, base: dict) -> ResultRow:
    theta, parity, energy = pmfv_solve(p)
    row = ResultRow(**base, method="pmfv", energy=energy / p.eps, parity=parity, theta=theta)
    return row.fill(pmf_measures(theta, p.omega, parity))


def _rpa_row(p: ModelParams, base: dict) -> ResultRow:
    row = ResultRow(**base, method="rpa", theta=mf_solve(p).theta)
    try:
        c, kind = rpa_concurrence_asymptotic(p)
    except CriticalRegionError:
        m = state_measures(ground_state(p))
        c, kind = m.concurrence, m.concurrence_kind
        row.flag = "critical_fallback"
    except ModelError:
        row.flag = "undefined"
        return row
    row.set_concurrence(c, kind)
    return row


def _prpa_row(p: ModelParams, base: dict) -> ResultRow:
    res = prpa_solve(p)
    row = ResultRow(**base, method="prpa", energy=res.energy / p.eps, parity=res.parity, theta=res.theta)
    return row.fill(res.measures)


_BUILDERS = {
    "mf": _mf_row,
    "pmf": _pmf_row,
    "pmfv": _pmfv_row,
    "rpa": _rpa_row,
    "prpa": _prpa_row,
}


def evaluate_point(task: tuple) -> list[ResultRow]:
    """All configured methods at one (chi, vx) point; pure and picklable."""
    omega, eps, chi, vx_over_eps, methods, check = task
    p = ModelParams(omega, eps, vx_over_eps * eps, chi)
    base = {"omega": omega, "chi": chi, "vx_over_eps": float(vx_over_eps)}
    rows = []
    for method in methods:
        if method == "exact":
            rows.append(_exact_row(p, base, check))
        elif method != "kstates":
            rows.append(_BUILDERS[method](p, base))
    return rows


def kstate_rows(omega: int) -> list[ResultRow]:
    rows = []
    for k in range(omega + 1):
        row = ResultRow(omega, None, None, "kstates", parity=1 if k % 2 == 0 else -1, k_level=k)
        rows.append(row.fill(k_state_measures(omega, k)))
    return rows


def _tasks(cfg: SweepConfig) -> list[tuple]:
    grid_methods = tuple(m for m in cfg.methods if m != "kstates")
    if not grid_methods:
        return []
    tasks = []
    for chi in cfg.chi_list:
        for vx in cfg.vx_grid():
            check = "exact" in grid_methods and len(tasks) % SPOT_CHECK_EVERY == 0
            tasks.append((cfg.omega, cfg.eps, chi, float(vx), grid_methods, check))
    return tasks


def run_sweep(cfg: SweepConfig, jobs: int | None = None):
    """Yield ResultRows in deterministic (chi, vx, method) order."""
    if "kstates" in cfg.methods:
        yield from kstate_rows(cfg.omega)
    tasks = _tasks(cfg)
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(tasks) < 2:
        for task in tasks:
            yield from evaluate_point(task)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for rows in pool.map(evaluate_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))):
            yield from rows


def write_table(rows, stream) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    count = 0
    for row in rows:
        writer.writerow(row.values())
        count += 1
    return count


def render_table(cfg: SweepConfig, jobs: int | None = None) -> str:
    buf = io.StringIO()
    write_table(run_sweep(cfg, jobs), buf)
    return buf.getvalue()


def plot_script(cfg: SweepConfig, data_path: str) -> str:
    """A gnuplot script drawing the scaled measures of every method."""
    col = {name: i + 1 for i, name in enumerate(COLUMNS)}
    lines = [
        "# generated alongside " + os.path.basename(data_path),
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 'vx/eps'",
    ]
    quantities = ("one_body_E_per_2omega", "updown_E_per_omega", "scaled_concurrence", "negativity")
    grid_methods = [m for m in cfg.methods if m != "kstates"]
    for q in quantities:
        lines.append(f"set ylabel '{q}'")
        plots = []
        for chi in cfg.chi_list:
            for m in grid_methods:
                sel = f'(strcol({col["method"]}) eq "{m}" && abs(${col["chi"]} - ({chi!r})) < 1e-12 ? ${col[q]} : 1/0)'
                plots.append(f"'{data_path}' using {col['vx_over_eps']}:{sel} with lines title '{m} chi={chi:g}'")
        if "kstates" in cfg.methods:
            sel = f'(strcol({col["method"]}) eq "kstates" ? ${col[q]} : 1/0)'
            plots.append(f"'{data_path}' using {col['k_level']}:{sel} with linespoints title 'K states'")
        lines.append("plot " + ", \\\n     ".join(plots))
        lines.append("pause -1")
    return "\n".join(lines) + "\n"


def write_outputs(cfg: SweepConfig, jobs: int | None = None) -> int:
    """Write the table (and plot script if requested); returns the row count."""
    if cfg.output_path == "-":
        return write_table(run_sweep(cfg, jobs), sys.stdout)
    path = Path(cfg.output_path)
    if path.parent and not path.parent.is_dir():
        raise ConfigError("output_path", f"directory {path.parent} does not exist")
    try:
        with open(path, "w", newline="") as fh:
            count = write_table(run_sweep(cfg, jobs), fh)
        if cfg.emit == "plotscript":
            path.with_suffix(".gp").write_text(plot_script(cfg, str(path)))
    except OSError as exc:
        raise ConfigError("output_path", f"cannot write {path}: {exc.strerror}") from exc
    return count


_FIGURES = {
    "fig1": dict(chi_list=(-0.5, 0.5, 1.0), vx_max=3.0, steps=300, methods=("exact",)),
    "fig3": dict(chi_list=(1.0,), vx_max=0.0, steps=1, methods=("kstates",)),
    "fig4": dict(chi_list=(0.5, 1.0), vx_max=3.0, steps=301, methods=("exact", "mf", "pmf")),
    "fig5": dict(chi_list=(0.0, 0.5), vx_max=3.0, steps=151, methods=("exact", "pmfv")),
    "fig6": dict(chi_list=(0.0, 0.5), vx_max=3.0, steps=151, methods=("exact", "rpa", "prpa")),
}


def figure_preset(name: str, output_path: str = "-") -> SweepConfig:
    if name not in _FIGURES:
        raise ConfigError("figure", f"unknown figure {name!r} (choose from {', '.join(_FIGURES)})")
    return SweepConfig(omega=50, output_path=output_path, **_FIGURES[name])


def figure_names() -> tuple[str, ...]:
    return tuple(_FIGURES)


# --- configuration files -------------------------------------------------

_KEYS = {
    "omega": int,
    "eps": float,
    "chi": str,
    "vx_min": float,
    "vx_max": float,
    "steps": int,
    "methods": str,
    "out": str,
    "emit": str,
    "jobs": int,
}


def parse_list(text: str, cast, name: str) -> tuple:
    try:
        return tuple(cast(x.strip()) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(name, f"cannot parse {text!r}") from exc


def read_config_file(path: str) -> dict:
    """Read an INI-style [sweep] section into a dict of raw overrides."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    except configparser.Error as exc:
        raise ConfigError("config", str(exc)) from exc
    if not parser.has_section("sweep"):
        raise ConfigError("config", f"{path} has no [sweep] section")
    out = {}
    for key, raw in parser.items("sweep"):
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(key, "unknown configuration key")
        cast = _KEYS[key]
        try:
            out[key] = cast(raw)
        except ValueError as exc:
            raise ConfigError(key, f"cannot parse {raw!r}") from exc
    return out


def build_config(values: dict) -> tuple[SweepConfig, int | None]:
    """SweepConfig from merged file/flag values; returns (config, jobs)."""
    if "omega" not in values:
        raise ConfigError("omega", "is required")
    kwargs = {"omega": values["omega"]}
    for key in ("eps", "vx_min", "vx_max", "steps", "emit"):
        if key in values:
            kwargs[key] = values[key]
    if "chi" in values:
        kwargs["chi_list"] = parse_list(values["chi"], float, "chi_list")
    if "methods" in values:
        kwargs["methods"] = parse_list(values["methods"], str, "methods")
    if "out" in values:
        kwargs["output_path"] = values["out"]
    jobs = values.get("jobs")
    if jobs is not None and jobs < 1:
        raise ConfigError("jobs", "must be >= 1")
    return SweepConfig(**kwargs), jobs


__all__ = [
    "COLUMNS",
    "ConfigError",
    "METHODS",
    "ResultRow",
    "SweepConfig",
    "build_config",
    "evaluate_point",
    "figure_preset",
    "read_config_file",
    "render_table",
    "run_sweep",
    "write_outputs",
]
