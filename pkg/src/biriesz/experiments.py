"""Named, configuration-driven experiments with CSV, manifest and plot-data output.

Every experiment takes a grid block and a parameter block, both with
complete defaults, and returns tables, figures and numeric checks. Running
an experiment twice with the same configuration produces byte-identical
CSV and ``.dat`` files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .analysis import (
    DEFAULT_SEED,
    SAMPLE_CAP,
    NormEstimate,
    a2_rate_fit,
    build_net,
    dyadic_rate_fit,
    log2_fit,
    opnorm_lower,
)
from .errors import BiRieszError, DomainError, ResourceCapError
from .fieldgrid import (
    PHYSICAL,
    GridFunction,
    GridSpec,
    dft,
    encode_grid,
    lp_norm,
    project_to_band,
    random_band_limited,
)
from .indices import (
    ExponentTriple,
    a_n,
    alpha,
    b_n,
    best_thresholds,
    consistency_sweep,
    critical_delta,
    delta_region,
    region_classify,
    threshold_rows,
    CSV_HEADER,
)
from .operators import (
    BilinearOp,
    annulus_average,
    apply,
    bochner_riesz_op,
    halfspace_witness,
    restriction_extension,
    torus_partial_sum,
)
from .oracles import bilinear_brute_force
from .specfun import KernelProfile, br_kernel
from .symbols import (
    Symbol,
    Tensorization,
    br_profile,
    compact_spectrum_profile,
    fit_decay_exponent,
    lift_biradial,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

SCHEMA_VERSION = "1"


class ConfigError(BiRieszError, ValueError):
    """Malformed or inconsistent experiment configuration."""


# --- configuration ------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Experiment name, grid and parameter blocks, master seed and output directory."""

    name: str
    grid: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    out_dir: Path | None = None
    force: bool = False

    def to_json(self):
        return {
            "name": self.name,
            "grid": _jsonable(self.grid),
            "params": _jsonable(self.params),
            "seed": self.seed,
            "force": self.force,
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def load_config_file(path) -> dict:
    """Read a TOML (``.toml``) or JSON (any other extension) configuration."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        else:
            data = json.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a table/object at top level")
    return data


def parse_override(text: str):
    """Split ``key=value``; the value stays a string and is coerced by the consumer."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, value = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"override {text!r} has an empty key")
    return key, value.strip()


def make_config(name, data: dict | None = None, overrides=(), out_dir=None, force=False) -> ExperimentConfig:
    """Merge defaults, a config mapping and ``key=value`` overrides.

    Keys may be written as ``grid.N`` / ``params.delta`` or bare; bare keys
    go to the grid block when the experiment declares them there.
    """
    if name not in REGISTRY:
        raise ConfigError(f"unknown experiment {name!r}; try --list")
    exp = REGISTRY[name]
    data = dict(data or {})
    if "name" in data and data["name"] != name:
        raise ConfigError(f"config is for experiment {data['name']!r}, not {name!r}")
    grid = dict(exp.grid_defaults)
    params = dict(exp.param_defaults)
    seed = DEFAULT_SEED
    if out_dir is None and data.get("out_dir"):
        out_dir = data["out_dir"]

    def assign(key, value):
        nonlocal seed
        if key == "seed":
            seed = _as_int(value, "seed")
            return
        block, _, short = key.partition(".")
        if short:
            target = {"grid": grid, "params": params}.get(block)
            if target is None:
                raise ConfigError(f"unknown config block {block!r}")
            if short not in target:
                raise ConfigError(f"unknown {block} key {short!r} for {name}")
            target[short] = value
            return
        if key in grid:
            grid[key] = value
        elif key in params:
            params[key] = value
        else:
            raise ConfigError(f"unknown key {key!r} for {name}")

    for block in ("grid", "params"):
        section = data.get(block, {})
        if not isinstance(section, dict):
            raise ConfigError(f"{block} must be a table")
        for key, value in section.items():
            assign(f"{block}.{key}", value)
    for key, value in data.items():
        if key in ("grid", "params", "name", "out_dir"):
            continue
        assign(key, value)
    for text in overrides:
        assign(*parse_override(text))
    return ExperimentConfig(name, grid, params, seed, Path(out_dir) if out_dir else None, force)


# --- value coercion -------------------------------------------------------------------------


def _as_fraction(value, key="value") -> Fraction:
    try:
        if isinstance(value, float):
            return Fraction(value).limit_denominator(10**12)
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{key}: cannot read {value!r} as a number") from exc


def _as_float(value, key="value") -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number")
    if isinstance(value, (int, float)):
        return float(value)
    return float(_as_fraction(value, key))


def _as_int(value, key="value") -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected an integer")
    if isinstance(value, str) and value.strip().lower().startswith("0x"):
        return int(value, 16)
    frac = _as_fraction(value, key)
    if frac.denominator != 1:
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return int(frac)


def _as_bool(value, key="value") -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _as_list(value, convert, key="value"):
    """Lists, comma-separated strings, or integer ranges ``a..b``."""
    if isinstance(value, (list, tuple)):
        return [convert(v, key) for v in value]
    text = str(value).strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return [convert(v, key) for v in range(_as_int(lo, key), _as_int(hi, key) + 1)]
    return [convert(v, key) for v in text.split(",") if v.strip()]


def _as_triple(value, key="triple") -> ExponentTriple:
    if isinstance(value, (list, tuple)):
        value = ",".join(str(v) for v in value)
    try:
        parts = [s.strip() for s in str(value).split(",") if s.strip()]
        if len(parts) == 3:
            return ExponentTriple.unchecked(*parts)
        return ExponentTriple.parse(value)
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def child_seed(master, *keys) -> int:
    """Deterministic 64-bit sub-seed for a sub-task."""
    return int(np.random.SeedSequence([int(master), *[int(k) for k in keys]]).generate_state(1, np.uint64)[0])


def _spec(n, N, L, force=False, bilinear=True) -> GridSpec:
    """Grid from config values; bilinear experiments obey the ``N^(2n)`` sample cap."""
    spec = GridSpec(_as_int(n, "n"), _as_int(N, "N"), _as_float(L, "L"))
    if not bilinear:
        return spec
    total = spec.points_per_axis ** (2 * spec.dim)
    if total > SAMPLE_CAP and not force:
        raise ResourceCapError(f"N^(2n) = {total} exceeds {SAMPLE_CAP}; pass --force to override")
    return spec


# --- report ---------------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    measured: object
    criterion: str
    passed: bool

    def to_json(self):
        return {"name": self.name, "measured": _jsonable(self.measured), "criterion": self.criterion, "passed": bool(self.passed)}


@dataclass
class Figure:
    title: str
    xlabel: str
    ylabel: str
    series: list  # (label, rows of (x, y))
    logscale: str = ""


@dataclass
class ExperimentReport:
    """In-memory result: manifest, CSV tables, figures and checks."""

    manifest: dict
    tables: dict
    figures: dict
    checks: list
    files: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    def csv_text(self, name):
        header, rows = self.tables[name]
        return _csv(header, rows)


class _Collector:
    def __init__(self):
        self.tables = {}
        self.figures = {}
        self.checks = []
        self.files = {}

    def table(self, name, header, rows):
        self.tables[name] = (tuple(header), [tuple(r) for r in rows])

    def figure(self, name, title, xlabel, ylabel, series, logscale=""):
        self.figures[name] = Figure(title, xlabel, ylabel, series, logscale)

    def check(self, name, measured, criterion, passed):
        self.checks.append(Check(name, measured, criterion, bool(passed)))

    def file(self, name, payload: bytes):
        self.files[name] = payload


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _dat(fig: Figure) -> str:
    blocks = []
    for label, rows in fig.series:
        lines = [f"# {label}", f"# {fig.xlabel} {fig.ylabel}"]
        lines += [f"{_cell(float(x))} {_cell(float(y))}" for x, y in rows]
        blocks.append("\n".join(lines))
    return "\n\n\n".join(blocks) + "\n"


def _gnuplot(name, fig: Figure) -> str:
    lines = [
        "set terminal pngcairo size 800,600",
        f"set output '{name}.png'",
        f"set title '{fig.title}'",
        f"set xlabel '{fig.xlabel}'",
        f"set ylabel '{fig.ylabel}'",
    ]
    if fig.logscale:
        lines.append(f"set logscale {fig.logscale}")
    plots = [f"'{name}.dat' index {i} using 1:2 with linespoints title '{label}'" for i, (label, _) in enumerate(fig.series)]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def write_report(report: ExperimentReport, out_dir):
    """Write CSV tables, ``.dat``/``.gp`` figure pairs, extra files and ``manifest.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in report.tables:
        (out / f"{name}.csv").write_bytes(report.csv_text(name).encode("utf-8"))
    for name, fig in report.figures.items():
        (out / f"{name}.dat").write_text(_dat(fig), encoding="utf-8")
        (out / f"{name}.gp").write_text(_gnuplot(name, fig), encoding="utf-8")
    for name, payload in report.files.items():
        (out / name).write_bytes(payload)
    verdict = _csv(("check", "measured", "criterion", "passed"), [(c.name, c.measured, c.criterion, c.passed) for c in report.checks])
    (out / "verdict.csv").write_bytes(verdict.encode("utf-8"))
    (out / "manifest.json").write_text(json.dumps(report.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def run(config: ExperimentConfig) -> ExperimentReport:
    """Run a configured experiment; write outputs when ``config.out_dir`` is set."""
    if config.name not in REGISTRY:
        raise ConfigError(f"unknown experiment {config.name!r}")
    exp = REGISTRY[config.name]
    out = _Collector()
    start = time.perf_counter()
    exp.runner(config.grid, config.params, config.seed, config.force, out)
    wall = time.perf_counter() - start
    if not out.checks:
        raise RuntimeError(f"experiment {config.name} produced no checks")
    manifest = {
        "schema": SCHEMA_VERSION,
        "experiment": config.name,
        "description": exp.description,
        "config": config.to_json(),
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "wall_time_s": round(wall, 3),
        "checks": [c.to_json() for c in out.checks],
        "passed": all(c.passed for c in out.checks),
        "tables": sorted(f"{n}.csv" for n in out.tables),
        "figures": sorted(f"{n}.dat" for n in out.figures),
        "files": sorted(out.files),
    }
    report = ExperimentReport(manifest, out.tables, out.figures, out.checks, out.files)
    if config.out_dir is not None:
        write_report(report, config.out_dir)
    return report


# --- experiments ----------------------------------------------------------------------------


def _kernel_decay(grid, params, seed, force, out):
    n = _as_int(grid["n"], "n")
    deltas = _as_list(params["delta"], _as_float, "delta")
    rmin, rmax = _as_float(params["rmin"]), _as_float(params["rmax"])
    samples = _as_int(params["samples"])
    tol = _as_float(params["tol"])
    r = np.linspace(rmin, rmax, samples)
    fits, peaks_rows, series = [], [], []
    for delta in deltas:
        prof = KernelProfile(2 * n, delta)
        mag = np.abs(br_kernel(prof, r))
        idx = np.nonzero((mag[1:-1] > mag[:-2]) & (mag[1:-1] >= mag[2:]))[0] + 1
        if len(idx) < 3:
            raise DomainError("too few oscillation peaks in the fit range")
        slope, intercept, resid = log2_fit(np.log2(r[idx]), mag[idx])
        expected = -prof.decay_exponent
        fits.append((delta, slope, expected, resid, len(idx)))
        peaks_rows += [(delta, float(r[i]), float(mag[i])) for i in idx]
        series.append((f"delta={delta:g}", [(r[i], mag[i]) for i in idx]))
        out.check(
            f"envelope slope delta={delta:g}",
            slope,
            f"|slope - ({expected:g})| <= {tol:g}*{abs(expected):g}",
            abs(slope - expected) <= tol * abs(expected),
        )
    out.table("fits", ("delta", "slope", "expected", "residual_log2", "peaks"), fits)
    out.table("peaks", ("delta", "r", "abs_kernel"), peaks_rows)
    out.figure("kernel_envelope", "kernel peaks", "r", "|K(r)|", series, "xy")


def _band_limit(grid, params, seed, force, out):
    band = _as_float(params["band"])
    tol = _as_float(params["tol"])
    rows = []
    for n in _as_list(params["ns"], _as_int, "ns"):
        spec = _spec(n, grid["N"], grid["L"], force)
        if band >= spec.extent / 2:
            raise ConfigError("band must be smaller than L/2 to be visible on the grid")
        symbol = lift_biradial(compact_spectrum_profile(band), spec, strict=False)
        K = np.abs(symbol.kernel_samples())
        inside = np.abs(spec.axis()) <= band
        mask = inside
        for _ in range(2 * n - 1):
            mask = np.multiply.outer(mask, inside)
        energy = float((K[~mask] ** 2).sum() / (K**2).sum())
        l1 = float(K[~mask].sum() / K.sum())
        rows.append((n, spec.points_per_axis, spec.extent, band, energy, l1))
        out.check(f"energy outside band n={n}", energy, f"<= {tol:g}", energy <= tol)
        out.check(f"L1 mass outside band n={n}", l1, f"<= {tol:g}", l1 <= tol)
    out.table("outside_mass", ("n", "N", "L", "band", "energy_fraction", "l1_fraction"), rows)


def _rel(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def _engine_oracle(grid, params, seed, force, out):
    spec = _spec(grid["n"], grid["N"], grid["L"], force)
    if spec.dim != 1:
        raise ConfigError("engine-oracle compares against the one-dimensional brute force")
    trials = _as_int(params["trials"])
    tol_oracle, tol_engine = _as_float(params["tol_oracle"]), _as_float(params["tol_engines"])
    rows = []
    x = spec.axis()
    for t in range(trials):
        rng = np.random.default_rng(child_seed(seed, t))
        N = spec.points_per_axis
        vals = rng.uniform(-1, 1, (N, N)) + 1j * rng.uniform(-1, 1, (N, N))
        symbol = Symbol(spec, vals, f"random{t}")
        f = random_band_limited(spec, rng)
        g = random_band_limited(spec, rng)
        fast = apply(BilinearOp(symbol, "frequency_loop"), f, g).samples
        kern = apply(BilinearOp(symbol, "kernel_convolution"), f, g).samples
        brute = bilinear_brute_force(vals, dft(f).samples, dft(g).samples, spec.extent, x)
        rows.append((t, _rel(fast, brute), _rel(kern, fast)))
    worst_oracle = max(r[1] for r in rows)
    worst_engine = max(r[2] for r in rows)
    out.table("trials", ("trial", "rel_err_vs_brute_force", "rel_err_kernel_vs_frequency"), rows)
    out.check("frequency_loop vs brute force", worst_oracle, f"<= {tol_oracle:g}", worst_oracle <= tol_oracle)
    out.check("frequency_loop vs kernel_convolution", worst_engine, f"<= {tol_engine:g}", worst_engine <= tol_engine)


def _sobolev_threshold(grid, params, seed, force, out):
    from .analysis import sobolev_norm

    L = _as_float(grid["L"])
    delta, q = _as_float(params["delta"]), _as_float(params["q"])
    Ns = _as_list(params["Ns"], _as_int, "Ns")
    s_stable, s_grow = _as_float(params["s_stable"]), _as_float(params["s_growing"])
    drift_max, growth_min = _as_float(params["drift_max"]), _as_float(params["growth_min"])
    values = {s_stable: [], s_grow: []}
    for N in Ns:
        spec = GridSpec(1, N, L)
        x = spec.axis()
        inside = np.abs(x) < 1
        prof = np.where(inside, np.abs(1 - x * x) ** delta, 0.0)
        for s in values:
            values[s].append(sobolev_norm(prof, s, q, spec=spec))
    rows = [(N, values[s_stable][i], values[s_grow][i]) for i, N in enumerate(Ns)]
    out.table("norms", ("N", f"W{s_stable:g}_norm", f"W{s_grow:g}_norm"), rows)
    out.figure(
        "sobolev_refinement",
        "Sobolev norm under refinement",
        "N",
        "norm",
        [(f"s={s:g}", list(zip(Ns, v))) for s, v in values.items()],
        "xy",
    )
    stable = values[s_stable]
    drift = max(stable) / min(stable) - 1
    growth = min(b / a - 1 for a, b in zip(values[s_grow], values[s_grow][1:]))
    out.check(f"drift at s={s_stable:g}", drift, f"<= {drift_max:g}", drift <= drift_max)
    out.check(f"growth per doubling at s={s_grow:g}", growth, f">= {growth_min:g}", growth >= growth_min)


def _estimate_files(est: NormEstimate, stem):
    files = {}
    names = []
    for label, w in zip(("f", "g"), est.witnesses):
        header = {"dim": w.spec.dim, "n": w.spec.points_per_axis, "extent": w.spec.extent, "space": w.space}
        name = f"{stem}_{label}.brgrid"
        files[name] = encode_grid(w.samples, header)
        names.append(name)
    files[f"{stem}.json"] = (json.dumps(est.to_json(names), indent=2, sort_keys=True) + "\n").encode("utf-8")
    return files


def _l2l2l1_uniformity(grid, params, seed, force, out):
    n = _as_int(grid["n"], "n")
    delta, R = _as_float(params["delta"]), _as_float(params["R"])
    triple = _as_triple(params["triple"])
    Ns = _as_list(params["Ns"], _as_int, "Ns")
    ratio = _as_float(params["points_per_unit"])
    budget, seeds = _as_int(params["budget"]), _as_int(params["seeds"])
    tol = _as_float(params["variation_max"])
    rows = []
    for N in Ns:
        spec = _spec(n, N, N / ratio, force)
        est = opnorm_lower(bochner_riesz_op(delta, R, spec), triple, budget=budget, seeds=seeds, seed=child_seed(seed, N))
        rows.append((N, spec.extent, est.value, len(est.trace)))
        for name, payload in _estimate_files(est, f"witness_N{N}").items():
            out.file(name, payload)
    values = [r[2] for r in rows]
    variation = max(values) / min(values) - 1
    out.table("estimates", ("N", "L", "lower_bound", "trace_length"), rows)
    out.figure("uniformity", f"lower bounds at {triple}", "N", "lower bound", [(f"delta={delta:g}", [(r[0], r[2]) for r in rows])], "x")
    out.check(f"variation across N at delta={delta:g}", variation, f"<= {tol:g}", variation <= tol)


def _delta_zero_blowup(grid, params, seed, force, out):
    n = _as_int(grid["n"], "n")
    N0, L0 = _as_int(grid["N"], "N"), _as_float(grid["L"], "L")
    levels = _as_int(params["levels"])
    variant = str(params["variant"])
    v = np.zeros(n)
    v[0] = 1.0
    p1, p2, p = (2.0, 2.0, 1.0) if variant == "joint" else (2.0, math.inf, 2.0)
    ratio_min = _as_float(params["ratio_min"])
    rows = []
    for level in range(levels):
        # linear-cost family: no 2n-dimensional symbol, so no sample cap
        spec = GridSpec(n, N0 * 2**level, L0 * 2**level)
        cube = np.ones(spec.shape)
        for c in spec.coords():
            cube = cube * (np.abs(c) <= 0.5)
        f = project_to_band(GridFunction(spec, cube, PHYSICAL))
        g = f
        if variant == "second_slot":
            g = f / lp_norm(f, math.inf)
        result = halfspace_witness(v, variant, f, g)
        value = lp_norm(result, p) / (lp_norm(f, p1) * lp_norm(g, p2))
        rows.append((spec.points_per_axis, spec.extent, value))
    growth = [b[2] / a[2] for a, b in zip(rows, rows[1:])]
    table = [(N, L, val, growth[i - 1] if i else "") for i, (N, L, val) in enumerate(rows)]
    out.table("blowup", ("N", "L", "norm_ratio", "growth"), table)
    out.figure("blowup", "half-space witness", "L", "norm ratio", [(variant, [(r[1], r[2]) for r in rows])], "x")
    worst = min(growth)
    out.check("growth per refinement", worst, f">= {ratio_min:g}", worst >= ratio_min)


def _dyadic_rate(grid, params, seed, force, out):
    n = _as_int(grid["n"], "n")
    triple = _as_triple(params["triple"])
    delta = _as_float(params["delta"])
    js = _as_list(params["j"], _as_int, "j")
    measure = str(params["measure"])
    if measure == "auto":
        measure = "a2" if triple.floats() == (2.0, 2.0, 2.0) else "opnorm"
    if measure not in ("a2", "opnorm"):
        raise ConfigError("measure must be auto, a2 or opnorm")
    weighted = params["weighted"]
    weighted = (measure == "a2") if weighted == "auto" else _as_bool(weighted, "weighted")
    N = grid["N"] if grid["N"] is not None else (32 if measure == "a2" else 256)
    L = grid["L"] if grid["L"] is not None else (16 if measure == "a2" else 64)
    spec = _spec(n, N, L, force)
    if measure == "a2":
        fit = a2_rate_fit(delta, js, spec, weighted)
        expected = -(delta if weighted else 0.0) - 0.5
        tol = _as_float(params["a2_tol"])
        out.check("A2 slope", fit.rate, f"|slope - ({expected:g})| <= {tol:g}", abs(fit.rate - expected) <= tol)
    else:
        fit = dyadic_rate_fit(
            delta,
            triple,
            js,
            budget=_as_int(params["budget"]),
            spec=spec,
            seeds=_as_int(params["seeds"]),
            seed=seed,
            weighted=weighted,
        )
        rate_max, resid_max = _as_float(params["rate_max"]), _as_float(params["residual_max"])
        out.check("fitted growth rate", fit.rate, f"<= {rate_max:g}", fit.rate <= rate_max)
        out.check("fit residual (log2)", fit.residual, f"<= {resid_max:g}", fit.residual <= resid_max)
        finite = all(math.isfinite(v) and v > 0 for v in fit.values)
        out.check("per-j bounds finite", int(finite), "== 1", finite)
    out.table("per_j", ("j", "value", "log2_value"), fit.to_rows())
    out.table(
        "fit",
        ("measure", "triple", "n", "N", "L", "delta", "weighted", "rate", "intercept", "residual"),
        [(measure, triple.label(), n, spec.points_per_axis, spec.extent, delta, weighted, fit.rate, fit.intercept, fit.residual)],
    )
    out.figure("dyadic_rate", f"{measure} per dyadic piece", "j", "log2 value", [(triple.label(), [(j, math.log2(v)) for j, v in zip(fit.js, fit.values)])])


def _tensorization(grid, params, seed, force, out):
    profile = br_profile(_as_float(params["delta"]), _as_float(params["R"]))
    k_lo, k_hi, k_rec = (_as_int(params[k]) for k in ("k_lo", "k_hi", "k_rec"))
    decay_min, l1_max = _as_float(params["decay_min"]), _as_float(params["l1_max"])
    T = Tensorization(profile, k_hi)
    u = np.linspace(0, 1, _as_int(params["u_points"]))
    ks = np.arange(k_lo, k_hi + 1)
    gamma = np.abs(T.coefficients(u, ks)).max(axis=0)
    decay = fit_decay_exponent(ks, gamma)
    # L1 error of the truncated series on [-1, 1]^2: Gauss-Legendre in u, trapezoid in v
    xg, wg = np.polynomial.legendre.leggauss(_as_int(params["quad_u"]))
    v = np.linspace(-1, 1, _as_int(params["v_points"]))
    rec = Tensorization(profile, k_rec).reconstruct(xg, v)
    err = np.abs(rec - profile.eval(xg[:, None], v[None, :]))
    l1 = float(np.sum(wg * np.trapezoid(err, v, axis=1)))
    out.table("coefficients", ("k", "max_abs_gamma"), list(zip(ks.tolist(), gamma.tolist())))
    out.table("summary", ("decay_exponent", "k_range", "k_rec", "l1_error"), [(decay, f"{k_lo}..{k_hi}", k_rec, l1)])
    out.figure("coefficients", "cosine coefficients", "k", "max_u |gamma_k(u)|", [(profile.name, list(zip(ks, gamma)))], "xy")
    out.check("coefficient decay exponent", decay, f">= {decay_min:g}", decay >= decay_min)
    out.check(f"reconstruction L1 error k_max={k_rec}", l1, f"<= {l1_max:g}", l1 <= l1_max)


def _restriction_scaling(grid, params, seed, force, out):
    spec = _spec(grid["n"], grid["N"], grid["L"], force, bilinear=False)
    lams = _as_list(params["lambdas"], _as_float, "lambdas")
    inv_p, inv_q = _as_fraction(params["inv_p"]), _as_fraction(params["inv_q"])
    sigma, tol = _as_float(params["sigma"]), _as_float(params["tol"])
    n = spec.dim
    p = math.inf if inv_p == 0 else float(1 / inv_p)
    q = math.inf if inv_q == 0 else float(1 / inv_q)
    expected = float(n * (inv_p - inv_q) - 1)
    r2 = sum(c**2 for c in spec.coords())
    rows = []
    for lam in lams:
        f = GridFunction(spec, lam**n * np.exp(-np.pi * lam**2 * r2 / sigma**2) * np.ones(spec.shape), PHYSICAL)
        ratio = lp_norm(restriction_extension(lam, f), q) / lp_norm(f, p)
        rows.append((lam, ratio))
    slope, intercept, resid = log2_fit(np.log2(lams), [r[1] for r in rows])
    out.table("ratios", ("lambda", "norm_ratio"), rows)
    out.table("fit", ("inv_p", "inv_q", "slope", "expected", "residual"), [(inv_p, inv_q, slope, expected, resid)])
    out.figure("restriction_scaling", "dilated data", "lambda", "norm ratio", [("ratio", rows)], "xy")
    bound = tol * max(abs(expected), 1.0)
    out.check("scaling exponent", slope, f"|slope - ({expected:g})| <= {bound:g}", abs(slope - expected) <= bound)
    if n == 2:
        _restriction_endpoint(spec, params, out)


def _restriction_endpoint(spec, params, out):
    """Report-only sweep of ``||R_l1 f R_l2 g||_2`` for unit-mass spikes with ``l1 << l2``.

    Fitted exponents are tabulated next to ``n - 3/2`` and ``(n - 1)/2``;
    no check is attached because the separation ``l1 << l2`` is not
    quantified.
    """
    n, N, h = spec.dim, spec.points_per_axis, spec.spacing
    spike = np.zeros(spec.shape)
    spike[(N // 2,) * n] = 1 / h**n
    f = GridFunction(spec, spike, PHYSICAL)

    def value(l1, l2):
        return lp_norm(restriction_extension(l1, f) * restriction_extension(l2, f), 2)

    l1 = _as_float(params["endpoint_lambda1"])
    l2s = [l1 * r for r in _as_list(params["endpoint_ratios"], _as_float, "endpoint_ratios")]
    l2 = _as_float(params["endpoint_lambda2"])
    l1s = _as_list(params["endpoint_lambda1s"], _as_float, "endpoint_lambda1s")
    if max(l2s + [l2]) > spec.nyquist:
        raise ConfigError("endpoint sweep exceeds the Nyquist radius")
    rows = [("lambda2", l1, b, value(l1, b)) for b in l2s] + [("lambda1", a, l2, value(a, l2)) for a in l1s]
    slope2 = log2_fit(np.log2(l2s), [r[3] for r in rows[: len(l2s)]])
    slope1 = log2_fit(np.log2(l1s), [r[3] for r in rows[len(l2s):]])
    out.table("endpoint_sweep", ("swept", "lambda1", "lambda2", "l2_norm"), rows)
    out.table(
        "endpoint_fit",
        ("swept", "fitted_exponent", "printed_exponent", "residual"),
        [("lambda1", slope1[0], n - 1.5, slope1[2]), ("lambda2", slope2[0], (n - 1) / 2, slope2[2])],
    )


def _annulus_average(grid, params, seed, force, out):
    spec = _spec(grid["n"], grid["N"], grid["L"], force, bilinear=False)
    lam, mu = _as_float(params["lambda"]), _as_float(params["mu"])
    trials = _as_int(params["trials"])
    rows = []
    worst_ratio = worst_idem = worst_identity = 0.0
    for t in range(trials):
        rng = np.random.default_rng(child_seed(seed, t))
        shape = spec.shape
        f = GridFunction(spec, rng.standard_normal(shape) + 1j * rng.standard_normal(shape), PHYSICAL)
        once = annulus_average(lam, mu, f)
        twice = annulus_average(lam, mu, once)
        ratio = lp_norm(once, 2) / lp_norm(f, 2)
        idem = float(np.abs(twice.samples - once.samples).max() / max(np.abs(once.samples).max(), 1e-300))
        band = random_band_limited(spec, rng)
        full = annulus_average(0.0, spec.nyquist, band)
        ident = float(np.abs(full.samples - band.samples).max() / np.abs(band.samples).max())
        rows.append((t, ratio, idem, ident))
        worst_ratio, worst_idem, worst_identity = max(worst_ratio, ratio), max(worst_idem, idem), max(worst_identity, ident)
    out.table("trials", ("trial", "norm_ratio", "idempotence_error", "identity_error"), rows)
    out.check("operator norm <= 1", worst_ratio, "<= 1 + 1e-12", worst_ratio <= 1 + 1e-12)
    out.check("idempotent", worst_idem, "<= 1e-12", worst_idem <= 1e-12)
    out.check("identity on band-limited input", worst_identity, "<= 1e-12", worst_identity <= 1e-12)


def _net_packing(grid, params, seed, force, out):
    ns = _as_list(params["ns"], _as_int, "ns")
    Ns = _as_list(params["N_by_n"], _as_int, "N_by_n")
    Ls = _as_list(params["L_by_n"], _as_float, "L_by_n")
    if not (len(ns) == len(Ns) == len(Ls)):
        raise ConfigError("ns, N_by_n and L_by_n must have equal lengths")
    trials = _as_int(params["trials"])
    cells = _as_float(params["rho_cells"])
    rows = []
    for n, N, L in zip(ns, Ns, Ls):
        spec = GridSpec(n, N, L)
        rho = cells * spec.spacing
        bound = 41**n
        ok_sep = ok_cov = ok_k = ok_cells = True
        for t in range(trials):
            net = build_net(spec, rho, seed=child_seed(seed, n, t))
            sep, cov, K = net.min_separation(), net.covering_radius(), net.neighbor_count()
            partition = bool(np.all(net.cells >= 0)) and len(np.unique(net.cells)) == len(net.centers)
            rows.append((n, t, len(net.centers), sep, cov, K))
            ok_sep &= sep > rho / 10
            ok_cov &= cov <= rho / 10 + 1e-12
            ok_k &= K <= bound
            ok_cells &= partition
        out.check(f"separation n={n}", int(ok_sep), f"all {trials} trials", ok_sep)
        out.check(f"covering n={n}", int(ok_cov), f"all {trials} trials", ok_cov)
        out.check(f"K <= 41^{n} n={n}", max(r[5] for r in rows if r[0] == n), f"<= {bound}", ok_k)
        out.check(f"cells partition n={n}", int(ok_cells), f"all {trials} trials", ok_cells)
        # a net radius beyond the torus diameter leaves one center
        big = build_net(spec, 10 * L * math.sqrt(n))
        single = len(big.centers) == 1 and big.neighbor_count() == 1
        out.check(f"single cell n={n}", len(big.centers), "== 1 center, K = 1", single)
    out.table("builds", ("n", "trial", "centers", "min_separation", "covering_radius", "K"), rows)


def _torus_demo(grid, params, seed, force, out):
    spec = GridSpec(1, _as_int(grid["N"], "N"), 1.0)
    delta = _as_float(params["delta"])
    x = spec.axis()
    # single mode: one term survives with weight (1 - 2 m0^2 / R^2)^delta
    m0, R1 = _as_int(params["m0"]), _as_float(params["R_single"])
    single = torus_partial_sum(delta, R1, {m0: 1.0}, {m0: 1.0}, spec).samples
    weight = (1 - 2 * m0 * m0 / R1**2) ** delta if 2 * m0 * m0 <= R1**2 else 0.0
    err_single = float(np.abs(single - weight * np.exp(2j * np.pi * 2 * m0 * x)).max())
    out.check("single-mode output", err_single, "<= 1e-12", err_single <= 1e-12)
    # product of two 1/(1+m^2) series against its closed form
    target = (np.pi * np.cosh(np.pi * (1 - 2 * np.abs(x))) / np.sinh(np.pi)) ** 2
    rows = []
    for R in _as_list(params["Rs"], _as_float, "Rs"):
        M = int(math.floor(R))
        coef = {m: 1.0 / (1 + m * m) for m in range(-M, M + 1)}
        approx = torus_partial_sum(delta, R, coef, coef, spec).samples
        rows.append((R, float(np.abs(approx - target).max())))
    ratios = [a[1] / b[1] for a, b in zip(rows, rows[1:])]
    lo, hi = _as_float(params["ratio_lo"]), _as_float(params["ratio_hi"])
    out.table("single_mode", ("m0", "R", "weight", "max_error"), [(m0, R1, weight, err_single)])
    out.table("convergence", ("R", "sup_error", "ratio_to_previous"), [(R, e, ratios[i - 1] if i else "") for i, (R, e) in enumerate(rows)])
    out.figure("torus_convergence", "Riesz partial sums", "R", "sup error", [(f"delta={delta:g}", rows)], "xy")
    out.check("error ratio per doubling", min(ratios), f"in [{lo:g}, {hi:g}]", all(lo <= r <= hi for r in ratios))


def _threshold_table(grid, params, seed, force, out):
    n = _as_int(grid["n"], "n")
    step = _as_fraction(params["lattice"], "lattice")
    out.table("thresholds", CSV_HEADER, threshold_rows(n, step))
    F = Fraction
    exact = [
        ("a_2", a_n(2), F(3, 4)),
        ("b_2", b_n(2), F(11, 12)),
        ("alpha(2; 5/4, 5/4)", alpha(2, F(5, 4), F(5, 4)), F(4, 3)),
        ("alpha(2; 1, 1)", alpha(2, 1, 1), F(3, 2)),
    ]
    for name, got, want in exact:
        out.check(name, str(got), f"== {want}", got == want)
    for p, q, want in ((F(4, 3), "inf", False), (1, "inf", True), (F(5, 4), 10, True)):
        got = delta_region(2, p, q)
        out.check(f"Delta(2) contains (1/p,1/q)=({1 / F(p)},{0 if q == 'inf' else 1 / F(q)})", got, f"== {want}", got == want)
    for label, want_b, want_u in (("2,2,1", "delta>0", "delta<=0"), ("1,inf,1", "delta>1", "delta<=1/2"), ("4,4,2", "delta>1/2", None)):
        b, u = best_thresholds(critical_delta(2, ExponentTriple.parse(label)))
        got = (b.describe() if b else None, u.describe() if u else None)
        ok = got[0] == want_b and (want_u is None or got[1] == want_u)
        out.check(f"verdicts at ({label}), n=2", f"{got[0]}; {got[1]}", f"{want_b}; {want_u or 'any'}", ok)
    for p, q, want in ((4, 4, "I"), (1, 1, "IV"), (F(5, 4), F(20, 19), "V")):
        got = region_classify(2, p, q)
        out.check(f"region of (p,q)=({p},{q})", got, f"== {want}", got == want)
    sweep_ns = _as_list(params["sweep_ns"], _as_int, "sweep_ns")
    checked, failures = consistency_sweep(sweep_ns, _as_fraction(params["sweep_step"], "sweep_step"))
    out.table(
        "sweep_failures",
        ("n", "x", "y", "bounded", "unbounded"),
        [(k, x, y, b.describe(), u.describe()) for k, x, y, (b, u) in failures],
    )
    minimum = _as_int(params["sweep_min"])
    out.check("sweep size", checked, f">= {minimum}", checked >= minimum)
    out.check("sweep contradictions", len(failures), "== 0", not failures)


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    runner: Callable
    grid_defaults: dict
    param_defaults: dict


REGISTRY = {
    e.name: e
    for e in (
        Experiment(
            "kernel-decay",
            "envelope exponent of the Bochner-Riesz kernel against -(n + delta + 1/2)",
            _kernel_decay,
            {"n": 1},
            {"delta": "0.5,1", "rmin": 5, "rmax": 80, "samples": 30001, "tol": 0.05},
        ),
        Experiment(
            "band-limit",
            "kernel mass of a lifted profile outside its 2-D Fourier support box",
            _band_limit,
            {"N": 32, "L": 16},
            {"ns": "1,2", "band": 6, "tol": 1e-6},
        ),
        Experiment(
            "engine-oracle",
            "frequency-loop engine vs O(N^3) brute force and the kernel engine",
            _engine_oracle,
            {"n": 1, "N": 32, "L": 8},
            {"trials": 10, "tol_oracle": 1e-10, "tol_engines": 1e-6},
        ),
        Experiment(
            "sobolev-threshold",
            "W^{s,1} norm of (1-x^2)_+^delta under refinement on both sides of delta + 1/q",
            _sobolev_threshold,
            {"L": 4},
            {
                "delta": 0.6,
                "q": 1,
                "Ns": "512,1024,2048,4096",
                "s_stable": 1.4,
                "s_growing": 1.8,
                "drift_max": 0.05,
                "growth_min": 0.10,
            },
        ),
        Experiment(
            "l2l2l1-uniformity",
            "ascent lower bounds for S^delta at (2,2,1) across grid refinements",
            _l2l2l1_uniformity,
            {"n": 1},
            {
                "delta": 0.5,
                "R": 1,
                "triple": "2,2,1",
                "Ns": "64,128,256",
                "points_per_unit": 4,
                "budget": 50,
                "seeds": 8,
                "variation_max": 0.2,
            },
        ),
        Experiment(
            "delta-zero-blowup",
            "half-space witness norms for delta = 0 as the grid doubles",
            _delta_zero_blowup,
            {"n": 2, "N": 32, "L": 4},
            {"levels": 5, "variant": "joint", "ratio_min": 1.4},
        ),
        Experiment(
            "dyadic-rate",
            "log2 growth rate of dyadic spherical pieces (A2 slope or ascent lower bounds)",
            _dyadic_rate,
            {"n": 1, "N": None, "L": None},
            {
                "triple": "2,2,1",
                "delta": 1,
                "j": "1..4",
                "measure": "auto",
                "weighted": "auto",
                "budget": 20,
                "seeds": 2,
                "rate_max": 0.3,
                "residual_max": 0.2,
                "a2_tol": 0.3,
            },
        ),
        Experiment(
            "tensorization",
            "cosine-series coefficient decay and truncated reconstruction of a Bochner-Riesz profile",
            _tensorization,
            {},
            {
                "delta": 1,
                "R": 1,
                "k_lo": 8,
                "k_hi": 256,
                "k_rec": 128,
                "u_points": 201,
                "quad_u": 400,
                "v_points": 2001,
                "decay_min": 1.5,
                "l1_max": 1e-3,
            },
        ),
        Experiment(
            "restriction-scaling",
            "norm ratio of R_lambda on dilated data against lambda^(n(1/p-1/q)-1)",
            _restriction_scaling,
            {"n": 2, "N": 128, "L": 4},
            {
                "lambdas": "2,4,8",
                "inv_p": 1,
                "inv_q": 0,
                "sigma": 2,
                "tol": 0.1,
                "endpoint_lambda1": 1,
                "endpoint_ratios": "4,8,16",
                "endpoint_lambda2": 16,
                "endpoint_lambda1s": "0.5,1,2",
            },
        ),
        Experiment(
            "annulus-average",
            "annulus projection: norm <= 1, idempotence, identity on band-limited input",
            _annulus_average,
            {"n": 2, "N": 64, "L": 8},
            {"lambda": 1, "mu": 2, "trials": 100},
        ),
        Experiment(
            "net-packing",
            "randomized greedy nets: separation, covering and the 41^n neighbor bound",
            _net_packing,
            {},
            {"ns": "1,2,3", "N_by_n": "256,64,16", "L_by_n": "32,16,8", "trials": 50, "rho_cells": 20},
        ),
        Experiment(
            "torus-demo",
            "Bochner-Riesz partial sums of products of Fourier series on the circle",
            _torus_demo,
            {"N": 512},
            {"delta": 1, "m0": 3, "R_single": 10, "Rs": "8,16,32,64,128", "ratio_lo": 1.7, "ratio_hi": 2.3},
        ),
        Experiment(
            "threshold-table",
            "critical-delta verdicts over a rational lattice plus worked-value checks",
            _threshold_table,
            {"n": 2},
            {"lattice": "1/12", "sweep_step": "1/60", "sweep_ns": "1,2,3", "sweep_min": 10000},
        ),
    )
}


def describe_registry():
    """``(name, description)`` pairs in registry order."""
    return [(e.name, e.description) for e in REGISTRY.values()]


def run_named(name, overrides=(), data=None, out_dir=None, force=False) -> ExperimentReport:
    """Convenience wrapper: build the config and run it."""
    return run(make_config(name, data, overrides, out_dir, force))


def print_summary(report: ExperimentReport, stream=None):
    stream = stream or sys.stdout
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        stream.write(f"{status}  {c.name}: {_cell(c.measured)} ({c.criterion})\n")
