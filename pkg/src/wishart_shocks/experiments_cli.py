"""Experiment runner: ``wishart-shocks <experiment> [--config FILE] [options]``.

Each experiment writes ``<outdir>/<experiment>/*.csv`` plus ``manifest.json``
(config echo, timing, checks, sha256 of every file in the directory).  The
exit status is 0 when every check passes, 1 when any fails and 2 for a usage
error, in which case nothing is written.

Parameter precedence: built-in defaults < config file < ``--set key=value`` <
dedicated flags (``--seed``, ``--outdir``).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic_spectrum as an
from . import orthopoly as op
from . import special_functions as sf
from .errors import DomainError, WishartError
from .stochastic_engine import EnsembleConfig, TimeConvention, empirical_density, sample_spectra

__all__ = [
    "EXPERIMENTS",
    "FORMAT_VERSION",
    "UsageError",
    "RunConfig",
    "Check",
    "RunResult",
    "load_config",
    "run",
    "export_characteristics",
    "density_l1",
    "write_csv",
    "main",
]

FORMAT_VERSION = 1
EXPERIMENTS = ("density", "charpoly", "edge-soft", "edge-hard", "characteristics", "rtransform",
               "sde-check", "validate-all")

DEFAULTS = {
    "density": {"N": 256, "M": 512, "tau": 1.0, "replicas": 100, "bins": 60, "seed": 7, "dt": None},
    "charpoly": {"N": 4, "M": 6, "tau": 0.8, "replicas": 100000, "seed": 11, "dt": None,
                 "z-grid": [[-1, 0], [1, 1], [6, 0]]},
    "edge-soft": {"r": 1.0, "tau": 1.0, "N-list": [16, 32, 64], "s-grid": None},
    "edge-hard": {"nu": 0, "tau": 1.0, "N-list": [16, 32, 64], "s-grid": None},
    "characteristics": {"r": 1.0, "tau": 1.0, "samples": 33, "z0-grid": None},
    "rtransform": {"r": 1.0, "tau": 1.0, "z-grid": None},
    "sde-check": {"N": 16, "M": 24, "tau": 0.5, "replicas": 2000, "seed": 3, "dt": None, "burn-in": 10},
    "validate-all": {},
}
COMMON = {"outdir": "results", "seed": None, "format-version": FORMAT_VERSION}


class UsageError(WishartError, ValueError):
    """Invalid configuration or arguments (exit status 2)."""


@dataclass
class RunConfig:
    experiment: str
    params: dict
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise UsageError(f"unknown experiment {self.experiment!r}")
        if self.format_version != FORMAT_VERSION:
            raise UsageError(f"unsupported format-version {self.format_version}")
        allowed = set(DEFAULTS[self.experiment]) | set(COMMON)
        unknown = set(self.params) - allowed
        if unknown:
            raise UsageError(f"unknown parameters for {self.experiment}: {sorted(unknown)}")
        p = self.params
        for key in ("N", "M", "replicas", "bins", "samples", "burn-in"):
            if key in p and (not isinstance(p[key], int) or isinstance(p[key], bool) or p[key] < 1):
                raise UsageError(f"{key} must be a positive integer")
        if "N" in p and "M" in p and p["N"] > p["M"]:
            raise UsageError("need N <= M")
        if "nu" in p and (not isinstance(p["nu"], int) or p["nu"] < 0):
            raise UsageError("nu must be a nonnegative integer")
        if "tau" in p and not (isinstance(p["tau"], (int, float)) and p["tau"] > 0):
            raise UsageError("tau must be > 0")
        if "r" in p and not (isinstance(p["r"], (int, float)) and 0 < p["r"] <= 1):
            raise UsageError("r must lie in (0, 1]")
        if p.get("seed") is not None and (not isinstance(p["seed"], int) or not 0 <= p["seed"] < 2 ** 64):
            raise UsageError("seed must be a 64-bit unsigned integer")
        if p.get("dt") is not None and not (isinstance(p["dt"], (int, float)) and p["dt"] > 0):
            raise UsageError("dt must be > 0")

    @classmethod
    def build(cls, experiment: str, file_params: dict | None = None, overrides: dict | None = None):
        if experiment not in EXPERIMENTS:
            raise UsageError(f"unknown experiment {experiment!r}")
        params = dict(COMMON)
        params.update(DEFAULTS[experiment])
        for src in (file_params or {}, overrides or {}):
            params.update({_norm_key(k): v for k, v in src.items()})
        version = params.pop("format-version", FORMAT_VERSION)
        params.pop("experiment", None)
        return cls(experiment, params, version)

    def get(self, key):
        return self.params[key]

    def echo(self) -> dict:
        out = {"experiment": self.experiment, "format-version": self.format_version}
        out.update(self.params)
        return out


def _norm_key(k: str) -> str:
    return k if k in ("N", "M", "N-list") else k.replace("_", "-")


def load_config(path) -> dict:
    """Read a flat UTF-8 JSON object."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    for k, v in data.items():
        if isinstance(v, dict):
            raise UsageError(f"config must be flat; {k!r} is a nested object")
    return data


@dataclass
class Check:
    name: str
    value: float
    tolerance: str
    passed: bool

    def __post_init__(self):
        self.value = float(self.value)
        self.passed = bool(self.passed)

    def as_dict(self):
        v = self.value
        if isinstance(v, float) and not math.isfinite(v):
            v = repr(v)
        return {"name": self.name, "value": v, "tolerance": self.tolerance, "passed": bool(self.passed)}


@dataclass
class RunResult:
    experiment: str
    outdir: Path
    checks: list = field(default_factory=list)
    files: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> int:
        return 0 if self.passed else 1


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, header, rows) -> Path:
    """Header row, 17 significant digits, LF endings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path = Path(path)
    path.write_bytes(buf.getvalue().encode("utf-8"))
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# --------------------------------------------------------------------------
# experiments
# --------------------------------------------------------------------------


def density_l1(values, p: an.SpectralParams, bins: int) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """L1 distance between pooled bin masses over the support and the exact masses.

    Eigenvalues outside the support count fully toward the distance.
    Returns (L1, edges, empirical masses, theory masses).
    """
    vals = np.asarray(values, dtype=float).ravel()
    zl, zr = an.spectrum_edges(p)
    hist = empirical_density(vals, bins, (zl, zr))
    emp = hist.counts / vals.size
    theory = an.mp_bin_masses(hist.bin_edges, p)
    outside = 1.0 - emp.sum()
    return float(np.abs(emp - theory).sum() + outside), hist.bin_edges, emp, theory


def _ensemble(cfg: RunConfig, dt_default_frac: float) -> EnsembleConfig:
    conv = TimeConvention(cfg.get("N"), cfg.get("M"))
    t_final = conv.t_of_tau(cfg.get("tau"))
    dt = cfg.params.get("dt") or dt_default_frac * t_final
    burn = cfg.params.get("burn-in", 10)
    return EnsembleConfig(conv, cfg.get("tau"), dt, cfg.get("replicas"), cfg.get("seed"), burn)


def _exp_density(cfg, outdir, workers):
    ens = _ensemble(cfg, 1.0)
    conv = ens.conv
    p = an.SpectralParams(conv.r, ens.tau_final)
    batch = sample_spectra(ens, "matrix-path", workers=workers)
    bins = cfg.get("bins")
    l1, edges, emp, theory = density_l1(batch.values, p, bins)
    widths = np.diff(edges)
    centers = 0.5 * (edges[1:] + edges[:-1])
    files = [write_csv(outdir / "density.csv", ["bin_center", "empirical", "mp_theory"],
                       zip(centers, emp / widths, theory / widths))]
    zr = an.spectrum_edges(p)[1]
    band = 5 * conv.N ** (-2.0 / 3.0)
    top = batch.values[:, -1]
    inside = (top >= zr * (1 - band)) & (top <= zr * (1 + band))
    files.append(write_csv(outdir / "edge.csv", ["replica", "max_lambda", "within_band"],
                           zip(range(len(top)), top, inside)))
    frac = float(inside.mean())
    return files, [Check("density L1", l1, "<= 0.05", l1 <= 0.05),
                   Check("max eigenvalue within soft-edge band", frac, ">= 0.95", frac >= 0.95)]


def _complex_grid(raw, default):
    if raw is None:
        return list(default)
    out = []
    for item in raw:
        if isinstance(item, (list, tuple)) and len(item) == 2:
            out.append(complex(float(item[0]), float(item[1])))
        elif isinstance(item, (int, float)):
            out.append(complex(item))
        elif isinstance(item, str):
            out.append(complex(item.replace(" ", "").replace("i", "j")))
        else:
            raise UsageError(f"cannot parse grid entry {item!r}")
    return out


def _exp_charpoly(cfg, outdir, workers):
    ens = _ensemble(cfg, 1.0)
    conv = ens.conv
    batch = sample_spectra(ens, "matrix-path", workers=workers)
    zs = _complex_grid(cfg.get("z-grid"), [])
    rows, checks = [], []
    n = len(batch)
    for z in zs:
        vals = np.prod(z - batch.values, axis=1)
        mean = vals.mean()
        se = np.array([vals.real.std(ddof=1), vals.imag.std(ddof=1)]) / math.sqrt(n)
        th = complex(op.charpoly(conv.N, conv, z, ens.tau_final))
        dev = np.abs([mean.real - th.real, mean.imag - th.imag])
        with np.errstate(divide="ignore", invalid="ignore"):
            zsc = float(np.max(np.where(se > 0, dev / se, np.where(dev > 1e-12, np.inf, 0.0))))
        rows.append((z.real, z.imag, mean.real, mean.imag, se[0], se[1], th.real, th.imag, zsc))
        checks.append(Check(f"charpoly z={z}", zsc, "<= 3 stderr", zsc <= 3))
    f = write_csv(outdir / "charpoly.csv",
                  ["re_z", "im_z", "mc_re", "mc_im", "stderr_re", "stderr_im", "theory_re", "theory_im", "max_z_score"],
                  rows)
    return [f], checks


def _exp_edge_soft(cfg, outdir, workers):
    p = an.SpectralParams(float(cfg.get("r")), float(cfg.get("tau")))
    ns = list(cfg.get("N-list"))
    s_grid = sf.SOFT_S_GRID if cfg.get("s-grid") is None else np.asarray(cfg.get("s-grid"), dtype=float)
    e = sf.soft_edge_params(p, "right")
    conv = op.PolyParams(0, p.r)
    rows = []
    for N in ns:
        for s in s_grid:
            f = op.cole_hopf(N, conv, e.z_edge + N ** (-2.0 / 3.0) * s, p.tau).f
            rows.append((N, s, f.real, sf.soft_edge_prediction(s, N, p)))
    errs = [sf.soft_edge_error(N, p, s_grid=s_grid) for N in ns]
    chi_errs = [sf.soft_edge_error(N, p, s_grid=s_grid, chi_level=True) for N in ns]
    expo = sf.decay_exponent(ns, errs)
    files = [write_csv(outdir / "profile.csv", ["N", "s", "f_N", "prediction"], rows),
             write_csv(outdir / "convergence.csv", ["N", "E", "E_chi"], zip(ns, errs, chi_errs))]
    dec = all(a > b for a, b in zip(errs, errs[1:]))
    layer = max(sf.airy_layer_residual(s, zs) for zs in (1.0, 16.0, 100.0)
                for s in np.linspace(-5, 3, 81))
    return files, [Check("E(N) strictly decreasing", float(dec), "true", dec),
                   Check("E(N) decay exponent", expo, "in [0.2, 0.6]", 0.2 <= expo <= 0.6),
                   Check("Airy layer residual", layer, "< 1e-8", layer < 1e-8)]


def _exp_edge_hard(cfg, outdir, workers):
    nu, tau = cfg.get("nu"), float(cfg.get("tau"))
    ns = list(cfg.get("N-list"))
    s_grid = sf.HARD_S_GRID if cfg.get("s-grid") is None else np.asarray(cfg.get("s-grid"), dtype=float)
    conv = op.PolyParams(nu, 1.0)
    rows = []
    for N in ns:
        for s in s_grid:
            f = op.cole_hopf(N, conv, s / N ** 2, tau).f
            rows.append((N, s, ((f - 1 / (2 * tau)) / N).real, sf.hard_edge_chi(s, nu, tau)))
    errs = [sf.hard_edge_error(N, nu, tau, s_grid) for N in ns]
    pole = sf.hard_edge_pole(nu, tau)
    files = [write_csv(outdir / "profile.csv", ["N", "s", "chi_N", "chi_prediction"], rows),
             write_csv(outdir / "convergence.csv", ["N", "E"], zip(ns, errs)),
             write_csv(outdir / "pole.csv", ["nu", "tau", "s_pole"], [(nu, tau, pole)])]
    dec = all(a > b for a, b in zip(errs, errs[1:]))
    checks = [Check("E~(N) strictly decreasing", float(dec), "true", dec)]
    if nu == 0:
        ref = 2.404825557695773 ** 2 * tau / 4
        checks.append(Check("hard-edge pole location", abs(pole - ref), "<= 1e-6", abs(pole - ref) <= 1e-6))
    layer = max(sf.bessel_layer_residual(s, n, t) for n in (0, 1, 2, 4) for t in (0.5, 1.0, 2.0)
                for s in np.linspace(0.05, 4, 80) if _off_bessel_zero(s, n, t))
    checks.append(Check("Bessel layer residual", layer, "< 1e-8", layer < 1e-8))
    return files, checks


def _off_bessel_zero(s, nu, tau, floor=0.05):
    # residual grids skip points where J_nu(2 sqrt(s/tau)) is close to a zero
    return abs(sf.bessel_j(nu, 2 * math.sqrt(s / tau))) > floor


def export_characteristics(p: an.SpectralParams, z0_grid, outdir, n_samples: int = 33):
    """characteristics.csv (one row per sample, warning rows for excluded z0) and shocks.csv."""
    outdir = Path(outdir)
    rows = []
    worst = 0.0
    for z0 in z0_grid:
        z0 = complex(z0)
        try:
            line = an.trace_characteristic(z0, p, n_samples)
        except DomainError as exc:
            rows.append((z0.real, z0.imag, "nan", "nan", "nan", "nan", "nan", "nan", f"skipped: {exc}"))
            continue
        for t, z, G in zip(line.taus, line.z, line.G):
            q = an.SpectralParams(p.r, t) if t > 0 else None
            res = abs(z - 1 / G) if q is None else an.implicit_residual(z, G, q)
            worst = max(worst, res)
            rows.append((z0.real, z0.imag, t, z.real, z.imag, G.real, G.imag, res, "ok"))
    left, right = an.find_shocks(p)
    f1 = write_csv(outdir / "characteristics.csv",
                   ["re_z0", "im_z0", "tau", "re_z", "im_z", "re_G", "im_G", "implicit_residual", "status"], rows)
    f2 = write_csv(outdir / "shocks.csv", ["side", "z0c", "zc"],
                   [(s.side, s.z0c, s.zc) for s in (left, right)])
    return [f1, f2], worst


def _default_z0_grid(p):
    root = math.sqrt(p.r) * p.tau
    real = sorted({-2 * root, -root, -0.5 * root, 0.5 * root, root, 2 * root, 3 * root})
    cplx = [complex(x, y) for x in (-1.0, 0.5, 2.0) for y in (-0.5, 0.5)]
    return [complex(x) for x in real] + cplx


def _exp_characteristics(cfg, outdir, workers):
    p = an.SpectralParams(float(cfg.get("r")), float(cfg.get("tau")))
    grid = _complex_grid(cfg.get("z0-grid"), _default_z0_grid(p))
    files, worst = export_characteristics(p, grid, outdir, cfg.get("samples"))
    left, right = an.find_shocks(p)
    edges = an.spectrum_edges(p)
    same = (left.zc, right.zc) == edges
    return files, [Check("implicit residual along characteristics", worst, "< 1e-12", worst < 1e-12),
                   Check("caustics at spectral edges", float(same), "exact", same)]


def _default_rt_grid(p):
    zl, zr = an.spectrum_edges(p)
    rad = 1.5 * zr + 1
    ang = np.linspace(0, 2 * np.pi, 80, endpoint=False) + 0.05
    circle = [complex(0.5 * (zl + zr) + rad * math.cos(a), rad * math.sin(a)) for a in ang]
    real = [zr + 0.5 + k for k in range(10)] + [-0.5 - k for k in range(10)]
    return circle + [complex(x) for x in real]


def _exp_rtransform(cfg, outdir, workers):
    p = an.SpectralParams(float(cfg.get("r")), float(cfg.get("tau")))
    grid = _complex_grid(cfg.get("z-grid"), _default_rt_grid(p))
    rows = []
    worst = 0.0
    for z in grid:
        G = complex(an.resolvent_wishart(z, p))
        R = complex(an.r_transform(G, p))
        res = abs(R + 1 / G - z)
        worst = max(worst, res)
        rows.append((z.real, z.imag, G.real, G.imag, R.real, R.imag, res))
    f = write_csv(outdir / "rtransform.csv", ["re_z", "im_z", "re_G", "im_G", "re_R", "im_R", "residual"], rows)
    return [f], [Check("R(G(z)) + 1/G(z) - z", worst, "< 1e-12", worst < 1e-12)]


def _exp_sde_check(cfg, outdir, workers):
    # the matrix path is exact in law for any step; the SDE needs a fine one
    ens_m = _ensemble(cfg, 1.0)
    ens_s = _ensemble(cfg, 1e-4)
    a = sample_spectra(ens_m, "matrix-path", workers=workers).moments(4)
    b = sample_spectra(ens_s, "eigen-sde", workers=workers).moments(4)
    n_a, n_b = len(a), len(b)
    rows, checks = [], []
    for k in range(4):
        ma, mb = a[:, k].mean(), b[:, k].mean()
        se = math.sqrt(a[:, k].var(ddof=1) / n_a + b[:, k].var(ddof=1) / n_b)
        zsc = abs(ma - mb) / se
        rows.append((k + 1, ma, mb, se, zsc))
        checks.append(Check(f"moment {k + 1} matrix-path vs eigen-sde", zsc, "<= 3 combined stderr", zsc <= 3))
    f = write_csv(outdir / "moments.csv", ["k", "matrix_path", "eigen_sde", "combined_stderr", "z_score"], rows)
    return [f], checks


RUNNERS = {
    "density": _exp_density,
    "charpoly": _exp_charpoly,
    "edge-soft": _exp_edge_soft,
    "edge-hard": _exp_edge_hard,
    "characteristics": _exp_characteristics,
    "rtransform": _exp_rtransform,
    "sde-check": _exp_sde_check,
}


# --------------------------------------------------------------------------
# plotting (optional, reads back the CSVs only)
# --------------------------------------------------------------------------


def _plot_csv(path: Path) -> Path | None:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        warnings.warn("matplotlib is not installed; skipping --plot")
        return None
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    numeric = []
    for j in range(len(header)):
        try:
            numeric.append(np.array([float(r[j]) for r in body]))
        except ValueError:
            numeric.append(None)
    cols = [j for j, c in enumerate(numeric) if c is not None]
    if len(cols) < 2 or not body:
        return None
    plt.rcParams["svg.hashsalt"] = "wishart-shocks"
    fig, ax = plt.subplots(figsize=(6, 4))
    x = numeric[cols[0]]
    for j in cols[1:]:
        ax.plot(x, numeric[j], label=header[j])
    ax.set_xlabel(header[cols[0]])
    ax.legend()
    out = path.with_suffix(".svg")
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------


def _version() -> str:
    try:
        from importlib.metadata import version
        return version("wishart-shocks")
    except Exception:
        return "unknown"


def _write_manifest(cfg: RunConfig, outdir: Path, checks, started, ended):
    files = sorted(p for p in outdir.iterdir() if p.is_file() and p.name != "manifest.json")
    manifest = {
        "config": cfg.echo(),
        "seed": cfg.params.get("seed"),
        "start": started,
        "end": ended,
        "library_version": _version(),
        "passed": all(c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
        "files": {p.name: _sha256(p) for p in files},
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return files


def _iso(t):
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def run(cfg: RunConfig, *, plot: bool = False, workers: int | None = None) -> RunResult:
    """Execute one experiment (or all of them for ``validate-all``)."""
    root = Path(cfg.get("outdir"))
    if cfg.experiment == "validate-all":
        results = []
        for name in EXPERIMENTS[:-1]:
            sub = RunConfig.build(name, {"outdir": str(root)})
            results.append(run(sub, plot=plot, workers=workers))
        outdir = root / "validate-all"
        outdir.mkdir(parents=True, exist_ok=True)
        started = time.time()
        checks = [Check(f"{r.experiment}: {c.name}", c.value, c.tolerance, c.passed)
                  for r in results for c in r.checks]
        write_csv(outdir / "summary.csv", ["experiment", "check", "value", "tolerance", "passed"],
                  [(r.experiment, c.name, c.value, c.tolerance, c.passed) for r in results for c in r.checks])
        files = _write_manifest(cfg, outdir, checks, _iso(started), _iso(time.time()))
        return RunResult(cfg.experiment, outdir, checks, files)
    outdir = root / cfg.experiment
    outdir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    files, checks = RUNNERS[cfg.experiment](cfg, outdir, workers)
    if plot:
        for f in list(files):
            svg = _plot_csv(f)
            if svg is not None:
                files.append(svg)
    files = _write_manifest(cfg, outdir, checks, _iso(started), _iso(time.time()))
    return RunResult(cfg.experiment, outdir, checks, files)


def _parse_set(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def _parser():
    ap = argparse.ArgumentParser(prog="wishart-shocks", description=__doc__.splitlines()[0])
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", help="flat JSON config file")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--outdir")
    ap.add_argument("--plot", action="store_true", help="write SVG plots derived from the CSVs")
    ap.add_argument("--workers", type=int, help="worker threads (overrides WISHART_THREADS; 0 = auto)")
    ap.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one parameter (JSON value)")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    try:
        file_params = load_config(args.config) if args.config else {}
        overrides = _parse_set(args.set)
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.outdir is not None:
            overrides["outdir"] = args.outdir
        cfg = RunConfig.build(args.experiment, file_params, overrides)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    result = run(cfg, plot=args.plot, workers=args.workers)
    for c in result.checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.value!r} ({c.tolerance})")
    return result.status


if __name__ == "__main__":
    sys.exit(main())
