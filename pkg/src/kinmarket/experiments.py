"""Experiment configurations, the Test 1-3 presets and the CSV-producing runner."""

from __future__ import annotations

import configparser
import csv
import logging
import math
import shutil
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from kinmarket.analysis import gini, histogram, ks_distance, lorenz_curve, sample_moments
from kinmarket.core import Constant, ExponentialDecay, ModelParams
from kinmarket.engine import SimulationRecord, run_simulation
from kinmarket.errors import ConfigError, UnknownPreset
from kinmarket.fokker_planck import (
    FpParams,
    LognormalParams,
    integrate_fp_moments,
    lognormal_from_moments,
    lognormal_pdf,
    self_similar_rescale,
)
from kinmarket.price import integrate_price_ode

log = logging.getLogger(__name__)

MODES = ("simulate", "price-ode", "fokker-planck", "compare")
PRESETS = ("test1", "test2", "test3")

_SECTIONS = {
    "model": ("r", "D", "zeta", "eta_rel", "eta_tracks_price", "n_pc", "N", "steps"),
    "curve": ("curve", "C", "C1", "C2"),
    "initial": ("S0", "bonds0"),
    "run": ("mode", "seeds", "snapshot_times", "dt", "out", "workers"),
}


@dataclass
class ExperimentConfig:
    """One experiment. ``eta_rel`` is the return-noise std as a fraction of ``S0``."""

    r: float = 0.01
    D: float = 0.015
    zeta: float = 0.2
    eta_rel: float = 0.3
    eta_tracks_price: bool = False
    n_pc: float = 10.0
    N: int = 1000
    steps: int = 400
    curve: str = "constant"
    C: float = 0.5
    C1: float = 0.2
    C2: float = 0.0
    S0: float = 50.0
    bonds0: float = 500.0
    mode: str = "compare"
    seeds: tuple[int, ...] = tuple(range(20))
    snapshot_times: tuple[int, ...] = (400,)
    dt: float = 0.5
    out: str = "results"
    workers: int = 1

    def __post_init__(self):
        self.seeds = tuple(int(s) for s in self.seeds)
        self.snapshot_times = tuple(sorted({int(t) for t in self.snapshot_times}))
        self.validate()

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if any(t < 0 or t > self.steps for t in self.snapshot_times):
            raise ConfigError("snapshot_times must lie in [0, steps]")
        if self.curve not in ("constant", "exponential"):
            raise ConfigError(f"unknown curve {self.curve!r}")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.eta_rel < 0:
            raise ConfigError("eta_rel must be non-negative")
        self.demand_curve()
        self.model_params(self.seeds[0])

    def demand_curve(self):
        if self.curve == "constant":
            return Constant(self.C)
        return ExponentialDecay(self.C1, self.C2)

    @property
    def sigma(self) -> float:
        return self.eta_rel * self.S0

    def model_params(self, seed: int) -> ModelParams:
        return ModelParams(
            r=self.r, D=self.D, zeta=self.zeta, sigma=self.sigma, n_pc=self.n_pc,
            N=self.N, steps=self.steps, seed=seed, eta_tracks_price=self.eta_tracks_price,
        )

    def fp_params(self) -> FpParams:
        if not self.r > 0:
            raise ConfigError("the Fokker-Planck limit needs r > 0")
        return FpParams.from_rates(
            self.r, self.D, self.sigma, self.zeta, self.demand_curve(), self.n_pc,
            nu_ref_price=self.S0 if self.eta_tracks_price else None,
        )

    @property
    def w0(self) -> float:
        return self.n_pc * self.S0 + self.bonds0


def preset(name: str) -> ExperimentConfig:
    """Parameter sets of the three reference experiments."""
    base = dict(r=0.01, D=0.015, n_pc=10.0, N=1000, S0=50.0, bonds0=500.0)
    if name == "test1":
        return ExperimentConfig(**base, zeta=0.2, eta_rel=0.3, steps=400, curve="constant",
                                C=0.5, snapshot_times=(400,), out="results/test1")
    if name == "test2":
        c = ExponentialDecay.anchored(0.2, 50.0, 0.5)
        return ExperimentConfig(**base, zeta=0.2, eta_rel=0.3, steps=400, curve="exponential",
                                C1=c.C1, C2=c.C2, snapshot_times=(400,), out="results/test2")
    if name == "test3":
        base.update(r=0.001, D=0.0015)
        # return noise quoted relative to the running price (see README)
        return ExperimentConfig(**base, zeta=0.05, eta_rel=0.05, eta_tracks_price=True,
                                steps=500, curve="constant", C=0.5,
                                snapshot_times=(50, 200, 500), out="results/test3")
    raise UnknownPreset(f"unknown preset {name!r}; expected one of {PRESETS}")


# ---------------------------------------------------------------- config files

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def _parse(name: str, raw: str, kind):
    raw = raw.strip()
    try:
        if kind is bool or kind == "bool":
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if name in ("seeds", "snapshot_times"):
            return parse_int_list(raw)
        if name in ("N", "steps", "workers"):
            return int(raw)
        if name in ("curve", "mode", "out"):
            return raw
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def parse_int_list(raw: str) -> tuple[int, ...]:
    """``"0,1,5"`` or a range ``"0-19"``."""
    out = []
    for part in raw.replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part[0] + part[1:].split("-", 1)[0], part[1:].split("-", 1)[1]
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def to_ini(cfg: ExperimentConfig) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    values = asdict(cfg)
    for section, keys in _SECTIONS.items():
        cp[section] = {k: _fmt(values[k]) for k in keys}
    lines = []
    for section in cp.sections():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {v}" for k, v in cp[section].items())
        lines.append("")
    return "\n".join(lines)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Read a ``key = value`` file with section headers over ``base`` (or defaults)."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    updates = {}
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp[section].items():
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            kind = "bool" if types[key] in (bool, "bool") else types[key]
            updates[key] = _parse(key, raw, kind)
    try:
        return replace(base or ExperimentConfig(), **updates)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# ------------------------------------------------------------------ CSV output

def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(float(v)) if isinstance(v, (float, np.floating)) else v
                             for v in row])


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {h: np.array([float(r[i]) for r in body]) for i, h in enumerate(header)}


# ---------------------------------------------------------------------- runner

def _simulate_seed(args):
    cfg, seed = args
    return run_simulation(cfg.model_params(seed), cfg.demand_curve(), cfg.S0, cfg.bonds0,
                          snapshot_times=cfg.snapshot_times, workers=cfg.workers)


def simulate_seeds(cfg: ExperimentConfig, jobs: int = 1) -> list[SimulationRecord]:
    """One simulation per seed, returned in seed order."""
    tasks = [(cfg, s) for s in cfg.seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_simulate_seed, tasks))
    return [_simulate_seed(t) for t in tasks]


_TS_COLS = ("S", "mean_w", "second_w", "mean_gamma")


def _write_simulation(out: Path, records: list[SimulationRecord], cfg: ExperimentConfig):
    for rec in records:
        cols = [rec.column(c) for c in _TS_COLS]
        write_csv(out / f"timeseries_seed{rec.params.seed}.csv", ("t",) + _TS_COLS,
                  zip(rec.times, *cols))
    stacked = {c: np.mean([rec.column(c) for rec in records], axis=0) for c in _TS_COLS}
    write_csv(out / "timeseries.csv", ("t",) + _TS_COLS,
              zip(records[0].times, *(stacked[c] for c in _TS_COLS)))
    for t in cfg.snapshot_times:
        rows = ((rec.params.seed, i, float(w)) for rec in records
                for i, w in enumerate(rec.snapshots[t]))
        write_csv(out / f"wealth_snapshot_{t}.csv", ("seed", "agent", "wealth"), rows)


def _write_price_ode(out: Path, cfg: ExperimentConfig):
    ts, S = integrate_price_ode(cfg.demand_curve(), cfg.S0, cfg.r, cfg.D, cfg.steps, cfg.dt)
    write_csv(out / "ode_timeseries.csv", ("t", "S"), zip(ts, S))


def fp_trajectory(cfg: ExperimentConfig):
    """Moment ODEs from the uniform initial state, output on the ``dt`` grid."""
    w0 = cfg.w0
    return integrate_fp_moments(cfg.fp_params(), w0, w0 * w0, cfg.r * cfg.steps, cfg.r * cfg.dt)


def _lognormal_grid(p: LognormalParams, n: int = 200):
    sd = math.sqrt(p.b)
    return np.exp(np.linspace(p.log_mean - 6 * sd, p.log_mean + 6 * sd, n))


def _write_fokker_planck(out: Path, cfg: ExperimentConfig, traj):
    a, b = traj.a, traj.b
    write_csv(out / "fp_timeseries.csv", ("tau", "S", "mean_w", "second_w", "A", "B", "a", "b"),
              zip(traj.tau, traj.S, traj.mean_w, traj.second_w, traj.A, traj.B, a, b))
    for t in cfg.snapshot_times:
        i = traj.at(cfg.r * t)
        if not b[i] > 0:
            continue  # point mass at t = 0
        p = LognormalParams(a[i], b[i])
        p_v = LognormalParams(math.log(traj.mean_w[0]), b[i])
        w = _lognormal_grid(p)
        v = w * traj.mean_w[0] / traj.mean_w[i]
        write_csv(out / f"lognormal_curve_{t}.csv", ("w", "density", "v", "density_rescaled"),
                  zip(w, lognormal_pdf(p, w), v, lognormal_pdf(p_v, v)))


def snapshot_metrics(cfg: ExperimentConfig, records, traj, t: int) -> dict:
    """Seed-averaged diagnostics of the rescaled wealth sample at step ``t``."""
    i = traj.at(cfg.r * t)
    b_fp = float(traj.b[i])
    w00 = traj.mean_w[0]
    ginis, kss, a_fit, b_fit = [], [], [], []
    for rec in records:
        w = rec.snapshots[t]
        ginis.append(gini(w))
        v = self_similar_rescale(w, w00, np.mean(w))
        m1, m2 = sample_moments(v)
        if m2 > m1 * m1 * (1 + 1e-14):
            fit = lognormal_from_moments(m1, m2)
            a_fit.append(fit.a)
            b_fit.append(fit.b)
        if b_fp > 0 and np.all(v > 0):
            kss.append(ks_distance(v, LognormalParams(math.log(w00), b_fp)))
    n = len(records)

    def mean_se(xs):
        if not xs:
            return math.nan, math.nan
        xs = np.asarray(xs)
        return float(xs.mean()), float(xs.std(ddof=1) / math.sqrt(xs.size)) if xs.size > 1 else 0.0

    g, g_se = mean_se(ginis)
    ks, ks_se = mean_se(kss)
    return dict(t=t, tau=cfg.r * t, gini=g, gini_se=g_se, ks=ks, ks_se=ks_se,
                a_fit=mean_se(a_fit)[0], b_fit=mean_se(b_fit)[0], b_fp=b_fp, seeds=n)


_METRIC_COLS = ("t", "tau", "gini", "gini_se", "ks", "ks_se", "a_fit", "b_fit", "b_fp", "seeds")


def _write_compare(out: Path, cfg: ExperimentConfig, records, traj):
    rows = []
    for t in cfg.snapshot_times:
        m = snapshot_metrics(cfg, records, traj, t)
        rows.append([m[c] for c in _METRIC_COLS])
        curves = [lorenz_curve(rec.snapshots[t], 101) for rec in records]
        write_csv(out / f"lorenz_{t}.csv", ("F", "L"),
                  zip(curves[0].F, np.mean([c.L for c in curves], axis=0)))
        pooled = np.concatenate([
            self_similar_rescale(rec.snapshots[t], traj.mean_w[0], np.mean(rec.snapshots[t]))
            for rec in records
        ])
        if np.all(pooled > 0):
            centers, dens, _ = histogram(pooled, 50, log_axis=True)
            i = traj.at(cfg.r * t)
            if traj.b[i] > 0:
                fp_dens = lognormal_pdf(LognormalParams(math.log(traj.mean_w[0]), traj.b[i]), centers)
            else:
                fp_dens = np.full(centers.shape, math.nan)
            write_csv(out / f"histogram_{t}.csv", ("bin_center", "density", "density_fp"),
                      zip(centers, dens, fp_dens))
    write_csv(out / "metrics.csv", _METRIC_COLS, rows)


def run(cfg: ExperimentConfig, out=None, jobs: int = 1) -> Path:
    """Produce every output file of ``cfg.mode`` in ``out``.

    Files are written to a staging directory and moved in only on success,
    so a failed run leaves nothing behind.
    """
    cfg.validate()
    out = Path(out if out is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=".staging-", dir=out))
    try:
        (stage / "params.echo").write_text(to_ini(replace(cfg, out=str(out))))
        records = traj = None
        if cfg.mode in ("simulate", "compare"):
            records = simulate_seeds(cfg, jobs)
            _write_simulation(stage, records, cfg)
        if cfg.mode in ("price-ode", "compare"):
            _write_price_ode(stage, cfg)
        if cfg.mode in ("fokker-planck", "compare"):
            traj = fp_trajectory(cfg)
            _write_fokker_planck(stage, cfg, traj)
        if cfg.mode == "compare":
            _write_compare(stage, cfg, records, traj)
        for f in sorted(stage.iterdir()):
            f.replace(out / f.name)
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    log.info("wrote %s outputs to %s", cfg.mode, out)
    return out


__all__ = [
    "ExperimentConfig",
    "MODES",
    "PRESETS",
    "preset",
    "load_config",
    "to_ini",
    "run",
    "simulate_seeds",
    "fp_trajectory",
    "snapshot_metrics",
    "read_csv",
    "write_csv",
    "parse_int_list",
]
