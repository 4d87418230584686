"""Run configuration, stage orchestration and CSV/SVG/manifest output."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from math import comb
from pathlib import Path

import numpy as np

from . import __version__, plots
from .cache import atomic_write, cache_load, cache_store, default_cache_dir
from .errors import CacheMiss, ConfigInvalid, DimensionGuard, EthGammaError, MissingData
from .eth import ETHConfig, chaos_report, extract_f_omega, fit_gamma, ipr_all
from .hilbert import FERMION, SPIN, enumerate_sector
from .linalg import eigh, to_eigenbasis
from .models import (XXZParams, build_gue, build_syk_hamiltonian, build_xxz_hamiltonian,
                     occupation, sample_syk_couplings, spin_z)
from .thermo import mean_energy, thermo_curve

log = logging.getLogger(__name__)

MODELS = ("syk", "xxz", "gue")
MAX_DIM = 6000
ENTROPY_ESTIMATOR = "canonical"


@dataclass
class RunConfig:
    model: str
    L: int
    beta_eff_list: list = field(default_factory=lambda: [1.0])
    sector_charge: int | None = None
    seed: int = 1
    J_xy: float = 1.0
    J_z: float = 0.5
    J_z_prime: float = 1.0
    observable_site: int = 0
    window_frac: float = 0.05
    n_bins: int = 60
    N_min: int = 20
    omega_min: float | None = None
    omega_cap_frac: float = 0.75
    lo_frac: float = 0.35
    hi_frac: float = 1.0
    thermo_beta_max: float | None = None
    thermo_n_beta: int = 101
    cache: bool = True
    out_dir: str = "out"
    workers: int = 1

    REQUIRED = ("model", "L", "beta_eff_list")

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigInvalid("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {', '.join(unknown)}")
        missing = [k for k in cls.REQUIRED if k not in raw]
        if missing:
            raise ConfigInvalid(f"missing config keys: {', '.join(missing)}")
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigInvalid(f"model must be one of {MODELS}, got {self.model!r}")
        if not isinstance(self.L, int) or isinstance(self.L, bool):
            raise ConfigInvalid("L must be an integer")
        try:
            self.beta_eff_list = [float(b) for b in self.beta_eff_list]
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"beta_eff_list must be a list of numbers: {exc}") from exc
        if not self.beta_eff_list or not all(map(math.isfinite, self.beta_eff_list)):
            raise ConfigInvalid("beta_eff_list must be a non-empty list of finite numbers")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigInvalid("seed must be a non-negative integer")
        if not (0 < self.window_frac <= 1 and self.n_bins >= 1 and self.N_min >= 1
                and 0 <= self.lo_frac < self.hi_frac and self.workers >= 1):
            raise ConfigInvalid("invalid eth settings")
        if self.model == "gue":
            if self.L < 2:
                raise ConfigInvalid("gue dimension L must be >= 2")
        elif self.model == "syk" and not 4 <= self.L <= 20:
            raise ConfigInvalid("syk needs 4 <= L <= 20")
        elif not 2 <= self.L <= 20:
            raise ConfigInvalid("L must lie in [2, 20]")
        if self.model != "gue" and not 0 <= self.observable_site < self.L:
            raise ConfigInvalid("observable_site outside the chain")

    @property
    def charge(self) -> int:
        if self.sector_charge is not None:
            return int(self.sector_charge)
        return self.L // 2 if self.model == "syk" else self.L % 2

    def dimension(self) -> int:
        if self.model == "gue":
            return self.L
        n_set = self.charge if self.model == "syk" else (self.L + self.charge) // 2
        if self.model == "xxz" and (self.L + self.charge) % 2:
            return 0
        return comb(self.L, n_set) if 0 <= n_set <= self.L else 0

    def eth(self) -> ETHConfig:
        return ETHConfig(self.window_frac, self.n_bins, self.N_min, self.omega_min,
                         self.omega_cap_frac, self.lo_frac, self.hi_frac)

    def physics_key(self) -> dict:
        key = dict(model=self.model, L=self.L, D=self.dimension())
        if self.model == "syk":
            key.update(seed=self.seed, sector=self.charge, observable=f"occupation:{self.observable_site}")
        elif self.model == "xxz":
            key.update(sector=self.charge, J_xy=self.J_xy, J_z=self.J_z, J_z_prime=self.J_z_prime,
                       observable=f"spin_z:{self.observable_site}")
        else:
            key.update(seed=self.seed, observable="staggered")
        return key


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigInvalid(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(raw)


@dataclass
class System:
    energies: np.ndarray
    operator: np.ndarray
    from_cache: bool = False


def staggered_observable(dim: int) -> np.ndarray:
    return np.where(np.arange(dim) % 2 == 0, 0.5, -0.5)


def diagonalize(cfg: RunConfig) -> System:
    if cfg.model == "syk":
        basis = enumerate_sector(cfg.L, cfg.charge, FERMION)
        H = build_syk_hamiltonian(sample_syk_couplings(cfg.L, cfg.seed), basis)
        diag = occupation(basis, cfg.observable_site)
    elif cfg.model == "xxz":
        basis = enumerate_sector(cfg.L, cfg.charge, SPIN)
        H = build_xxz_hamiltonian(XXZParams(cfg.L, cfg.J_xy, cfg.J_z, cfg.J_z_prime), basis)
        diag = spin_z(basis, cfg.observable_site)
    else:
        H = build_gue(cfg.L, cfg.seed)
        diag = staggered_observable(cfg.L)
    dec = eigh(H)
    return System(dec.eigenvalues, to_eigenbasis(diag, dec.eigenvectors))


def prepare(cfg: RunConfig, cache_dir=None) -> System:
    d = cfg.dimension()
    if d == 0:
        raise ConfigInvalid(f"sector {cfg.charge} is empty for L={cfg.L}")
    if d > MAX_DIM:
        raise DimensionGuard(f"sector dimension {d} exceeds {MAX_DIM}")
    if not cfg.cache:
        return diagonalize(cfg)
    directory = cache_dir if cache_dir is not None else default_cache_dir()
    key = cfg.physics_key()
    try:
        entry = cache_load(key, directory)
        log.info("cache hit for %s", key)
        return System(entry.eigenvalues, entry.operator, from_cache=True)
    except CacheMiss:
        pass
    system = diagonalize(cfg)
    cache_store(key, system.energies, system.operator, directory)
    return system


# ---------------------------------------------------------------------------
# CSV helpers

def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else _num(v) for v in row])
    atomic_write(path, buf.getvalue().encode())


def read_csv(path: Path) -> dict:
    """Columns keyed by name with the ``[unit]`` suffix stripped."""
    if not path.exists():
        raise MissingData(f"{path} not found")
    with path.open() as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise MissingData(f"{path} has no data rows")
    names = [h.split("[")[0] for h in rows[0]]
    cols = {n: [r[k] for r in rows[1:]] for k, n in enumerate(names)}
    return cols


def _floats(values) -> np.ndarray:
    return np.array([float(v) for v in values])


SPECTRUM_HEADER = ["index", "energy[J]"]
THERMO_HEADER = ["beta[1/J]", "logZ[1]", "E[J]", "S[1]"]
FOMEGA_HEADER = ["omega_center[J]", "count", "mean_abs2[1]", "f[1]", "neg_log_f[1]", "f_stderr[1]"]
GAMMA_HEADER = ["beta_eff[1/J]", "E_target[J]", "S[1]", "gamma[1/J]", "stderr[1/J]", "r_squared[1]",
                "gamma_over_beta[1]", "bound_verdict", "lambda_implied[J]", "intercept[1]",
                "omega_lo[J]", "omega_hi[J]"]
IPR_HEADER = ["n", "E_n[J]", "ipr[1]"]


# ---------------------------------------------------------------------------
# stages

def _context(beta, exc):
    err = type(exc)(f"beta_eff={beta:g}: {exc}")
    return err


def stage_spectrum(cfg, system, out: Path) -> list[Path]:
    path = out / "spectrum.csv"
    write_csv(path, SPECTRUM_HEADER, enumerate(system.energies))
    return [path]


def thermo_betas(cfg) -> np.ndarray:
    top = cfg.thermo_beta_max
    if top is None:
        top = max(1.0, 2 * max(abs(b) for b in cfg.beta_eff_list))
    return np.linspace(-top, top, cfg.thermo_n_beta)


def stage_thermo(cfg, system, out: Path) -> list[Path]:
    curve = thermo_curve(system.energies, thermo_betas(cfg))
    path = out / "thermo.csv"
    write_csv(path, THERMO_HEADER, zip(curve.betas, curve.log_z, curve.energy, curve.entropy))
    return [path]


def compute_tables(cfg, system) -> list:
    config = cfg.eth()

    def one(beta):
        try:
            return extract_f_omega(system.energies, system.operator,
                                   mean_energy(system.energies, beta), config)
        except EthGammaError as exc:
            raise _context(beta, exc) from exc

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(one, cfg.beta_eff_list))
    return [one(b) for b in cfg.beta_eff_list]


def stage_fomega(cfg, tables, out: Path) -> list[Path]:
    paths = []
    for k, t in enumerate(tables):
        path = out / f"fomega_{k}.csv"
        write_csv(path, FOMEGA_HEADER,
                  zip(t.omega_center, t.count, t.mean_abs2, t.f, t.neg_log_f, t.f_stderr))
        paths.append(path)
    return paths


def compute_reports(cfg, tables) -> list:
    reports = []
    for beta, t in zip(cfg.beta_eff_list, tables):
        try:
            reports.append(chaos_report(t, fit_gamma(t, cfg.lo_frac, cfg.hi_frac)))
        except EthGammaError as exc:
            raise _context(beta, exc) from exc
    return reports


def stage_gamma(cfg, reports, out: Path) -> list[Path]:
    rows = []
    for r in reports:
        rows.append([r.beta_eff, r.E_target, r.S, r.gamma, r.fit.stderr_gamma, r.fit.r_squared,
                     r.gamma_over_beta, "satisfied" if r.bound_satisfied else "violated",
                     r.lambda_implied, r.fit.intercept, *r.fit.fit_window])
    path = out / "gamma.csv"
    write_csv(path, GAMMA_HEADER, rows)
    return [path]


def stage_ipr(cfg, system, out: Path) -> list[Path]:
    path = out / "ipr.csv"
    write_csv(path, IPR_HEADER, zip(range(len(system.energies)), system.energies,
                                     ipr_all(system.operator)))
    return [path]


def emit_plots(out_dir, model: str = "") -> list[Path]:
    """Render the four SVG figures from the CSVs present in ``out_dir``."""
    out = Path(out_dir)
    spec = read_csv(out / "spectrum.csv")
    thermo = read_csv(out / "thermo.csv")
    gamma = read_csv(out / "gamma.csv")
    fo_paths = sorted(out.glob("fomega_*.csv"), key=lambda p: int(p.stem.split("_")[1]))
    if not fo_paths:
        raise MissingData(f"no fomega_*.csv in {out}")
    betas = _floats(gamma["beta_eff"])
    if len(fo_paths) != len(betas):
        raise MissingData("fomega files and gamma.csv rows disagree")
    curves, fits = [], []
    for k, p in enumerate(fo_paths):
        fo = read_csv(p)
        curves.append((betas[k], _floats(fo["omega_center"]), _floats(fo["neg_log_f"])))
        fits.append((float(gamma["gamma"][k]), float(gamma["intercept"][k]),
                     float(gamma["omega_lo"][k]), float(gamma["omega_hi"][k])))
    figs = {
        "spectrum.svg": plots.spectrum_figure(_floats(spec["index"]), _floats(spec["energy"]), model),
        "entropy.svg": plots.entropy_figure(_floats(thermo["beta"]), _floats(thermo["S"]), model),
        "fomega.svg": plots.fomega_figure(curves, fits, model),
        "gamma_over_beta.svg": plots.gamma_figure(betas, _floats(gamma["gamma_over_beta"]), model),
    }
    paths = []
    for name, fig in figs.items():
        atomic_write(out / name, fig.render().encode())
        paths.append(out / name)
    return paths


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(cfg, paths, out: Path) -> Path:
    manifest = dict(
        config=asdict(cfg),
        physics_key=cfg.physics_key(),
        entropy_estimator=ENTROPY_ESTIMATOR,
        versions=dict(eth_gamma=__version__, numpy=np.__version__, python=platform.python_version()),
        files={p.name: sha256_file(p) for p in sorted(paths, key=lambda p: p.name)},
    )
    path = out / "manifest.json"
    atomic_write(path, (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode())
    return path


STAGES = ("spectrum", "thermo", "fomega", "gamma", "ipr", "plot", "pipeline")


def run_stage(stage: str, cfg: RunConfig, out_dir=None, cache_dir=None) -> list[Path]:
    """Run one CLI stage (``pipeline`` runs all of them) and return written files."""
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if stage == "plot":
        return emit_plots(out, cfg.model)
    if stage not in STAGES:
        raise ConfigInvalid(f"unknown stage {stage!r}")
    system = prepare(cfg, cache_dir)
    written = []
    if stage in ("spectrum", "pipeline"):
        written += stage_spectrum(cfg, system, out)
    if stage in ("thermo", "pipeline"):
        written += stage_thermo(cfg, system, out)
    if stage in ("fomega", "gamma", "pipeline"):
        tables = compute_tables(cfg, system)
        written += stage_fomega(cfg, tables, out)
        if stage in ("gamma", "pipeline"):
            written += stage_gamma(cfg, compute_reports(cfg, tables), out)
    if stage in ("ipr", "pipeline"):
        written += stage_ipr(cfg, system, out)
    if stage == "pipeline":
        written += emit_plots(out, cfg.model)
        written.append(write_manifest(cfg, written, out))
    return written


def run_pipeline(cfg: RunConfig, out_dir=None, cache_dir=None) -> list[Path]:
    return run_stage("pipeline", cfg, out_dir, cache_dir)
