"""Seeded Monte Carlo experiment runner with CSV emission.

Three modes:

* synthetic: sample a two-block planted partition graph per trial, perturb
  it with the distribution-preserving rewiring, and record the measured
  filter distance plus the bound breakdown for every requested shift
  operator and filter.
* real: perturb a fixed input graph with the count-preserving rewiring,
  reusing the unperturbed graph's eigendecomposition across trials.
* consistency: sample two independent planted partition graphs per trial
  and record the bottom-k drift terms and the normalized-Laplacian drift,
  for downstream rate fitting.

Trials are embarrassingly parallel. Every trial derives its generators from
(master_seed, n, p_re index, trial, phase), so the output is identical for
any worker count; BLAS pools are pinned to one thread inside each trial so
eigensolves are bit-reproducible between serial and pooled execution.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Mapping, Optional, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import GfstabError, ValidationError
from .filters import FilterSpec
from .graph import Graph, is_connected, normalized_laplacian, unnormalized_laplacian
from .random_models import PpmParams, rewire_count_preserving, rewire_sbm, sample_ppm
from .spectral import eigh, spectral_norm, structural_terms
from .stability import ETA_EMPIRICAL, ETA_INTERVAL, stability_bound

MODE_SYNTHETIC = "synthetic"
MODE_REAL = "real"
MODE_CONSISTENCY = "consistency"

GSO_UNNORMALIZED = "unnormalized"
GSO_NORMALIZED = "normalized"
_GSO_ALIASES = {
    "unnormalized": GSO_UNNORMALIZED,
    "unnorm": GSO_UNNORMALIZED,
    "normalized": GSO_NORMALIZED,
    "norm": GSO_NORMALIZED,
}
_GSO_BUILDERS = {
    GSO_UNNORMALIZED: unnormalized_laplacian,
    GSO_NORMALIZED: normalized_laplacian,
}

_PHASE_SAMPLE = 0
_PHASE_PERTURB = 1

# columns kept in memory but never written: timing is not reproducible and
# the emitted CSV must be byte-stable for a fixed config and seed
VOLATILE_COLUMNS = ("wall_time_s",)


def canon_gso(name: str) -> str:
    try:
        return _GSO_ALIASES[name]
    except KeyError:
        raise ValidationError(
            f"unknown shift operator {name!r}; expected one of {sorted(_GSO_ALIASES)}"
        ) from None


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    gso: tuple = (GSO_UNNORMALIZED,)
    filters: Mapping[str, tuple] = None
    n_grid: tuple = ()
    p_re_grid: tuple = ()
    trials: int = 1
    master_seed: int = 0
    k: int = 2
    ppm_alpha: float = 13.0
    ppm_beta: float = 2.0
    ppm_blocks: int = 2
    eta_mode: str = ETA_EMPIRICAL
    edges_path: Optional[str] = None
    communities_path: Optional[str] = None

    def __post_init__(self):
        if self.mode not in (MODE_SYNTHETIC, MODE_REAL, MODE_CONSISTENCY):
            raise ValidationError(f"unknown mode {self.mode!r}")
        gso = tuple(canon_gso(g) for g in (
            (self.gso,) if isinstance(self.gso, str) else self.gso
        ))
        if len(set(gso)) != len(gso) or not gso:
            raise ValidationError("gso list must be nonempty without duplicates")
        object.__setattr__(self, "gso", gso)

        filt = self.filters
        if filt is None:
            filt = {}
        if isinstance(filt, (list, tuple)):
            filt = {g: tuple(filt) for g in gso}
        filt = {canon_gso(g): tuple(fs) for g, fs in filt.items()}
        if self.mode in (MODE_SYNTHETIC, MODE_REAL):
            for g in gso:
                if not filt.get(g):
                    raise ValidationError(f"no filters configured for {g} operator")
        object.__setattr__(self, "filters", filt)

        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "p_re_grid", tuple(float(p) for p in self.p_re_grid))
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if any(not 0.0 <= p <= 1.0 for p in self.p_re_grid):
            raise ValidationError("p_re values must lie in [0, 1]")
        if self.mode in (MODE_SYNTHETIC, MODE_CONSISTENCY):
            if not self.n_grid:
                raise ValidationError(f"{self.mode} mode needs a nonempty n_grid")
            if any(n < 4 for n in self.n_grid):
                raise ValidationError("n_grid values must be >= 4")
            if any(n % self.ppm_blocks for n in self.n_grid):
                raise ValidationError(
                    f"n_grid values must be divisible by {self.ppm_blocks}"
                )
        if self.mode in (MODE_SYNTHETIC, MODE_REAL) and not self.p_re_grid:
            raise ValidationError(f"{self.mode} mode needs a nonempty p_re_grid")
        if self.eta_mode not in (ETA_EMPIRICAL, ETA_INTERVAL):
            raise ValidationError(f"unknown eta mode {self.eta_mode!r}")
        if self.ppm_alpha < 0 or self.ppm_beta < 0:
            raise ValidationError("model coefficients must be nonnegative")

    def ppm_params(self, n: int) -> PpmParams:
        scale = math.log(n) / n
        return PpmParams(n, self.ppm_blocks, self.ppm_alpha * scale, self.ppm_beta * scale)

    _JSON_KEYS = (
        "mode", "gso", "filters", "n_grid", "p_re_grid", "trials",
        "master_seed", "k", "ppm", "dataset", "eta_mode",
    )

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ValidationError("config root must be a JSON object")
        unknown = set(obj) - set(cls._JSON_KEYS)
        if unknown:
            raise ValidationError(f"unknown config keys {sorted(unknown)}")
        if "mode" not in obj:
            raise ValidationError("config is missing 'mode'")
        kwargs = {"mode": obj["mode"]}
        if "gso" in obj:
            kwargs["gso"] = obj["gso"]
        if "filters" in obj:
            raw = obj["filters"]
            if isinstance(raw, list):
                kwargs["filters"] = tuple(FilterSpec.from_dict(d) for d in raw)
            elif isinstance(raw, dict):
                kwargs["filters"] = {
                    g: tuple(FilterSpec.from_dict(d) for d in fs)
                    for g, fs in raw.items()
                }
            else:
                raise ValidationError("'filters' must be a list or a per-gso object")
        for key in ("n_grid", "p_re_grid", "trials", "master_seed", "k", "eta_mode"):
            if key in obj:
                kwargs[key] = obj[key]
        if "ppm" in obj:
            ppm = obj["ppm"]
            extra = set(ppm) - {"alpha", "beta", "blocks"}
            if extra:
                raise ValidationError(f"unknown ppm keys {sorted(extra)}")
            if "alpha" in ppm:
                kwargs["ppm_alpha"] = float(ppm["alpha"])
            if "beta" in ppm:
                kwargs["ppm_beta"] = float(ppm["beta"])
            if "blocks" in ppm:
                kwargs["ppm_blocks"] = int(ppm["blocks"])
        if "dataset" in obj:
            ds = obj["dataset"]
            extra = set(ds) - {"edges", "communities"}
            if extra:
                raise ValidationError(f"unknown dataset keys {sorted(extra)}")
            kwargs["edges_path"] = ds.get("edges")
            kwargs["communities_path"] = ds.get("communities")
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ValidationError(str(exc)) from exc

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_json(obj)

    def quick(self) -> "ExperimentConfig":
        """Desk-scale preset: at most 20 trials, n capped at 1000."""
        n_grid = tuple(n for n in self.n_grid if n <= 1000) or self.n_grid[:1]
        return replace(self, trials=min(self.trials, 20), n_grid=n_grid)


def synthetic_defaults(master_seed: int = 0, eta_mode: str = ETA_EMPIRICAL) -> ExperimentConfig:
    """Full-scale two-block synthetic protocol with the four standard filters."""
    return ExperimentConfig(
        mode=MODE_SYNTHETIC,
        gso=(GSO_UNNORMALIZED, GSO_NORMALIZED),
        filters={
            GSO_UNNORMALIZED: (
                FilterSpec.exponential(-1, 1.0, log_normalize=True),
                FilterSpec.exponential(+1, 1.0, log_normalize=True),
            ),
            GSO_NORMALIZED: (
                FilterSpec.exponential(-1, 1.0),
                FilterSpec.exponential(+1, 1.0),
            ),
        },
        n_grid=(200, 400, 700, 1000, 1400, 2000),
        p_re_grid=(0.1, 0.5, 0.9),
        trials=100,
        master_seed=master_seed,
        eta_mode=eta_mode,
    )


def real_defaults(
    edges_path=None, communities_path=None, master_seed: int = 0
) -> ExperimentConfig:
    """Real-graph protocol: weak and strong exponential filter pairs."""
    return ExperimentConfig(
        mode=MODE_REAL,
        gso=(GSO_UNNORMALIZED,),
        filters=(
            FilterSpec.exponential(-1, 1.0, log_normalize=True),
            FilterSpec.exponential(+1, 1.0, log_normalize=True),
            FilterSpec.exponential(-1, 0.1, log_normalize=True),
            FilterSpec.exponential(+1, 0.1, log_normalize=True),
        ),
        p_re_grid=(0.01, 0.05, 0.1, 0.15, 0.2),
        trials=100,
        master_seed=master_seed,
        edges_path=edges_path,
        communities_path=communities_path,
    )


def consistency_defaults(master_seed: int = 0) -> ExperimentConfig:
    return ExperimentConfig(
        mode=MODE_CONSISTENCY,
        n_grid=(200, 500, 1000, 2000),
        trials=20,
        master_seed=master_seed,
    )


@dataclass(frozen=True)
class TrialRecord:
    mode: str
    gso: str
    filter_id: str
    n: int
    p_re: float
    trial: int
    seed: int
    distance: float
    leakage: float
    eig_term: float
    vec_term: float
    total: float
    eta_empirical: float
    gap_ok: bool
    connected: bool
    wall_time_s: float = 0.0
    error: str = ""


@dataclass(frozen=True)
class ConsistencyRecord:
    mode: str
    n: int
    trial: int
    seed: int
    vec_drift: float
    eig_drift: float
    proj_drift: float
    lnorm_drift: float
    connected: bool
    wall_time_s: float = 0.0
    error: str = ""


@dataclass(frozen=True)
class SummaryRecord:
    mode: str
    gso: str
    filter_id: str
    n: int
    p_re: float
    mean: float
    std: float
    ci_lo: float
    ci_hi: float
    trials: int
    degenerate_ci: bool


@dataclass(frozen=True)
class ConsistencySummaryRecord:
    n: int
    metric: str
    mean: float
    std: float
    ci_lo: float
    ci_hi: float
    median: float
    trials: int


@dataclass(frozen=True)
class ResultTable:
    columns: tuple
    rows: tuple

    @classmethod
    def from_records(cls, record_cls, rows) -> "ResultTable":
        columns = tuple(f.name for f in fields(record_cls))
        return cls(columns=columns, rows=tuple(rows))

    def __len__(self):
        return len(self.rows)


def _trial_seed(master_seed: int, n: int, p_idx: int, trial: int) -> int:
    ss = np.random.SeedSequence((master_seed, n, p_idx, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def _stream(master_seed: int, n: int, p_idx: int, trial: int, phase: int):
    return np.random.default_rng(
        np.random.SeedSequence((master_seed, n, p_idx, trial, phase))
    )


_NAN_METRICS = dict(
    distance=float("nan"), leakage=float("nan"), eig_term=float("nan"),
    vec_term=float("nan"), total=float("nan"), eta_empirical=float("nan"),
    gap_ok=False,
)


def _bound_rows(cfg, mode, n, p_re, trial, seed, e_by_gso, ehat_by_gso, connected):
    """One record per (gso, filter); failures become error rows."""
    rows = []
    for gso in cfg.gso:
        e, e_err = e_by_gso[gso]
        ehat, ehat_err = ehat_by_gso[gso]
        for f in cfg.filters[gso]:
            base = dict(
                mode=mode, gso=gso, filter_id=f.label, n=n, p_re=p_re,
                trial=trial, seed=seed, connected=connected,
            )
            err = e_err or ehat_err
            if err is None:
                try:
                    bb = stability_bound(f, e, ehat, cfg.k, cfg.eta_mode, n)
                    rows.append(TrialRecord(
                        distance=bb.distance, leakage=bb.leakage,
                        eig_term=bb.eig_term, vec_term=bb.vec_term,
                        total=bb.total, eta_empirical=bb.eta,
                        gap_ok=bb.gap_ok, **base,
                    ))
                    continue
                except (GfstabError, np.linalg.LinAlgError) as exc:
                    err = str(exc)
            rows.append(TrialRecord(error=err, **_NAN_METRICS, **base))
    return rows


def _decompose(cfg, g: Graph):
    """Per-gso eigendecomposition; failures carried as (None, message)."""
    out = {}
    for gso in cfg.gso:
        try:
            out[gso] = (eigh(_GSO_BUILDERS[gso](g)), None)
        except (GfstabError, np.linalg.LinAlgError) as exc:
            out[gso] = (None, str(exc))
    return out


def _synthetic_trial(args):
    cfg, n, p_idx, trial = args
    p_re = cfg.p_re_grid[p_idx]
    start = time.perf_counter()
    with threadpool_limits(limits=1):
        params = cfg.ppm_params(n)
        g = sample_ppm(params, _stream(cfg.master_seed, n, p_idx, trial, _PHASE_SAMPLE))
        ghat = rewire_sbm(
            g, params.to_sbm(), p_re,
            _stream(cfg.master_seed, n, p_idx, trial, _PHASE_PERTURB),
        )
        connected = is_connected(g) and is_connected(ghat)
        rows = _bound_rows(
            cfg, MODE_SYNTHETIC, n, p_re, trial,
            _trial_seed(cfg.master_seed, n, p_idx, trial),
            _decompose(cfg, g), _decompose(cfg, ghat), connected,
        )
    elapsed = time.perf_counter() - start
    return [replace(r, wall_time_s=elapsed) for r in rows]


_REAL_CONTEXT = None


def _init_real_worker(payload):
    global _REAL_CONTEXT
    _REAL_CONTEXT = payload


def _real_trial(args):
    cfg, p_idx, trial = args
    g, membership, e_base = _REAL_CONTEXT
    p_re = cfg.p_re_grid[p_idx]
    n = g.n
    start = time.perf_counter()
    with threadpool_limits(limits=1):
        ghat, _shortfall = rewire_count_preserving(
            g, membership, p_re,
            _stream(cfg.master_seed, n, p_idx, trial, _PHASE_PERTURB),
        )
        connected = is_connected(g) and is_connected(ghat)
        rows = _bound_rows(
            cfg, MODE_REAL, n, p_re, trial,
            _trial_seed(cfg.master_seed, n, p_idx, trial),
            e_base, _decompose(cfg, ghat), connected,
        )
    elapsed = time.perf_counter() - start
    return [replace(r, wall_time_s=elapsed) for r in rows]


def _consistency_trial(args):
    cfg, n, trial = args
    start = time.perf_counter()
    seed = _trial_seed(cfg.master_seed, n, 0, trial)
    base = dict(mode=MODE_CONSISTENCY, n=n, trial=trial, seed=seed)
    with threadpool_limits(limits=1):
        params = cfg.ppm_params(n)
        g = sample_ppm(params, _stream(cfg.master_seed, n, 0, trial, _PHASE_SAMPLE))
        ghat = sample_ppm(params, _stream(cfg.master_seed, n, 0, trial, _PHASE_PERTURB))
        connected = is_connected(g) and is_connected(ghat)
        try:
            e = eigh(unnormalized_laplacian(g))
            ehat = eigh(unnormalized_laplacian(ghat))
            st = structural_terms(e, ehat, cfg.k)
            lnorm_drift = spectral_norm(
                normalized_laplacian(g) - normalized_laplacian(ghat)
            )
            row = ConsistencyRecord(
                vec_drift=st.vec_drift, eig_drift=st.eig_drift,
                proj_drift=st.proj_drift, lnorm_drift=lnorm_drift,
                connected=connected, **base,
            )
        except (GfstabError, np.linalg.LinAlgError) as exc:
            row = ConsistencyRecord(
                vec_drift=float("nan"), eig_drift=float("nan"),
                proj_drift=float("nan"), lnorm_drift=float("nan"),
                connected=connected, error=str(exc), **base,
            )
    return [replace(row, wall_time_s=time.perf_counter() - start)]


def _run_tasks(task_fn, tasks, threads, initializer=None, initargs=()):
    if threads <= 1:
        if initializer is not None:
            initializer(*initargs)
        chunks = [task_fn(t) for t in tasks]
    else:
        # fork keeps the already-imported numpy and does not re-run __main__;
        # all BLAS work in the parent finishes before the pool is created
        methods = multiprocessing.get_all_start_methods()
        ctx = multiprocessing.get_context("fork" if "fork" in methods else "spawn")
        with ProcessPoolExecutor(
            max_workers=threads, mp_context=ctx,
            initializer=initializer, initargs=initargs,
        ) as pool:
            chunks = list(pool.map(task_fn, tasks, chunksize=1))
    return [row for chunk in chunks for row in chunk]


def _sorted_table(record_cls, rows, key):
    return ResultTable.from_records(record_cls, sorted(rows, key=key))


_TRIAL_SORT = lambda r: (r.mode, r.gso, r.filter_id, r.n, r.p_re, r.trial)  # noqa: E731


def run_synthetic(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    if cfg.mode != MODE_SYNTHETIC:
        raise ValidationError(f"config mode is {cfg.mode!r}, expected synthetic")
    tasks = [
        (cfg, n, p_idx, trial)
        for n in cfg.n_grid
        for p_idx in range(len(cfg.p_re_grid))
        for trial in range(cfg.trials)
    ]
    rows = _run_tasks(_synthetic_trial, tasks, threads)
    return _sorted_table(TrialRecord, rows, _TRIAL_SORT)


def run_real(
    cfg: ExperimentConfig, g: Graph, membership: Sequence[int], threads: int = 1
) -> ResultTable:
    if cfg.mode != MODE_REAL:
        raise ValidationError(f"config mode is {cfg.mode!r}, expected real")
    if len(membership) != g.n:
        raise ValidationError("membership does not cover the graph")
    # the unperturbed decomposition is shared by every trial
    with threadpool_limits(limits=1):
        e_base = _decompose(cfg, g)
    payload = (g, tuple(membership), e_base)
    tasks = [
        (cfg, p_idx, trial)
        for p_idx in range(len(cfg.p_re_grid))
        for trial in range(cfg.trials)
    ]
    rows = _run_tasks(
        _real_trial, tasks, threads, initializer=_init_real_worker, initargs=(payload,)
    )
    return _sorted_table(TrialRecord, rows, _TRIAL_SORT)


def run_consistency(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    if cfg.mode != MODE_CONSISTENCY:
        raise ValidationError(f"config mode is {cfg.mode!r}, expected consistency")
    tasks = [
        (cfg, n, trial) for n in cfg.n_grid for trial in range(cfg.trials)
    ]
    rows = _run_tasks(_consistency_trial, tasks, threads)
    return _sorted_table(ConsistencyRecord, rows, lambda r: (r.n, r.trial))


_CONSISTENCY_METRICS = ("vec_drift", "eig_drift", "proj_drift", "lnorm_drift")


def _stats(values):
    values = np.asarray(values, dtype=float)
    count = values.size
    mean = float(values.mean())
    if count > 1:
        std = float(values.std(ddof=1))
        half = 1.96 * std / math.sqrt(count)
    else:
        std = 0.0
        half = 0.0
    return mean, std, mean - half, mean + half, count


def summarize(table: ResultTable) -> ResultTable:
    """Group rows and reduce the measured distance (or drift metrics).

    Error rows are excluded from the statistics. Single-trial groups get a
    zero-width interval and are flagged degenerate.
    """
    if not table.rows:
        raise ValidationError("cannot summarize an empty table")
    ok_rows = [r for r in table.rows if not r.error]
    if isinstance(table.rows[0], TrialRecord):
        groups = {}
        for r in ok_rows:
            groups.setdefault((r.mode, r.gso, r.filter_id, r.n, r.p_re), []).append(
                r.distance
            )
        out = []
        for key in sorted(groups):
            mean, std, lo, hi, count = _stats(groups[key])
            out.append(SummaryRecord(
                mode=key[0], gso=key[1], filter_id=key[2], n=key[3], p_re=key[4],
                mean=mean, std=std, ci_lo=lo, ci_hi=hi, trials=count,
                degenerate_ci=count == 1,
            ))
        return ResultTable.from_records(SummaryRecord, out)
    if isinstance(table.rows[0], ConsistencyRecord):
        groups = {}
        for r in ok_rows:
            groups.setdefault(r.n, []).append(r)
        out = []
        for n in sorted(groups):
            for metric in _CONSISTENCY_METRICS:
                values = [getattr(r, metric) for r in groups[n]]
                mean, std, lo, hi, count = _stats(values)
                out.append(ConsistencySummaryRecord(
                    n=n, metric=metric, mean=mean, std=std, ci_lo=lo, ci_hi=hi,
                    median=float(np.median(values)), trials=count,
                ))
        return ResultTable.from_records(ConsistencySummaryRecord, out)
    raise ValidationError(f"cannot summarize rows of type {type(table.rows[0])}")


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(table: ResultTable, path) -> None:
    """Header plus one row per record; floats carry 17 significant digits."""
    columns = [c for c in table.columns if c not in VOLATILE_COLUMNS]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in table.rows:
            writer.writerow([_format_cell(getattr(row, c)) for c in columns])


_RECORD_TYPES = (TrialRecord, ConsistencyRecord, SummaryRecord, ConsistencySummaryRecord)

_COLUMN_TYPES = {
    "mode": str, "gso": str, "filter_id": str, "metric": str, "error": str,
    "n": int, "trial": int, "seed": int, "trials": int,
    "p_re": float, "distance": float, "leakage": float, "eig_term": float,
    "vec_term": float, "total": float, "eta_empirical": float,
    "vec_drift": float, "eig_drift": float, "proj_drift": float,
    "lnorm_drift": float, "mean": float, "std": float, "ci_lo": float,
    "ci_hi": float, "median": float, "wall_time_s": float,
    "gap_ok": bool, "connected": bool, "degenerate_ci": bool,
}


def _parse_cell(text: str, target_type):
    if target_type is float:
        return float(text)
    if target_type is int:
        return int(text)
    if target_type is bool:
        return text == "true"
    return text


def read_csv(path) -> ResultTable:
    """Inverse of write_csv; the record type is inferred from the header."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        data = list(reader)
    header_set = set(header)
    for record_cls in _RECORD_TYPES:
        names = {f.name for f in fields(record_cls)}
        required = {
            f.name for f in fields(record_cls)
            if f.name not in VOLATILE_COLUMNS and f.name != "error"
        }
        if required <= header_set <= names:
            rows = []
            for line_no, values in enumerate(data, start=2):
                if len(values) != len(header):
                    raise ValidationError(f"{path}: row width mismatch at line {line_no}")
                kwargs = {
                    name: _parse_cell(text, _COLUMN_TYPES[name])
                    for name, text in zip(header, values)
                }
                rows.append(record_cls(**kwargs))
            return ResultTable.from_records(record_cls, rows)
    raise ValidationError(f"{path}: header does not match any known table schema")
