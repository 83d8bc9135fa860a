"""Reproducible experiment runners behind the command-line interface.

Each experiment writes RFC-4180 style CSV files plus a JSON summary into its
own run directory, together with the exact configuration that produced them.
Replications are independent: replication r derives its seed by appending
(10, r) to the master seed's spawn key, so runs are bit-identical for a given
configuration and seed regardless of how replications are scheduled.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import estimator as est_mod
from .adaptive import AdaptiveConfig, make_test_function, run_adaptive, run_fully_adaptive
from .basis import TensorBasis
from .multiindex import new_root
from .orthopoly import HERMITE, LEGENDRE
from .sampling import (
    THETA,
    BudgetRule,
    FlatSampleSet,
    StructuredSampleSet,
    as_seed_sequence,
    binomial_draw,
    child_seed,
    stream,
    unrecycled_mean_var,
)

__all__ = [
    "ExperimentConfig",
    "run_cond_experiment",
    "run_sampler_comparison",
    "run_adaptive_experiment",
    "run_budget_table",
    "run_sampler_stats",
    "emit_plot_scripts",
    "random_growth_schedule",
    "simulate_mixture_counters",
]

_FAMILIES = {"legendre": LEGENDRE, "hermite": HERMITE}


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration of one experiment run; serialized alongside the outputs."""

    experiment: str = "cond"
    d: int = 1
    family: str = "hermite"
    replications: int = 100
    alpha: float = 0.1
    s: float = 2.0
    beta: float = 0.5
    k_max: int = 30
    k_sg: int = 5
    xi: float = 0.9
    seed: int = 0
    cv_count: int = 100_000
    output_dir: str = "runs"
    jobs: int = 1
    max_new_indices: int = 5
    scaling: str = "theta"
    schema_version: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.scaling not in ("theta", "quadratic"):
            raise ValueError("scaling must be 'theta' or 'quadratic'")

    @property
    def family_obj(self):
        return _FAMILIES[self.family]

    def basis(self) -> TensorBasis:
        return TensorBasis(self.family_obj, self.d)

    @staticmethod
    def from_mapping(data: dict) -> "ExperimentConfig":
        return ExperimentConfig(**data)

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)


def _master(cfg: ExperimentConfig) -> np.random.SeedSequence:
    return as_seed_sequence(cfg.seed)


def _rep_seed(cfg: ExperimentConfig, rep: int) -> np.random.SeedSequence:
    return child_seed(_master(cfg), 10, rep)


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _prepare_dir(cfg: ExperimentConfig, out_dir):
    out_dir = out_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config.json"), "w") as fh:
        json.dump(asdict(cfg), fh, indent=2, sort_keys=True)
    return out_dir


def _map_replications(worker, cfg: ExperimentConfig):
    payloads = [(asdict(cfg), rep) for rep in range(cfg.replications)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(worker, payloads))
    return [worker(p) for p in payloads]


# ---------------------------------------------------------------------------
# Random-growth stability experiment
# ---------------------------------------------------------------------------


def random_growth_schedule(index_set, rng, max_new: int = 5):
    """Grow a downward-closed set by a random handful of reduced-margin indices.

    Draws Uniform{1, ..., min(max_new, |margin|)} many indices uniformly
    without replacement from the current reduced margin (in d = 1 this always
    adds the single candidate, so the dimension grows by one per step).
    """
    candidates = sorted(index_set.reduced_margin)
    count = int(rng.integers(1, min(max_new, len(candidates)) + 1))
    picks = rng.choice(len(candidates), size=count, replace=False)
    return [candidates[i] for i in sorted(picks)]


def _cond_worker(payload):
    data, rep = payload
    cfg = ExperimentConfig.from_mapping(data)
    basis = cfg.basis()
    rule = BudgetRule.union_structured(cfg.alpha, cfg.s)
    rep_seed = _rep_seed(cfg, rep)
    schedule_rng = stream(rep_seed, 4)
    index_set = new_root(cfg.d)
    samples = StructuredSampleSet.initial(basis, index_set, rule.tau(1), child_seed(rep_seed, 5))
    rows = []
    for k in range(1, cfg.k_max + 1):
        if k > 1:
            for nu in random_growth_schedule(index_set, schedule_rng, cfg.max_new_indices):
                index_set = index_set.add(nu, k)
            samples = samples.extend(index_set, rule.tau(len(index_set)))
        system = est_mod.assemble(basis, index_set, samples.points())
        rows.append(
            (rep, k, len(index_set), samples.m, samples.tau, system.deviation, system.cond)
        )
    return rows


def run_cond_experiment(cfg: ExperimentConfig, out_dir=None) -> str:
    """Condition-number trajectories along random nested growth schedules.

    Per replication, the index set grows randomly inside its reduced margin
    and the structured sample set is extended with the union-bound budget;
    the spectral certificate of every iteration is recorded.
    """
    out_dir = _prepare_dir(cfg, out_dir)
    results = _map_replications(_cond_worker, cfg)
    rows = [row for rep_rows in results for row in rep_rows]
    _write_csv(
        os.path.join(out_dir, "cond_trajectories.csv"),
        ["replication", "k", "n", "m", "tau", "deviation", "cond"],
        rows,
    )
    by_k = {}
    for row in rows:
        by_k.setdefault(row[1], []).append(row)
    mean_rows = []
    for k in sorted(by_k):
        conds = np.array([r[6] for r in by_k[k]])
        devs = np.array([r[5] for r in by_k[k]])
        mean_rows.append((k, conds.mean(), conds.max(), devs.mean(), devs.max()))
    _write_csv(
        os.path.join(out_dir, "cond_mean.csv"),
        ["k", "mean_cond", "max_cond", "mean_deviation", "max_deviation"],
        mean_rows,
    )
    return out_dir


# ---------------------------------------------------------------------------
# Sequential-sampler comparison (structured rows vs i.i.d. mixture)
# ---------------------------------------------------------------------------


def _comparison_tau(cfg: ExperimentConfig, n: int) -> int:
    if cfg.scaling == "theta":
        return math.ceil(1.0 / THETA)
    return 3 + n


def _chain_sets(d: int, k_max: int):
    sets = [new_root(d)]
    for k in range(2, k_max + 1):
        current = sets[-1]
        sets.append(current.add(min(current.reduced_margin), k))
    return sets


def _comparison_worker(payload):
    data, rep = payload
    cfg = ExperimentConfig.from_mapping(data)
    basis = cfg.basis()
    rep_seed = _rep_seed(cfg, rep)
    sets = _chain_sets(1, cfg.k_max)
    cond1 = np.empty(cfg.k_max)
    cond2 = np.empty(cfg.k_max)
    structured = None
    flat = None
    for k in range(1, cfg.k_max + 1):
        index_set = sets[k - 1]
        tau = _comparison_tau(cfg, k)
        m = tau * k
        if structured is None:
            structured = StructuredSampleSet.initial(basis, index_set, tau, child_seed(rep_seed, 5))
            flat = FlatSampleSet.initial(basis, index_set, m, child_seed(rep_seed, 6))
        else:
            structured = structured.extend(index_set, tau)
            flat = flat.extend(index_set, m)
        cond1[k - 1] = est_mod.assemble(basis, index_set, structured.points()).cond
        cond2[k - 1] = est_mod.assemble(basis, index_set, flat.points()).cond
    return cond1, cond2


def run_sampler_comparison(cfg: ExperimentConfig, out_dir=None) -> str:
    """Mean and spread of cond(G_k) for the two sequential samplers (d = 1,
    one degree per iteration, same per-iteration sample counts)."""
    cfg = cfg.with_overrides(d=1)
    out_dir = _prepare_dir(cfg, out_dir)
    results = _map_replications(_comparison_worker, cfg)
    cond1 = np.stack([r[0] for r in results])
    cond2 = np.stack([r[1] for r in results])
    traj_rows = []
    for rep in range(cfg.replications):
        for k in range(cfg.k_max):
            traj_rows.append((rep, k + 1, cond1[rep, k], cond2[rep, k]))
    _write_csv(
        os.path.join(out_dir, "sampler_trajectories.csv"),
        ["replication", "k", "cond_structured", "cond_mixture"],
        traj_rows,
    )
    ddof = 1 if cfg.replications > 1 else 0
    e1 = cond1.mean(axis=0)
    e2 = cond2.mean(axis=0)
    s1 = cond1.std(axis=0, ddof=ddof) if cfg.replications > 1 else np.zeros(cfg.k_max)
    s2 = cond2.std(axis=0, ddof=ddof) if cfg.replications > 1 else np.zeros(cfg.k_max)
    rows = []
    for k in range(cfg.k_max):
        m = _comparison_tau(cfg, k + 1) * (k + 1)
        rows.append(
            (k + 1, m, e1[k], s1[k], e1[k] + s1[k], e2[k], s2[k], e2[k] + s2[k], e2[k] - e1[k])
        )
    _write_csv(
        os.path.join(out_dir, "sampler_comparison.csv"),
        ["k", "m", "E1", "S1", "E1_plus_S1", "E2", "S2", "E2_plus_S2", "E2_minus_E1"],
        rows,
    )
    return out_dir


# ---------------------------------------------------------------------------
# Adaptive approximation experiments
# ---------------------------------------------------------------------------


def _cv_cloud(cfg: ExperimentConfig):
    rng = stream(_master(cfg), 20)
    if cfg.family == "legendre":
        return rng.uniform(-1.0, 1.0, size=(cfg.cv_count, cfg.d))
    return rng.standard_normal(size=(cfg.cv_count, cfg.d))


def _adaptive_worker(payload):
    data, rep = payload
    cfg = ExperimentConfig.from_mapping(data)
    basis = cfg.basis()
    u = make_test_function(cfg.d)
    cv_points = _cv_cloud(cfg)
    acfg = AdaptiveConfig(
        beta=cfg.beta,
        alpha=cfg.alpha,
        s=cfg.s,
        k_max=cfg.k_max,
        k_sg=cfg.k_sg,
        xi=cfg.xi if cfg.experiment == "fully_adaptive" else None,
        seed=_rep_seed(cfg, rep),
    )
    if cfg.experiment == "fully_adaptive":
        est, trace = run_fully_adaptive(u, basis, acfg, cv_points=cv_points)
    else:
        est, trace = run_adaptive(u, basis, acfg, cv_points=cv_points)
    coeff_by_index = dict(zip(est.index_set.members, est.coefficients))
    coeff_rows = [
        (pos, ";".join(str(c) for c in nu), coeff_by_index[nu])
        for pos, nu in enumerate(trace.inclusion_order)
    ]
    error_rows = [
        (rep, r.k, r.n, r.m, r.tau, r.deviation, r.cond, r.cv_l2, r.cv_linf,
         len(r.selected), 1 if r.safeguard is not None else 0)
        for r in trace.records
    ]
    return error_rows, coeff_rows, trace.snapshots, trace.summary()


def run_adaptive_experiment(cfg: ExperimentConfig, out_dir=None) -> str:
    """Adaptive approximation of the benchmark target with per-iteration
    cross-validation errors on a cloud fixed once per experiment."""
    out_dir = _prepare_dir(cfg, out_dir)
    results = _map_replications(_adaptive_worker, cfg)
    error_rows = []
    finals = []
    for rep, (rows, coeff_rows, snapshots, summary) in enumerate(results):
        error_rows.extend(rows)
        _write_csv(
            os.path.join(out_dir, f"coeffs_rep{rep:04d}.csv"),
            ["inclusion_position", "index", "coefficient"],
            coeff_rows,
        )
        with open(os.path.join(out_dir, f"index_set_rep{rep:04d}.json"), "w") as fh:
            fh.write(snapshots[-1])
        # one snapshot per iteration, for section plots of the grown sets
        with open(os.path.join(out_dir, f"index_sets_rep{rep:04d}.json"), "w") as fh:
            fh.write("[" + ",\n ".join(snapshots) + "]")
        finals.append(summary)
    _write_csv(
        os.path.join(out_dir, "errors.csv"),
        ["replication", "k", "n", "m", "tau", "deviation", "cond", "cv_l2", "cv_linf",
         "n_selected", "safeguard"],
        error_rows,
    )
    final_l2 = sorted(s["final_cv_l2"] for s in finals)
    summary = {
        "experiment": cfg.experiment,
        "replications": cfg.replications,
        "median_final_cv_l2": final_l2[len(final_l2) // 2],
        "max_cond": max(s["max_cond"] for s in finals),
        "per_replication": [
            {k: v for k, v in s.items() if k != "index_sets"} for s in finals
        ],
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    return out_dir


# ---------------------------------------------------------------------------
# Budget tables and sampler statistics
# ---------------------------------------------------------------------------


def simulate_mixture_counters(n_seq, m_seq, seed):
    """Replay the counting skeleton of the sequential mixture sampler.

    Uses the same per-iteration binomial stream as FlatSampleSet.extend, so
    for a given seed the counters match a full run exactly while skipping the
    point draws. Returns (per-iteration binomial counts, running totals of
    generated draws indexed by iteration).
    """
    base = as_seed_sequence(seed)
    totals = [m_seq[0]]
    binomials = []
    m_prev = m_seq[0]
    for k in range(2, len(n_seq) + 1):
        n_new, n_old = n_seq[k - 1], n_seq[k - 2]
        m_k = m_seq[k - 1]
        b = binomial_draw(m_k, (n_new - n_old) / n_new, stream(base, 2, k, 0))
        fresh_old = max(m_k - b - m_prev, 0)
        recycled = min(m_k - b, m_prev)
        fresh_new = m_k - recycled - fresh_old
        binomials.append(b)
        totals.append(totals[-1] + fresh_old + fresh_new)
        m_prev = m_k
    return np.array(binomials, dtype=np.int64), np.array(totals, dtype=np.int64)


def _counter_schedule(cfg: ExperimentConfig):
    rule = BudgetRule.union_iid(cfg.alpha, cfg.s)
    n_seq = list(range(1, cfg.k_max + 1))
    m_seq = [rule.budget(n) for n in n_seq]
    return n_seq, m_seq


def _counter_worker(payload):
    data, rep = payload
    cfg = ExperimentConfig.from_mapping(data)
    n_seq, m_seq = _counter_schedule(cfg)
    binomials, totals = simulate_mixture_counters(
        n_seq, m_seq, child_seed(_rep_seed(cfg, rep), 6)
    )
    return int(binomials.sum()), totals


def run_budget_table(cfg: ExperimentConfig, out_dir=None) -> str:
    """Tabulate both budget schedules against the Monte Carlo draw totals of
    the sequential mixture sampler, with the closed-form moments."""
    out_dir = _prepare_dir(cfg, out_dir)
    iid = BudgetRule.union_iid(cfg.alpha, cfg.s)
    structured = BudgetRule.union_structured(cfg.alpha, cfg.s)
    n_seq, m_seq = _counter_schedule(cfg)
    results = _map_replications(_counter_worker, cfg)
    totals = np.stack([r[1] for r in results])
    rows = []
    for k in range(1, cfg.k_max + 1):
        n = k
        m = m_seq[k - 1]
        mhat = structured.budget(n)
        mean_u, var_u = unrecycled_mean_var(n_seq[:k], m_seq[:k])
        rows.append(
            (
                k,
                n,
                m,
                mhat,
                m + n - 1,
                totals[:, k - 1].mean(),
                mean_u,
                var_u,
                m + n - m_seq[0],
            )
        )
    _write_csv(
        os.path.join(out_dir, "budget_table.csv"),
        [
            "k",
            "n",
            "m_iid",
            "m_structured",
            "m_iid_plus_n_minus_1",
            "mc_mean_total_generated",
            "closed_mean_unrecycled",
            "closed_var_unrecycled",
            "unrecycled_mean_bound",
        ],
        rows,
    )
    assert iid.budget(1) == m_seq[0]
    return out_dir


def run_sampler_stats(cfg: ExperimentConfig, out_dir=None) -> str:
    """Monte Carlo moments of the unrecycled-draw count versus closed forms."""
    out_dir = _prepare_dir(cfg, out_dir)
    n_seq, m_seq = _counter_schedule(cfg)
    results = _map_replications(_counter_worker, cfg)
    u_totals = np.array([r[0] for r in results], dtype=float)
    totals = np.stack([r[1] for r in results])
    _write_csv(
        os.path.join(out_dir, "sampler_stats.csv"),
        ["replication", "unrecycled_upper", "total_generated"],
        [(rep, int(u_totals[rep]), int(totals[rep, -1])) for rep in range(cfg.replications)],
    )
    mean_u, var_u = unrecycled_mean_var(n_seq, m_seq)
    n_rep = cfg.replications
    emp_mean = float(u_totals.mean())
    emp_var = float(u_totals.var(ddof=1)) if n_rep > 1 else 0.0
    summary = {
        "k_max": cfg.k_max,
        "replications": n_rep,
        "closed_mean": mean_u,
        "closed_var": var_u,
        "empirical_mean": emp_mean,
        "empirical_var": emp_var,
        "mean_z": (emp_mean - mean_u) / math.sqrt(var_u / n_rep) if n_rep > 1 else 0.0,
        "var_z": (emp_var - var_u) / (var_u * math.sqrt(2.0 / (n_rep - 1)))
        if n_rep > 2
        else 0.0,
        "mean_bound": m_seq[-1] + n_seq[-1] - m_seq[0],
        "var_below_mean": var_u < mean_u,
        "mean_below_bound": mean_u <= m_seq[-1] + n_seq[-1] - m_seq[0],
    }
    with open(os.path.join(out_dir, "sampler_stats_summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    return out_dir


# ---------------------------------------------------------------------------
# Plot-script generation
# ---------------------------------------------------------------------------

_PLOT_TEMPLATES = {
    "cond_trajectories.csv": (
        "plot_cond.py",
        '''\
"""Condition-number trajectories and their sample mean."""
import csv
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

by_rep = defaultdict(list)
with open("cond_trajectories.csv") as fh:
    for row in csv.DictReader(fh):
        by_rep[int(row["replication"])].append((int(row["k"]), float(row["cond"])))
fig, ax = plt.subplots(figsize=(6, 4.5))
sums = defaultdict(float)
counts = defaultdict(int)
for rep, rows in by_rep.items():
    rows.sort()
    ks = [k for k, _ in rows]
    cs = [c for _, c in rows]
    ax.plot(ks, cs, color="black", lw=0.3, alpha=0.25)
    for k, c in rows:
        sums[k] += c
        counts[k] += 1
ks = sorted(sums)
ax.plot(ks, [sums[k] / counts[k] for k in ks], color="red", lw=2, label="sample mean")
ax.axhline(3.0, color="gray", ls="--", lw=1, label="cond = 3")
ax.set_xlabel("iteration k")
ax.set_ylabel("cond(G_k)")
ax.legend()
fig.tight_layout()
fig.savefig("cond.png", dpi=150)
print("wrote cond.png")
''',
    ),
    "sampler_comparison.csv": (
        "plot_sampler_comparison.py",
        '''\
"""Mean and mean+std of cond(G_k) for the two sequential samplers."""
import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("sampler_comparison.csv")))
k = [int(r["k"]) for r in rows]
fig, axes = plt.subplots(1, 2, figsize=(10, 4.5))
axes[0].plot(k, [float(r["E1"]) for r in rows], "b-", label="E1 (structured)")
axes[0].plot(k, [float(r["E1_plus_S1"]) for r in rows], "b--", label="E1+S1")
axes[0].plot(k, [float(r["E2"]) for r in rows], "r-", label="E2 (mixture)")
axes[0].plot(k, [float(r["E2_plus_S2"]) for r in rows], "r--", label="E2+S2")
axes[0].set_xlabel("iteration k")
axes[0].set_ylabel("cond(G_k)")
axes[0].legend()
axes[1].plot(k, [float(r["E2_minus_E1"]) for r in rows], "k-")
axes[1].axhline(0.0, color="gray", lw=1)
axes[1].set_xlabel("iteration k")
axes[1].set_ylabel("E2 - E1")
fig.tight_layout()
fig.savefig("sampler_comparison.png", dpi=150)
print("wrote sampler_comparison.png")
''',
    ),
    "errors.csv": (
        "plot_errors.py",
        '''\
"""Cross-validation errors versus sample count, and cond(G_k) versus k."""
import csv
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

by_rep = defaultdict(list)
with open("errors.csv") as fh:
    for row in csv.DictReader(fh):
        by_rep[int(row["replication"])].append(row)
fig, axes = plt.subplots(1, 2, figsize=(10, 4.5))
for rep, rows in by_rep.items():
    rows.sort(key=lambda r: int(r["k"]))
    m = [int(r["m"]) for r in rows]
    ks = [int(r["k"]) for r in rows]
    axes[0].semilogy(m, [float(r["cv_l2"]) for r in rows], "b-", lw=0.5, alpha=0.4)
    axes[0].semilogy(m, [float(r["cv_linf"]) for r in rows], "r-", lw=0.5, alpha=0.4)
    axes[1].plot(ks, [float(r["cond"]) for r in rows], "k-", lw=0.5, alpha=0.4)
axes[0].set_xlabel("sample count m_k")
axes[0].set_ylabel("cross-validation error")
axes[0].set_title("blue: rms, red: max")
axes[1].axhline(3.0, color="gray", ls="--", lw=1)
axes[1].set_xlabel("iteration k")
axes[1].set_ylabel("cond(G_k)")
fig.tight_layout()
fig.savefig("errors.png", dpi=150)
print("wrote errors.png")
''',
    ),
    "coeffs_rep0000.csv": (
        "plot_coefficients.py",
        '''\
"""Coefficient magnitudes in the order their basis elements were included."""
import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("coeffs_rep0000.csv")))
pos = [int(r["inclusion_position"]) for r in rows]
mag = [abs(float(r["coefficient"])) for r in rows]
fig, ax = plt.subplots(figsize=(6, 4.5))
ax.semilogy(pos, [max(v, 1e-18) for v in mag], "b.", ms=3)
ax.set_xlabel("inclusion order")
ax.set_ylabel("|coefficient|")
fig.tight_layout()
fig.savefig("coefficients.png", dpi=150)
print("wrote coefficients.png")
''',
    ),
    "budget_table.csv": (
        "plot_budget_table.py",
        '''\
"""Budget schedules and the mean total draw count of the mixture sampler."""
import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("budget_table.csv")))
k = [int(r["k"]) for r in rows]
fig, ax = plt.subplots(figsize=(6, 4.5))
ax.plot(k, [int(r["m_iid"]) for r in rows], label="m (i.i.d. mixture)")
ax.plot(k, [int(r["m_structured"]) for r in rows], label="m (structured)")
ax.plot(k, [float(r["mc_mean_total_generated"]) for r in rows],
        label="mean total generated")
ax.set_xlabel("iteration k")
ax.set_ylabel("samples")
ax.legend()
fig.tight_layout()
fig.savefig("budget_table.png", dpi=150)
print("wrote budget_table.png")
''',
    ),
}


def emit_plot_scripts(run_dir: str) -> list:
    """Write self-contained matplotlib scripts next to the CSVs they plot.

    One script is emitted per recognized CSV present in `run_dir`; existing
    scripts are overwritten, so regeneration is idempotent. Raises on a
    missing directory or when no known CSV is found.
    """
    if not os.path.isdir(run_dir):
        raise FileNotFoundError(f"run directory {run_dir!r} does not exist")
    written = []
    for csv_name, (script_name, body) in _PLOT_TEMPLATES.items():
        if os.path.exists(os.path.join(run_dir, csv_name)):
            path = os.path.join(run_dir, script_name)
            with open(path, "w") as fh:
                fh.write(body)
            written.append(path)
    if not written:
        raise FileNotFoundError(f"no experiment CSV files found in {run_dir!r}")
    return written
