"""Adaptive weighted least squares over growing downward-closed spaces.

Two loop variants are provided. `run_adaptive` follows the certified budget
schedule: at each iteration the reduced margin is scored by squared residual
inner products, a minimal bulk of the mass is adjoined, the per-element draw
count is raised to the union-bound budget, and samples are extended with full
recycling. A periodic safeguard adjoins the most ancient reduced-margin index
so that directions with transiently zero estimates cannot starve.
`run_fully_adaptive` replaces the budget schedule by a stability threshold:
rows are topped up one draw per basis element until |||G - I||| < xi.

Function evaluations are cached by point identity; because extensions never
regenerate a point, the target function is evaluated exactly once per sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import estimator as est_mod
from .basis import TensorBasis
from .multiindex import IndexSet, bulk, new_root
from .sampling import BudgetRule, StructuredSampleSet, as_seed_sequence, child_seed, stream

__all__ = [
    "AdaptiveConfig",
    "AdaptiveTrace",
    "IterationRecord",
    "EvalCache",
    "StabilityLoopError",
    "run_adaptive",
    "run_fully_adaptive",
    "estimate_cv_error",
    "make_test_function",
    "test_function",
]


class StabilityLoopError(RuntimeError):
    """The fully adaptive top-up loop hit its round cap without stabilizing."""


@dataclass(frozen=True)
class AdaptiveConfig:
    """Parameters shared by the adaptive loops.

    beta is the bulk fraction in (0, 1]; alpha the failure probability;
    s > 1 the summability exponent of the per-iteration confidence split;
    k_sg the safeguard period; xi > 1/2 the stability threshold used only by
    the fully adaptive loop, whose per-iteration top-ups are capped at
    topup_cap rounds.
    """

    beta: float = 0.5
    alpha: float = 0.1
    s: float = 2.0
    k_max: int = 10
    k_sg: int = 5
    xi: float | None = None
    seed: int | np.random.SeedSequence = 0
    topup_cap: int = 200

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must be in (0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.s <= 1.0:
            raise ValueError("s must be > 1")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.k_sg < 1:
            raise ValueError("k_sg must be >= 1")
        if self.xi is not None and self.xi < 0.5:
            raise ValueError("xi must be at least 1/2")


@dataclass
class IterationRecord:
    k: int
    n: int
    m: int
    tau: int
    deviation: float
    cond: float
    cv_l2: float
    cv_linf: float
    selected: tuple
    safeguard: tuple | None
    new_points: int
    new_evals: int


@dataclass
class AdaptiveTrace:
    """Per-iteration records of an adaptive run plus evaluation audits."""

    records: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    inclusion_order: list = field(default_factory=list)
    u_evaluations: int = 0
    re_evaluations: int = 0
    final_margin_estimates: dict = field(default_factory=dict)

    CSV_COLUMNS = (
        "k,n,m,tau,deviation,cond,cv_l2,cv_linf,n_selected,safeguard,new_points,new_evals"
    )

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(self.CSV_COLUMNS + "\n")
            for r in self.records:
                sg = 1 if r.safeguard is not None else 0
                fh.write(
                    f"{r.k},{r.n},{r.m},{r.tau},{r.deviation!r},{r.cond!r},"
                    f"{r.cv_l2!r},{r.cv_linf!r},{len(r.selected)},{sg},"
                    f"{r.new_points},{r.new_evals}\n"
                )

    def summary(self) -> dict:
        last = self.records[-1]
        return {
            "iterations": len(self.records),
            "final_n": last.n,
            "final_m": last.m,
            "final_cv_l2": last.cv_l2,
            "final_cv_linf": last.cv_linf,
            "max_cond": max(r.cond for r in self.records),
            "u_evaluations": self.u_evaluations,
            "re_evaluations": self.re_evaluations,
            "index_sets": self.snapshots,
            "inclusion_order": [list(nu) for nu in self.inclusion_order],
        }


class EvalCache:
    """Caches function values by point identity and audits re-evaluation.

    The adaptive loops only request values for freshly drawn points; any
    request for a point seen before is counted in `re_evaluations`, which the
    recycling guarantee keeps at zero.
    """

    def __init__(self, u):
        self._u = u
        self._seen = {}
        self.evaluations = 0
        self.re_evaluations = 0

    def eval_new(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        if points.shape[0] == 0:
            return np.empty(0)
        values = np.asarray(self._u(points), dtype=float).reshape(points.shape[0])
        for row, val in zip(points, values):
            key = row.tobytes()
            if key in self._seen:
                self.re_evaluations += 1
            else:
                self._seen[key] = float(val)
                self.evaluations += 1
        return values


class _CvEvaluator:
    """Fixed cross-validation cloud with incrementally cached basis columns."""

    def __init__(self, basis, points, values):
        self.basis = basis
        self.points = np.atleast_2d(points)
        self.values = np.asarray(values, dtype=float)
        self._matrix = np.empty((self.points.shape[0], 0))
        self._pos = {}

    def _ensure_columns(self, members):
        missing = [nu for nu in members if nu not in self._pos]
        if missing:
            cols = self.basis.eval_indices(missing, self.points)
            for j, nu in enumerate(missing):
                self._pos[nu] = self._matrix.shape[1] + j
            self._matrix = np.hstack([self._matrix, cols])

    def error(self, estimator) -> tuple[float, float]:
        members = estimator.index_set.members
        self._ensure_columns(members)
        coeffs = np.zeros(self._matrix.shape[1])
        for j, nu in enumerate(members):
            coeffs[self._pos[nu]] = estimator.coefficients[j]
        residual = self.values - self._matrix @ coeffs
        l2 = float(np.sqrt(np.mean(residual**2)))
        linf = float(np.max(np.abs(residual)))
        return l2, linf


def estimate_cv_error(estimator, u, cv_points) -> tuple[float, float]:
    """Root-mean-square and maximum deviation over a fixed validation cloud."""
    cv_points = np.atleast_2d(cv_points)
    if cv_points.shape[0] == 0:
        raise ValueError("empty cross-validation set")
    residual = np.asarray(u(cv_points), dtype=float) - estimator(cv_points)
    return float(np.sqrt(np.mean(residual**2))), float(np.max(np.abs(residual)))


def make_test_function(d: int):
    """Benchmark target on [-1, 1]^d: the reciprocal of an affine function
    with geometrically decaying coordinate loadings."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        q = np.ones(1)
    else:
        q = 10.0 ** (-3.0 * np.arange(d) / (d - 1.0))

    def u(points):
        x = np.atleast_2d(np.asarray(points, dtype=float))
        return 1.0 / (1.0 + (x @ q) / (2.0 * d))

    return u


def test_function(x, d: int):
    """Evaluate the benchmark target at a single point or batch."""
    u = make_test_function(d)
    x = np.asarray(x, dtype=float)
    if x.ndim <= 1:
        return float(u(x.reshape(1, -1))[0])
    return u(x)


class _LoopState:
    """Shared bookkeeping for both adaptive loops."""

    def __init__(self, u, basis, cfg, cv_points, cv_values):
        self.basis = basis
        self.cfg = cfg
        self.cache = EvalCache(u)
        self.trace = AdaptiveTrace()
        self.index_set = new_root(basis.dim)
        self.trace.inclusion_order.append(self.index_set.members[0])
        self.samples = None
        self.row_evals = {}
        self.cv = None
        if cv_points is not None:
            if cv_values is None:
                cv_values = u(np.atleast_2d(cv_points))
            self.cv = _CvEvaluator(basis, cv_points, cv_values)
        self.psi = None
        self.system = None
        self.u_c = None

    def refresh_evals(self) -> int:
        """Evaluate u at freshly drawn points only; returns how many."""
        fresh = 0
        for nu in self.samples.index_set.members:
            row = self.samples.rows[nu]
            have = self.row_evals[nu].shape[0] if nu in self.row_evals else 0
            if row.shape[0] > have:
                new_vals = self.cache.eval_new(row[have:])
                fresh += row.shape[0] - have
                self.row_evals[nu] = (
                    np.concatenate([self.row_evals[nu], new_vals]) if have else new_vals
                )
        return fresh

    def flat_evals(self) -> np.ndarray:
        return np.concatenate([self.row_evals[nu] for nu in self.samples.index_set.members])

    def solve(self):
        points = self.samples.points()
        psi, weights = est_mod.design_matrix(self.basis, self.index_set, points)
        system = est_mod.assemble(
            self.basis, self.index_set, points, self.flat_evals(), psi=psi, weights=weights
        )
        self.psi = psi
        self.system = system
        self.u_c = est_mod.conditioned(system, est_mod.solve_wls(system))

    def margin_estimates(self) -> dict:
        return est_mod.residual_inner_products(
            self.basis,
            self.samples.points(),
            self.system.weights,
            self.flat_evals(),
            self.u_c,
            self.index_set.reduced_margin,
            psi=self.psi,
        )

    def grow(self, selected, iteration):
        for nu in selected:
            self.index_set = self.index_set.add(nu, iteration)
            self.trace.inclusion_order.append(nu)

    def record(self, k, tau, selected, safeguard, new_points, new_evals):
        cv_l2 = cv_linf = float("nan")
        if self.cv is not None:
            cv_l2, cv_linf = self.cv.error(self.u_c)
        self.trace.records.append(
            IterationRecord(
                k=k,
                n=len(self.index_set),
                m=self.samples.m,
                tau=tau,
                deviation=self.system.deviation,
                cond=self.system.cond,
                cv_l2=cv_l2,
                cv_linf=cv_linf,
                selected=tuple(selected),
                safeguard=safeguard,
                new_points=new_points,
                new_evals=new_evals,
            )
        )
        self.trace.snapshots.append(self.index_set.to_json())

    def finish(self):
        self.trace.u_evaluations = self.cache.evaluations
        self.trace.re_evaluations = self.cache.re_evaluations
        self.trace.final_margin_estimates = self.margin_estimates()
        return self.u_c, self.trace


def run_adaptive(u, basis: TensorBasis, cfg: AdaptiveConfig, cv_points=None, cv_values=None):
    """Budget-driven adaptive loop with bulk selection and a safeguard.

    Per iteration: score the reduced margin with the residual inner products
    of the previous estimator, adjoin a minimal bulk carrying a beta fraction
    of the mass, raise the per-element budget, extend the samples (recycling
    everything), solve, and gate. Every k_sg-th iteration additionally
    adjoins the most ancient unselected reduced-margin index, re-extends, and
    re-solves so the recorded state always satisfies the budget identity
    m = tau * n.

    Returns the final conditioned estimator and the iteration trace.
    """
    rule = BudgetRule.union_structured(cfg.alpha, cfg.s)
    state = _LoopState(u, basis, cfg, cv_points, cv_values)
    seed = child_seed(as_seed_sequence(cfg.seed), 5)

    tau = rule.tau(1)
    state.samples = StructuredSampleSet.initial(basis, state.index_set, tau, seed)
    fresh = state.refresh_evals()
    state.solve()
    state.record(1, tau, (), None, state.samples.m, fresh)

    for k in range(2, cfg.k_max + 1):
        previous = state.index_set
        m_before = state.samples.m
        selected = bulk(previous, state.margin_estimates(), cfg.beta)
        state.grow(selected, k)
        tau = rule.tau(len(state.index_set))
        state.samples = state.samples.extend(state.index_set, tau)
        fresh = state.refresh_evals()
        state.solve()

        safeguard = None
        if k % cfg.k_sg == 0:
            leftover = set(previous.reduced_margin) - set(selected)
            if leftover:
                safeguard = previous.most_ancient(excluded=selected)
                state.grow([safeguard], k)
                tau = rule.tau(len(state.index_set))
                state.samples = state.samples.extend(state.index_set, tau)
                fresh += state.refresh_evals()
                state.solve()
        state.record(k, tau, selected, safeguard, state.samples.m - m_before, fresh)
    return state.finish()


def run_fully_adaptive(u, basis: TensorBasis, cfg: AdaptiveConfig, cv_points=None, cv_values=None):
    """Stability-threshold adaptive loop (no budget schedule).

    New indices inherit the current per-element draw count; afterwards every
    row is topped up one draw at a time until |||G - I||| < xi. The top-up
    loop always runs at least one round and aborts with StabilityLoopError
    after cfg.topup_cap rounds. The sample count stays an exact multiple of
    the space dimension throughout.
    """
    if cfg.xi is None:
        raise ValueError("cfg.xi must be set for the fully adaptive loop")
    state = _LoopState(u, basis, cfg, cv_points, cv_values)
    seed = child_seed(as_seed_sequence(cfg.seed), 5)

    def topup_until_stable(k, per_row, check_first):
        # check_first=False mirrors the repeat-until shape: one round is
        # always added before the threshold is consulted
        if check_first:
            state.solve()
            if state.system.deviation < cfg.xi:
                return per_row
        rounds = 0
        while True:
            if rounds >= cfg.topup_cap:
                dev = state.system.deviation if state.system is not None else float("inf")
                raise StabilityLoopError(
                    f"iteration {k}: deviation {dev:.3f} still above "
                    f"xi={cfg.xi} after {rounds} top-up rounds"
                )
            per_row += 1
            if state.samples is None:
                state.samples = StructuredSampleSet.initial(basis, state.index_set, per_row, seed)
            else:
                state.samples = state.samples.extend(state.index_set, per_row)
            state.refresh_evals()
            state.solve()
            rounds += 1
            if state.system.deviation < cfg.xi:
                return per_row

    per_row = topup_until_stable(1, 0, check_first=False)
    state.record(1, per_row, (), None, state.samples.m, state.cache.evaluations)

    for k in range(2, cfg.k_max + 1):
        previous = state.index_set
        m_before = state.samples.m
        selected = bulk(previous, state.margin_estimates(), cfg.beta)
        state.grow(selected, k)
        assert state.samples.m == per_row * len(previous)
        state.samples = state.samples.extend(state.index_set, per_row)
        state.refresh_evals()
        per_row = topup_until_stable(k, per_row, check_first=False)

        safeguard = None
        if k % cfg.k_sg == 0:
            leftover = set(previous.reduced_margin) - set(selected)
            if leftover:
                safeguard = previous.most_ancient(excluded=selected)
                state.grow([safeguard], k)
                state.samples = state.samples.extend(state.index_set, per_row)
                state.refresh_evals()
                per_row = topup_until_stable(k, per_row, check_first=True)
        fresh = state.samples.m - m_before
        state.record(k, per_row, selected, safeguard, fresh, fresh)
    return state.finish()
