"""Sample budgets, mixture measures, and sequential sampling with recycling.

The number of samples that certifies a stable weighted Gramian is governed by
a family of budget rules built around the constant theta = (3 ln(3/2) - 1)/2,
the matrix Chernoff tail exponent at spectral deviation one half. Two
sequential generators grow a sample set along a nested sequence of index
sets:

* `StructuredSampleSet` keeps exactly tau draws from the distribution induced
  by each basis element (a rows-by-columns layout, vectorized row-major), and
  recycles every point from every earlier iteration.
* `FlatSampleSet` keeps i.i.d. draws from the uniform mixture of the induced
  distributions; growing the set splits the new mixture into old and new
  components via a binomial count, recycles what it can, and tracks how many
  draws were generated and discarded overall.

Every point records which component generated it and at which iteration, so
recycling can be audited exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import TensorBasis
from .multiindex import IndexSet

__all__ = [
    "THETA",
    "zeta_value",
    "BudgetRule",
    "budget_bounds_check",
    "BudgetBoundsReport",
    "child_seed",
    "stream",
    "MixtureMeasure",
    "sample_chi",
    "binomial_draw",
    "StructuredSampleSet",
    "FlatSampleSet",
    "MixtureExtensionCounters",
    "unrecycled_mean_var",
]

#: Tail exponent of the matrix Chernoff bound at spectral deviation 1/2.
THETA = (3.0 * math.log(1.5) - 1.0) / 2.0

_zeta_cache: dict[float, float] = {}


def zeta_value(s: float) -> float:
    """Riemann zeta at s > 1: exact pi^2/6 at s = 2, else partial sum plus
    Euler-Maclaurin tail (relative error far below 1e-12)."""
    if s <= 1.0:
        raise ValueError("zeta is needed for exponents s > 1 only")
    if s == 2.0:
        return math.pi**2 / 6.0
    cached = _zeta_cache.get(s)
    if cached is None:
        n = 1_000_000
        k = np.arange(1, n + 1, dtype=float)
        partial = float(np.sum(k**-s))
        tail = n ** (1.0 - s) / (s - 1.0) - 0.5 * n**-s + s / 12.0 * n ** (-s - 1.0)
        cached = partial + tail
        _zeta_cache[s] = cached
    return cached


@dataclass(frozen=True)
class BudgetRule:
    """Maps an approximation-space dimension n to a sample count m.

    Kinds
    -----
    fixed_oversampling      m = tau * n for a fixed integer tau
    single_space            m = ceil(n/theta * ln(2n/alpha)), i.i.d. mixture
    structured_single_space m = tau * n, tau = ceil(ln(2n/alpha)/theta)
    union_structured        m = tau * n, tau = ceil(ln(zeta(s) n^{s+1}/alpha)/theta);
                            certifies all iterations of a nested sequence at once
    union_iid               m = ceil(n/theta * ln(zeta(s) n^{s+1}/alpha))
    legacy_rate             smallest m with m/ln(m) >= n (1+r)/theta
    """

    kind: str
    tau_fixed: int | None = None
    alpha: float | None = None
    s: float | None = None
    rate: float | None = None

    @classmethod
    def fixed_oversampling(cls, tau: int) -> "BudgetRule":
        if tau < 1:
            raise ValueError("tau must be >= 1")
        return cls("fixed_oversampling", tau_fixed=int(tau))

    @classmethod
    def single_space(cls, alpha: float) -> "BudgetRule":
        _check_alpha(alpha)
        return cls("single_space", alpha=alpha)

    @classmethod
    def structured_single_space(cls, alpha: float) -> "BudgetRule":
        _check_alpha(alpha)
        return cls("structured_single_space", alpha=alpha)

    @classmethod
    def union_structured(cls, alpha: float, s: float) -> "BudgetRule":
        _check_alpha(alpha)
        _check_s(s)
        return cls("union_structured", alpha=alpha, s=s)

    @classmethod
    def union_iid(cls, alpha: float, s: float) -> "BudgetRule":
        _check_alpha(alpha)
        _check_s(s)
        return cls("union_iid", alpha=alpha, s=s)

    @classmethod
    def legacy_rate(cls, rate: float) -> "BudgetRule":
        if rate <= 0:
            raise ValueError("rate must be positive")
        return cls("legacy_rate", rate=rate)

    @property
    def is_structured(self) -> bool:
        return self.kind in ("fixed_oversampling", "structured_single_space", "union_structured")

    def tau(self, n: int) -> int:
        """Per-basis-element draw count for the structured kinds."""
        if n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "fixed_oversampling":
            return self.tau_fixed
        if self.kind == "structured_single_space":
            return math.ceil(math.log(2.0 * n / self.alpha) / THETA)
        if self.kind == "union_structured":
            return math.ceil(math.log(zeta_value(self.s) * n ** (self.s + 1.0) / self.alpha) / THETA)
        raise ValueError(f"{self.kind} has no per-element count")

    def budget(self, n: int) -> int:
        if n < 1:
            raise ValueError("n must be >= 1")
        if self.is_structured:
            return self.tau(n) * n
        if self.kind == "single_space":
            return math.ceil(n / THETA * math.log(2.0 * n / self.alpha))
        if self.kind == "union_iid":
            return math.ceil(n / THETA * math.log(zeta_value(self.s) * n ** (self.s + 1.0) / self.alpha))
        # legacy_rate: m / ln m is increasing past e and the target exceeds e,
        # so scan-free bisection on the increasing branch is safe
        target = n * (1.0 + self.rate) / THETA
        lo, hi = 3, 8
        while hi / math.log(hi) < target:
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if mid / math.log(mid) >= target:
                hi = mid
            else:
                lo = mid
        return hi


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")


def _check_s(s):
    if s <= 1.0:
        raise ValueError("s must be > 1")


@dataclass
class BudgetBoundsReport:
    alpha: float
    s: float
    k_max: int
    violations: list
    max_epsilon: float

    @property
    def ok(self) -> bool:
        return not self.violations


def budget_bounds_check(alpha: float, s: float, k_max: int) -> BudgetBoundsReport:
    """Verify the sandwich between the i.i.d. and structured budget schedules.

    For n_k = k, k = 1..k_max, checks m_k <= mhat_k <= m_k + n_k - 1 for the
    dispatched budgets, and the full chain ending in
    m_k + n_k - 1 <= m_k (1 + eps_k) - 1 with eps_k = theta / log-term. The
    chain holds with the union-bound confidence factor 2 carried inside the
    logarithm of both counts, which is the form the two-sided comparison
    analysis uses, so it is evaluated that way here.
    """
    _check_alpha(alpha)
    _check_s(s)
    iid = BudgetRule.union_iid(alpha, s)
    structured = BudgetRule.union_structured(alpha, s)
    zs = zeta_value(s)
    violations = []
    max_eps = 0.0
    for k in range(1, k_max + 1):
        n = k
        m = iid.budget(n)
        mhat = structured.budget(n)
        if not m <= mhat <= m + n - 1:
            violations.append(f"k={k}: dispatched budgets m={m}, mhat={mhat} out of sandwich")
        log2term = math.log(2.0 * zs * n ** (s + 1.0) / alpha)
        eps = THETA / log2term
        max_eps = max(max_eps, eps)
        m2 = math.ceil(n * log2term / THETA)
        mhat2 = n * math.ceil(log2term / THETA)
        if not m2 <= mhat2 <= m2 + n - 1:
            violations.append(f"k={k}: m2={m2}, mhat2={mhat2} out of sandwich")
        if not mhat2 <= m2 * (1.0 + eps) - 1.0 + 1e-9:
            violations.append(f"k={k}: relative bound fails (eps={eps})")
        if not eps < 1.0:
            violations.append(f"k={k}: eps={eps} >= 1")
    return BudgetBoundsReport(alpha, s, k_max, violations, max_eps)


# ---------------------------------------------------------------------------
# RNG streams: counter-based, one independent stream per (iteration, row)
# ---------------------------------------------------------------------------


def child_seed(base: np.random.SeedSequence, *key) -> np.random.SeedSequence:
    """Derive a child SeedSequence by appending integers to the spawn key."""
    return np.random.SeedSequence(
        entropy=base.entropy, spawn_key=tuple(base.spawn_key) + tuple(int(k) for k in key)
    )


def stream(base: np.random.SeedSequence, *key) -> np.random.Generator:
    """Independent Philox generator for a namespaced key under `base`."""
    return np.random.Generator(np.random.Philox(child_seed(base, *key)))


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


# ---------------------------------------------------------------------------
# Induced component and mixture sampling
# ---------------------------------------------------------------------------


def sample_chi(basis: TensorBasis, nu, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw i.i.d. points from the distribution induced by basis element nu.

    The induced density factorizes across coordinates, so each coordinate is
    an independent univariate induced draw.
    """
    from . import orthopoly

    out = np.empty((count, basis.dim))
    if count == 0:
        return out
    for i, deg in enumerate(nu):
        out[:, i] = orthopoly.sample_induced(basis.families[i], int(deg), rng, size=count)
    return out


def _sample_component_mixture(basis, components, count, rng):
    """Uniformly pick a component per point, then draw from it."""
    out = np.empty((count, basis.dim))
    if count == 0:
        return out
    picks = rng.integers(0, len(components), size=count)
    for j in np.unique(picks):
        mask = picks == j
        out[mask] = sample_chi(basis, components[j], int(mask.sum()), rng)
    return out


@dataclass(frozen=True)
class MixtureMeasure:
    """Uniform additive mixture of the induced distributions over an index set."""

    basis: TensorBasis
    index_set: IndexSet

    def weight(self, points, psi=None) -> np.ndarray:
        """w(x) = n / sum_nu psi_nu(x)^2; the reciprocal mixture density ratio."""
        return self.basis.weight(self.index_set.members, points, psi=psi)

    def density_vs_reference(self, points) -> np.ndarray:
        """Mixture density divided by the reference density: (1/n) sum psi^2."""
        psi = self.basis.eval_indices(self.index_set.members, points)
        return np.einsum("ij,ij->i", psi, psi) / len(self.index_set)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return _sample_component_mixture(self.basis, self.index_set.members, count, rng)


def binomial_draw(m: int, p: float, rng: np.random.Generator) -> int:
    """Binomial(m, p) draw: CDF inversion for small m*min(p,1-p), otherwise a
    fixed-order Bernoulli sum. Deterministic for a given generator state."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    if m == 0 or p == 0.0:
        return 0
    if p == 1.0:
        return m
    if m * min(p, 1.0 - p) < 30.0:
        if p > 0.5:
            return m - binomial_draw(m, 1.0 - p, rng)
        u = rng.random()
        ratio = p / (1.0 - p)
        pmf = (1.0 - p) ** m
        acc = pmf
        k = 0
        while u > acc and k < m:
            k += 1
            pmf *= ratio * (m - k + 1) / k
            acc += pmf
        return k
    return int(np.count_nonzero(rng.random(m) < p))


# ---------------------------------------------------------------------------
# Structured sample sets: tau draws per basis element, full recycling
# ---------------------------------------------------------------------------


class StructuredSampleSet:
    """Per-basis-element rows of induced draws, extended without discarding.

    Row nu always holds exactly tau points drawn from the distribution
    induced by basis element nu. Growing the index set fills rows for the new
    elements; raising tau appends fresh draws to every row. Points already
    drawn are never touched, so every earlier sample set is a row-prefix of
    every later one. The vectorized point order is row-major over the
    lexicographic enumeration of the index set.
    """

    def __init__(self, basis, index_set, tau, iteration, seed, rows, row_iters,
                 extra=None, extra_iters=None):
        self.basis = basis
        self.index_set = index_set
        self.tau = tau
        self.iteration = iteration
        self.seed = seed
        self.rows = rows
        self.row_iters = row_iters
        d = basis.dim
        self.extra = np.empty((0, d)) if extra is None else extra
        self.extra_iters = np.empty(0, dtype=np.int64) if extra_iters is None else extra_iters

    @classmethod
    def initial(cls, basis: TensorBasis, index_set: IndexSet, tau: int, seed) -> "StructuredSampleSet":
        # tau = 0 gives an empty structured part, useful as the base of a
        # purely mixture-sampled set via append_mixture
        if tau < 0:
            raise ValueError("tau must be >= 0")
        base = as_seed_sequence(seed)
        rows = {}
        row_iters = {}
        for nu in index_set.members:
            rows[nu] = sample_chi(basis, nu, tau, stream(base, 1, 1, *nu))
            row_iters[nu] = np.ones(tau, dtype=np.int64)
        return cls(basis, index_set, tau, 1, base, rows, row_iters)

    @property
    def m(self) -> int:
        return self.tau * len(self.index_set) + self.extra.shape[0]

    def extend(self, new_index_set: IndexSet, new_tau: int) -> "StructuredSampleSet":
        """Grow to a nested index set and/or a larger tau, keeping all points."""
        if self.extra.shape[0]:
            raise ValueError("cannot extend after mixture points were appended")
        old_members = set(self.index_set.members)
        if not old_members <= set(new_index_set.members):
            raise ValueError("index sets must be nested")
        if new_tau < self.tau:
            raise ValueError("per-element count tau cannot decrease")
        it = self.iteration + 1
        rows = {}
        row_iters = {}
        for nu in new_index_set.members:
            if nu in old_members:
                if new_tau > self.tau:
                    fresh = sample_chi(self.basis, nu, new_tau - self.tau, stream(self.seed, 1, it, *nu))
                    rows[nu] = np.vstack([self.rows[nu], fresh])
                    row_iters[nu] = np.concatenate(
                        [self.row_iters[nu], np.full(new_tau - self.tau, it, dtype=np.int64)]
                    )
                else:
                    rows[nu] = self.rows[nu]
                    row_iters[nu] = self.row_iters[nu]
            else:
                rows[nu] = sample_chi(self.basis, nu, new_tau, stream(self.seed, 1, it, *nu))
                row_iters[nu] = np.full(new_tau, it, dtype=np.int64)
        return StructuredSampleSet(self.basis, new_index_set, new_tau, it, self.seed, rows, row_iters)

    def append_mixture(self, target_m: int) -> "StructuredSampleSet":
        """Top up with i.i.d. mixture draws until the total count is target_m.

        The structured rows stay untouched; the appended points are drawn from
        the uniform mixture over the current index set and are marked as such.
        With target_m equal to the structured count this is a no-op.
        """
        structured_m = self.tau * len(self.index_set)
        have = structured_m + self.extra.shape[0]
        if target_m < have:
            raise ValueError(f"target {target_m} below current count {have}")
        count = target_m - have
        mix = MixtureMeasure(self.basis, self.index_set)
        fresh = mix.sample(count, stream(self.seed, 3, self.iteration, self.extra.shape[0]))
        extra = np.vstack([self.extra, fresh])
        extra_iters = np.concatenate(
            [self.extra_iters, np.full(count, self.iteration, dtype=np.int64)]
        )
        return StructuredSampleSet(
            self.basis, self.index_set, self.tau, self.iteration, self.seed,
            self.rows, self.row_iters, extra, extra_iters,
        )

    def points(self) -> np.ndarray:
        """All points, row-major over the lex enumeration, extras last."""
        blocks = [self.rows[nu] for nu in self.index_set.members]
        if self.extra.shape[0]:
            blocks.append(self.extra)
        return np.vstack(blocks)

    def provenance(self):
        """(components, iterations) aligned with points(); extras say 'mixture'."""
        comps = []
        iters = []
        for nu in self.index_set.members:
            comps.extend([nu] * self.tau)
            iters.append(self.row_iters[nu])
        comps.extend(["mixture"] * self.extra.shape[0])
        if self.extra.shape[0]:
            iters.append(self.extra_iters)
        return comps, np.concatenate(iters)

    def to_csv(self, path):
        _write_points_csv(path, self.points(), *self.provenance())


# ---------------------------------------------------------------------------
# Flat sample sets: i.i.d. mixture draws, recycling most earlier points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MixtureExtensionCounters:
    """Bookkeeping for one growth step of a FlatSampleSet."""

    iteration: int
    binomial: int
    recycled: int
    fresh_old: int
    fresh_new: int
    discarded: int


class FlatSampleSet:
    """i.i.d. draws from the uniform mixture over the current index set.

    Growing to a nested index set splits the target mixture into its old and
    new components: a binomial count decides how many points must come from
    the new components, the old-component share is recycled from the previous
    set as far as possible, and any shortfall is drawn fresh. Points that
    cannot be recycled are dropped but counted, so the total number of draws
    ever generated is tracked exactly.
    """

    def __init__(self, basis, index_set, iteration, seed, points, point_iters,
                 counters, total_generated):
        self.basis = basis
        self.index_set = index_set
        self.iteration = iteration
        self.seed = seed
        self._points = points
        self.point_iters = point_iters
        self.counters = counters
        self.total_generated = total_generated

    @classmethod
    def initial(cls, basis: TensorBasis, index_set: IndexSet, m: int, seed) -> "FlatSampleSet":
        if m < 1:
            raise ValueError("m must be >= 1")
        base = as_seed_sequence(seed)
        pts = _sample_component_mixture(basis, index_set.members, m, stream(base, 2, 1, 2))
        return cls(basis, index_set, 1, base, pts, np.ones(m, dtype=np.int64), [], m)

    @property
    def m(self) -> int:
        return self._points.shape[0]

    def points(self) -> np.ndarray:
        return self._points

    def provenance(self):
        return ["mixture"] * self.m, self.point_iters

    @property
    def unrecycled_upper(self) -> int:
        """Running sum of the binomial counts; bounds the unrecycled draws."""
        return sum(c.binomial for c in self.counters)

    def extend(self, new_index_set: IndexSet, new_m: int) -> "FlatSampleSet":
        old_members = set(self.index_set.members)
        new_members = set(new_index_set.members)
        if not old_members <= new_members:
            raise ValueError("index sets must be nested")
        if new_m < self.m:
            raise ValueError("sample count cannot decrease")
        it = self.iteration + 1
        n_old = len(self.index_set)
        n_new = len(new_index_set)
        fresh_components = sorted(new_members - old_members)
        b = binomial_draw(new_m, (n_new - n_old) / n_new, stream(self.seed, 2, it, 0))
        recycled = min(new_m - b, self.m)
        fresh_old = max(new_m - b - self.m, 0)
        fresh_new = new_m - recycled - fresh_old
        blocks = [self._points[:recycled]]
        iter_blocks = [self.point_iters[:recycled]]
        if fresh_old:
            blocks.append(
                _sample_component_mixture(self.basis, self.index_set.members, fresh_old,
                                          stream(self.seed, 2, it, 1))
            )
            iter_blocks.append(np.full(fresh_old, it, dtype=np.int64))
        if fresh_new:
            blocks.append(
                _sample_component_mixture(self.basis, fresh_components, fresh_new,
                                          stream(self.seed, 2, it, 2))
            )
            iter_blocks.append(np.full(fresh_new, it, dtype=np.int64))
        counters = self.counters + [
            MixtureExtensionCounters(
                iteration=it, binomial=b, recycled=recycled, fresh_old=fresh_old,
                fresh_new=fresh_new, discarded=self.m - recycled,
            )
        ]
        return FlatSampleSet(
            self.basis, new_index_set, it, self.seed,
            np.vstack(blocks), np.concatenate(iter_blocks),
            counters, self.total_generated + fresh_old + fresh_new,
        )

    def to_csv(self, path):
        _write_points_csv(path, self._points, *self.provenance())


def unrecycled_mean_var(n_seq, m_seq) -> tuple[float, float]:
    """Closed-form mean and variance of the summed binomial counts across a
    growth schedule (n_k, m_k), k = 1..T."""
    mean = 0.0
    var = 0.0
    for k in range(1, len(n_seq)):
        p = (n_seq[k] - n_seq[k - 1]) / n_seq[k]
        mean += m_seq[k] * p
        var += m_seq[k] * p * (1.0 - p)
    return mean, var


def _component_label(comp) -> str:
    if isinstance(comp, str):
        return comp
    return ";".join(str(c) for c in comp)


def _write_points_csv(path, points, components, iterations):
    d = points.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x_{i + 1}" for i in range(d)] + ["component", "iteration"])
        for row, comp, it in zip(points, components, iterations):
            writer.writerow([repr(float(v)) for v in row] + [_component_label(comp), int(it)])


def read_points_csv(path):
    """Read a sample-set CSV back as (points, components, iterations)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        d = len(header) - 2
        pts = []
        comps = []
        iters = []
        for row in reader:
            pts.append([float(v) for v in row[:d]])
            comp = row[d]
            comps.append(comp if comp == "mixture" else tuple(int(c) for c in comp.split(";")))
            iters.append(int(row[d + 1]))
    return np.array(pts).reshape(len(pts), d), comps, np.array(iters, dtype=np.int64)
