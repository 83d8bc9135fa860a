"""End-to-end acceptance criteria.

Each test prints one pass/fail line; run with `pytest tests/test_acceptance.py -v -s`.
The whole file is self-contained: expected values come from closed forms,
high-order quadrature oracles, or brute-force enumeration, never from the
code paths under test.
"""

import itertools
import math
import time

import numpy as np

from optwls import orthopoly as op
from optwls.adaptive import AdaptiveConfig, EvalCache, make_test_function, run_adaptive
from optwls.basis import TensorBasis
from optwls.estimator import assemble, design_matrix, solve_wls
from optwls.experiments import simulate_mixture_counters
from optwls.multiindex import bulk, index_set_from_members, new_root
from optwls.sampling import (
    THETA,
    BudgetRule,
    FlatSampleSet,
    StructuredSampleSet,
    unrecycled_mean_var,
)


def _report(criterion, ok, detail, t0):
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance {criterion:>2}] {status} ({time.time() - t0:5.1f}s) {detail}", flush=True)
    assert ok, f"criterion {criterion}: {detail}"


def _structured_batch(family, degrees, tau, reps, seed):
    """reps independent structured draws: tau points per degree, d = 1."""
    rng = np.random.default_rng(seed)
    blocks = [
        op.sample_induced(family, j, rng, size=(reps, tau)) if j > 0
        else op.sample_reference(family, rng, size=(reps, tau))
        for j in degrees
    ]
    return np.concatenate(blocks, axis=1)  # (reps, tau * len(degrees))


def _batched_gramians(family, n, points):
    """Weighted Gramians of shape (reps, n, n) for 1-d sample batches."""
    psi = op.eval_all_orthonormal(family, n - 1, points)  # (reps, m, n)
    w = n / np.einsum("rmj,rmj->rm", psi, psi)
    scaled = psi * (w / points.shape[1])[..., None]
    return np.einsum("rmi,rmj->rij", psi, scaled)


def test_acceptance_01_stability_certificate():
    t0 = time.time()
    n, alpha, reps = 10, 0.2, 5000
    tau = BudgetRule.structured_single_space(alpha).tau(n)
    assert tau == 43
    failures = 0
    for start in range(0, reps, 1000):
        batch = min(1000, reps - start)
        pts = _structured_batch(op.LEGENDRE, range(n), tau, batch, seed=(1, start))
        G = _batched_gramians(op.LEGENDRE, n, pts)
        dev = np.abs(np.linalg.eigvalsh(G) - 1.0).max(axis=1)
        failures += int((dev > 0.5).sum())
    freq = failures / reps
    bound = alpha + 3.0 * math.sqrt(alpha * (1 - alpha) / reps)
    _report(1, freq <= bound, f"failure frequency {freq:.4f} <= {bound:.4f}", t0)


def test_acceptance_02_expected_gramian_identity():
    t0 = time.time()
    n, tau, reps = 4, 3, 20000
    pts = _structured_batch(op.LEGENDRE, range(n), tau, reps, seed=2)
    G = _batched_gramians(op.LEGENDRE, n, pts)
    mean = G.mean(axis=0)
    se = G.std(axis=0, ddof=1) / math.sqrt(reps)
    worst = np.abs(mean - np.eye(n)) / se
    _report(2, float(worst.max()) < 5.0, f"max |mean(G)-I| = {worst.max():.2f} se < 5 se", t0)


def test_acceptance_03_union_bound_stability():
    t0 = time.time()
    reps, k_max = 200, 30
    basis = TensorBasis(op.HERMITE, 1)
    rule = BudgetRule.union_structured(0.1, 2.0)
    conds = np.empty((reps, k_max))
    for r in range(reps):
        index_set = new_root(1)
        samples = StructuredSampleSet.initial(basis, index_set, rule.tau(1), seed=(3, r))
        for k in range(1, k_max + 1):
            if k > 1:
                index_set = index_set.add((k - 1,), k)
                samples = samples.extend(index_set, rule.tau(k))
            conds[r, k - 1] = assemble(basis, index_set, samples.points()).cond
    frac_unstable = float((conds.max(axis=1) > 3.0).mean())
    bound = 0.1 + 0.064
    mean_max = float(conds.mean(axis=0).max())
    ok = frac_unstable <= bound and mean_max < 2.5
    _report(
        3, ok,
        f"P(max cond > 3) = {frac_unstable:.3f} <= {bound}; max mean cond = {mean_max:.3f} < 2.5",
        t0,
    )


def test_acceptance_04_full_recycling_and_eval_cache():
    t0 = time.time()
    basis = TensorBasis(op.LEGENDRE, 3)
    rng = np.random.default_rng(4)
    cache = EvalCache(make_test_function(3))
    index_set = new_root(3)
    tau = 3
    state = StructuredSampleSet.initial(basis, index_set, tau, seed=44)
    evaluated = {nu: cache.eval_new(state.rows[nu]) for nu in index_set.members}
    recycled_ok = True
    for k in range(2, 21):
        candidates = sorted(index_set.reduced_margin)
        for nu in [candidates[i] for i in rng.choice(len(candidates),
                                                     size=min(2, len(candidates)),
                                                     replace=False)]:
            if nu in index_set.reduced_margin:
                index_set = index_set.add(nu, k)
        tau += int(rng.integers(0, 2))
        previous = state
        state = state.extend(index_set, tau)
        pts = state.points()
        members = state.index_set.enumerate_lex()
        for nu in previous.index_set.members:
            start = members.index(nu) * state.tau
            block = pts[start : start + previous.tau]
            recycled_ok &= bool(np.array_equal(previous.rows[nu], block))
        for nu in state.index_set.members:
            have = evaluated.get(nu, np.empty(0)).shape[0]
            fresh = state.rows[nu][have:]
            if fresh.shape[0]:
                evaluated[nu] = np.concatenate([evaluated.get(nu, np.empty(0)),
                                                cache.eval_new(fresh)])
    ok = recycled_ok and cache.re_evaluations == 0 and cache.evaluations == state.m
    _report(
        4, ok,
        f"all prefixes bit-identical = {recycled_ok}; re-evaluations = {cache.re_evaluations}",
        t0,
    )


def test_acceptance_05_unrecycled_sample_statistics():
    t0 = time.time()
    k_max, reps = 20, 5000
    rule = BudgetRule.union_iid(0.1, 2.0)
    n_seq = list(range(1, k_max + 1))
    m_seq = [rule.budget(n) for n in n_seq]

    # the counting skeleton reproduces real runs exactly (same streams)
    basis = TensorBasis(op.LEGENDRE, 1)
    skeleton_matches = True
    for seed in (0, 1, 2):
        idx = new_root(1)
        state = FlatSampleSet.initial(basis, idx, m_seq[0], seed=seed)
        for k in range(2, 6):
            idx = idx.add((k - 1,), k)
            state = state.extend(idx, m_seq[k - 1])
        b_sim, totals = simulate_mixture_counters(n_seq[:5], m_seq[:5], seed)
        skeleton_matches &= [c.binomial for c in state.counters] == list(b_sim)
        skeleton_matches &= state.total_generated == int(totals[-1])

    u_tot = np.empty(reps)
    for r in range(reps):
        binomials, _ = simulate_mixture_counters(n_seq, m_seq, (5, r))
        u_tot[r] = binomials.sum()
    mean_u, var_u = unrecycled_mean_var(n_seq, m_seq)
    mean_ok = abs(u_tot.mean() - mean_u) < 4.0 * math.sqrt(var_u / reps)
    var_ok = abs(u_tot.var(ddof=1) - var_u) < 4.0 * var_u * math.sqrt(2.0 / (reps - 1))
    closed_ok = var_u < mean_u <= m_seq[-1] + n_seq[-1] - m_seq[0]
    ok = skeleton_matches and mean_ok and var_ok and closed_ok
    _report(
        5, ok,
        f"mean {u_tot.mean():.1f} vs {mean_u:.1f}, var {u_tot.var(ddof=1):.1f} vs {var_u:.1f}; "
        f"Var < Mean <= {m_seq[-1] + n_seq[-1] - m_seq[0]}; skeleton match = {skeleton_matches}",
        t0,
    )


def test_acceptance_06_budget_comparison():
    t0 = time.time()
    from optwls.sampling import budget_bounds_check

    ok = True
    for alpha, s in itertools.product((0.1, 0.5), (1.5, 2.0, 3.0)):
        iid = BudgetRule.union_iid(alpha, s)
        structured = BudgetRule.union_structured(alpha, s)
        for k in range(1, 101):
            m, mhat = iid.budget(k), structured.budget(k)
            ok &= m <= mhat <= m + k - 1
        ok &= budget_bounds_check(alpha, s, 100).ok
    _report(6, ok, "m <= mhat <= m + n - 1 for all (alpha, s) grids, k <= 100", t0)


def test_acceptance_07_expectation_bound():
    t0 = time.time()
    n, alpha, reps = 5, 0.1, 2000
    tau = BudgetRule.structured_single_space(alpha).tau(n)  # 43
    oracle = op.gauss_rule(op.LEGENDRE, 200)

    def u(t):
        return 1.0 / (t + 3.0)

    psi_o = op.eval_all_orthonormal(op.LEGENDRE, n - 1, oracle.nodes)
    u_norm_sq = float(np.sum(oracle.weights * u(oracle.nodes) ** 2))
    coeff = psi_o.T @ (oracle.weights * u(oracle.nodes))
    best_sq = u_norm_sq - float(coeff @ coeff)
    bound = (1.0 + 4.0 * THETA / math.log(2.0 * n / alpha)) * best_sq + alpha * u_norm_sq

    pts = _structured_batch(op.LEGENDRE, range(n), tau, reps, seed=7)
    psi = op.eval_all_orthonormal(op.LEGENDRE, n - 1, pts)
    w = n / np.einsum("rmj,rmj->rm", psi, psi)
    m = pts.shape[1]
    scaled = psi * (w / m)[..., None]
    G = np.einsum("rmi,rmj->rij", psi, scaled)
    h = np.einsum("rmi,rm->ri", scaled, u(pts))
    dev = np.abs(np.linalg.eigvalsh(G) - 1.0).max(axis=1)
    a = np.linalg.solve(G, h[..., None])[..., 0]
    # ||u - u_C||^2 by quadrature: failing the gate leaves the zero estimator
    err_sq = np.where(
        dev <= 0.5,
        u_norm_sq - 2.0 * a @ coeff + np.einsum("ri,ri->r", a, a),
        u_norm_sq,
    )
    mc_mean = float(err_sq.mean())
    _report(7, mc_mean <= bound, f"E||u-u_C||^2 = {mc_mean:.3e} <= {bound:.3e}", t0)


def test_acceptance_08_adaptive_convergence():
    t0 = time.time()
    d, reps = 16, 10
    basis = TensorBasis(op.LEGENDRE, d)
    u = make_test_function(d)
    cv = np.random.default_rng(808).uniform(-1.0, 1.0, (100_000, d))
    cv_values = u(cv)
    finals = []
    max_cond = 0.0
    for r in range(reps):
        cfg = AdaptiveConfig(beta=0.5, alpha=0.1, s=2.0, k_max=25, k_sg=5, seed=(8, r))
        est, trace = run_adaptive(u, basis, cfg, cv_points=cv, cv_values=cv_values)
        finals.append(trace.records[-1].cv_l2)
        max_cond = max(max_cond, max(rec.cond for rec in trace.records))
    median = float(np.median(finals))
    ok = median <= 1e-4 and max_cond < 3.0
    _report(
        8, ok,
        f"median final cv error = {median:.2e} <= 1e-4; max cond = {max_cond:.3f} < 3",
        t0,
    )


def test_acceptance_09_sampler_comparison():
    t0 = time.time()
    reps, k_max = 500, 40
    basis = TensorBasis(op.HERMITE, 1)
    tau = math.ceil(1.0 / THETA)
    cond1 = np.empty((reps, k_max))
    cond2 = np.empty((reps, k_max))
    for r in range(reps):
        index_set = new_root(1)
        structured = StructuredSampleSet.initial(basis, index_set, tau, seed=(9, r, 0))
        flat = FlatSampleSet.initial(basis, index_set, tau, seed=(9, r, 1))
        for k in range(1, k_max + 1):
            if k > 1:
                index_set = index_set.add((k - 1,), k)
                structured = structured.extend(index_set, tau)
                flat = flat.extend(index_set, tau * k)
            cond1[r, k - 1] = assemble(basis, index_set, structured.points()).cond
            cond2[r, k - 1] = assemble(basis, index_set, flat.points()).cond
    e1 = cond1.mean(axis=0)
    e2 = cond2.mean(axis=0)
    ks = np.arange(5, k_max + 1)
    frac = float((e1[ks - 1] <= e2[ks - 1]).mean())
    _report(9, frac >= 0.8, f"E1 <= E2 on {100 * frac:.0f}% of iterations k >= 5", t0)


def test_acceptance_10_property_suites():
    t0 = time.time()
    notes = []

    # orthonormality at 1e-10 for degrees <= 60
    ortho_ok = True
    for family in (op.LEGENDRE, op.HERMITE):
        rule = op.gauss_rule(family, 150)
        table = op.eval_all_orthonormal(family, 60, rule.nodes)
        gram = (table * rule.weights[:, None]).T @ table
        ortho_ok &= float(np.abs(gram - np.eye(61)).max()) < 1e-10
    notes.append(f"orthonormality {ortho_ok}")

    # KS sampler consistency at the 1% level
    ks_ok = True
    for family in (op.LEGENDRE, op.HERMITE):
        for degree in (0, 1, 5, 20):
            draws = np.sort(
                op.sample_induced(family, degree, np.random.default_rng((10, degree)), size=100_000)
            )
            cdf = op.induced_cdf(family, degree, draws)
            grid = np.arange(1, draws.size + 1) / draws.size
            stat = max(np.abs(cdf - grid).max(), np.abs(cdf - grid + 1.0 / draws.size).max())
            ks_ok &= stat < 1.63 / math.sqrt(draws.size)
    notes.append(f"ks {ks_ok}")

    # margin bookkeeping equals a brute-force scan over 200 random growths
    margin_ok = True
    rng = np.random.default_rng(1010)
    for _ in range(200):
        dim = int(rng.integers(1, 6))
        index_set = new_root(dim)
        for k in range(2, int(rng.integers(3, 12))):
            candidates = sorted(index_set.reduced_margin)
            index_set = index_set.add(candidates[rng.integers(0, len(candidates))], k)
        members = set(index_set.members)
        top = [max(nu[i] for nu in members) + 1 for i in range(dim)]
        margin, reduced = set(), set()
        for nu in itertools.product(*(range(tp + 1) for tp in top)):
            if nu in members:
                continue
            preds = [nu[:j] + (nu[j] - 1,) + nu[j + 1 :] for j in range(dim) if nu[j] > 0]
            if any(p in members for p in preds):
                margin.add(nu)
            if preds and all(p in members for p in preds):
                reduced.add(nu)
        margin_ok &= index_set.margin() == margin and set(index_set.reduced_margin) == reduced
    notes.append(f"margins {margin_ok}")

    # bulk equals exhaustive minimal-cardinality search on margins of size <= 12
    bulk_ok = True
    for trial in range(40):
        trng = np.random.default_rng((10, trial))
        index_set = new_root(int(trng.integers(2, 5)))
        while len(index_set.reduced_margin) < 12 and trng.random() < 0.75:
            candidates = sorted(index_set.reduced_margin)
            index_set = index_set.add(candidates[trng.integers(0, len(candidates))], 2)
        values = {nu: float(trng.integers(1, 9)) for nu in index_set.reduced_margin}
        beta = float(trng.uniform(0.1, 1.0))
        chosen = bulk(index_set, values, beta)
        total = sum(values.values())
        best = None
        for size in range(1, len(values) + 1):
            if any(sum(c) >= beta * total for c in itertools.combinations(values.values(), size)):
                best = size
                break
        bulk_ok &= len(chosen) == best
        bulk_ok &= sum(values[nu] for nu in chosen) >= beta * total - 1e-12
    notes.append(f"bulk {bulk_ok}")

    # pseudo-inverse returns the minimal-norm solution on a singular system
    basis1 = TensorBasis(op.LEGENDRE, 1)
    idx = index_set_from_members([(j,) for j in range(3)])
    pts = np.array([[0.2]] * 4)  # rank-one sample set
    psi, w = design_matrix(basis1, idx, pts)
    system = assemble(basis1, idx, pts, evals=np.ones(4), psi=psi, weights=w)
    a = solve_wls(system).coefficients
    residual_norm = np.linalg.norm(system.G @ a - system.h)
    rng = np.random.default_rng(11)
    minimal_ok = residual_norm < 1e-12
    for _ in range(100):
        null = rng.normal(size=3)
        null -= psi[0] * (psi[0] @ null) / (psi[0] @ psi[0])
        alt = a + null  # still solves the normal equations
        minimal_ok &= np.linalg.norm(system.G @ alt - system.h) < 1e-10
        minimal_ok &= np.linalg.norm(a) <= np.linalg.norm(alt) + 1e-12
    notes.append(f"minimal-norm {minimal_ok}")

    ok = ortho_ok and ks_ok and margin_ok and bulk_ok and minimal_ok
    _report(10, ok, "; ".join(notes), t0)
