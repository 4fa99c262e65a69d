import numpy as np
import pytest

import beamsparse.admm as admm_mod
from beamsparse import (
    AdmmState,
    AngleGrid,
    ArrayGeometry,
    ContractError,
    DegenerateInputError,
    DesiredPattern,
    DivergenceError,
    MajorizerDiag,
    SolverParams,
    WeightVector,
    augmented_lagrangian,
    beampattern,
    build_steering_set,
    converged,
    entropy,
    inner_products,
    majorizer_diag,
    objective_value,
    solve,
    solve_weight_system,
    update_alpha,
    update_dual,
    update_v,
    update_w,
)
from beamsparse.admm import data_fit_gram


def random_instance(rng, n=5, k=7):
    geo = ArrayGeometry(n)
    angles = np.sort(rng.uniform(-90, 90, k))
    while np.any(np.diff(angles) <= 0):
        angles = np.sort(rng.uniform(-90, 90, k))
    steering = build_steering_set(geo, AngleGrid(angles))
    values = rng.uniform(0.5, 3.0, k)
    values[rng.random(k) < 0.3] = 0.0
    if not values.any():
        values[0] = 1.0
    d = DesiredPattern(values, values > 0)
    return steering, d


def random_complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def unit(rng, n):
    z = random_complex(rng, n)
    return z / np.linalg.norm(z)


def dense_outer_products(steering):
    return [np.outer(a, a.conj()) for a in steering.vectors]


def grid_search_alpha(r, d, rounds=40, points=201):
    """Independent 1-D minimizer of sum_k |r_k - alpha d_k|^2."""
    bound = float(np.abs(d) @ np.abs(r)) / float(d @ d) + 1.0
    lo, hi = -bound, bound
    for _ in range(rounds):
        grid = np.linspace(lo, hi, points)
        costs = np.array([np.sum(np.abs(r - a * d) ** 2) for a in grid])
        best = int(np.argmin(costs))
        lo = grid[max(0, best - 1)]
        hi = grid[min(points - 1, best + 1)]
    return 0.5 * (lo + hi)


class TestInnerProducts:
    def test_matched_weights(self):
        rng = np.random.default_rng(0)
        steering, _ = random_instance(rng)
        x = steering.vectors[2] / np.sqrt(5)
        r = inner_products(steering, x, x)
        assert r[2] == pytest.approx(5.0, abs=1e-10)

    def test_zero_auxiliary(self):
        rng = np.random.default_rng(1)
        steering, _ = random_instance(rng)
        r = inner_products(steering, unit(rng, 5), np.zeros(5, complex))
        np.testing.assert_array_equal(r, 0.0)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            steering, _ = random_instance(rng)
            w, v = random_complex(rng, 5), random_complex(rng, 5)
            r = inner_products(steering, w, v)
            dense = np.array([w.conj() @ A @ v for A in dense_outer_products(steering)])
            np.testing.assert_allclose(r, dense, atol=1e-10)

    def test_rejects_wrong_length(self):
        rng = np.random.default_rng(3)
        steering, _ = random_instance(rng)
        with pytest.raises(ContractError):
            inner_products(steering, np.ones(4, complex), np.ones(5, complex))


class TestUpdateAlpha:
    def test_perfect_match_gives_one(self):
        d = DesiredPattern(np.array([1.0, 2.0, 0.0]), np.array([True, True, False]))
        assert update_alpha(d.values.astype(complex), d) == pytest.approx(1.0)

    def test_pure_scaling(self):
        d = DesiredPattern(np.array([1.0, 2.0, 3.0]), np.ones(3, bool))
        assert update_alpha(2.0 * d.values.astype(complex), d) == pytest.approx(2.0)

    def test_matches_grid_search(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            _, d = random_instance(rng)
            r = random_complex(rng, 7)
            got = update_alpha(r, d)
            want = grid_search_alpha(r, d.values)
            assert got == pytest.approx(want, abs=1e-6)

    def test_never_improved_by_perturbation(self):
        rng = np.random.default_rng(5)
        _, d = random_instance(rng)
        r = random_complex(rng, 7)
        alpha = update_alpha(r, d)
        cost = lambda a: float(np.sum(np.abs(r - a * d.values) ** 2))
        assert cost(alpha) <= cost(alpha + 1e-3) + 1e-12
        assert cost(alpha) <= cost(alpha - 1e-3) + 1e-12

    def test_rejects_zero_template(self):
        d = DesiredPattern(np.zeros(3), np.zeros(3, bool))
        with pytest.raises(DegenerateInputError):
            update_alpha(np.ones(3, complex), d)


class TestUpdateV:
    def test_zero_lam_returns_consensus_point(self):
        rng = np.random.default_rng(6)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.0, rho=5.0)
        w, u = unit(rng, 5), random_complex(rng, 5)
        v = update_v(steering, w, u, 1.3, d, params)
        np.testing.assert_allclose(v, w + u, atol=1e-12)

    def test_first_order_optimality_dense(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            steering, d = random_instance(rng)
            params = SolverParams(lam=float(rng.uniform(0.05, 2.0)), rho=float(rng.uniform(2.5, 40)))
            w, u = unit(rng, 5), random_complex(rng, 5)
            alpha = float(rng.uniform(-2, 2))
            v = update_v(steering, w, u, alpha, d, params)
            mats = dense_outer_products(steering)
            gram = params.lam * sum(A.conj().T @ np.outer(w, w.conj()) @ A for A in mats)
            rhs_match = params.lam * alpha * sum(
                dk * (A.conj().T @ w) for dk, A in zip(d.values, mats)
            )
            residual = gram @ v - rhs_match + (params.rho / 2) * (v - (w + u))
            rhs = rhs_match + (params.rho / 2) * (w + u)
            assert np.linalg.norm(residual) <= 1e-8 * np.linalg.norm(rhs)

    def test_local_optimality_probe(self):
        rng = np.random.default_rng(8)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.7, rho=6.0)
        w, u = unit(rng, 5), 0.2 * random_complex(rng, 5)
        alpha = 1.1
        v = update_v(steering, w, u, alpha, d, params)

        def cost(x):
            r = inner_products(steering, w, x)
            gap = w - x + u
            return params.lam * float(np.sum(np.abs(r - alpha * d.values) ** 2)) + (
                params.rho / 2
            ) * float(np.real(np.vdot(gap, gap)))

        base = cost(v)
        for _ in range(100):
            assert base <= cost(v + 1e-4 * random_complex(rng, 5)) + 1e-12


class TestUpdateW:
    def test_zero_lam_zero_majorizer_projects_consensus(self):
        rng = np.random.default_rng(9)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.0, rho=4.0)
        v, u = random_complex(rng, 5), 0.3 * random_complex(rng, 5)
        m = MajorizerDiag(np.zeros(5), 0.0)
        w = update_w(steering, v, u, 0.9, d, m, params)
        np.testing.assert_allclose(w.values, (v - u) / np.linalg.norm(v - u), atol=1e-12)

    def test_first_order_optimality_dense(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            steering, d = random_instance(rng)
            params = SolverParams(lam=float(rng.uniform(0.05, 2.0)), rho=float(rng.uniform(2.5, 40)))
            anchor = WeightVector(unit(rng, 5))
            m = majorizer_diag(anchor)
            v, u = random_complex(rng, 5), random_complex(rng, 5)
            alpha = float(rng.uniform(-2, 2))
            w_hat = solve_weight_system(steering, v, u, alpha, d, m, params)
            mats = dense_outer_products(steering)
            gram = params.lam * sum(A @ np.outer(v, v.conj()) @ A.conj().T for A in mats)
            rhs_match = params.lam * alpha * sum(dk * (A @ v) for dk, A in zip(d.values, mats))
            residual = (
                gram @ w_hat
                + m.diag * w_hat
                - rhs_match
                + (params.rho / 2) * (w_hat - (v - u))
            )
            rhs = rhs_match + (params.rho / 2) * (v - u)
            assert np.linalg.norm(residual) <= 1e-8 * np.linalg.norm(rhs)

    def test_projected_solution_quality_probe(self):
        # Projection after the exact solve is a heuristic, so optimality
        # against nearby feasible points is probed at a settled mid-run state
        # (early transients can be beaten by ~1e-3 relative; settled states
        # are not). The update is replayed exactly as the solver performs it:
        # v and the majorizer anchor from the settled state, the dual from
        # the state before it.
        rng = np.random.default_rng(11)
        steering, d = random_instance(rng, n=6, k=9)
        params = SolverParams(lam=0.3, rho=8.0, max_iters=25)
        states = []
        solve(steering, d, params, observer=states.append)
        state, prev = states[20], states[19]
        m = majorizer_diag(prev.w)
        w = update_w(steering, state.v, prev.u, state.alpha, d, m, params)

        def surrogate(x):
            r = inner_products(steering, x, state.v)
            gap = x - state.v + prev.u
            return (
                params.lam * float(np.sum(np.abs(r - state.alpha * d.values) ** 2))
                + float(m.diag @ (np.abs(x) ** 2))
                + (params.rho / 2) * float(np.real(np.vdot(gap, gap)))
            )

        base = surrogate(w.values)
        for _ in range(100):
            probe = w.values + 0.01 * random_complex(rng, 6)
            probe /= np.linalg.norm(probe)
            assert base <= surrogate(probe) + 1e-12

    def test_output_is_unit_norm(self):
        rng = np.random.default_rng(12)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.4, rho=7.0)
        m = majorizer_diag(WeightVector(unit(rng, 5)))
        w = update_w(steering, random_complex(rng, 5), random_complex(rng, 5), 1.0, d, m, params)
        assert w.normalized
        assert abs(np.linalg.norm(w.values) - 1.0) <= 1e-12

    def test_system_matrix_stays_positive_definite(self):
        # majorizer diagonal is bounded below by -1 on the sphere, so the
        # weight system keeps minimum eigenvalue >= rho/2 - 1 for rho > 2
        rng = np.random.default_rng(13)
        for _ in range(20):
            steering, _ = random_instance(rng)
            lam = float(rng.uniform(0.01, 1.0))
            rho = float(rng.uniform(2.1, 50.0))
            m = majorizer_diag(WeightVector(unit(rng, 5)))
            matrix = data_fit_gram(steering, random_complex(rng, 5), lam)
            matrix[np.diag_indices(5)] += m.diag + rho / 2
            min_eig = float(np.linalg.eigvalsh(matrix).min())
            assert min_eig >= rho / 2 - 1 - 1e-9
            np.linalg.cholesky(matrix)  # factorization must succeed


class TestUpdateDual:
    def test_consensus_leaves_dual_unchanged(self):
        rng = np.random.default_rng(14)
        u, w = random_complex(rng, 4), random_complex(rng, 4)
        np.testing.assert_allclose(update_dual(u, w, w), u)

    def test_zero_dual_returns_gap(self):
        rng = np.random.default_rng(15)
        w, v = random_complex(rng, 4), random_complex(rng, 4)
        np.testing.assert_allclose(update_dual(np.zeros(4, complex), w, v), w - v)

    def test_linear_growth_under_constant_gap(self):
        rng = np.random.default_rng(16)
        w, v = random_complex(rng, 4), random_complex(rng, 4)
        u = np.zeros(4, complex)
        for k in range(1, 6):
            u = update_dual(u, w, v)
            np.testing.assert_allclose(u, k * (w - v), atol=1e-12)


class TestObjectiveAndLagrangian:
    def test_one_hot_zero_alpha(self):
        rng = np.random.default_rng(17)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.6, rho=3.0)
        one_hot = np.zeros(5, complex)
        one_hot[0] = 1.0
        w = WeightVector(one_hot, normalized=True)
        assert objective_value(steering, w, 0.0, d, params) == pytest.approx(
            params.lam * 7, abs=1e-10
        )

    def test_perfect_match_leaves_entropy(self):
        rng = np.random.default_rng(18)
        steering, _ = random_instance(rng)
        w = WeightVector.unit(np.ones(5, complex))
        pattern = beampattern(steering, w)
        assert np.all(pattern > 0)
        d = DesiredPattern(pattern, pattern > 0)
        params = SolverParams(lam=2.0, rho=3.0)
        assert objective_value(steering, w, 1.0, d, params) == pytest.approx(
            entropy(w), abs=1e-10
        )

    def test_objective_matches_dense_reimplementation(self):
        rng = np.random.default_rng(19)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.9, rho=3.0)
        w = WeightVector(unit(rng, 5))
        alpha = 1.4
        mats = dense_outer_products(steering)
        total = params.lam * sum(
            (float(np.real(w.values.conj() @ A @ w.values)) - alpha * dk) ** 2
            for A, dk in zip(mats, d.values)
        ) + entropy(w)
        assert objective_value(steering, w, alpha, d, params) == pytest.approx(total, rel=1e-12)

    def test_lagrangian_reduces_to_objective_on_consensus(self):
        rng = np.random.default_rng(20)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.8, rho=5.0)
        w = WeightVector(unit(rng, 5))
        state = AdmmState(alpha=1.2, v=w.values.copy(), w=w, u=np.zeros(5, complex))
        want = objective_value(steering, w, 1.2, d, params)
        assert augmented_lagrangian(state, steering, d, params) == pytest.approx(want, rel=1e-12)

    def test_penalty_term_added(self):
        rng = np.random.default_rng(21)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.8, rho=5.0)
        w = WeightVector(unit(rng, 5))
        delta = random_complex(rng, 5)
        consensus = AdmmState(alpha=0.7, v=w.values.copy(), w=w, u=np.zeros(5, complex))
        shifted = AdmmState(alpha=0.7, v=w.values - delta, w=w, u=np.zeros(5, complex))
        gap_energy = float(np.real(np.vdot(delta, delta)))
        base_phi = augmented_lagrangian(consensus, steering, d, params)
        got = augmented_lagrangian(shifted, steering, d, params)
        # matching term changes too, so compare against a direct evaluation
        r = inner_products(steering, w.values, w.values - delta)
        phi = float(np.sum(np.abs(r - 0.7 * d.values) ** 2))
        want = params.lam * phi + entropy(w) + (params.rho / 2) * gap_energy
        assert got == pytest.approx(want, rel=1e-12)
        assert base_phi != got

    def test_term_by_term_oracle(self):
        rng = np.random.default_rng(22)
        steering, d = random_instance(rng)
        params = SolverParams(lam=1.3, rho=9.0)
        w = WeightVector(unit(rng, 5))
        state = AdmmState(alpha=-0.4, v=random_complex(rng, 5), w=w, u=random_complex(rng, 5))
        mats = dense_outer_products(steering)
        phi = sum(
            abs(w.values.conj() @ A @ state.v - state.alpha * dk) ** 2
            for A, dk in zip(mats, d.values)
        )
        gap = w.values - state.v + state.u
        want = params.lam * float(phi) + entropy(w) + (params.rho / 2) * float(
            np.real(np.vdot(gap, gap))
        )
        assert augmented_lagrangian(state, steering, d, params) == pytest.approx(want, rel=1e-12)

    def test_majorized_lagrangian_dominates(self):
        rng = np.random.default_rng(24)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.5, rho=4.0)
        anchor = WeightVector(unit(rng, 5))
        m = majorizer_diag(anchor)
        for _ in range(50):
            state = AdmmState(
                alpha=0.9, v=random_complex(rng, 5), w=WeightVector(unit(rng, 5)), u=random_complex(rng, 5)
            )
            exact = augmented_lagrangian(state, steering, d, params)
            bound = augmented_lagrangian(state, steering, d, params, majorizer=m)
            assert bound >= exact - 1e-9
        at_anchor = AdmmState(alpha=0.9, v=anchor.values.copy(), w=anchor, u=np.zeros(5, complex))
        assert augmented_lagrangian(at_anchor, steering, d, params, majorizer=m) == pytest.approx(
            augmented_lagrangian(at_anchor, steering, d, params), abs=1e-9
        )


class TestSolverParams:
    def test_rejects_rho_at_or_below_two(self):
        with pytest.raises(ContractError):
            SolverParams(rho=2.0)
        with pytest.raises(ContractError):
            SolverParams(rho=-1.0)

    def test_rejects_bad_eta_and_iters(self):
        with pytest.raises(ContractError):
            SolverParams(eta=0.0)
        with pytest.raises(ContractError):
            SolverParams(max_iters=-1)

    def test_infinite_eta_allowed(self):
        assert SolverParams(eta=np.inf).eta == np.inf


class TestSolve:
    def test_infinite_eta_stops_after_one_iteration(self):
        rng = np.random.default_rng(25)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.2, rho=5.0, eta=np.inf, max_iters=50)
        _, _, trace = solve(steering, d, params)
        assert len(trace) == 2
        assert trace[-1].iter == 1
        assert converged(trace, params.eta)

    def test_zero_iteration_budget_returns_initial_state(self):
        rng = np.random.default_rng(26)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.2, rho=5.0, max_iters=0)
        w, alpha, trace = solve(steering, d, params)
        assert len(trace) == 1
        assert trace[0].iter == 0
        assert alpha == 1.0
        assert not converged(trace, params.eta)

    def test_trace_iteration_numbering_and_invariants(self):
        rng = np.random.default_rng(27)
        steering, d = random_instance(rng, n=6, k=9)
        params = SolverParams(lam=0.2, rho=5.0, max_iters=30)
        norms = []
        _, _, trace = solve(
            steering, d, params, observer=lambda s: norms.append(np.linalg.norm(s.w.values))
        )
        assert [rec.iter for rec in trace] == list(range(len(trace)))
        assert all(rec.primal_residual >= 0 and rec.w_change >= 0 for rec in trace)
        assert all(abs(nrm - 1.0) <= 1e-10 for nrm in norms)

    def test_seeded_runs_are_reproducible(self):
        rng = np.random.default_rng(28)
        steering, d = random_instance(rng, n=6, k=9)
        params = SolverParams(lam=0.2, rho=5.0, max_iters=40, seed=123)
        w1, a1, t1 = solve(steering, d, params)
        w2, a2, t2 = solve(steering, d, params)
        np.testing.assert_array_equal(w1.values, w2.values)
        assert a1 == a2
        assert t1 == t2

    def test_warm_start_from_given_state(self):
        rng = np.random.default_rng(29)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.2, rho=5.0, max_iters=3)
        init = AdmmState(
            alpha=1.0, v=unit(rng, 5), w=WeightVector(unit(rng, 5)), u=np.zeros(5, complex), iter=10
        )
        _, _, trace = solve(steering, d, params, init=init)
        assert trace[0].iter == 10
        assert trace[-1].iter == 13

    def test_rejects_all_zero_template(self):
        rng = np.random.default_rng(30)
        steering, _ = random_instance(rng)
        d = DesiredPattern(np.zeros(7), np.zeros(7, bool))
        with pytest.raises(DegenerateInputError):
            solve(steering, d, SolverParams(rho=5.0))

    def test_divergence_carries_partial_trace(self, monkeypatch):
        rng = np.random.default_rng(32)
        steering, d = random_instance(rng)
        params = SolverParams(lam=0.2, rho=5.0, max_iters=10)

        calls = {"count": 0}
        real_update_v = admm_mod.update_v

        def poisoned(*args, **kwargs):
            calls["count"] += 1
            out = real_update_v(*args, **kwargs)
            if calls["count"] == 3:
                out = out.copy()
                out[0] = np.nan
            return out

        monkeypatch.setattr(admm_mod, "update_v", poisoned)
        with pytest.raises(DivergenceError) as excinfo:
            solve(steering, d, params)
        # rows: initial state plus the two clean iterations
        assert len(excinfo.value.trace) == 3
