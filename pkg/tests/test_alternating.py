import numpy as np
import pytest

from cjopt.alternating import (
    AlternatingState,
    solve_alternating,
    solve_b_zero,
    step1_update_x,
    step2_update_c,
)
from cjopt.errors import Infeasible
from cjopt.feasibility import optimal_power
from cjopt.model import SystemParams, precoder_from_unit_columns
from cjopt.optimal import solve_optimal
from util import custom_channels, feasible_instance, make_instance


def _fresh_state(params, c_tilde, x=None):
    z, l = params.z, params.l
    return AlternatingState(
        c_tilde=np.asarray(c_tilde, dtype=float),
        x=np.ones(z) if x is None else np.asarray(x, dtype=float),
        W=np.zeros((l - z, z), dtype=complex),
        Gamma=np.zeros((z, l), dtype=complex),
        eta=np.inf,
        iteration=0,
    )


def _b_zero_scalar_setup(p_tot=20.0, sigma2=1.0, tau=2.0):
    """K=1, Z=1, B = 0, unit-norm jammer-to-Eve channel."""
    F = np.array([[1.0], [0.0]])
    H = np.array([[0.5], [0.5j]])
    B = np.zeros((2, 1))
    G = np.array([[1.0], [0.0]])
    ch = custom_channels(F, H, B, G)
    pre = precoder_from_unit_columns(np.array([[1.0], [0.0]], dtype=complex), ch, tau=tau)
    params = SystemParams(n=2, k=1, l=2, z=1, sigma2=sigma2, tau=tau, p_tot=p_tot)
    return params, ch, pre


class TestStep1:
    def test_scalar_b_zero_closed_form(self):
        # With no leakage the whole headroom goes into the single jamming
        # direction: x* = sqrt(P_tot - p), eta* = p |a|^2 / (P_tot - p).
        params, ch, pre = _b_zero_scalar_setup(p_tot=20.0)
        p = optimal_power(pre, params)  # sigma^2 tau = 2
        state = _fresh_state(params, c_tilde=[1e-9], x=[1.0])
        out = step1_update_x(state, pre, ch, params)
        head = params.p_tot - p[0]
        a2 = np.abs(pre.A[0, 0]) ** 2
        assert out.x[0] == pytest.approx(np.sqrt(head), rel=1e-5)
        assert out.eta == pytest.approx(p[0] * a2 / head, rel=1e-5)

    def test_infeasible_caps(self):
        params, ch, pre = feasible_instance(0)
        # caps so large that the implied power allocation exceeds the budget
        state = _fresh_state(params, c_tilde=np.full(params.k, 10.0 * params.p_tot))
        with pytest.raises(Infeasible):
            step1_update_x(state, pre, ch, params)


class TestStep2:
    def test_b_zero_keeps_caps_at_zero(self):
        params, ch, pre = _b_zero_scalar_setup(p_tot=20.0)
        state = _fresh_state(params, c_tilde=[1e-9], x=[1.0])
        state = step1_update_x(state, pre, ch, params)
        out = step2_update_c(state, pre, ch, params)
        assert out.c_tilde[0] <= 1e-6
        assert out.eta <= state.eta + 1e-9

    def test_never_worse_than_incumbent(self):
        for seed in range(5):
            params, ch, pre = feasible_instance(seed, l=4)  # L < K + Z
            state, _ = solve_alternating(pre, ch, params, max_iters=2)
            out = step2_update_c(state, pre, ch, params)
            assert out.eta <= state.eta * (1.0 + 1e-9)

    def test_leakage_unavoidable_below_rank(self):
        # With L < K + Z the stacked [G B] system cannot be zero-forced,
        # so some leaked power cap must stay strictly positive.
        for seed in range(5):
            params, ch, pre = feasible_instance(seed, n=4, k=2, l=3, z=2)
            joint = np.hstack([ch.G, ch.B])
            assert np.linalg.matrix_rank(joint) < params.k + params.z
            state, _ = solve_alternating(pre, ch, params)
            assert state.c_tilde.max() > 0.0


class TestSolveAlternating:
    def test_matches_optimal_when_zero_forcing_possible(self):
        for seed in range(5):
            params, ch, pre = feasible_instance(seed, p_tot=1e4)
            d = solve_optimal(pre, ch, params)
            state, rep = solve_alternating(pre, ch, params)
            assert rep.eta <= d.eta * 1.05

    def test_constraints_hold_both_regimes(self):
        for l in (6, 4):
            for seed in range(5):
                params, ch, pre = feasible_instance(seed, l=l)
                state, rep = solve_alternating(pre, ch, params)
                assert np.all(rep.sinr_user >= params.tau * (1.0 - 1e-6))
                used = rep.p.sum() + rep.sigma_trace
                assert used <= params.p_tot * (1.0 + 1e-6)

    def test_iteration_count_is_small(self):
        counts = []
        for seed in range(5):
            params, ch, pre = feasible_instance(seed)
            state, _ = solve_alternating(pre, ch, params)
            counts.append(state.iteration)
        assert max(counts) <= 15

    def test_infeasible_raises(self):
        params, ch, pre = make_instance(0, tau=1e6, p_tot=1.0)
        with pytest.raises(Infeasible):
            solve_alternating(pre, ch, params)


class TestSolveBZero:
    def test_scalar_closed_form(self):
        params, ch, pre = _b_zero_scalar_setup(p_tot=20.0)
        p = optimal_power(pre, params)
        x, Gamma, eta = solve_b_zero(pre, ch, params)
        head = params.p_tot - p[0]
        a2 = np.abs(pre.A[0, 0]) ** 2
        assert x[0] == pytest.approx(np.sqrt(head), rel=1e-5)
        assert eta == pytest.approx(p[0] * a2 / head, rel=1e-5)

    def test_objective_homogeneous_in_eve_gains(self):
        params, ch, pre = feasible_instance(2)
        _, _, eta = solve_b_zero(pre, ch, params)
        pre2 = precoder_from_unit_columns(pre.U, custom_channels(ch.F, 2.0 * ch.H, ch.B, ch.G),
                                          params.tau)
        _, _, eta2 = solve_b_zero(pre2, ch, params)
        assert eta2 == pytest.approx(4.0 * eta, rel=1e-5)

    def test_matches_step1_without_leakage(self):
        params, ch, pre = _b_zero_scalar_setup(p_tot=30.0)
        x, _, eta = solve_b_zero(pre, ch, params)
        state = _fresh_state(params, c_tilde=[1e-12], x=[1.0])
        out = step1_update_x(state, pre, ch, params)
        assert out.x[0] == pytest.approx(x[0], rel=1e-5)
        assert out.eta == pytest.approx(eta, rel=1e-5)
