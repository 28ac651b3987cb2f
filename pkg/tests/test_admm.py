import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import ista
from splitadmm import (SensingProblem, SolverConfig, gen_problem,
                       lasso_admm_reference)
from splitadmm.admm import (IMAGING_PRESET, apply_scaling, soft_threshold,
                            soft_threshold_vec)
from splitadmm.errors import ParameterError

complexes = st.complex_numbers(max_magnitude=1e6, allow_nan=False,
                               allow_infinity=False)


def test_soft_threshold_examples():
    assert soft_threshold(5.0, 2.0) == 3.0
    assert soft_threshold(-5.0, 2.0) == -3.0
    assert soft_threshold(1.5, 2.0) == 0.0
    assert soft_threshold(2.0, 2.0) == 0.0
    # |3+4j| = 5, shrink by 1 -> 4/5 of the input
    assert np.isclose(soft_threshold(3 + 4j, 1.0), 2.4 + 3.2j)


def test_soft_threshold_vec_matches_scalar():
    a = np.array([5, -5, 1.5, 3 + 4j, 0])
    got = soft_threshold_vec(a, 2.0)
    want = [soft_threshold(complex(x), 2.0) for x in a]
    assert np.allclose(got, want)
    with pytest.raises(ParameterError):
        soft_threshold_vec(a, -1.0)


@given(a=complexes, kappa=st.floats(0, 1e6))
def test_soft_threshold_shrinks(a, kappa):
    out = soft_threshold(a, kappa)
    assert abs(out) <= abs(a)
    assert abs(out) == pytest.approx(max(abs(a) - kappa, 0.0), abs=1e-9,
                                     rel=1e-12)
    if out != 0:
        # phase is preserved
        assert abs(out / abs(out) - a / abs(a)) < 1e-9


@given(a=complexes, b=complexes, kappa=st.floats(0, 1e3))
def test_soft_threshold_nonexpansive(a, b, kappa):
    sa, sb = soft_threshold(a, kappa), soft_threshold(b, kappa)
    assert abs(sa - sb) <= abs(a - b) * (1 + 1e-12) + 1e-9


def test_reference_scalar_example():
    # minimize 1/2 |u - 3|^2 + |u| -> u = 2 (second coordinate stays 0)
    p = SensingProblem(np.eye(2), np.array([3.0, 0.0]))
    rep = lasso_admm_reference(p, SolverConfig(rho=1.0, lam=1.0,
                                               max_iters=100))
    assert np.allclose(rep.solution, [2, 0], atol=1e-8)
    assert len(rep.trace) == 100
    assert rep.iterations_run == 100


def test_reference_zero_data():
    p = SensingProblem(np.eye(3) + 0.5, np.zeros(3))
    rep = lasso_admm_reference(p, SolverConfig(rho=1.0, lam=0.1,
                                               max_iters=20))
    assert not np.any(rep.solution)
    assert rep.objective == 0.0


def test_reference_matches_ista_oracle():
    p = gen_problem(30, 80, 4, seed=11)
    lam = 0.05 * np.abs(p.H.conj().T @ p.g).max()
    _, f_star = ista(p.H, p.g, lam)
    rep = lasso_admm_reference(p, SolverConfig(rho=2.0, lam=lam,
                                               max_iters=3000))
    assert rep.objective == pytest.approx(f_star, rel=1e-6)


def test_early_stop():
    p = SensingProblem(np.eye(2), np.array([3.0, 0.0]))
    cfg = SolverConfig(rho=1.0, lam=1.0, max_iters=500, eps_pri=1e-6,
                       eps_dual=1e-6)
    rep = lasso_admm_reference(p, cfg)
    assert rep.iterations_run < 500
    assert rep.trace.primal[-1] <= 1e-6 and rep.trace.dual[-1] <= 1e-6


def test_scaling_equivalence():
    # scaled problem with lam equals unscaled problem with lam / scl^2
    p = gen_problem(20, 40, 3, seed=1)
    scl = 1e-2
    a = lasso_admm_reference(p, SolverConfig(rho=1e-4, lam=1e-5, scl=scl,
                                             max_iters=30))
    b = lasso_admm_reference(p, SolverConfig(rho=1e-4 / scl**2,
                                             lam=1e-5 / scl**2, max_iters=30))
    assert np.allclose(a.solution, b.solution, rtol=1e-9, atol=1e-12)
    assert apply_scaling(p, 1.0) is p


def test_config_validation():
    for bad in (dict(rho=0), dict(lam=-1), dict(scl=math.inf),
                dict(max_iters=0), dict(max_iters=2.5), dict(eps_pri=-1),
                dict(threads=0)):
        with pytest.raises(ParameterError):
            SolverConfig(**bad)
    cfg = SolverConfig(**IMAGING_PRESET)
    assert (cfg.rho, cfg.lam, cfg.scl, cfg.max_iters) == (1e5, 1e-2, 1e-4, 50)


def test_residual_definitions_reference():
    p = gen_problem(15, 30, 3, seed=5)
    cfg = SolverConfig(rho=1.5, lam=0.01, max_iters=10)
    rep = lasso_admm_reference(p, cfg, record_iterates=True)
    v_prev = np.zeros(30)
    for k, rec in enumerate(rep.iterates):
        u = rec.u['node']
        assert rep.trace.primal_sq[k] == pytest.approx(
            np.sum(np.abs(u - rec.v) ** 2), rel=1e-12)
        assert rep.trace.dual_sq[k] == pytest.approx(
            1.5**2 * np.sum(np.abs(rec.v - v_prev) ** 2), rel=1e-12)
        v_prev = rec.v
