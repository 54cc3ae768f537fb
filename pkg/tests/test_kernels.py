"""Compiled and pure-Python kernels must agree."""
import numpy as np
import pytest

from mcemdsp import _pykernels, kernels
from mcemdsp.engine import _REACHABLE_U8, theta_term
from mcemdsp.genetics import STATE_PROBS, Theta, loglik_bank
from mcemdsp.sampler import ChainConfig, run_chain
from mcemdsp.simulate import DISEASE_MODELS, SCENARIOS, simulate_dataset

try:
    from mcemdsp import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


@pytest.fixture(scope="module")
def data():
    return simulate_dataset(DISEASE_MODELS[7], SCENARIOS[4], 80, True, seed=8)


def _sweep_inputs(seed):
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(1, 8, 9)
    pairs = np.array([(0, 1), (2, 3), (4, 5), (6, 7), (8, 0), (1, 2), (3, 4), (5, 6), (7, 8)], dtype=np.int64)
    n_sweeps = 300
    betas = np.column_stack([rng.beta(alpha[i], alpha[j], n_sweeps) for i, j in pairs])
    log_u = np.log(rng.random((n_sweeps, len(pairs))))
    counts = rng.integers(0, 20, 9).astype(float)
    h = rng.uniform(0.01, 0.05, 9)
    z = rng.dirichlet(alpha)
    return z, counts, h, float(counts.sum()), pairs, betas, log_u


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@needs_ext
@pytest.mark.parametrize("seed", range(5))
def test_sweeps_bit_identical(seed):
    z, counts, h, n, pairs, betas, log_u = _sweep_inputs(seed)
    out_c, out_p = np.empty((95, 9)), np.empty((95, 9))
    zc, zp = z.copy(), z.copy()
    acc_c = _ckernels.mh_sweeps(zc, counts, h, n, pairs, betas, log_u, 15, 3, out_c)
    acc_p = _pykernels.mh_sweeps(zp, counts, h, n, pairs, betas, log_u, 15, 3, out_p)
    assert tuple(acc_c) == tuple(acc_p)
    assert np.array_equal(out_c, out_p)
    assert np.array_equal(zc, zp)


@needs_ext
def test_objective_agrees(data, rng):
    z = rng.dirichlet(np.full(9, 5.0), size=400)
    w = rng.random(400)
    a_idx, a_cnt, b_idx, b_cnt = data.term_counts
    for params in (np.array([0.05, 1, 3, 3, 2, 2.0]), np.array([0.02, 1.3, 2.2, 0.7, 1.1, 0.9])):
        for weights in (np.empty(0), w):
            args = (params, STATE_PROBS, _REACHABLE_U8, a_idx, a_cnt, b_idx, b_cnt, float(len(data)), z, weights)
            assert _ckernels.theta_objective(*args) == pytest.approx(_pykernels.theta_objective(*args), rel=1e-12)
    bad = np.array([0.5, 1, 3, 3, 2, 2.0])
    args = (bad, STATE_PROBS, _REACHABLE_U8, a_idx, a_cnt, b_idx, b_cnt, float(len(data)), z, np.empty(0))
    assert _ckernels.theta_objective(*args) == -np.inf == _pykernels.theta_objective(*args)


def test_theta_term_matches_bank_mean(data):
    theta = Theta(0.05, 1, 3, 3, 2, 2)
    bank = run_chain(theta, np.full(9, 10.0), data, ChainConfig(500, 50), np.random.default_rng(1)).bank
    direct = loglik_bank(theta.as_array(), bank.log_samples, bank.samples, data).mean()
    assert theta_term(theta.as_array(), bank, data) == pytest.approx(direct, rel=1e-12)
