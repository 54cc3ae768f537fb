"""Monte Carlo EM for the disease-model parameters and the Dirichlet prior.

Each iteration draws a bank of mating-type vectors from their posterior
at the current iterate (``sampler.run_chain``), then maximises the Monte
Carlo Q function.  Q separates into a theta part (mean conditional
log-likelihood over the bank) and an alpha part (mean Dirichlet
log-density), so the two are maximised independently.

The importance-sampling engine reuses one bank across iterations and
reweights it towards the current iterate instead of drawing new chains.
"""
import enum
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .dirichlet import (
    DirichletFitError,
    dirichlet_log_density_many,
    dirichlet_mle_from_log_means,
)
from . import kernels
from .genetics import _REACHABLE, PARAM_NAMES, STATE_PROBS, Theta
from .sampler import ChainConfig, run_chain

__all__ = [
    "Variant",
    "FREE_PARAMS",
    "EmConfig",
    "TraceRow",
    "FitResult",
    "FitError",
    "init_psi",
    "q_mc",
    "theta_term",
    "m_step_theta",
    "m_step_alpha",
    "importance_weights",
    "fit",
    "fit_importance",
]


class Variant(enum.Enum):
    FULL = "full"
    NULL = "null"
    NO_IMPRINTING = "no-imprinting"
    NO_MATERNAL = "no-maternal"


# indices into (delta, r1, r2, r_im, s1, s2) left free by each variant
FREE_PARAMS = {
    Variant.FULL: (0, 1, 2, 3, 4, 5),
    Variant.NULL: (0,),
    Variant.NO_IMPRINTING: (0, 1, 2, 4, 5),
    Variant.NO_MATERNAL: (0, 1, 2, 3),
}


@dataclass
class EmConfig:
    max_iter: int = 100
    min_iter: int = 3
    rel_tol: float = 1e-4
    mc_samples: int = 10000
    mc_burnin: int = 1000
    is_switch_iter: int = 10
    is_weight_ess_floor: float = 0.2

    def __post_init__(self):
        if self.max_iter < 1 or self.min_iter < 1 or self.mc_samples < 1:
            raise ValueError("max_iter, min_iter and mc_samples must be positive")
        if self.min_iter > self.max_iter:
            raise ValueError("min_iter exceeds max_iter")
        if self.is_switch_iter < 1:
            raise ValueError("is_switch_iter must be at least 1")
        if not 0 <= self.is_weight_ess_floor <= 1:
            raise ValueError("is_weight_ess_floor must lie in [0, 1]")

    def chain_config(self):
        return ChainConfig(n_samples=self.mc_samples, n_burnin=self.mc_burnin)


@dataclass
class TraceRow:
    iteration: int
    theta: Theta
    alpha: np.ndarray
    q_value: float
    resampled: bool
    ess: float


@dataclass
class FitResult:
    theta_hat: Theta
    alpha_hat: np.ndarray
    model_variant: Variant
    final_bank: object
    trace: list
    n_iter: int
    converged: bool
    warnings: list = field(default_factory=list)
    final_weights: np.ndarray = None
    data_fingerprint: tuple = None
    elapsed: float = float("nan")
    n_chains: int = 0


class FitError(RuntimeError):
    """EM aborted; ``partial`` holds the fit state reached so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


def init_psi(data, variant=Variant.FULL):
    """Starting values: neutral relative risks and alpha from observed parental counts."""
    if len(data) == 0:
        raise ValueError("dataset is empty")
    n_mf = data.n_mf.reshape(9).astype(float)
    alpha0 = n_mf / n_mf.sum() * 100.0 + 1.0
    sib = data.sib_counts
    if sib.sum() > 0:
        delta0 = float(sib[..., 1].sum() / sib.sum())
        delta0 = min(max(delta0, 0.005), 0.5)
    else:
        delta0 = 0.05
    return Theta(delta0), alpha0


def _weighted_mean(values, weights):
    if weights is None:
        return float(values.mean())
    return float(np.dot(weights, values) / weights.sum())


# parameters are confined to [exp(-LOG_BOUND), exp(LOG_BOUND)]
LOG_BOUND = 15.0
_NO_WEIGHTS = np.empty(0)
_REACHABLE_U8 = _REACHABLE.astype(np.uint8)


def _theta_part(params, bank, data, weights):
    """theta-dependent piece of the mean log-likelihood (kernel call)."""
    a_idx, a_cnt, b_idx, b_cnt = data.term_counts
    return kernels.theta_objective(
        np.asarray(params, dtype=float), STATE_PROBS, _REACHABLE_U8,
        a_idx, a_cnt, b_idx, b_cnt, float(len(data)), bank.samples,
        _NO_WEIGHTS if weights is None else np.asarray(weights, dtype=float),
    )


def theta_term(params, bank, data, weights=None):
    """(Weighted) mean over the bank of log P(Y | Z_t; theta); -inf if infeasible."""
    v = _theta_part(params, bank, data, weights)
    if not np.isfinite(v):
        return -np.inf
    return float(v + bank.mean_log(weights) @ data.n_mf.reshape(9))


def alpha_term(alpha, bank, weights=None):
    return _weighted_mean(dirichlet_log_density_many(alpha, bank.log_samples), weights)


def q_mc(theta, alpha, bank, data, weights=None):
    """Monte Carlo Q: mean log-likelihood plus mean Dirichlet log-density over the bank."""
    if len(bank) == 0:
        raise ValueError("sample bank is empty")
    return theta_term(theta.as_array(), bank, data, weights) + alpha_term(alpha, bank, weights)


def _simplex(x0, step):
    k = len(x0)
    pts = np.tile(x0, (k + 1, 1))
    for i in range(k):
        pts[i + 1, i] += step
    return pts


def m_step_theta(bank, data, theta_init, variant=Variant.FULL, weights=None,
                 max_iter=500, xatol=1e-6, step=0.1, restarts=1):
    """Maximise the theta part of Q over the variant's free parameters.

    Nelder-Mead on log-parameters; infeasible points (delta >= 1, a
    penetrance above 1, or a log-parameter outside +-LOG_BOUND) score -inf.
    The box keeps empty genotype cells from sending a relative risk to
    0 or infinity.  The search restarts from its own
    optimum with a smaller fresh simplex, which guards against simplex
    collapse.  ``step`` is the initial simplex edge in log-parameter units.
    Returns ``(theta, messages)``.
    """
    free = np.array(FREE_PARAMS[Variant(variant)])
    base = theta_init.as_array()
    messages = []
    if Variant(variant) is Variant.NULL and not data.has_siblings:
        messages.append("theta part of Q is flat in delta for DS-only data; delta kept")
        return theta_init, messages

    def neg(x):
        if np.any(np.abs(x) > LOG_BOUND):
            return np.inf
        params = base.copy()
        params[free] = np.exp(x)
        if params[0] >= 1.0:
            return np.inf
        v = _theta_part(params, bank, data, weights)
        return -v if np.isfinite(v) else np.inf

    x0 = np.log(base[free])
    f0 = neg(x0)
    best_x, best_f = x0, f0
    evals = 0
    ok = False
    for attempt in range(restarts + 1):
        res = minimize(
            neg,
            best_x,
            method="Nelder-Mead",
            options={
                "initial_simplex": _simplex(best_x, step),
                "xatol": xatol,
                "fatol": 1e-9,
                "maxiter": max_iter,
            },
        )
        evals += res.nfev
        ok = bool(res.success)
        improved = res.fun < best_f - 1e-10
        if res.fun <= best_f:
            best_x, best_f = res.x, res.fun
        if not improved and attempt > 0:
            break
        step = step / 5
    if not ok:
        messages.append("Nelder-Mead hit its iteration cap; best iterate returned")
    if not best_f <= f0:
        return theta_init, messages
    params = base.copy()
    params[free] = np.exp(best_x)
    return Theta.from_array(params), messages


def _moment_alpha(bank, weights):
    z = bank.samples
    if weights is None:
        mean = z.mean(axis=0)
        var = z.var(axis=0)
    else:
        w = weights / weights.sum()
        mean = w @ z
        var = w @ (z - mean) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.mean(mean * (1 - mean) / var) - 1.0
    if not np.isfinite(precision) or precision <= 0:
        return None
    return precision * mean


def m_step_alpha(bank, weights=None):
    """Dirichlet maximum-likelihood concentration from the bank's mean log-coordinates."""
    if len(bank) == 0:
        raise ValueError("sample bank is empty")
    mean_log = bank.mean_log(weights)
    return dirichlet_mle_from_log_means(mean_log, init=_moment_alpha(bank, weights))


def importance_weights(bank, theta_k, alpha_k, theta_ref, alpha_ref, data):
    """Weights moving a bank drawn at (theta_ref, alpha_ref) to (theta_k, alpha_k).

    Returns ``(weights, ess)`` with weights rescaled so the largest is 1 and
    ``ess = (sum w)^2 / sum w^2``.
    """
    log_w = (
        bank.loglik_for(theta_k, data)
        + dirichlet_log_density_many(alpha_k, bank.log_samples)
        - bank.loglik_for(theta_ref, data)
        - dirichlet_log_density_many(alpha_ref, bank.log_samples)
    )
    log_w = log_w - log_w.max()
    w = np.exp(log_w)
    ess = float(w.sum() ** 2 / np.dot(w, w))
    return w, ess


def _relative_change(theta_old, theta_new, alpha_old, alpha_new, free):
    t_old = theta_old.as_array()[list(free)]
    t_new = theta_new.as_array()[list(free)]
    p_old = alpha_old / alpha_old.sum()
    p_new = alpha_new / alpha_new.sum()
    return float(max(np.max(np.abs(t_new - t_old) / t_old), np.max(np.abs(p_new - p_old) / p_old)))


def _run_em(data, config, variant, rng, importance, theta0=None, alpha0=None):
    variant = Variant(variant)
    config = config or EmConfig()
    rng = rng if rng is not None else np.random.default_rng()
    if len(data) == 0:
        raise ValueError("dataset is empty")
    start = time.perf_counter()
    theta_init, alpha_init = init_psi(data, variant)
    theta = theta0 if theta0 is not None else theta_init
    alpha = np.asarray(alpha0 if alpha0 is not None else alpha_init, dtype=float)
    free = FREE_PARAMS[variant]
    chain_cfg = config.chain_config()
    trace, messages = [], []
    streak = 0
    step = 0.1
    converged = False
    ref = None  # (bank, theta, alpha) the current bank was drawn at
    weights = None
    n_chains = 0

    def partial(reason):
        return FitError(
            reason,
            FitResult(theta, alpha, variant, ref[0] if ref else None, trace, len(trace), False,
                      messages, data_fingerprint=data.fingerprint),
        )

    for k in range(1, config.max_iter + 1):
        ess = float("nan")
        resampled = True
        weights = None
        if importance and ref is not None and k > config.is_switch_iter:
            weights, ess = importance_weights(ref[0], theta, alpha, ref[1], ref[2], data)
            resampled = ess / len(ref[0]) < config.is_weight_ess_floor
            if resampled:
                weights = None
        if resampled:
            try:
                chain = run_chain(theta, alpha, data, chain_cfg, rng)
            except Exception as exc:
                raise partial(f"chain failed at iteration {k}: {exc}") from exc
            n_chains += 1
            messages.extend(chain.warnings)
            ref = (chain.bank, theta, alpha)
            ess = float(len(chain.bank))
        bank = ref[0]
        theta_new, msgs = m_step_theta(bank, data, theta, variant, weights, step=step)
        for msg in msgs:
            if msg not in messages:
                messages.append(msg)
        try:
            alpha_new = m_step_alpha(bank, weights)
        except DirichletFitError as exc:
            raise partial(f"alpha M-step failed at iteration {k}: {exc}") from exc
        q = q_mc(theta_new, alpha_new, bank, data, weights)
        trace.append(TraceRow(k, theta_new, alpha_new, q, resampled, ess))
        change = _relative_change(theta, theta_new, alpha, alpha_new, free)
        streak = streak + 1 if change < config.rel_tol else 0
        moved = np.abs(np.log(theta_new.as_array() / theta.as_array())).max()
        step = float(np.clip(3 * moved, 0.005, 0.1))
        theta, alpha = theta_new, alpha_new
        if streak >= 2 and k >= config.min_iter:
            converged = True
            break

    if not converged:
        messages.append(f"no convergence within {config.max_iter} iterations")
    return FitResult(
        theta_hat=theta,
        alpha_hat=alpha,
        model_variant=variant,
        final_bank=ref[0],
        trace=trace,
        n_iter=len(trace),
        converged=converged,
        warnings=messages,
        final_weights=weights,
        data_fingerprint=data.fingerprint,
        elapsed=time.perf_counter() - start,
        n_chains=n_chains,
    )


def fit(data, config=None, variant=Variant.FULL, rng=None, theta0=None, alpha0=None):
    """Plain MCEM: a fresh posterior chain every iteration."""
    return _run_em(data, config, variant, rng, importance=False, theta0=theta0, alpha0=alpha0)


def fit_importance(data, config=None, variant=Variant.FULL, rng=None, theta0=None, alpha0=None):
    """MCEM with importance reweighting of one bank after ``config.is_switch_iter``.

    A fresh chain replaces the reference bank whenever the effective sample
    size of the weights falls below ``config.is_weight_ess_floor`` times the
    bank size.
    """
    return _run_em(data, config, variant, rng, importance=True, theta0=theta0, alpha0=alpha0)


def theta_dict(theta):
    return dict(zip(PARAM_NAMES, theta.as_array()))
