"""Metropolis-Hastings sampling of mating-type probabilities given the data.

The target is f(Z | Y) proportional to P(Y | Z; theta) * Dir(Z; alpha).  Two
coordinates are updated at a time by proposing from their conditional
prior given the remaining seven, so the acceptance ratio reduces to the
likelihood ratio P(Y | Z*) / P(Y | Z).

Because the likelihood depends on Z only through sum(N_mf log z_mf) and the
recruitment probability z . h(theta), a whole chain needs nothing but the
parental counts N and the 9-vector h, which is what the sweep kernel sees.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata, norm

from . import kernels
from .dirichlet import sample_pair_given_rest
from .genetics import _theta_constant, log_likelihood_given_z, loglik_bank

__all__ = [
    "DEFAULT_PAIRS",
    "ChainConfig",
    "SampleBank",
    "ChainResult",
    "mh_ratio",
    "mh_step_pair",
    "run_chain",
    "run_diagnostic_chains",
    "psrf",
]

# covering, overlapping sweep over the nine coordinates
DEFAULT_PAIRS = ((0, 1), (2, 3), (4, 5), (6, 7), (8, 0), (1, 2), (3, 4), (5, 6), (7, 8))


@dataclass
class ChainConfig:
    n_samples: int = 10000
    n_burnin: int = 1000
    pair_schedule: tuple = DEFAULT_PAIRS
    thin: int = 1
    n_diag_chains: int = 4

    def __post_init__(self):
        if self.n_samples < 1 or self.n_burnin < 0 or self.thin < 1:
            raise ValueError("n_samples and thin must be positive, n_burnin non-negative")
        covered = {k for pair in self.pair_schedule for k in pair}
        if covered != set(range(9)):
            raise ValueError(f"pair schedule leaves coordinates {set(range(9)) - covered} frozen")
        if any(i == j for i, j in self.pair_schedule):
            raise ValueError("pair schedule contains a degenerate pair")


@dataclass
class SampleBank:
    """Monte Carlo draws of Z with cached per-sample log-likelihoods.

    ``loglik`` maps a key (typically the tuple of theta values) to the
    vector of log P(Y | Z_t; theta).
    """

    samples: np.ndarray
    loglik: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=float)
        self._log = None

    def __len__(self):
        return self.samples.shape[0]

    @property
    def log_samples(self):
        if self._log is None:
            self._log = np.log(self.samples)
        return self._log

    def mean_log(self, weights=None):
        if weights is None:
            return self.log_samples.mean(axis=0)
        w = np.asarray(weights, dtype=float)
        return w @ self.log_samples / w.sum()

    def loglik_for(self, theta, data):
        """log P(Y | Z_t; theta) for every sample, cached by theta."""
        key = tuple(theta.as_array())
        if key not in self.loglik:
            self.loglik[key] = loglik_bank(key, self.log_samples, self.samples, data)
        return self.loglik[key]


@dataclass
class ChainResult:
    bank: SampleBank
    acceptance_rate: float
    burnin_acceptance_rate: float = float("nan")
    psrf: np.ndarray = None
    warnings: list = field(default_factory=list)


def mh_ratio(theta, data, z_current, z_proposed):
    """P(Y | z_proposed) / P(Y | z_current); 1 for an empty dataset."""
    if len(data) == 0:
        return 1.0
    lr = log_likelihood_given_z(theta, z_proposed, data) - log_likelihood_given_z(
        theta, z_current, data
    )
    return float(np.exp(lr))


def mh_step_pair(theta, alpha, data, z, pair, rng):
    """One pairwise update.  Returns (new state, accepted flag)."""
    proposal = sample_pair_given_rest(alpha, pair, z, rng)
    ratio = mh_ratio(theta, data, z, proposal)
    if rng.random() < min(ratio, 1.0):
        return proposal, True
    return np.array(z, dtype=float), False


def _chain_inputs(theta, data):
    if len(data) == 0:
        return np.zeros(9), np.ones(9), 0.0
    const, h = _theta_constant(theta.as_array(), data)
    if h is None:
        raise ValueError(f"penetrance exceeds 1 for {theta}")
    if not np.isfinite(const):
        # names the offending family
        log_likelihood_given_z(theta, np.full(9, 1 / 9), data)
    return data.n_mf.reshape(9).astype(float), h, float(len(data))


def run_chain(theta, alpha, data, config=None, rng=None, z0=None):
    """Draw ``config.n_samples`` recorded states from f(Z | Y; theta, alpha).

    The start is a draw from Dir(alpha) unless ``z0`` is given.  All random
    numbers are generated up front so the compiled and pure-Python kernels
    consume identical inputs.
    """
    config = config or ChainConfig()
    rng = rng if rng is not None else np.random.default_rng()
    alpha = np.asarray(alpha, dtype=float)
    counts, h, n = _chain_inputs(theta, data)
    z = np.array(rng.dirichlet(alpha) if z0 is None else z0, dtype=float)
    pairs = np.array(config.pair_schedule, dtype=np.int64)
    n_sweeps = config.n_burnin + config.n_samples * config.thin
    betas = np.empty((n_sweeps, len(pairs)))
    for p, (i, j) in enumerate(pairs):
        betas[:, p] = rng.beta(alpha[i], alpha[j], size=n_sweeps)
    with np.errstate(divide="ignore"):
        log_u = np.log(rng.random((n_sweeps, len(pairs))))
    out = np.empty((config.n_samples, 9))
    acc_burn, acc_main = kernels.mh_sweeps(
        z, counts, h, n, pairs, betas, log_u, config.n_burnin, config.thin, out
    )
    n_prop_burn = config.n_burnin * len(pairs)
    n_prop = n_sweeps * len(pairs)
    result = ChainResult(
        bank=SampleBank(out),
        acceptance_rate=(acc_burn + acc_main) / n_prop,
        burnin_acceptance_rate=acc_burn / n_prop_burn if n_prop_burn else float("nan"),
    )
    check = result.burnin_acceptance_rate if n_prop_burn else result.acceptance_rate
    if check < 0.01:
        msg = f"acceptance rate {check:.4f} below 0.01; posterior may be degenerate"
        result.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    if len(data):
        result.bank.loglik_for(theta, data)
    return result


def run_diagnostic_chains(theta, alpha, data, config=None, rng=None):
    """Run ``n_diag_chains`` chains from overdispersed starts and compute PSRF.

    Starting points are drawn from the flat Dirichlet, which is wider than
    any posterior the EM iterates produce.
    """
    config = config or ChainConfig()
    rng = rng if rng is not None else np.random.default_rng()
    chains = []
    for child in rng.spawn(config.n_diag_chains):
        z0 = child.dirichlet(np.ones(9))
        chains.append(run_chain(theta, alpha, data, config, child, z0=z0))
    factors = psrf([c.bank for c in chains])
    for c in chains:
        c.psrf = factors
    return chains, factors


def psrf(chains):
    """Rank-normalised potential scale reduction factor per coordinate.

    ``chains`` is a list of SampleBank objects or (length, dim) arrays.
    Values are pooled and replaced by normal scores of their ranks before
    the usual between/within variance comparison.
    """
    arrays = [np.asarray(c.samples if isinstance(c, SampleBank) else c, dtype=float) for c in chains]
    if len(arrays) < 2:
        raise ValueError("need at least two chains")
    lengths = {a.shape[0] for a in arrays}
    if len(lengths) != 1:
        raise ValueError(f"chains have different lengths: {sorted(lengths)}")
    n = lengths.pop()
    if n < 100:
        raise ValueError("chains must have at least 100 samples")
    x = np.stack(arrays)  # (chains, n, dim)
    m, _, dim = x.shape
    out = np.empty(dim)
    for k in range(dim):
        ranks = rankdata(x[:, :, k], method="average").reshape(m, n)
        scores = norm.ppf((ranks - 3 / 8) / (m * n + 1 / 4))
        chain_means = scores.mean(axis=1)
        w = scores.var(axis=1, ddof=1).mean()
        b = n * chain_means.var(ddof=1)
        if w == 0:
            out[k] = 1.0 if b == 0 else np.inf
            continue
        var_plus = (n - 1) / n * w + b / n
        out[k] = np.sqrt(var_plus / w)
    return out
