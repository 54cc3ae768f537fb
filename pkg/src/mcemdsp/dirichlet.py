"""Dirichlet machinery for the latent mating-type probabilities."""
import numpy as np
from scipy.special import digamma, gammaln, polygamma

__all__ = [
    "DomainError",
    "DirichletFitError",
    "log_beta",
    "dirichlet_log_density",
    "dirichlet_log_density_many",
    "sample_dirichlet",
    "conditional_pair_log_density",
    "sample_pair_given_rest",
    "dirichlet_mle_from_log_means",
    "inverse_digamma",
]


class DomainError(ValueError):
    """Point outside the open simplex."""


class DirichletFitError(ArithmeticError):
    """Dirichlet maximum-likelihood iteration failed; ``alpha`` holds the last iterate."""

    def __init__(self, message, alpha=None):
        super().__init__(message)
        self.alpha = alpha


def _alpha(alpha):
    a = np.asarray(alpha, dtype=float)
    if np.any(~np.isfinite(a)) or np.any(a <= 0):
        raise ValueError(f"concentration parameters must be positive and finite: {a}")
    return a


def log_beta(alpha):
    """Log of the multivariate beta function."""
    a = _alpha(alpha)
    return float(gammaln(a).sum() - gammaln(a.sum()))


def dirichlet_log_density(alpha, z):
    """log pi_alpha(z) for an interior point z of the simplex."""
    a = _alpha(alpha)
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("point lies on the simplex boundary")
    return float(-log_beta(a) + np.dot(a - 1.0, np.log(z)))


def dirichlet_log_density_many(alpha, log_z):
    """Vectorised density for precomputed log-coordinates, one row per point."""
    a = _alpha(alpha)
    return -log_beta(a) + log_z @ (a - 1.0)


def sample_dirichlet(alpha, rng):
    return rng.dirichlet(_alpha(alpha))


def _pair_mass(z, pair):
    i, j = pair
    if i == j:
        raise ValueError("pair indices must be distinct")
    rest = np.delete(z, [i, j])
    s = 1.0 - rest.sum()
    if s <= 0:
        raise DomainError("no residual mass left for the pair")
    return s


def conditional_pair_log_density(alpha, pair, z):
    """Log density of (z_i, z_j) given the other coordinates.

    Given the rest, the pair lives on the segment z_i + z_j = s with
    s = 1 - sum(rest), and (z_i, z_j) / s ~ Dir(alpha_i, alpha_j).  The
    density is taken with respect to Lebesgue measure on z_i.
    """
    a = _alpha(alpha)
    z = np.asarray(z, dtype=float)
    s = _pair_mass(z, pair)
    i, j = pair
    if z[i] <= 0 or z[j] <= 0:
        raise DomainError("pair coordinate on the boundary")
    ai, aj = a[i], a[j]
    x = z[i] / s
    y = z[j] / s
    log_norm = gammaln(ai + aj) - gammaln(ai) - gammaln(aj)
    return float(log_norm + (ai - 1) * np.log(x) + (aj - 1) * np.log(y) - np.log(s))


def sample_pair_given_rest(alpha, pair, z, rng):
    """Redraw coordinates ``pair`` of z from their conditional law given the rest."""
    a = _alpha(alpha)
    z = np.array(z, dtype=float)
    _pair_mass(z, pair)
    i, j = pair
    s = z[i] + z[j]
    b = rng.beta(a[i], a[j])
    z[i] = s * b
    z[j] = s - z[i]
    return z


def inverse_digamma(y, iters=8):
    """Solve digamma(x) = y elementwise by Newton's method (Minka's initialisation)."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        x = np.where(y >= -2.22, np.exp(y) + 0.5, -1.0 / (y - digamma(1.0)))
    for _ in range(iters):
        x = x - (digamma(x) - y) / polygamma(1, x)
    return x


def _initial_alpha(mean_log):
    # proportions from the geometric means, precision from a one-dimensional
    # Newton solve along that direction
    p = np.exp(mean_log)
    p = p / p.sum()
    precision = 1.0
    for _ in range(100):
        a = precision * p
        g = np.dot(p, digamma(precision) - digamma(a) + mean_log)
        h = polygamma(1, precision) - np.dot(p * p, polygamma(1, a))
        step = g / h
        new = precision - step
        if new <= 0:
            new = precision / 2
        if abs(new - precision) < 1e-12 * precision:
            precision = new
            break
        precision = new
    return precision * p


def dirichlet_mle_from_log_means(mean_log_z, init=None, max_iter=1000, tol=1e-8):
    """Concentration vector maximising the mean Dirichlet log-density.

    Solves digamma(alpha_k) - digamma(sum(alpha)) = mean_log_z[k] with
    Newton steps that exploit the diagonal-plus-rank-one Hessian, falling
    back to damped steps that keep alpha positive.
    """
    g_bar = np.asarray(mean_log_z, dtype=float)
    if np.any(g_bar >= 0) or not np.all(np.isfinite(g_bar)):
        raise ValueError("mean log-coordinates must be finite and negative")
    # a point mass has sum(exp(E log z)) = 1 and no finite maximiser
    if np.exp(g_bar).sum() >= 1.0 - 1e-13:
        raise DirichletFitError("sample has no spread; concentration diverges")
    alpha = _initial_alpha(g_bar) if init is None else np.array(init, dtype=float)

    def objective(a):
        return gammaln(a.sum()) - gammaln(a).sum() + np.dot(a - 1.0, g_bar)

    for it in range(max_iter):
        total = alpha.sum()
        grad = digamma(total) - digamma(alpha) + g_bar
        if np.linalg.norm(grad) < tol:
            return alpha
        q = -polygamma(1, alpha)
        z = polygamma(1, total)
        b = np.sum(grad / q) / (1.0 / z + np.sum(1.0 / q))
        step = (grad - b) / q
        f0 = objective(alpha)
        t = 1.0
        while True:
            cand = alpha - t * step
            if np.all(cand > 0) and objective(cand) >= f0 - 1e-12 * abs(f0):
                break
            t *= 0.5
            if t < 1e-12:
                cand = alpha
                break
        if np.array_equal(cand, alpha):
            # Newton stalled at round-off; one fixed-point step to escape
            cand = inverse_digamma(digamma(total) + g_bar)
        alpha = cand
        if not np.all(np.isfinite(alpha)) or alpha.max() > 1e12:
            raise DirichletFitError("concentration diverged", alpha)
    raise DirichletFitError(f"no convergence after {max_iter} iterations", alpha)
