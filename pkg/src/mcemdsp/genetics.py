"""Genetic model for discordant sib-pair families.

Genotypes are counts of the variant allele (0, 1 or 2).  Mating-type
probabilities are length-9 arrays indexed by ``3 * m + f``.

The central quantities are the per-child terms

    A[m, f, c] = sum over origins of P(C=c, origin | m, f) * pen(m, c, origin)
    B[m, f, c] = sum over origins of P(C=c, origin | m, f) * (1 - pen(m, c, origin))

from which every joint discordant-pair probability, the recruitment
denominator and the additional-sibling block follow, since children are
conditionally independent given their parents.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "Origin",
    "Theta",
    "FamilyRecord",
    "Dataset",
    "InvalidThetaError",
    "LikelihoodError",
    "PARAM_NAMES",
    "transmission_prob",
    "penetrance",
    "child_terms",
    "joint_ds_prob",
    "joint_ds_table",
    "ds_denominator",
    "sibling_block_prob",
    "log_likelihood_given_z",
    "loglik_bank",
    "as_simplex",
    "mendel_compatible",
]

PARAM_NAMES = ("delta", "r1", "r2", "r_im", "s1", "s2")


class InvalidThetaError(ValueError):
    """Parameter vector outside the model's domain."""


class LikelihoodError(ArithmeticError):
    """A family has zero probability under the model."""


class Origin(enum.Enum):
    MATERNAL = "maternal"
    PATERNAL = "paternal"
    UNAMBIGUOUS = "unambiguous"
    AMBIGUOUS = "ambiguous"


# probability that a parent with genotype g transmits the variant allele
_TRANSMIT = np.array([0.0, 0.5, 1.0])

# origin-resolved child states: 0, 1 (paternal variant), 1 (maternal variant), 2
_STATE_COUNT = np.array([0, 1, 1, 2])


def _state_table():
    t = np.zeros((3, 3, 4))
    for m in range(3):
        pm = _TRANSMIT[m]
        for f in range(3):
            pf = _TRANSMIT[f]
            t[m, f, 0] = (1 - pm) * (1 - pf)
            t[m, f, 1] = (1 - pm) * pf
            t[m, f, 2] = pm * (1 - pf)
            t[m, f, 3] = pm * pf
    return t


STATE_PROBS = _state_table()
STATE_PROBS.setflags(write=False)
# (m, state) pairs reachable from some father; penetrance validity is checked there
_REACHABLE = STATE_PROBS.sum(axis=1) > 0


def mendel_compatible(m, f, c):
    """True when a child with ``c`` variant alleles can descend from (m, f)."""
    return bool(STATE_PROBS[m, f][_STATE_COUNT == c].sum() > 0)


def transmission_prob(m, f, c, origin=None):
    """Probability that parents (m, f) produce child genotype ``c``.

    For a heterozygous child ``origin`` selects the parental origin of the
    variant allele: ``MATERNAL``/``PATERNAL`` give the origin-resolved
    probability, ``AMBIGUOUS`` (both parents heterozygous) and
    ``UNAMBIGUOUS`` give the total, and ``None`` always gives the total.
    Incompatible combinations return 0.
    """
    _check_genotype(m)
    _check_genotype(f)
    _check_genotype(c)
    t = STATE_PROBS[m, f]
    if c != 1 or origin is None:
        return float(t[_STATE_COUNT == c].sum())
    origin = Origin(origin)
    if origin is Origin.MATERNAL:
        return float(t[2])
    if origin is Origin.PATERNAL:
        return float(t[1])
    ambiguous = t[1] > 0 and t[2] > 0
    if origin is Origin.AMBIGUOUS and not ambiguous:
        raise ValueError("origin is ambiguous only when both parents are heterozygous")
    if origin is Origin.UNAMBIGUOUS and ambiguous:
        raise ValueError("origin is ambiguous for a heterozygous child of two heterozygotes")
    return float(t[1] + t[2])


def _check_genotype(g):
    if g not in (0, 1, 2):
        raise ValueError(f"genotype must be 0, 1 or 2, got {g!r}")


def _state_risks(params):
    """Penetrance for every (mother genotype, child state), shape (3, 4)."""
    delta, r1, r2, r_im, s1, s2 = params
    child = np.array([1.0, r1, r1 * r_im, r2])
    mother = np.array([1.0, s1, s2])
    return delta * mother[:, None] * child[None, :]


def max_penetrance(params):
    """Largest penetrance attainable over all reachable genotype configurations."""
    return float(_state_risks(params)[_REACHABLE].max())


@dataclass(frozen=True)
class Theta:
    """Disease-model parameters: phenocopy rate and five relative risks."""

    delta: float
    r1: float = 1.0
    r2: float = 1.0
    r_im: float = 1.0
    s1: float = 1.0
    s2: float = 1.0

    def __post_init__(self):
        values = self.as_array()
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise InvalidThetaError(f"all parameters must be positive and finite: {self}")
        if not self.delta < 1:
            raise InvalidThetaError(f"delta must lie in (0, 1), got {self.delta}")
        worst = max_penetrance(values)
        if worst > 1:
            raise InvalidThetaError(f"penetrance {worst:.6g} exceeds 1 for {self}")

    def as_array(self):
        return np.array([self.delta, self.r1, self.r2, self.r_im, self.s1, self.s2])

    @classmethod
    def from_array(cls, values):
        return cls(*(float(v) for v in values))

    def replace(self, **changes):
        kw = dict(zip(PARAM_NAMES, self.as_array()))
        kw.update(changes)
        return Theta(**kw)


def penetrance(theta, m, c, origin=Origin.UNAMBIGUOUS):
    """P(D=1 | mother m, child c with resolved origin) under the multiplicative model."""
    _check_genotype(m)
    _check_genotype(c)
    if c == 1:
        origin = Origin(origin)
        if origin not in (Origin.MATERNAL, Origin.PATERNAL):
            raise ValueError("penetrance of a heterozygous child needs a resolved origin")
        state = 2 if origin is Origin.MATERNAL else 1
    else:
        state = 0 if c == 0 else 3
    p = float(_state_risks(theta.as_array())[m, state])
    if p > 1:
        raise InvalidThetaError(f"penetrance {p:.6g} exceeds 1")
    return p


def child_terms(params):
    """Per-child affected/unaffected terms A and B, each of shape (3, 3, 3).

    ``params`` is the raw 6-vector.  Returns ``None`` when some reachable
    penetrance exceeds 1, which optimizers treat as infeasible.
    """
    risk = _state_risks(params)
    if risk[_REACHABLE].max() > 1:
        return None
    aff = STATE_PROBS * risk[:, None, :]
    unaff = STATE_PROBS * (1.0 - risk[:, None, :])
    a = np.stack([aff[..., 0], aff[..., 1] + aff[..., 2], aff[..., 3]], axis=-1)
    b = np.stack([unaff[..., 0], unaff[..., 1] + unaff[..., 2], unaff[..., 3]], axis=-1)
    return a, b


def _terms(theta):
    terms = child_terms(theta.as_array())
    if terms is None:
        raise InvalidThetaError(f"penetrance exceeds 1 for {theta}")
    return terms


def as_simplex(mu, tol=1e-12):
    """Validate a mating-type probability vector and return it as a length-9 array."""
    z = np.asarray(mu, dtype=float).reshape(-1)
    if z.shape != (9,):
        raise ValueError(f"expected 9 mating-type probabilities, got shape {np.shape(mu)}")
    if np.any(z <= 0) or np.any(z >= 1):
        raise ValueError("mating-type probabilities must lie strictly inside (0, 1)")
    if abs(z.sum() - 1.0) > tol:
        raise ValueError(f"mating-type probabilities sum to {z.sum()!r}, not 1")
    return z


def joint_ds_table(theta, mu):
    """All P(M=m, F=f, C1=c1, C2=c2, D1=1, D2=0) as a (3, 3, 3, 3) array."""
    a, b = _terms(theta)
    mu = np.asarray(mu, dtype=float).reshape(3, 3)
    return mu[:, :, None, None] * a[:, :, :, None] * b[:, :, None, :]


def joint_ds_prob(theta, mu, m, f, c1, c2):
    """P(M=m, F=f, C1=c1, C2=c2, D1=1, D2=0); 0 for incompatible genotypes."""
    for g in (m, f, c1, c2):
        _check_genotype(g)
    a, b = _terms(theta)
    return float(np.asarray(mu, dtype=float)[3 * m + f] * a[m, f, c1] * b[m, f, c2])


def pair_discordance(params):
    """h[m, f] = P(D1=1, D2=0 | m, f) as a length-9 vector, or None if infeasible."""
    terms = child_terms(params)
    if terms is None:
        return None
    a, b = terms
    return (a.sum(axis=2) * b.sum(axis=2)).reshape(9)


def ds_denominator(theta, mu):
    """P(D1=1, D2=0), the recruitment probability of a discordant pair."""
    a, b = _terms(theta)
    h = (a.sum(axis=2) * b.sum(axis=2)).reshape(9)
    return float(np.dot(np.asarray(mu, dtype=float).reshape(9), h))


def sibling_block_prob(theta, m, f, siblings):
    """P(additional sibling genotypes and statuses | m, f).

    ``siblings`` is a sequence of ``(genotype, affected)`` pairs; an empty
    sequence gives 1.
    """
    a, b = _terms(theta)
    logp = 0.0
    for c, d in siblings:
        p = a[m, f, c] if d else b[m, f, c]
        if p <= 0:
            return 0.0
        logp += np.log(p)
    return float(np.exp(logp))


@dataclass(frozen=True)
class FamilyRecord:
    """One recruited family; ``c1`` is the affected proband, ``c2`` the unaffected one."""

    m: int
    f: int
    c1: int
    c2: int
    siblings: tuple = ()
    family_id: str = ""

    def __post_init__(self):
        sibs = tuple((int(c), int(bool(d))) for c, d in self.siblings)
        object.__setattr__(self, "siblings", sibs)
        for c in (self.m, self.f, self.c1, self.c2) + tuple(c for c, _ in sibs):
            _check_genotype(c)
        for c in (self.c1, self.c2) + tuple(c for c, _ in sibs):
            if not mendel_compatible(self.m, self.f, c):
                raise ValueError(
                    f"family {self.family_id or '?'}: child genotype {c} is not "
                    f"Mendel-compatible with parents ({self.m}, {self.f})"
                )


@dataclass
class Dataset:
    """A collection of families with cached sufficient statistics."""

    families: list = field(default_factory=list)

    def __post_init__(self):
        self.families = list(self.families)

    def __len__(self):
        return len(self.families)

    @cached_property
    def n_mf(self):
        """3x3 table of parental genotype counts."""
        counts = np.zeros((3, 3), dtype=np.int64)
        for fam in self.families:
            counts[fam.m, fam.f] += 1
        return counts

    @cached_property
    def ds_counts(self):
        """Counts of (m, f, c1, c2) configurations, shape (3, 3, 3, 3)."""
        counts = np.zeros((3, 3, 3, 3), dtype=np.int64)
        for fam in self.families:
            counts[fam.m, fam.f, fam.c1, fam.c2] += 1
        return counts

    @cached_property
    def sib_counts(self):
        """Counts of additional siblings by (m, f, c, affected), shape (3, 3, 3, 2)."""
        counts = np.zeros((3, 3, 3, 2), dtype=np.int64)
        for fam in self.families:
            for c, d in fam.siblings:
                counts[fam.m, fam.f, c, d] += 1
        return counts

    @cached_property
    def term_counts(self):
        """Nonzero multiplicities of the flattened (m, f, c) child terms.

        Returns ``(a_idx, a_cnt, b_idx, b_cnt)`` for affected (A) and
        unaffected (B) terms, probands and additional siblings pooled.
        """
        a = self.ds_counts.sum(axis=3) + self.sib_counts[..., 1]
        b = self.ds_counts.sum(axis=2) + self.sib_counts[..., 0]
        a, b = a.reshape(27), b.reshape(27)
        a_idx, b_idx = np.flatnonzero(a), np.flatnonzero(b)
        return a_idx, a[a_idx].astype(float), b_idx, b[b_idx].astype(float)

    @property
    def has_siblings(self):
        return bool(self.sib_counts.sum() > 0)

    @cached_property
    def fingerprint(self):
        """Hashable summary identifying the data content."""
        return (self.ds_counts.tobytes(), self.sib_counts.tobytes())


def _theta_constant(params, data):
    """Parts of log P(Y|Z) that depend on theta only.

    Returns ``(const, h)`` where ``log P(Y|z) = const + N.log z - n log(z.h)``,
    or ``(-inf, None)`` for infeasible or zero-probability parameter values.
    """
    terms = child_terms(params)
    if terms is None:
        return -np.inf, None
    a, b = terms
    ds = data.ds_counts
    # sum over families of log A[c1] + log B[c2]
    la = ds.sum(axis=3)
    lb = ds.sum(axis=2)
    sib = data.sib_counts
    with np.errstate(divide="ignore"):
        const = (
            _xlog(la, a)
            + _xlog(lb, b)
            + _xlog(sib[..., 1], a)
            + _xlog(sib[..., 0], b)
        )
    h = (a.sum(axis=2) * b.sum(axis=2)).reshape(9)
    return const, h


def _xlog(counts, values):
    mask = counts > 0
    if not mask.any():
        return 0.0
    v = values[mask]
    if np.any(v <= 0):
        return -np.inf
    return float(np.dot(counts[mask], np.log(v)))


def log_likelihood_given_z(theta, z, data):
    """log P(Y | Z=z; theta): conditional log-likelihood of the observed families."""
    if len(data) == 0:
        raise ValueError("dataset is empty")
    z = as_simplex(z, tol=1e-10)
    a, b = _terms(theta)
    h = (a.sum(axis=2) * b.sum(axis=2)).reshape(9)
    log_denom = np.log(np.dot(z, h))
    zz = z.reshape(3, 3)
    with np.errstate(divide="ignore"):
        la, lb = np.log(a), np.log(b)
        lz = np.log(zz)
    const, _ = _theta_constant(theta.as_array(), data)
    if not np.isfinite(const):
        for idx, fam in enumerate(data.families):
            term = la[fam.m, fam.f, fam.c1] + lb[fam.m, fam.f, fam.c2] + lz[fam.m, fam.f]
            for c, d in fam.siblings:
                term += la[fam.m, fam.f, c] if d else lb[fam.m, fam.f, c]
            if not np.isfinite(term):
                name = fam.family_id or f"#{idx}"
                raise LikelihoodError(f"family {name} has zero probability under {theta}")
    n_mf = data.n_mf.reshape(9)
    return float(const + np.dot(n_mf, np.log(z)) - len(data) * log_denom)


def loglik_bank(params, log_z, z, data, theta_const=None):
    """Vectorised log P(Y|Z_t; theta) for every row of a sample matrix.

    ``log_z`` is ``np.log(z)`` precomputed by the caller; ``theta_const``
    optionally supplies the output of the theta-only precomputation.
    """
    const, h = theta_const if theta_const is not None else _theta_constant(params, data)
    if h is None or not np.isfinite(const):
        return np.full(z.shape[0], -np.inf)
    n_mf = data.n_mf.reshape(9).astype(float)
    return const + log_z @ n_mf - len(data) * np.log(z @ h)
