"""Brute-force reference computations used to audit the fast likelihood code.

Everything here enumerates transmission allele by allele: each parent's
genotype is written out as two alleles, each child draws one allele from
each parent with probability 1/2, and the parental origin of a
heterozygous child's variant allele is read off the path.  Nothing is
shared with :mod:`mcemdsp.genetics` beyond plain arithmetic.
"""
from itertools import product

__all__ = [
    "EnumeratedTable",
    "enumerate_joint_table",
    "brute_force_prev",
    "recruitment_conditional_mu",
    "PRINTED_TABLE",
    "first_principles_rows",
]


def _alleles(g):
    return [1] * g + [0] * (2 - g)


def _risk(theta, m, child_alleles):
    """Penetrance from explicit (maternal allele, paternal allele)."""
    delta, r1, r2, r_im, s1, s2 = theta
    am, af = child_alleles
    c = am + af
    p = delta
    if c == 1:
        p *= r1
        if am == 1:
            p *= r_im
    elif c == 2:
        p *= r2
    if m == 1:
        p *= s1
    elif m == 2:
        p *= s2
    return p


def _child_paths(m, f):
    """Yield (probability 1/4, (maternal allele, paternal allele)) for all four paths."""
    for am in _alleles(m):
        for af in _alleles(f):
            yield 0.25, (am, af)


class EnumeratedTable(dict):
    """Map (m, f, c1, c2) -> probability, with a ``total`` attribute."""

    @property
    def total(self):
        return sum(self.values())

    def nonzero(self):
        return {k: v for k, v in self.items() if v != 0}


def enumerate_joint_table(theta, mu):
    """P(M, F, C1, C2, D1=1, D2=0) by explicit path enumeration.

    ``theta`` is (delta, r1, r2, r_im, s1, s2); ``mu`` is a length-9
    sequence indexed 3*m + f.
    """
    table = EnumeratedTable()
    for m, f in product(range(3), repeat=2):
        for (p1, ch1), (p2, ch2) in product(list(_child_paths(m, f)), repeat=2):
            key = (m, f, sum(ch1), sum(ch2))
            term = mu[3 * m + f] * p1 * p2 * _risk(theta, m, ch1) * (1.0 - _risk(theta, m, ch2))
            table[key] = table.get(key, 0.0) + term
    return table


def brute_force_prev(theta, mu):
    """Population prevalence P(D=1) of a random child."""
    total = 0.0
    for m, f in product(range(3), repeat=2):
        for p, ch in _child_paths(m, f):
            total += mu[3 * m + f] * p * _risk(theta, m, ch)
    return total


def recruitment_conditional_mu(theta, mu):
    """P(M=m, F=f | D1=1, D2=0) as a length-9 list."""
    table = enumerate_joint_table(theta, mu)
    out = [0.0] * 9
    for (m, f, _, _), v in table.items():
        out[3 * m + f] += v
    total = sum(out)
    return [v / total for v in out]


def sibling_prob(theta, m, f, c, affected):
    """P(C=c, D=affected | m, f) for one additional child, by path enumeration."""
    total = 0.0
    for p, ch in _child_paths(m, f):
        if sum(ch) == c:
            r = _risk(theta, m, ch)
            total += p * (r if affected else 1.0 - r)
    return total


# The published 29-row joint table, transcribed symbolically as printed.  Keys are the printed
# (type, m, f, c1, c2); values map (theta, mu) to the printed expression.
def _printed():
    def row(mu_idx, coef, fn):
        return lambda t, mu: mu[mu_idx] * coef * fn(*t)

    return {
        (1, 0, 0, 0, 0): row(0, 1, lambda d, r1, r2, ri, s1, s2: d * (1 - d)),
        (2, 0, 1, 0, 0): row(1, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * (1 - d)),
        (3, 0, 1, 1, 0): row(1, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r1 * (1 - d)),
        (4, 0, 1, 0, 1): row(1, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * (1 - d * r1)),
        (5, 0, 1, 1, 1): row(1, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r1 * (1 - d * r1)),
        (6, 0, 2, 1, 1): row(2, 1, lambda d, r1, r2, ri, s1, s2: d * r1 * (1 - d * r1)),
        (7, 1, 0, 0, 0): row(3, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * s1 * (1 - d * s1)),
        (8, 1, 0, 1, 0): row(
            3, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r1 * s1 * ri * (1 - d * s1 * ri)
        ),
        (9, 1, 0, 0, 1): row(
            3, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * s1 * ri * (1 - d * r1 * s1 * ri)
        ),
        (10, 1, 0, 1, 1): row(
            3, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r1 * s1 * ri * (1 - d * r1 * s1 * ri)
        ),
        (11, 1, 1, 0, 0): row(4, 1 / 16, lambda d, r1, r2, ri, s1, s2: d * s1 * (1 - d * s1)),
        (12, 1, 1, 1, 0): row(
            4, 1 / 16, lambda d, r1, r2, ri, s1, s2: d * r1 * s1 * (1 - d * s1) * (1 + ri)
        ),
        (13, 1, 1, 0, 1): row(
            4, 1 / 16, lambda d, r1, r2, ri, s1, s2: d * s1 * (2 - d * r1 * s1 * (1 + ri))
        ),
        (14, 1, 1, 1, 1): row(
            4,
            1 / 16,
            lambda d, r1, r2, ri, s1, s2: d * r1 * s1 * (1 - d * s1) * (1 + ri)
            * (2 - d * r1 * s1 * (1 + ri)),
        ),
        (15, 1, 1, 2, 0): row(4, 1 / 16, lambda d, r1, r2, ri, s1, s2: d * r2 * s1 * (1 - d * s1)),
        (16, 1, 1, 0, 2): row(4, 1 / 16, lambda d, r1, r2, ri, s1, s2: d * s1 * (1 - d * r2 * s1)),
        (17, 1, 1, 2, 2): row(
            4, 1 / 16, lambda d, r1, r2, ri, s1, s2: d * r2 * s1 * (1 - d * r2 * s1)
        ),
        (18, 1, 1, 1, 2): row(
            4, 1 / 16, lambda d, r1, r2, ri, s1, s2: d * r1 * s1 * (1 + ri) * (1 - d * r2 * s1)
        ),
        (19, 1, 1, 2, 1): row(
            4, 1 / 16, lambda d, r1, r2, ri, s1, s2: d * r2 * s1 * (2 - d * r1 * s1 * (1 + ri))
        ),
        (20, 1, 2, 1, 1): row(5, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r1 * s1 * (1 - d * r1 * s1)),
        (21, 1, 2, 1, 2): row(5, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r1 * s1 * (1 - d * r2 * s1)),
        (22, 1, 2, 2, 1): row(5, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r2 * s1 * (1 - d * r1 * s1)),
        (23, 1, 2, 2, 2): row(5, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r2 * s1 * (1 - d * r2 * s1)),
        (24, 2, 0, 1, 1): row(5, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r2 * s1 * (1 - d * r2 * s2)),
        (25, 2, 1, 1, 1): row(
            6, 1, lambda d, r1, r2, ri, s1, s2: d * r1 * s2 * ri * (1 - d * r1 * s2 * ri)
        ),
        (26, 2, 1, 2, 1): row(
            7, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r1 * s2 * ri * (1 - d * r1 * s2 * ri)
        ),
        (27, 2, 1, 1, 2): row(
            7, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r2 * s2 * (1 - d * r1 * s2 * ri)
        ),
        (28, 2, 1, 2, 2): row(7, 1 / 4, lambda d, r1, r2, ri, s1, s2: d * r2 * s2 * (1 - d * r2 * s2)),
        (29, 2, 2, 2, 2): row(8, 1, lambda d, r1, r2, ri, s1, s2: d * r2 * s2 * (1 - d * r2 * s2)),
    }


PRINTED_TABLE = _printed()


def first_principles_rows():
    """Hand-derived closed forms for the rows whose printed form is inconsistent.

    Each entry is keyed by printed (type, m, f, c1, c2) and gives the value
    of P(M=m, F=f, C1=c1, C2=c2, D1=1, D2=0) obtained by multiplying out the
    transmission and penetrance factors for that configuration.
    """
    return {
        (8, 1, 0, 1, 0): lambda t, mu: mu[3] / 4 * t[0] * t[1] * t[4] * t[3]
        * (1 - t[0] * t[4]),
        (9, 1, 0, 0, 1): lambda t, mu: mu[3] / 4 * t[0] * t[4]
        * (1 - t[0] * t[1] * t[4] * t[3]),
        (14, 1, 1, 1, 1): lambda t, mu: mu[4] / 16 * t[0] * t[1] * t[4] * (1 + t[3])
        * (2 - t[0] * t[1] * t[4] * (1 + t[3])),
        (24, 2, 0, 1, 1): lambda t, mu: mu[6] * t[0] * t[1] * t[5] * t[3]
        * (1 - t[0] * t[1] * t[5] * t[3]),
        (25, 2, 1, 1, 1): lambda t, mu: mu[7] / 4 * t[0] * t[1] * t[5] * t[3]
        * (1 - t[0] * t[1] * t[5] * t[3]),
        (26, 2, 1, 2, 1): lambda t, mu: mu[7] / 4 * t[0] * t[2] * t[5]
        * (1 - t[0] * t[1] * t[5] * t[3]),
        (27, 2, 1, 1, 2): lambda t, mu: mu[7] / 4 * t[0] * t[1] * t[5] * t[3]
        * (1 - t[0] * t[2] * t[5]),
    }
