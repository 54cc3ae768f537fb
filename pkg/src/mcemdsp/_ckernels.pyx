# cython: language_level=3
"""Compiled kernels: pairwise MH sweeps and the theta objective of the M-step."""
from libc.math cimport log, INFINITY


def mh_sweeps(double[::1] z, const double[::1] counts, const double[::1] h,
              double n, const long[:, ::1] pairs, const double[:, ::1] betas,
              const double[:, ::1] log_u, long n_burnin, long thin,
              double[:, ::1] out):
    """Run pairwise MH sweeps in place on ``z``.

    Returns (accepted during burn-in, accepted after burn-in).
    """
    cdef Py_ssize_t n_sweeps = betas.shape[0]
    cdef Py_ssize_t n_pairs = pairs.shape[0]
    cdef Py_ssize_t s, p, k, i, j, row = 0
    cdef double d = 0.0, d_new, zi, zj, tot, lr
    cdef long acc_burn = 0, acc_main = 0
    for k in range(9):
        d += z[k] * h[k]
    for s in range(n_sweeps):
        for p in range(n_pairs):
            i = pairs[p, 0]
            j = pairs[p, 1]
            tot = z[i] + z[j]
            zi = tot * betas[s, p]
            zj = tot - zi
            if zi <= 0.0 or zj <= 0.0:
                continue
            d_new = d - h[i] * z[i] - h[j] * z[j] + h[i] * zi + h[j] * zj
            lr = (counts[i] * (log(zi) - log(z[i]))
                  + counts[j] * (log(zj) - log(z[j]))
                  - n * (log(d_new) - log(d)))
            if log_u[s, p] < lr:
                z[i] = zi
                z[j] = zj
                d = 0.0
                for k in range(9):
                    d += z[k] * h[k]
                if s < n_burnin:
                    acc_burn += 1
                else:
                    acc_main += 1
        if s >= n_burnin and (s - n_burnin + 1) % thin == 0:
            for k in range(9):
                out[row, k] = z[k]
            row += 1
    return acc_burn, acc_main


def theta_objective(const double[::1] params, const double[:, :, ::1] trans,
                    const unsigned char[:, ::1] reachable,
                    const long[::1] a_idx, const double[::1] a_cnt,
                    const long[::1] b_idx, const double[::1] b_cnt,
                    double n, const double[:, ::1] z, const double[::1] w):
    """Theta-dependent part of the mean log P(Y | Z_t; theta) over a bank.

    Returns const(theta) - n * weighted mean of log(z_t . h(theta)), or -inf
    when some reachable penetrance exceeds 1 or an observed term is zero.
    ``a_idx``/``b_idx`` index the flattened (m, f, c) affected/unaffected
    child terms with multiplicities ``a_cnt``/``b_cnt``.  An empty ``w``
    means equal weights.
    """
    cdef double risk[3][4]
    cdef double a[27]
    cdef double b[27]
    cdef double h[9]
    cdef double sm[3]
    cdef double rc[4]
    cdef double const_ = 0.0, acc = 0.0, wsum = 0.0, dot, sa, sb
    cdef Py_ssize_t m, f, st, k, t, n_rows = z.shape[0]
    cdef bint weighted = w.shape[0] > 0
    sm[0] = 1.0
    sm[1] = params[4]
    sm[2] = params[5]
    rc[0] = 1.0
    rc[1] = params[1]
    rc[2] = params[1] * params[3]
    rc[3] = params[2]
    for m in range(3):
        for st in range(4):
            risk[m][st] = params[0] * sm[m] * rc[st]
            if reachable[m, st] and risk[m][st] > 1.0:
                return -INFINITY
    for m in range(3):
        for f in range(3):
            k = 9 * m + 3 * f
            a[k] = trans[m, f, 0] * risk[m][0]
            a[k + 1] = trans[m, f, 1] * risk[m][1] + trans[m, f, 2] * risk[m][2]
            a[k + 2] = trans[m, f, 3] * risk[m][3]
            b[k] = trans[m, f, 0] * (1.0 - risk[m][0])
            b[k + 1] = trans[m, f, 1] * (1.0 - risk[m][1]) + trans[m, f, 2] * (1.0 - risk[m][2])
            b[k + 2] = trans[m, f, 3] * (1.0 - risk[m][3])
            sa = a[k] + a[k + 1] + a[k + 2]
            sb = b[k] + b[k + 1] + b[k + 2]
            h[3 * m + f] = sa * sb
    for k in range(a_idx.shape[0]):
        if a[a_idx[k]] <= 0.0:
            return -INFINITY
        const_ += a_cnt[k] * log(a[a_idx[k]])
    for k in range(b_idx.shape[0]):
        if b[b_idx[k]] <= 0.0:
            return -INFINITY
        const_ += b_cnt[k] * log(b[b_idx[k]])
    for t in range(n_rows):
        dot = 0.0
        for k in range(9):
            dot += z[t, k] * h[k]
        if weighted:
            acc += w[t] * log(dot)
            wsum += w[t]
        else:
            acc += log(dot)
    if weighted:
        acc /= wsum
    else:
        acc /= n_rows
    return const_ - n * acc
