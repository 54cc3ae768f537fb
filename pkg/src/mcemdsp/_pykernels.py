"""Pure-Python fallback for the compiled kernels.

``mh_sweeps`` mirrors the compiled loop operation for operation, so both
produce bit-identical chains from the same random inputs.
``theta_objective`` is vectorised with numpy and agrees with the compiled
version to rounding.
"""
from math import log

import numpy as np


def mh_sweeps(z, counts, h, n, pairs, betas, log_u, n_burnin, thin, out):
    zl = [float(v) for v in z]
    cl = [float(v) for v in counts]
    hl = [float(v) for v in h]
    pl = [(int(i), int(j)) for i, j in pairs]
    n = float(n)
    d = 0.0
    for k in range(9):
        d += zl[k] * hl[k]
    acc_burn = acc_main = 0
    row = 0
    for s in range(betas.shape[0]):
        brow = betas[s].tolist()
        urow = log_u[s].tolist()
        for p, (i, j) in enumerate(pl):
            tot = zl[i] + zl[j]
            zi = tot * brow[p]
            zj = tot - zi
            if zi <= 0.0 or zj <= 0.0:
                continue
            d_new = d - hl[i] * zl[i] - hl[j] * zl[j] + hl[i] * zi + hl[j] * zj
            lr = (cl[i] * (log(zi) - log(zl[i]))
                  + cl[j] * (log(zj) - log(zl[j]))
                  - n * (log(d_new) - log(d)))
            if urow[p] < lr:
                zl[i] = zi
                zl[j] = zj
                d = 0.0
                for k in range(9):
                    d += zl[k] * hl[k]
                if s < n_burnin:
                    acc_burn += 1
                else:
                    acc_main += 1
        if s >= n_burnin and (s - n_burnin + 1) % thin == 0:
            out[row, :] = zl
            row += 1
    z[:] = zl
    return acc_burn, acc_main


def theta_objective(params, trans, reachable, a_idx, a_cnt, b_idx, b_cnt, n, z, w):
    delta, r1, r2, r_im, s1, s2 = params
    risk = delta * np.array([1.0, s1, s2])[:, None] * np.array([1.0, r1, r1 * r_im, r2])[None, :]
    if risk[reachable.astype(bool)].max() > 1.0:
        return -np.inf
    aff = trans * risk[:, None, :]
    unaff = trans * (1.0 - risk[:, None, :])
    a = np.empty((3, 3, 3))
    b = np.empty((3, 3, 3))
    a[..., 0], a[..., 1], a[..., 2] = aff[..., 0], aff[..., 1] + aff[..., 2], aff[..., 3]
    b[..., 0], b[..., 1], b[..., 2] = unaff[..., 0], unaff[..., 1] + unaff[..., 2], unaff[..., 3]
    h = (a.sum(axis=2) * b.sum(axis=2)).reshape(9)
    av = a.reshape(27)[a_idx]
    bv = b.reshape(27)[b_idx]
    if np.any(av <= 0) or np.any(bv <= 0):
        return -np.inf
    const = np.dot(a_cnt, np.log(av)) + np.dot(b_cnt, np.log(bv))
    log_dot = np.log(z @ h)
    mean = log_dot.mean() if len(w) == 0 else np.dot(w, log_dot) / w.sum()
    return float(const - n * mean)
