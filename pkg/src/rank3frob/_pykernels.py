"""Vectorised numpy implementations of the hot loops.

These are the reference fallback for :mod:`rank3frob._ckernels`; both must
return identical integers.  All field arithmetic is in the log domain: an
element is its discrete log to the field's primitive element, and zero is
``-1``.  Addition goes through the Zech table.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_BLOCK = 1 << 20  # cells per vectorised block


def build_exp_table(spec) -> np.ndarray:
    """Encodings of primitive**n for 0 <= n < q-1 (baby-step/giant-step)."""
    p, k, q = spec.p, spec.k, spec.q
    order = q - 1
    weights = p ** np.arange(k, dtype=np.int64)
    g = spec.primitive
    step = max(1, int(np.ceil(np.sqrt(order))))
    mg = spec.mul_matrix(g)
    baby = np.zeros((step, k), dtype=np.int64)
    v = np.zeros(k, dtype=np.int64)
    v[0] = 1
    for i in range(step):
        baby[i] = v
        v = mg @ v % p
    giant = spec.mul_matrix(g**step)
    out = np.empty(step * ((order + step - 1) // step), dtype=np.int64)
    mj = np.eye(k, dtype=np.int64)
    for j in range(0, len(out), step):
        out[j : j + step] = (baby @ mj.T % p) @ weights
        mj = giant @ mj % p
    return out[:order].copy()


def _mul(a, b, order):
    out = (a + b) % order
    return np.where((a < 0) | (b < 0), -1, out)


def _add(a, b, zech, order):
    a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
    both = (a >= 0) & (b >= 0)
    d = np.where(both, (b - a) % order, 0)
    z = zech[d]
    s = np.where(z < 0, -1, (a + z) % order)
    return np.where(both, s, np.where(a < 0, b, a))


def _rows_at(rows, xs, zech, order):
    """Evaluate each row polynomial (list of (i, log a)) at the x-logs."""
    out = []
    for terms in rows:
        acc = np.full(xs.shape, -1, dtype=np.int64)
        for i, la in terms:
            if i == 0:
                t = np.full(xs.shape, la, dtype=np.int64)
            elif la < 0:
                continue
            else:
                t = np.where(xs < 0, -1, (i * xs + la) % order)
            acc = _add(acc, t, zech, order)
        out.append(acc)
    return out


def _horner(cj, ys, zech, order, shape):
    v = np.broadcast_to(cj[-1], shape)
    for c in reversed(cj[:-1]):
        v = _add(_mul(v, ys, order), c, zech, order)
    return v


def char_sum(zech, q, rows_a, rows_b, x_lo, x_hi):
    """Sum of chi(A(x, y)) over x-logs in [x_lo, x_hi) and every y in F_q.

    ``rows_a[j]`` lists ``(i, log a_ij)`` for the coefficient of y**j in A.
    ``rows_b`` describes a second polynomial B that is expected to vanish
    everywhere; the number of cells where it does not is returned too.
    x-logs run over -1 (the zero element) and 0..q-2.
    """
    order = q - 1
    ys = np.arange(-1, order, dtype=np.int64)[None, :]
    rows = max(1, _BLOCK // q)
    total = 0
    bad = 0
    for start in range(x_lo, x_hi, rows):
        xs = np.arange(start, min(start + rows, x_hi), dtype=np.int64)[:, None]
        shape = (xs.shape[0], q)
        va = _horner(_rows_at(rows_a, xs, zech, order), ys, zech, order, shape)
        total += int(np.where(va < 0, 0, 1 - 2 * (va & 1)).sum())
        if rows_b:
            vb = _horner(_rows_at(rows_b, xs, zech, order), ys, zech, order, shape)
            bad += int((vb >= 0).sum())
    return total, bad


def cell_logs(zech, q, rows, xs, ys):
    """Log of the polynomial described by ``rows`` at paired x-logs and y-logs."""
    order = q - 1
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    cj = _rows_at(rows, xs, zech, order)
    return _horner(cj, ys, zech, order, xs.shape)
