"""Pure-numpy kernels for the per-sample invariant sums.

Given the coefficient matrix A, its time derivative, the bottom-row
antiderivatives y, and a batch of basis gradients, these compute for every
spatial sample:

* det(d phi)   as the minor sum  sum p * g   (Cauchy--Binet),
* its analytic time derivative  sum p' * g,
* the Cauchy-invariant combination
  h = sum Q * g + sum y_i det(grad rho, grad v_i)        (n = 2)
  h = sum Q * G + sum y_i grad rho x grad v_i            (n = 3).

Shapes: A, Ap (n, m); y (m,); dv (NP, m, n); grho (NP, n).
"""

from functools import lru_cache
from itertools import combinations

import numpy as np


@lru_cache(maxsize=64)
def _pairs(m):
    idx = np.array(list(combinations(range(m), 2)), dtype=np.intp)
    return idx[:, 0], idx[:, 1]


@lru_cache(maxsize=64)
def _triples(m):
    idx = np.array(list(combinations(range(m), 3)), dtype=np.intp)
    return idx[:, 0], idx[:, 1], idx[:, 2]


def invariants_2d(A, Ap, y, dv, grho):
    i, j = _pairs(A.shape[1])
    p = A[0, i] * A[1, j] - A[0, j] * A[1, i]
    pd = (
        Ap[0, i] * A[1, j]
        + A[0, i] * Ap[1, j]
        - Ap[0, j] * A[1, i]
        - A[0, j] * Ap[1, i]
    )
    apa = Ap.T @ A  # (m, m): apa[i, j] = <A'_i, A_j>
    q = apa[i, j] - apa[j, i]
    # g[s, k] = det(grad v_i, grad v_j) at sample s for pair k
    g = dv[:, i, 0] * dv[:, j, 1] - dv[:, j, 0] * dv[:, i, 1]
    det = g @ p
    ddet = g @ pd
    h = g @ q
    # density term: y_i * det(grad rho, grad v_i)
    drho = grho[:, 0, None] * dv[:, :, 1] - grho[:, 1, None] * dv[:, :, 0]
    h = h + drho @ y
    return det, ddet, h


def _det3_cols_3(Ma, Mb, Mc, i, j, k):
    """det of columns (Ma_i, Mb_j, Mc_k)."""
    a0, a1, a2 = Ma[0, i], Ma[1, i], Ma[2, i]
    b0, b1, b2 = Mb[0, j], Mb[1, j], Mb[2, j]
    c0, c1, c2 = Mc[0, k], Mc[1, k], Mc[2, k]
    return a0 * (b1 * c2 - b2 * c1) - b0 * (a1 * c2 - a2 * c1) + c0 * (a1 * b2 - a2 * b1)


def invariants_3d(A, Ap, y, dv, grho):
    m = A.shape[1]
    ti, tj, tk = _triples(m)
    p = _det3_cols_3(A, A, A, ti, tj, tk)
    pd = (
        _det3_cols_3(Ap, A, A, ti, tj, tk)
        + _det3_cols_3(A, Ap, A, ti, tj, tk)
        + _det3_cols_3(A, A, Ap, ti, tj, tk)
    )
    # g[s, r] = det of rows (dv_i, dv_j, dv_k)
    a = dv[:, ti, :]
    b = dv[:, tj, :]
    c = dv[:, tk, :]
    g = (
        a[..., 0] * (b[..., 1] * c[..., 2] - b[..., 2] * c[..., 1])
        - a[..., 1] * (b[..., 0] * c[..., 2] - b[..., 2] * c[..., 0])
        + a[..., 2] * (b[..., 0] * c[..., 1] - b[..., 1] * c[..., 0])
    )
    det = g @ p
    ddet = g @ pd

    pi, pj = _pairs(m)
    apa = Ap.T @ A
    q = apa[pi, pj] - apa[pj, pi]
    G = np.cross(dv[:, pi, :], dv[:, pj, :])  # (NP, npairs, 3)
    h = np.einsum("spk,p->sk", G, q)
    cr = np.cross(grho[:, None, :], dv)  # (NP, m, 3)
    h = h + np.einsum("smk,m->sk", cr, y)
    return det, ddet, h
