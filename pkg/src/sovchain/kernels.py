"""Hot numeric kernels with numba-accelerated and pure-numpy paths.

Two families live here:

* binary-word sums over h in {0,1}^N that carry the factorized site weights
  and a Vandermonde built from pairwise difference tables (the workhorse of
  every SoV state sum and scalar product),
* dense multi-dimensional quadrature contractions used by the
  thermodynamic-limit block integrals.

Both paths are exact (no fastmath); the accelerated path is selected at
import time unless SOVCHAIN_DISABLE_NUMBA is set (see `_accel`).
"""
import numpy as np

from ._accel import USING_NUMBA, njit

__all__ = [
    "USING_NUMBA",
    "pair_tables",
    "sov_coefficients",
    "sov_weighted_sum",
    "block_sum_2d",
    "block_sum_3d",
    "block_sum_4d",
]


def pair_tables(xi, eta):
    """Pairwise difference tables for shifted inhomogeneities.

    Returns (P, 2, 2) complex arrays tab with
    tab[p, hi, hj] = (xi_j - hj*eta) - (xi_i - hi*eta) for the p-th pair
    i < j, so that prod_p tab[p, h_i, h_j] equals the Vandermonde
    V(xi_1^{(h_1)}, ..., xi_N^{(h_N)}).
    """
    xi = np.asarray(xi, dtype=np.complex128)
    n = xi.size
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    tab = np.empty((len(pairs), 2, 2), dtype=np.complex128)
    for p, (i, j) in enumerate(pairs):
        for hi in range(2):
            for hj in range(2):
                tab[p, hi, hj] = (xi[j] - hj * eta) - (xi[i] - hi * eta)
    idx = np.array(pairs, dtype=np.int64).reshape(len(pairs), 2)
    return tab, idx


@njit
def _sov_coefficients_nb(site_w, tab, idx, flip):
    n_sites = site_w.shape[0]
    n_pairs = idx.shape[0]
    size = 1 << n_sites
    out = np.empty(size, dtype=np.complex128)
    for h in range(size):
        acc = 1.0 + 0.0j
        for s in range(n_sites):
            acc *= site_w[s, (h >> s) & 1]
        for p in range(n_pairs):
            hi = (h >> idx[p, 0]) & 1
            hj = (h >> idx[p, 1]) & 1
            if flip:
                hi = 1 - hi
                hj = 1 - hj
            acc *= tab[p, hi, hj]
        out[h] = acc
    return out


def _sov_coefficients_np(site_w, tab, idx, flip):
    n_sites = site_w.shape[0]
    size = 1 << n_sites
    h = np.arange(size, dtype=np.int64)
    bits = (h[:, None] >> np.arange(n_sites, dtype=np.int64)[None, :]) & 1
    out = np.prod(site_w[np.arange(n_sites)[None, :], bits], axis=1)
    bi = bits[:, idx[:, 0]]
    bj = bits[:, idx[:, 1]]
    if flip:
        bi = 1 - bi
        bj = 1 - bj
    out *= np.prod(tab[np.arange(idx.shape[0])[None, :], bi, bj], axis=1)
    return out


def sov_coefficients(site_w, tab, idx, flip=False):
    """Coefficient vector c_h = prod_n w[n, h_n] * V-table product, h = 0..2^N-1.

    Bit n-1 of h is the occupation h_n of site n.  With flip=True the
    Vandermonde is evaluated on the complementary word 1-h (right states).
    """
    site_w = np.ascontiguousarray(site_w, dtype=np.complex128)
    if USING_NUMBA:
        return _sov_coefficients_nb(site_w, tab, idx, flip)
    return _sov_coefficients_np(site_w, tab, idx, flip)


@njit
def _sov_weighted_sum_nb(site_w, tab, idx, flip):
    n_sites = site_w.shape[0]
    n_pairs = idx.shape[0]
    size = 1 << n_sites
    total = 0.0 + 0.0j
    for h in range(size):
        acc = 1.0 + 0.0j
        for s in range(n_sites):
            acc *= site_w[s, (h >> s) & 1]
        for p in range(n_pairs):
            hi = (h >> idx[p, 0]) & 1
            hj = (h >> idx[p, 1]) & 1
            if flip:
                hi = 1 - hi
                hj = 1 - hj
            acc *= tab[p, hi, hj]
        total += acc
    return total


def sov_weighted_sum(site_w, tab, idx, flip=False):
    """Sum of `sov_coefficients` without materializing the 2^N vector."""
    site_w = np.ascontiguousarray(site_w, dtype=np.complex128)
    if USING_NUMBA:
        return _sov_weighted_sum_nb(site_w, tab, idx, flip)
    return complex(np.sum(_sov_coefficients_np(site_w, tab, idx, flip)))


@njit
def _block_sum_2d_nb(f1, f2, p21):
    n = f1.size
    total = 0.0 + 0.0j
    for i2 in range(n):
        acc = 0.0 + 0.0j
        for i1 in range(n):
            acc += f1[i1] * p21[i2, i1]
        total += f2[i2] * acc
    return total


def block_sum_2d(f1, f2, p21):
    """sum_{i1,i2} f1[i1] f2[i2] p21[i2,i1]."""
    if USING_NUMBA:
        return _block_sum_2d_nb(f1, f2, p21)
    return complex(f2 @ p21 @ f1)


@njit
def _block_sum_3d_nb(f1, f2, f3, p21, p31, p32):
    n = f1.size
    total = 0.0 + 0.0j
    for i3 in range(n):
        sub = 0.0 + 0.0j
        for i2 in range(n):
            acc = 0.0 + 0.0j
            for i1 in range(n):
                acc += f1[i1] * p21[i2, i1] * p31[i3, i1]
            sub += f2[i2] * p32[i3, i2] * acc
        total += f3[i3] * sub
    return total


def block_sum_3d(f1, f2, f3, p21, p31, p32):
    """Triple contraction with one pair matrix per dimension pair (a>b)."""
    if USING_NUMBA:
        return _block_sum_3d_nb(f1, f2, f3, p21, p31, p32)
    return complex(
        np.einsum("a,b,c,ba,ca,cb->", f1, f2, f3, p21, p31, p32, optimize=True)
    )


@njit
def _block_sum_4d_nb(f1, f2, f3, f4, p21, p31, p32, p41, p42, p43):
    n = f1.size
    total = 0.0 + 0.0j
    for i4 in range(n):
        s3 = 0.0 + 0.0j
        for i3 in range(n):
            s2 = 0.0 + 0.0j
            for i2 in range(n):
                s1 = 0.0 + 0.0j
                for i1 in range(n):
                    s1 += f1[i1] * p21[i2, i1] * p31[i3, i1] * p41[i4, i1]
                s2 += f2[i2] * p32[i3, i2] * p42[i4, i2] * s1
            s3 += f3[i3] * p43[i4, i3] * s2
        total += f4[i4] * s3
    return total


def block_sum_4d(f1, f2, f3, f4, p21, p31, p32, p41, p42, p43):
    if USING_NUMBA:
        return _block_sum_4d_nb(f1, f2, f3, f4, p21, p31, p32, p41, p42, p43)
    return complex(
        np.einsum(
            "a,b,c,d,ba,ca,cb,da,db,dc->",
            f1, f2, f3, f4, p21, p31, p32, p41, p42, p43,
            optimize=True,
        )
    )
