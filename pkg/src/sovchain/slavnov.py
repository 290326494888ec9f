"""Determinant formulas for scalar products of separate states.

Evaluates the ratio <Qbar|Q>/<Q|Q> for an on-shell Q (roots solving
a_Q(q_j) = -mu) against a modified polynomial Qbar whose roots are drawn
from the roots of Q ("kept") plus inhomogeneities ("inserted"):

    ratio = (-1)^{N(Rbar-R)} (1-mu)^{R-Rbar} mu^{Rbar-R}
            * prod_j [a(qbar_j) prod_k (q_k - qbar_j + eta)]
            / prod_j [a(q_j)    prod_k (q_k - q_j    + eta)]
            * V(q_R..q_1)/V(qbar_Rbar..qbar_1) * det M / det N,

with kernels t(l) = eta/(l(l+eta)), K(l) = t(l) + t(-l), the R x R matrix
N_jk = (log a_Q)'(q_j) delta_jk + K(q_j - q_k), and the Rbar x Rbar matrix M
whose kept columns coincide with columns of N and whose inserted columns are
t(q_j - xi) on the first R rows (a_Q vanishes at inhomogeneities).  The
determinant ratio is computed as det of the N^{-1}-transformed matrix, never
as a quotient of two large determinants.

The ratio vanishes identically for Rbar < R.
"""
from dataclasses import dataclass

import numpy as np

from .params import ChainParams, Twist
from .polynomials import QFunction, vandermonde
from .thermo import density_rho, density_rho_tot

POLE_TOL_FACTOR = 1e-10


def frak_a(params: ChainParams, q: QFunction, lam):
    """a_Q(lam) = d(lam)/a(lam) * Q(lam+eta)/Q(lam-eta)."""
    lam = complex(lam)
    a_val = complex(params.a(lam))
    qm = complex(q(lam - params.eta))
    tol = POLE_TOL_FACTOR * abs(params.eta)
    if abs(a_val) < tol**params.N or _near_any(lam, np.asarray(params.xi) - params.eta, tol):
        raise ZeroDivisionError("frak_a pole: lam at a zero of a")
    if q.degree and _near_any(lam - params.eta, np.asarray(q.roots), tol):
        raise ZeroDivisionError("frak_a pole: lam - eta at a root of Q")
    return complex(params.d(lam)) / a_val * complex(q(lam + params.eta)) / qm


def _near_any(z, points, tol):
    return points.size > 0 and np.min(np.abs(z - points)) < tol


def log_deriv_frak_a(params: ChainParams, q: QFunction, lam):
    """(log a_Q)'(lam) = d'/d - a'/a + Q'(lam+eta)/Q(lam+eta) - Q'(lam-eta)/Q(lam-eta)."""
    eta = params.eta
    return (
        params.log_deriv_d(lam)
        - params.log_deriv_a(lam)
        + q.log_deriv(lam + eta)
        - q.log_deriv(lam - eta)
    )


def t_kernel(lam, eta):
    return eta / (lam * (lam + eta))


def k_kernel(lam, eta):
    return 2 * eta / ((lam + eta) * (lam - eta))


@dataclass(frozen=True)
class BarQSpec:
    """Modified polynomial: kept root indices (0-based) + inserted sites (1-based)."""

    kept: tuple
    inserted: tuple

    def __post_init__(self):
        object.__setattr__(self, "kept", tuple(sorted(int(i) for i in self.kept)))
        object.__setattr__(self, "inserted", tuple(sorted(int(s) for s in self.inserted)))
        if len(set(self.kept)) != len(self.kept):
            raise ValueError("duplicate kept indices")
        if len(set(self.inserted)) != len(self.inserted):
            raise ValueError("duplicate inserted sites")

    @property
    def degree(self):
        return len(self.kept) + len(self.inserted)

    def roots(self, params: ChainParams, q: QFunction):
        vals = [q.roots[i] for i in self.kept]
        vals += [params.xi[s - 1] for s in self.inserted]
        return tuple(vals)

    def polynomial(self, params: ChainParams, q: QFunction):
        return QFunction(roots=self.roots(params, q))


def _norm_matrix(params: ChainParams, q: QFunction):
    """N_jk = (log a_Q)'(q_j) delta_jk + K(q_j - q_k) (K(0) on the diagonal)."""
    eta = params.eta
    roots = np.asarray(q.roots)
    r = roots.size
    mat = np.empty((r, r), dtype=np.complex128)
    for j in range(r):
        for k in range(r):
            if j == k:
                # K(0) = -2/eta
                mat[j, k] = log_deriv_frak_a(params, q, roots[j]) - 2.0 / eta
            else:
                mat[j, k] = k_kernel(roots[j] - roots[k], eta)
    return mat


def slavnov_ratio(params: ChainParams, twist: Twist, q: QFunction, barq: BarQSpec):
    """<Qbar|Q>_K / <Q|Q>_K for on-shell Q; exact 0 when deg Qbar < deg Q."""
    eta = params.eta
    mu = twist.mu
    roots = np.asarray(q.roots)
    r = roots.size
    rbar = barq.degree
    if rbar < r:
        return 0.0 + 0.0j
    qbar_vals = np.asarray(barq.roots(params, q))
    n_ins = len(barq.inserted)

    tol = POLE_TOL_FACTOR * abs(eta)
    for s in barq.inserted:
        xi_s = params.xi[s - 1]
        if roots.size and (
            _near_any(xi_s, roots, tol) or _near_any(xi_s - eta, roots, tol)
        ):
            raise ZeroDivisionError("t-kernel pole: inserted xi against a root of Q")

    if r:
        nmat = _norm_matrix(params, q)
        smat = np.zeros((rbar, rbar), dtype=np.complex128)
        for c, i in enumerate(barq.kept):
            smat[i, c] = 1.0
        if n_ins:
            tcols = np.empty((r, n_ins), dtype=np.complex128)
            for c, s in enumerate(barq.inserted):
                tcols[:, c] = t_kernel(roots - params.xi[s - 1], eta)
            smat[:r, len(barq.kept):] = np.linalg.solve(nmat, tcols)
        for p in range(rbar - r):
            row = r + p
            for c, i in enumerate(barq.kept):
                qv = roots[i]
                smat[row, c] = qv**p + (qv + eta) ** p
            for c, s in enumerate(barq.inserted):
                smat[row, len(barq.kept) + c] = params.xi[s - 1] ** p
        det_ratio = np.linalg.det(smat)
    else:
        # R = 0: N is empty, det M is the pure power block
        smat = np.empty((rbar, rbar), dtype=np.complex128)
        for p in range(rbar):
            for c, s in enumerate(barq.inserted):
                smat[p, c] = params.xi[s - 1] ** p
        det_ratio = np.linalg.det(smat) if rbar else 1.0 + 0.0j

    num = np.prod(
        [params.a(qb) * np.prod(roots - qb + eta) for qb in qbar_vals]
    ) if rbar else 1.0
    den = np.prod(
        [params.a(qv) * np.prod(roots - qv + eta) for qv in roots]
    ) if r else 1.0
    vq = vandermonde(roots[::-1]) if r else 1.0
    vqbar = vandermonde(qbar_vals[::-1]) if rbar else 1.0
    pref = (-1.0) ** (params.N * (rbar - r)) * (1.0 - mu) ** (r - rbar) * mu ** (rbar - r)
    return complex(pref * (num / den) * (vq / vqbar) * det_ratio)


def slavnov_ratio_sigma_x(params: ChainParams, q: QFunction, barq: BarQSpec):
    """Anti-periodic specialization, evaluated through its own prefactors.

    Same matrices as the general route at mu = -1, but with the 2^{R-Rbar}
    factor and the (-a) products written out and the determinants taken
    separately.  Agreement with `slavnov_ratio` at mu = -1 is a consistency
    check of the prefactor arithmetic.
    """
    eta = params.eta
    roots = np.asarray(q.roots)
    r = roots.size
    rbar = barq.degree
    if rbar < r:
        return 0.0 + 0.0j
    qbar_vals = np.asarray(barq.roots(params, q))
    nmat = _norm_matrix(params, q) if r else np.zeros((0, 0), dtype=np.complex128)
    mmat = np.empty((rbar, rbar), dtype=np.complex128)
    for c in range(rbar):
        if c < len(barq.kept):
            i = barq.kept[c]
            for j in range(r):
                mmat[j, c] = nmat[j, i]
            qv = roots[i]
            for p in range(rbar - r):
                mmat[r + p, c] = qv**p + (qv + eta) ** p
        else:
            xi_s = params.xi[barq.inserted[c - len(barq.kept)] - 1]
            for j in range(r):
                mmat[j, c] = t_kernel(roots[j] - xi_s, eta)
            for p in range(rbar - r):
                mmat[r + p, c] = xi_s**p
    det_m = np.linalg.det(mmat) if rbar else 1.0
    det_n = np.linalg.det(nmat) if r else 1.0
    num = np.prod(
        [-params.a(qb) * np.prod(roots - qb + eta) for qb in qbar_vals]
    ) if rbar else 1.0
    den = np.prod(
        [-params.a(qv) * np.prod(roots - qv + eta) for qv in roots]
    ) if r else 1.0
    vq = vandermonde(roots[::-1]) if r else 1.0
    vqbar = vandermonde(qbar_vals[::-1]) if rbar else 1.0
    pref = (-1.0) ** (params.N * (r - rbar)) * 2.0 ** (r - rbar)
    return complex(pref * (num / den) * (vq / vqbar) * det_m / det_n)


def sp_ratio_thermo(params: ChainParams, q: QFunction, kept_sigma, inserted_pi):
    """Thermodynamic (density) form of the balanced scalar-product ratio.

    kept_sigma: 0-based indices of roots kept in Qbar; the complement
    (m' of them) is replaced by the inserted inhomogeneities xi_{pi_k}
    (1-based sites).  Requires #replaced == #inserted.
    """
    roots = np.asarray(q.roots)
    r = roots.size
    kept = sorted(int(i) for i in kept_sigma)
    replaced = [i for i in range(r) if i not in set(kept)]
    mprime = len(inserted_pi)
    if len(replaced) != mprime:
        raise ValueError("unbalanced case: #replaced roots must equal #inserted xi")
    if mprime == 0:
        return 1.0 + 0.0j
    eta = params.eta
    xins = np.asarray([params.xi[s - 1] for s in inserted_pi])
    qrep = roots[replaced]
    qkept = roots[kept]
    pref = 1.0 + 0.0j
    for j in range(mprime):
        num = complex(params.a(xins[j])) * np.prod(roots - xins[j] + eta)
        den = complex(params.a(qrep[j])) * np.prod(roots - qrep[j] + eta)
        pref *= num / den
        if kept:
            pref *= np.prod((qkept - qrep[j]) / (qkept - xins[j]))
    for i in range(mprime):
        for j in range(i + 1, mprime):
            pref *= (qrep[i] - qrep[j]) / (xins[i] - xins[j])
    dens = np.empty((mprime, mprime), dtype=np.complex128)
    for j in range(mprime):
        rho_tot = density_rho_tot(params, qrep[j].real)
        for k in range(mprime):
            arg = qrep[j] - xins[k] + eta / 2
            dens[j, k] = density_rho(arg.real) / (params.N * rho_tot)
    return complex(pref * np.linalg.det(dens))
