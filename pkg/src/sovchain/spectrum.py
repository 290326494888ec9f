"""Transfer-matrix spectrum and Baxter Q-functions, three ways.

* `diagonalize_transfer`: dense eigen-decomposition at one probe point plus
  Rayleigh-quotient interpolation to recover each eigenvalue polynomial
  tau(lam) (degree N-1 for traceless twists, N otherwise).
* `q_from_tau`: the TQ relation
      tau(lam) Q(lam) = k2 a(lam) Q(lam-eta) + k1 d(lam) Q(lam+eta)
  is linear in Q; the monic Q of minimal degree R <= N is found as the
  one-dimensional nullspace of the sampled linear map.
* `solve_bethe_newton`: damped Newton on the logarithmic Bethe equations for
  real-root states (counting function xi_hat below).
* `dual_q`: the quantum-Wronskian partner of complementary degree N-R,
      k2 Qhat(lam) Q(lam-eta) - k1 Q(lam) Qhat(lam-eta) = (k2-k1) d(lam).

Counting-function conventions (eta = -i, Im(xi_n - eta/2) = 0):
    p(u) = 2 atan(2u),  theta(u) = -2 atan(u),
    xi_hat(lam) = p_tot(lam) + (1/N) sum_k theta(lam - lam_k),
    p_tot(lam) = (1/N) sum_n p(lam - x_n),  x_n = xi_n - eta/2.
Roots of the log-form equations  xi_hat(lam_j) = (2 n_j - N + R - 1 + alpha)pi/N
satisfy a_Q(lam_j) = -mu with mu = k2/k1 = e^{i pi alpha} under the alpha
convention of `Twist.alpha` (alpha = 1 for the sigma-x twist).
"""
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import slavnov
from .algebra import transfer_matrix
from .params import ChainParams, Twist
from .polynomials import QFunction, circle_nodes

_PROBES = (0.4183 + 0.2719j, -0.3141 + 0.1618j, 0.1234 - 0.3456j)


class DegenerateSpectrumError(RuntimeError):
    pass


class TQNullspaceError(RuntimeError):
    pass


class BetheConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TauPoly:
    """Transfer-matrix eigenvalue polynomial, coefficients descending."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, lam):
        return np.polyval(np.asarray(self.coeffs), lam)

    def negate(self):
        return TauPoly(tuple(-c for c in self.coeffs))


@dataclass(frozen=True)
class EigenState:
    """One transfer-matrix eigenstate from exact diagonalization."""

    tau: TauPoly
    right: np.ndarray  # column eigenvector
    left: np.ndarray   # row eigenvector, normalized so left @ right = 1


def tau_from_q(params: ChainParams, twist: Twist, q: QFunction):
    """tau(lam) = [k2 a(lam) Q(lam-eta) + k1 d(lam) Q(lam+eta)] / Q(lam) as a TauPoly."""
    deg = params.N - 1 if abs(twist.trace) < 1e-12 else params.N
    nodes = circle_nodes(deg + 1, 1.0 + max(abs(x) for x in params.xi) + abs(params.eta))
    qv = q(nodes)
    if np.min(np.abs(qv)) < 1e-12:
        nodes = circle_nodes(deg + 1, 1.37 + max(abs(x) for x in params.xi) + abs(params.eta))
        qv = q(nodes)
    vals = (
        twist.k2 * params.a(nodes) * q(nodes - params.eta)
        + twist.k1 * params.d(nodes) * q(nodes + params.eta)
    ) / qv
    coeffs = np.linalg.solve(np.vander(nodes, deg + 1), vals)
    return TauPoly(tuple(coeffs))


def diagonalize_transfer(params: ChainParams, twist: Twist, probe=None):
    """Full eigen-decomposition of T^{(K)}; returns a list of EigenState.

    The eigenvalue polynomial of each state is rebuilt from Rayleigh
    quotients at degree+1 interpolation nodes, which is legitimate because
    the transfer matrices at different spectral parameters commute and the
    spectrum is simple for diagonalizable twists with k1 != k2.
    """
    deg = params.N - 1 if abs(twist.trace) < 1e-12 else params.N
    scale = 1.0 + max(abs(x) for x in params.xi) + abs(params.eta)
    probes = (probe,) if probe is not None else tuple(p * scale for p in _PROBES)
    evals = vecs = None
    for pr in probes:
        tmat = transfer_matrix(params, twist, pr)
        w, v = scipy.linalg.eig(tmat)
        sep = np.min(
            np.abs(w[:, None] - w[None, :]) + np.diag(np.full(w.size, np.inf))
        )
        if sep > 1e-7 * max(np.max(np.abs(w)), 1e-30):
            evals, vecs = w, v
            break
    if evals is None:
        warnings.warn("near-degenerate transfer spectrum at all probe points")
        tmat = transfer_matrix(params, twist, probes[-1])
        evals, vecs = scipy.linalg.eig(tmat)
    left = np.linalg.inv(vecs)  # rows biorthogonal to columns of vecs
    nodes = circle_nodes(deg + 1, scale)
    ray = np.empty((params.dim, deg + 1), dtype=np.complex128)
    for s, z in enumerate(nodes):
        tz = transfer_matrix(params, twist, z)
        ray[:, s] = np.einsum("ij,jk,ki->i", left, tz, vecs)
    vand = np.vander(nodes, deg + 1)
    coeffs = np.linalg.solve(vand, ray.T).T  # rows: coeff vectors per state
    order = np.lexsort((evals.imag, evals.real))
    return [
        EigenState(
            tau=TauPoly(tuple(coeffs[i])),
            right=vecs[:, i].copy(),
            left=left[i].copy(),
        )
        for i in order
    ]


def q_from_tau(params: ChainParams, twist: Twist, tau: TauPoly, rtol=1e-9):
    """Monic Q of minimal degree solving the TQ relation for this tau.

    Ascends R = 0..N; at each degree the coefficient nullspace of the
    sampled relation is examined by SVD.  Acceptance demands a cleanly
    one-dimensional nullspace (smallest singular value < 1e-8 * largest,
    next one > 1e-4 * largest).
    """
    N, eta = params.N, params.eta
    radius = 1.0 + max(abs(x) for x in params.xi) + abs(eta)
    for deg in range(N + 1):
        nodes = circle_nodes(N + deg + 4, radius)
        powers = np.arange(deg + 1)
        zc = nodes[:, None] ** powers[None, :]
        zm = (nodes[:, None] - eta) ** powers[None, :]
        zp = (nodes[:, None] + eta) ** powers[None, :]
        mat = (
            tau(nodes)[:, None] * zc
            - twist.k2 * params.a(nodes)[:, None] * zm
            - twist.k1 * params.d(nodes)[:, None] * zp
        )
        colnorm = np.linalg.norm(mat, axis=0)
        colnorm[colnorm == 0] = 1.0
        u, s, vh = np.linalg.svd(mat / colnorm)
        if s[0] == 0:
            continue
        if s[-1] < 1e-8 * s[0]:
            if deg > 0 and s[-2] < 1e-4 * s[0]:
                raise TQNullspaceError(
                    f"nullspace dimension > 1 at degree {deg}: degenerate tau"
                )
            coeff = vh[-1].conj() / colnorm
            coeff = coeff / coeff[-1]  # monic in lambda^deg
            q = QFunction.from_coeffs(coeff[::-1])
            if _tq_residual(params, twist, tau, q) <= rtol:
                xi = params.xi_array()
                roots = np.asarray(q.roots)
                if roots.size and np.min(
                    np.abs(roots[:, None] - xi[None, :])
                ) < params.genericity_tol:
                    raise TQNullspaceError("Q root collides with an inhomogeneity")
                return q
    raise TQNullspaceError("no Q of degree <= N solves the TQ relation")


def _tq_residual(params, twist, tau, q, count=50, seed=7):
    rng = np.random.default_rng(seed)
    radius = 1.0 + max(abs(x) for x in params.xi) + abs(params.eta)
    lam = radius * (rng.uniform(-1, 1, count) + 1j * rng.uniform(-1, 1, count))
    lhs = tau(lam) * q(lam)
    rhs = twist.k2 * params.a(lam) * q(lam - params.eta) + twist.k1 * params.d(
        lam
    ) * q(lam + params.eta)
    scale = np.max(np.abs(lhs)) + np.max(np.abs(rhs))
    return float(np.max(np.abs(lhs - rhs)) / max(scale, 1e-300))


def tq_residual(params, twist, tau, q, count=50):
    """Public relative TQ residual over random sample points."""
    return _tq_residual(params, twist, tau, q, count=count)


def bethe_residual(params: ChainParams, twist: Twist, q: QFunction):
    """max_j |(-1/mu) a_Q(q_j) - 1| over the roots of Q."""
    if q.degree == 0:
        return 0.0
    roots = np.asarray(q.roots)
    if roots.size > 1:
        dmin = np.min(
            np.abs(roots[:, None] - roots[None, :])
            + np.diag(np.full(roots.size, np.inf))
        )
        if dmin < 1e-8:
            raise ValueError("coincident Bethe roots")
    vals = [slavnov.frak_a(params, q, r) for r in roots]
    mu = twist.mu
    return float(max(abs(-v / mu - 1.0) for v in vals))


def dual_q(params: ChainParams, twist: Twist, q: QFunction, rtol=1e-9):
    """Quantum-Wronskian partner Qhat of degree N - R.

    Solves the linear (in Qhat) relation
        k2 Qhat(lam) Q(lam-eta) - k1 Q(lam) Qhat(lam-eta) = (k2 - k1) d(lam).
    """
    N, eta = params.N, params.eta
    deg = N - q.degree
    radius = 1.0 + max(abs(x) for x in params.xi) + abs(eta)
    nodes = circle_nodes(N + deg + 4, radius)
    powers = np.arange(deg + 1)
    zc = nodes[:, None] ** powers[None, :]
    zm = (nodes[:, None] - eta) ** powers[None, :]
    mat = (
        twist.k2 * q(nodes - eta)[:, None] * zc
        - twist.k1 * q(nodes)[:, None] * zm
    )
    rhs = (twist.k2 - twist.k1) * params.d(nodes)
    coeff, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    resid = np.max(np.abs(mat @ coeff - rhs)) / max(np.max(np.abs(rhs)), 1e-300)
    if resid > rtol:
        raise TQNullspaceError(f"no Wronskian partner at degree {deg} (residual {resid:g})")
    if abs(coeff[-1]) < 1e-8 * max(np.max(np.abs(coeff)), 1e-300):
        raise TQNullspaceError("Wronskian partner has degree < N - R")
    return QFunction.from_coeffs((coeff / coeff[-1])[::-1])


def wronskian_residual(params, twist, q, qhat, count=40):
    """Relative residual of the quantum-Wronskian relation on sample points."""
    rng = np.random.default_rng(11)
    radius = 1.0 + max(abs(x) for x in params.xi) + abs(params.eta)
    lam = radius * (rng.uniform(-1, 1, count) + 1j * rng.uniform(-1, 1, count))
    lhs = twist.k2 * qhat(lam) * q(lam - params.eta) - twist.k1 * q(lam) * qhat(
        lam - params.eta
    )
    rhs = (twist.k2 - twist.k1) * params.d(lam)
    scale = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)), 1e-300)
    return float(np.max(np.abs(lhs - rhs)) / scale)


def sum_rule_residual(params, q, qhat):
    """|sum_n (xi_n - eta/2) - sum roots(Q) - sum roots(Qhat)|."""
    target = complex(np.sum(params.xi_array() - params.eta / 2))
    return abs(target - q.sum_roots() - qhat.sum_roots())


def energy_from_roots(q: QFunction, eta=-1j):
    """E = sum_a 2 eta^2 / ((lam_a - eta/2)(lam_a + eta/2)); real for real roots.

    For eta = -i this is -sum_a 2/(lam_a^2 + 1/4), the homogeneous-chain
    energy of the state described by Q.
    """
    if q.degree == 0:
        return 0.0
    roots = np.asarray(q.roots)
    den = (roots - eta / 2) * (roots + eta / 2)
    if np.min(np.abs(den)) < 1e-12:
        raise ZeroDivisionError("Bethe root at +-eta/2 (energy pole)")
    val = np.sum(2 * eta**2 / den)
    return float(val.real) if abs(val.imag) < 1e-8 * max(1.0, abs(val)) else complex(val)


# -- counting function -------------------------------------------------------

def p_momentum(u):
    """p(u) = 2 atan(2u), the bare momentum; p' = 1/(u^2 + 1/4)."""
    return 2.0 * np.arctan(2.0 * np.asarray(u, dtype=float))


def p_momentum_prime(u):
    u = np.asarray(u, dtype=float)
    return 1.0 / (u * u + 0.25)


def theta_shift(u):
    """theta(u) = -2 atan(u); theta' = -2/(u^2 + 1)."""
    return -2.0 * np.arctan(np.asarray(u, dtype=float))


def theta_shift_prime(u):
    u = np.asarray(u, dtype=float)
    return -2.0 / (u * u + 1.0)


def _real_offsets(params: ChainParams, homogeneous):
    if homogeneous:
        return np.zeros(params.N)
    x = params.xi_array() - params.eta / 2
    if np.max(np.abs(x.imag)) > 1e-9:
        raise ValueError("counting function requires Im(xi_n) = Im(eta/2)")
    return x.real


def counting_function(params: ChainParams, q: QFunction, lam, homogeneous=False):
    """xi_hat_Q(lam) = p_tot(lam) + (1/N) sum_k theta(lam - lam_k), lam real."""
    roots = np.asarray(q.roots) if q.degree else np.array([])
    if roots.size and np.max(np.abs(roots.imag)) >= 1.0:
        raise ValueError("branch ambiguity: |Im root| >= 1")
    x = _real_offsets(params, homogeneous)
    lam = np.asarray(lam, dtype=float)
    val = np.mean(p_momentum(lam[..., None] - x), axis=-1)
    if roots.size:
        val = val + np.sum(theta_shift(lam[..., None] - roots.real), axis=-1) / params.N
    return val


def counting_function_prime(params: ChainParams, q: QFunction, lam, homogeneous=False):
    roots = np.asarray(q.roots).real if q.degree else np.array([])
    x = _real_offsets(params, homogeneous)
    lam = np.asarray(lam, dtype=float)
    val = np.mean(p_momentum_prime(lam[..., None] - x), axis=-1)
    if roots.size:
        val = val + np.sum(theta_shift_prime(lam[..., None] - roots), axis=-1) / params.N
    return val


def ground_state_quantum_numbers(N, R=None, branch=0):
    """Consecutive quantum numbers for the real-root ground-state sector.

    For even N the sector is R = N/2 and the two degenerate choices are
    {0..R-1} (branch 0) and {1..R} (branch 1); for odd N, R = (N-1)/2 with
    the single set {1..R}.
    """
    if R is None:
        R = N // 2
    if N % 2 == 0 and R == N // 2:
        start = 0 if branch == 0 else 1
        return tuple(range(start, start + R))
    return tuple(range(1, R + 1))


def solve_bethe_newton(
    params: ChainParams,
    twist: Twist,
    quantum_numbers,
    homogeneous=False,
    tol=1e-12,
    max_iter=200,
):
    """Damped Newton solve of the logarithmic Bethe equations.

    quantum_numbers: integer n_j, one per sought real root (sector R = len).
    Returns a QFunction with the solved (real) roots.
    """
    if not twist.unitary_ratio:
        raise ValueError("Newton path requires |k2/k1| = 1")
    qn = np.asarray(sorted(quantum_numbers), dtype=float)
    R, N = qn.size, params.N
    alpha = twist.alpha
    targets = (2 * qn - N + R - 1 + alpha) * np.pi / N
    x = _real_offsets(params, homogeneous)

    lam = np.array([_invert_p_tot(x, t) for t in targets])

    def residual(l):
        v = np.mean(p_momentum(l[:, None] - x), axis=1)
        v = v + np.sum(theta_shift(l[:, None] - l[None, :]), axis=1) / N
        return v - targets

    f = residual(lam)
    for _ in range(max_iter):
        if np.max(np.abs(f)) <= tol:
            break
        diag = np.mean(p_momentum_prime(lam[:, None] - x), axis=1)
        theta_p = theta_shift_prime(lam[:, None] - lam[None, :])
        np.fill_diagonal(theta_p, 0.0)
        jac = -theta_p / N
        np.fill_diagonal(jac, diag + np.sum(theta_p, axis=1) / N)
        step = np.linalg.solve(jac, -f)
        size = 1.0
        for _ in range(30):
            trial = lam + size * step
            ftrial = residual(trial)
            if np.max(np.abs(ftrial)) < np.max(np.abs(f)):
                lam, f = trial, ftrial
                break
            size *= 0.5
        else:
            raise BetheConvergenceError("damping failed to reduce the residual")
    else:
        raise BetheConvergenceError(f"no convergence after {max_iter} iterations")
    if R > 1 and np.min(np.diff(np.sort(lam))) < 1e-10:
        raise BetheConvergenceError("root collision in Newton solve")
    return QFunction(roots=tuple(np.sort(lam)))


def _invert_p_tot(x, target):
    """Solve mean_n p(l - x_n) = target for real l (monotone, 1D Newton)."""
    l = 0.5 * np.tan(np.clip(target, -np.pi + 1e-9, np.pi - 1e-9) / 2.0) + np.mean(x)
    for _ in range(60):
        f = np.mean(p_momentum(l - x)) - target
        if abs(f) < 1e-13:
            break
        l -= f / np.mean(p_momentum_prime(l - x))
    return l


def ground_state_q(params: ChainParams, twist: Twist, homogeneous=False):
    """Lowest-energy real-root Newton solution in the half-filled sector."""
    N = params.N
    best = None
    branches = (0, 1) if N % 2 == 0 else (0,)
    for br in branches:
        qn = ground_state_quantum_numbers(N, branch=br)
        try:
            q = solve_bethe_newton(params, twist, qn, homogeneous=homogeneous)
        except BetheConvergenceError:
            continue
        e = energy_from_roots(q, eta=params.eta)
        e = e.real if isinstance(e, complex) else e
        if best is None or e < best[0]:
            best = (e, q)
    if best is None:
        raise BetheConvergenceError("no ground-state branch converged")
    return best[1]
