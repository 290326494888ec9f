"""Chain parameters and boundary twists.

Conventions used throughout the package:

* chain of N spin-1/2 sites, quantum space (C^2)^{{otimes}N} with site 1 the
  leftmost Kronecker factor; local basis (1,0) = "1" (up), (0,1) = "2" (down),
* quantum parameter eta != 0 (eta = -1j for physical runs),
* inhomogeneities xi_1..xi_N, generic in the sense
  xi_a != xi_b + h*eta for h in {-1,0,1}, a != b,
* a(lam) = prod_n (lam - xi_n + eta),  d(lam) = prod_n (lam - xi_n),
  d_h(lam) = prod_n (lam - xi_n + h_n*eta),
* twist matrix K = [[a, b], [c, d]] with eigenvalues k1, k2 and ratio
  mu = k2/k1; the separation of variables used here requires b != 0.
"""
from dataclasses import dataclass, field

import numpy as np

DEFAULT_ETA = -1j
MAX_SITES = 12


class GenericityError(ValueError):
    """Inhomogeneities violate the pairwise genericity condition."""


class SovInapplicableError(ValueError):
    """Twist has b = 0; the B-operator SoV basis does not exist."""


@dataclass(frozen=True)
class ChainParams:
    """Finite chain: size N, quantum parameter eta, inhomogeneities xi."""

    N: int
    eta: complex
    xi: tuple

    def __post_init__(self):
        if not (1 <= self.N <= MAX_SITES):
            raise ValueError(f"N must be in [1, {MAX_SITES}], got {self.N}")
        if self.eta == 0:
            raise ValueError("eta must be nonzero")
        xi = tuple(complex(x) for x in self.xi)
        if len(xi) != self.N:
            raise ValueError("xi must have length N")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", complex(self.eta))
        tol = self.genericity_tol
        arr = np.asarray(xi)
        for h in (-1, 0, 1):
            bad = np.abs(arr[:, None] - arr[None, :] - h * self.eta) < tol
            np.fill_diagonal(bad, False)
            if bad.any():
                raise GenericityError(
                    f"xi_a - xi_b too close to {h}*eta (tol {tol:g})"
                )

    @property
    def genericity_tol(self):
        return 1e-6 * abs(self.eta)

    @property
    def dim(self):
        return 1 << self.N

    def xi_array(self):
        return np.asarray(self.xi, dtype=np.complex128)

    def a(self, lam):
        """a(lam) = prod_n (lam - xi_n + eta)."""
        lam = np.asarray(lam, dtype=np.complex128)
        return np.prod(lam[..., None] - self.xi_array() + self.eta, axis=-1)

    def d(self, lam):
        """d(lam) = prod_n (lam - xi_n)."""
        lam = np.asarray(lam, dtype=np.complex128)
        return np.prod(lam[..., None] - self.xi_array(), axis=-1)

    def d_h(self, h, lam):
        """d_h(lam) = prod_n (lam - xi_n^{(h_n)}) with xi_n^{(h)} = xi_n - h*eta."""
        hv = np.asarray(h)
        if hv.shape != (self.N,) or not np.isin(hv, (0, 1)).all():
            raise ValueError("h must be a length-N vector over {0,1}")
        lam = np.asarray(lam, dtype=np.complex128)
        return np.prod(lam[..., None] - self.xi_shifted(hv), axis=-1)

    def xi_shifted(self, h):
        """xi_n^{(h_n)} = xi_n - h_n*eta."""
        return self.xi_array() - np.asarray(h) * self.eta

    def log_deriv_a(self, lam):
        return complex(np.sum(1.0 / (lam - self.xi_array() + self.eta)))

    def log_deriv_d(self, lam):
        return complex(np.sum(1.0 / (lam - self.xi_array())))


def sample_params(N, eta=DEFAULT_ETA, seed=0, band=0.3, scale=1.0):
    """Seeded default inhomogeneities xi_n = eta/2 + scale*x_n, x_n real.

    x_n is drawn uniformly from [-band, band]; the offsets keep
    Im(xi_n) = Im(eta/2), the regime in which the real-root ground-state
    description applies.  Redraws until the genericity condition holds.
    """
    rng = np.random.default_rng(seed)
    for _ in range(64):
        x = rng.uniform(-band, band, size=N) * scale
        try:
            return ChainParams(N=N, eta=eta, xi=tuple(eta / 2 + x))
        except GenericityError:
            continue
    raise GenericityError("could not sample generic inhomogeneities")


def homogeneous_params(N, eta=DEFAULT_ETA):
    """xi_n = eta/2 exactly; valid for dense algebra, not for SoV bases."""
    obj = object.__new__(ChainParams)
    object.__setattr__(obj, "N", N)
    object.__setattr__(obj, "eta", complex(eta))
    object.__setattr__(obj, "xi", tuple([complex(eta) / 2] * N))
    return obj


@dataclass(frozen=True)
class Twist:
    """2x2 boundary twist K = [[a, b], [c, d]]."""

    a: complex
    b: complex
    c: complex
    d: complex
    k1: complex = field(init=False)
    k2: complex = field(init=False)

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise ValueError("twist must be invertible")
        tr = self.a + self.d
        disc = np.sqrt(complex(tr * tr - 4 * det))
        k1 = (tr + disc) / 2
        k2 = (tr - disc) / 2
        # deterministic eigenvalue order: larger (Re, Im) first, so that
        # sigma-x gets (k1, k2) = (1, -1)
        if (k1.real, k1.imag) < (k2.real, k2.imag):
            k1, k2 = k2, k1
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "k2", k2)

    @classmethod
    def sigma_x(cls):
        return cls(0, 1, 1, 0)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def from_matrix(cls, mat):
        m = np.asarray(mat, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError("twist matrix must be 2x2")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def trace(self):
        return self.a + self.d

    @property
    def mu(self):
        return self.k2 / self.k1

    @property
    def sov_applicable(self):
        return self.b != 0

    @property
    def unitary_ratio(self):
        """|mu| = 1, required when thermodynamic statements are invoked."""
        return abs(abs(self.mu) - 1.0) < 1e-10

    @property
    def alpha(self):
        """Real root-count shift: mu = exp(i*pi*alpha) with -1 < alpha <= 1.

        The sign is fixed so that roots solving the logarithmic equations
        with this shift satisfy a_Q(q_j) = -mu under the principal branches
        used in `spectrum.counting_function` (cross-checked against the
        TQ-nullspace route in the tests).
        """
        if not self.unitary_ratio:
            raise ValueError("alpha defined only for |k2/k1| = 1")
        alpha = -np.angle(self.mu) / np.pi
        if alpha <= -1.0 + 1e-15:
            alpha += 2.0
        return float(alpha)

    def require_sov(self):
        if not self.sov_applicable:
            raise SovInapplicableError(
                "twist has b = 0; construct the SoV basis from C instead "
                "(not implemented here)"
            )

    def is_triangular_c0(self):
        return self.c == 0


def random_unitary_eigen_twist(seed=0, require_b=True):
    """Random non-diagonal K with unimodular eigenvalue ratio |k2/k1| = 1.

    K = G diag(e^{i phi1}, e^{i phi2}) G^{-1} with seeded G; resamples until
    the off-diagonal entries are comfortably nonzero.
    """
    rng = np.random.default_rng(seed)
    for _ in range(64):
        phi = rng.uniform(-np.pi, np.pi, size=2)
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(np.linalg.det(g)) < 0.1:
            continue
        k = g @ np.diag(np.exp(1j * phi)) @ np.linalg.inv(g)
        if require_b and abs(k[0, 1]) < 0.1:
            continue
        if abs(k[1, 0]) < 0.05:
            continue
        tw = Twist.from_matrix(k)
        if abs(tw.k1 - tw.k2) < 0.1:
            continue
        return tw
    raise RuntimeError("could not sample a usable twist")
