"""Monic polynomials kept as explicit root lists, plus the Vandermonde."""
from dataclasses import dataclass

import numpy as np


def vandermonde(xs):
    """V(x_1,...,x_n) = prod_{i<j} (x_j - x_i); empty/singleton -> 1."""
    xs = np.asarray(xs, dtype=np.complex128)
    n = xs.size
    if n < 2:
        return 1.0 + 0.0j
    diff = xs[None, :] - xs[:, None]
    return complex(np.prod(diff[np.triu_indices(n, k=1)]))


@dataclass(frozen=True)
class QFunction:
    """Monic polynomial Q(lam) = prod_j (lam - roots_j), degree R.

    Roots and the monic coefficient list are kept consistent; evaluation uses
    the factorized form (numerically the sharper one when roots are known).
    """

    roots: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "roots", tuple(complex(r) for r in self.roots)
        )

    @classmethod
    def one(cls):
        return cls(roots=())

    @classmethod
    def from_coeffs(cls, coeffs):
        """Coefficients in descending powers; must be (close to) monic."""
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.size == 0:
            raise ValueError("empty coefficient list")
        c = c / c[0]
        roots = np.roots(c) if c.size > 1 else np.array([], dtype=np.complex128)
        return cls(roots=tuple(roots))

    @property
    def degree(self):
        return len(self.roots)

    def coeffs(self):
        """Monic coefficients, descending powers (numpy poly convention)."""
        return np.poly(np.asarray(self.roots)) if self.roots else np.array([1.0 + 0j])

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=np.complex128)
        if not self.roots:
            return np.ones_like(lam) if lam.ndim else 1.0 + 0.0j
        val = np.prod(lam[..., None] - np.asarray(self.roots), axis=-1)
        return val if lam.ndim else complex(val)

    def log_deriv(self, lam):
        """Q'(lam)/Q(lam) = sum_j 1/(lam - root_j)."""
        if not self.roots:
            return 0.0 + 0.0j
        return complex(np.sum(1.0 / (lam - np.asarray(self.roots))))

    def shifted_eval(self, lam, shift):
        return self(np.asarray(lam) + shift)

    def sum_roots(self):
        return complex(np.sum(np.asarray(self.roots))) if self.roots else 0j

    def coeff_root_residual(self):
        """Relative disagreement between roots and re-extracted coeff roots."""
        if not self.roots:
            return 0.0
        c = self.coeffs()
        r2 = np.sort_complex(np.roots(c))
        r1 = np.sort_complex(np.asarray(self.roots))
        scale = max(1.0, np.max(np.abs(r1)))
        return float(np.max(np.abs(r1 - r2)) / scale)


def circle_nodes(count, radius, center=0.0):
    """Scaled roots-of-unity sample nodes: well conditioned for monomials."""
    k = np.arange(count)
    return center + radius * np.exp(2j * np.pi * (k + 0.25) / count)
