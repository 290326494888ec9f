"""Thermodynamic-limit machinery: densities and multiple-integral blocks.

Ground-state root density (eta = -i conventions):
    rho(lam) = 1/(2 cosh(pi lam)),
    rho_tot(lam) = (1/N) sum_n rho(lam - x_n),  x_n = Re(xi_n - eta/2),
solving  2 pi rho_tot(lam) - int theta'(lam-mu) rho_tot(mu) dmu = p'_tot(lam).

The m-site block integrals put s' variables on the line R - i and the rest
on R; the shifted line is substituted analytically (lam = x - i, with
cosh(pi(x-i)) = -cosh(pi x)), never walked numerically.  Integrands decay
like e^{-m pi |x|}, so modest Gauss-Legendre panels on [-L, L] converge to
near machine precision.  The only delicate factor is the pair ratio
sinh(pi(lam_a - lam_b))/(lam_a - lam_b - i): for an unshifted/shifted pair
the denominator is real and crosses zero, but the zero is removable
(ratio -> -pi); it is evaluated through a series-safe sinhc.
"""
from dataclasses import dataclass

import numpy as np

from .blocks_eps import EpsTuple
from .kernels import block_sum_2d, block_sum_3d, block_sum_4d

__all__ = [
    "QuadratureConfig",
    "ThermoBlockResult",
    "density_rho",
    "density_rho_tot",
    "p_prime_tot",
    "lieb_equation_residual",
    "block_thermo_hom",
    "block_thermo_inhom",
    "extrapolate_blocks",
]


def density_rho(lam):
    """rho(lam) = 1/(2 cosh(pi lam))."""
    return 1.0 / (2.0 * np.cosh(np.pi * np.asarray(lam, dtype=float)))


def density_rho_tot(params, lam):
    """(1/N) sum_n rho(lam - x_n) with x_n = Re(xi_n - eta/2)."""
    x = (params.xi_array() - params.eta / 2).real
    lam = np.asarray(lam, dtype=float)
    return np.mean(density_rho(lam[..., None] - x), axis=-1)


def p_prime_tot(params, lam):
    x = (params.xi_array() - params.eta / 2).real
    lam = np.asarray(lam, dtype=float)
    u = lam[..., None] - x
    return np.mean(1.0 / (u * u + 0.25), axis=-1)


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Gauss-Legendre grid on [-L, L]: `nodes` points in `panels` panels."""

    L: float = 20.0
    nodes: int = 256
    panels: int = 8

    def __post_init__(self):
        if self.L < 10:
            raise ValueError("truncation L must be >= 10")
        if self.nodes < 64:
            raise ValueError("need at least 64 nodes per dimension")
        if self.nodes % self.panels:
            raise ValueError("nodes must be divisible by panels")

    @classmethod
    def for_m(cls, m):
        nodes = 256 if m <= 2 else (128 if m == 3 else 64)
        return cls(L=20.0, nodes=nodes, panels=8)

    def grid(self):
        per = self.nodes // self.panels
        base_x, base_w = np.polynomial.legendre.leggauss(per)
        edges = np.linspace(-self.L, self.L, self.panels + 1)
        xs, ws = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            half = (hi - lo) / 2.0
            xs.append(half * base_x + (hi + lo) / 2.0)
            ws.append(half * base_w)
        return np.concatenate(xs), np.concatenate(ws)

    def doubled_L(self):
        return QuadratureConfig(L=2 * self.L, nodes=self.nodes, panels=self.panels)

    def doubled_nodes(self):
        return QuadratureConfig(L=self.L, nodes=2 * self.nodes, panels=self.panels)


@dataclass(frozen=True)
class ThermoBlockResult:
    value: complex
    error: float
    eps: tuple
    m: int


def _sinhc(y):
    """sinh(y)/y, series-safe near 0."""
    y = np.asarray(y, dtype=np.complex128)
    small = np.abs(y) < 1e-4
    safe = np.where(small, 1.0, y)
    out = np.where(small, 1.0 + y * y / 6.0, np.sinh(safe) / safe)
    return out


def _positions(eps: EpsTuple):
    """Variable layout (lam_1..lam_m) = (mu'_{desc alpha+}, mu_{asc alpha-}).

    Returns a list of (site_index_j, shifted) per position, shifted = True
    for the mu' variables living on R - i.
    """
    layout = [(j, True) for j in sorted(eps.alpha_plus, reverse=True)]
    layout += [(j, False) for j in sorted(eps.alpha_minus)]
    return layout


def _pair_matrix(x, shift_a, shift_b):
    """P[ia, ib] = sinh(pi(lam_a - lam_b))/(lam_a - lam_b - i) for a > b."""
    u = x[:, None] - x[None, :]
    if shift_a == shift_b:
        return np.sinh(np.pi * u) / (u - 1j)
    if shift_b and not shift_a:
        # lam_a - lam_b = u + i: numerator -sinh(pi u), denominator u (removable)
        return -np.pi * _sinhc(np.pi * u)
    raise AssertionError("shifted position after unshifted cannot occur")


def _contract(factors, pair_mats):
    m = len(factors)
    if m == 1:
        return complex(np.sum(factors[0]))
    if m == 2:
        return block_sum_2d(factors[0], factors[1], pair_mats[(1, 0)])
    if m == 3:
        return block_sum_3d(
            factors[0], factors[1], factors[2],
            pair_mats[(1, 0)], pair_mats[(2, 0)], pair_mats[(2, 1)],
        )
    if m == 4:
        return block_sum_4d(
            factors[0], factors[1], factors[2], factors[3],
            pair_mats[(1, 0)], pair_mats[(2, 0)], pair_mats[(2, 1)],
            pair_mats[(3, 0)], pair_mats[(3, 1)], pair_mats[(3, 2)],
        )
    raise NotImplementedError("block integrals implemented for m <= 4")


def _hom_value(eps: EpsTuple, cfg: QuadratureConfig):
    m = eps.m
    x, w = cfg.grid()
    layout = _positions(eps)
    sech = 1.0 / np.cosh(np.pi * x)
    factors = []
    for j, shifted in layout:
        if shifted:
            f = (x + 0.5j) ** (j - 1) * (x - 0.5j) ** (m - j) * ((-1.0) ** m) * sech**m
        else:
            f = (x - 0.5j) ** (j - 1) * (x + 0.5j) ** (m - j) * sech**m
        factors.append(w * f / (2.0 * np.pi))
    pair_mats = {}
    for a in range(1, m):
        for b in range(a):
            pair_mats[(a, b)] = _pair_matrix(x, layout[a][1], layout[b][1])
    pref = (-1.0) ** eps.s * (-np.pi) ** (m * (m + 1) // 2)
    return pref * _contract(factors, pair_mats)


def block_thermo_hom(eps, qcfg=None):
    """Homogeneous-limit m-site block by m-dimensional quadrature.

    Returns exact 0 (no quadrature) unless s + s' = m.
    """
    eps = EpsTuple.coerce(eps)
    if eps.s + eps.s_prime != eps.m:
        return ThermoBlockResult(0.0 + 0.0j, 0.0, eps.eps, eps.m)
    cfg = qcfg or QuadratureConfig.for_m(eps.m)
    val = _hom_value(eps, cfg)
    err = max(
        abs(val - _hom_value(eps, cfg.doubled_L())),
        abs(val - _hom_value(eps, cfg.doubled_nodes())),
    )
    return ThermoBlockResult(complex(val), float(err), eps.eps, eps.m)


def _inhom_value(eps: EpsTuple, xis, cfg: QuadratureConfig):
    m = eps.m
    x, w = cfg.grid()
    layout = _positions(eps)
    xis = np.asarray(xis, dtype=np.complex128)
    factors = []
    for j, shifted in layout:
        lam = x - 1j if shifted else x.astype(np.complex128)
        f = np.ones_like(lam)
        for k in range(m):
            f = f / np.sinh(np.pi * (lam - xis[k]))
        if shifted:
            for k in range(j - 1):
                f = f * (lam - xis[k] + 1j)
            for k in range(j, m):
                f = f * (lam - xis[k])
            f = f * (-0.5j)
        else:
            for k in range(j - 1):
                f = f * (lam - xis[k] - 1j)
            for k in range(j, m):
                f = f * (lam - xis[k])
            f = f * 0.5j
        factors.append(w * f)
    pair_mats = {}
    for a in range(1, m):
        for b in range(a):
            pair_mats[(a, b)] = _pair_matrix(x, layout[a][1], layout[b][1])
    pref = 1.0 + 0.0j
    for k in range(m):
        for l in range(k + 1, m):
            d = xis[k] - xis[l]
            pref *= np.pi * _sinhc(np.pi * d)
    return complex(pref * _contract(factors, pair_mats))


def block_thermo_inhom(eps, xis, qcfg=None):
    """Inhomogeneous m-site block; xis are the m inhomogeneities (near -i/2)."""
    eps = EpsTuple.coerce(eps)
    if len(xis) != eps.m:
        raise ValueError("need exactly m inhomogeneities")
    if eps.s + eps.s_prime != eps.m:
        return ThermoBlockResult(0.0 + 0.0j, 0.0, eps.eps, eps.m)
    xis = np.asarray(xis, dtype=np.complex128)
    if np.max(np.abs(xis + 0.5j).imag) > 0.25:
        raise ValueError("inhomogeneities too far from the -i/2 line")
    diffs = np.abs(xis[:, None] - xis[None, :]) + np.eye(eps.m)
    if np.min(diffs) < 1e-12:
        raise ValueError("inhomogeneities must be pairwise distinct")
    cfg = qcfg or QuadratureConfig.for_m(eps.m)
    val = _inhom_value(eps, xis, cfg)
    err = max(
        abs(val - _inhom_value(eps, xis, cfg.doubled_L())),
        abs(val - _inhom_value(eps, xis, cfg.doubled_nodes())),
    )
    return ThermoBlockResult(complex(val), float(err), eps.eps, eps.m)


def extrapolate_blocks(data, degree=None):
    """Polynomial-in-1/N extrapolation of finite-size block values.

    data: iterable of (N, value).  Returns (estimate, report) where the
    report carries the fit coefficients, leave-one-out spread, and an
    `erratic` flag for data a low-order 1/N fit cannot describe.
    """
    pts = sorted((int(n), complex(v)) for n, v in data)
    if len(pts) < 3:
        raise ValueError("need at least 3 sizes to extrapolate")
    ns = np.array([p[0] for p in pts], dtype=float)
    vals = np.array([p[1] for p in pts])
    if degree is None:
        degree = 1 if len(pts) < 5 else 2
    x = 1.0 / ns
    coeff = np.polyfit(x, vals, degree)
    est = complex(coeff[-1])
    resid = np.max(np.abs(np.polyval(coeff, x) - vals))
    loo = []
    if len(pts) > degree + 1:
        for drop in range(len(pts)):
            keep = [i for i in range(len(pts)) if i != drop]
            c = np.polyfit(x[keep], vals[keep], degree)
            loo.append(complex(c[-1]))
    spread = max((abs(l - est) for l in loo), default=0.0)
    scale = max(np.max(np.abs(vals)), 1e-30)
    erratic = resid / scale > 0.2
    report = {
        "coefficients": [complex(c) for c in coeff],
        "fit_residual": float(resid),
        "loo_estimates": loo,
        "loo_spread": float(spread),
        "erratic": bool(erratic),
        "degree": int(degree),
    }
    return est, report
