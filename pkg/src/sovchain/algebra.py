"""Dense finite-size Yang-Baxter algebra for the rational 6-vertex chain.

Monodromy convention: T_0(lam) = R_{0N}(lam - xi_N) ... R_{01}(lam - xi_1),
i.e. site 1 sits rightmost in the ordered operator product (it acts first).
The quantum space is (C^2)^{otimes N} with site 1 the leftmost Kronecker
factor; basis states are indexed by bit strings with site 1 as the most
significant bit and bit value 0 = up = "1", 1 = down = "2".

Everything here is plain dense complex linear algebra; sizes are capped by
`params.MAX_SITES`.  Norms are Frobenius norms throughout.
"""
import numpy as np
import scipy.sparse as sp

from .params import ChainParams, Twist

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
ID2 = np.eye(2, dtype=np.complex128)


def build_r_matrix(eta, lam):
    """Rational R-matrix: lam*Id + eta*P on C^2 x C^2 (P = permutation)."""
    r = np.zeros((4, 4), dtype=np.complex128)
    r[0, 0] = r[3, 3] = lam + eta
    r[1, 1] = r[2, 2] = lam
    r[1, 2] = r[2, 1] = eta
    return r


def elementary(e1, e2):
    """2x2 matrix E^{e1,e2} with (E)_{ij} = delta_{i,e1} delta_{j,e2} (1-based)."""
    m = np.zeros((2, 2), dtype=np.complex128)
    m[e1 - 1, e2 - 1] = 1.0
    return m


def local_operator_embed(N, site, op):
    """Embed a 2x2 operator at `site` (1-based) into the 2^N space."""
    if not (1 <= site <= N):
        raise ValueError("site out of range")
    left = 1 << (site - 1)
    right = 1 << (N - site)
    m = np.asarray(op, dtype=np.complex128)
    out = np.kron(np.kron(np.eye(left), m), np.eye(right))
    return out


def local_elementary_embed(N, site, e1, e2):
    return local_operator_embed(N, site, elementary(e1, e2))


def apply_local(op, vec, N, site):
    """Apply a 2x2 operator at `site` to a 2^N vector (no matrix build)."""
    v = np.asarray(vec, dtype=np.complex128).reshape(
        1 << (site - 1), 2, 1 << (N - site)
    )
    out = np.einsum("ab,xby->xay", np.asarray(op, dtype=np.complex128), v)
    return out.reshape(-1)


def apply_elementary_product(vec, N, eps, start_site=1):
    """Apply prod_j E^{eps_{2j-1},eps_{2j}} at sites start..start+m-1 to vec."""
    out = np.asarray(vec, dtype=np.complex128)
    m = len(eps) // 2
    for j in range(m):
        e1, e2 = eps[2 * j], eps[2 * j + 1]
        out = apply_local(elementary(e1, e2), out, N, start_site + j)
    return out


def monodromy(params: ChainParams, lam):
    """All four monodromy entries as a 2x2 array of dense 2^N operators.

    Returns mon with mon[0][0] = A(lam), mon[0][1] = B(lam),
    mon[1][0] = C(lam), mon[1][1] = D(lam).
    """
    N, eta = params.N, params.eta
    dim = params.dim
    # aux-space 2x2 block matrix with operator entries; R_{0n}(u) has blocks
    # [[u + eta*E11_n, eta*E21_n], [eta*E12_n, u + eta*E22_n]]
    t = [[None, None], [None, None]]
    for n in range(1, N + 1):
        u = lam - params.xi[n - 1]
        blocks = [
            [(u, elementary(1, 1)), (None, elementary(2, 1))],
            [(None, elementary(1, 2)), (u, elementary(2, 2))],
        ]

        def site_apply(mat, a, b):
            const, e = blocks[a][b]
            out = eta * _mul_local(mat, e, params.N, n)
            if const is not None:
                out += const * mat
            return out

        if n == 1:
            ident = np.eye(dim, dtype=np.complex128)
            new = [[site_apply(ident, a, b) for b in range(2)] for a in range(2)]
        else:
            new = [
                [
                    site_apply(t[0][b], a, 0) + site_apply(t[1][b], a, 1)
                    for b in range(2)
                ]
                for a in range(2)
            ]
        t = new
    return t


def _mul_local(mat, op2, N, site):
    """(op2 at site) @ mat for dense mat, using a reshape contraction."""
    left = 1 << (site - 1)
    right = 1 << (N - site)
    m = mat.reshape(left, 2, right, mat.shape[1])
    return np.einsum("ab,xbyj->xayj", op2, m).reshape(mat.shape)


def monodromy_entry(params: ChainParams, which, lam):
    """Single monodromy entry; which in {"A","B","C","D"}."""
    idx = {"A": (0, 0), "B": (0, 1), "C": (1, 0), "D": (1, 1)}[which]
    return monodromy(params, lam)[idx[0]][idx[1]]


def twisted_monodromy(params: ChainParams, twist: Twist, lam):
    """T^{(K)} = K T: entries [[A^K, B^K], [C^K, D^K]]."""
    t = monodromy(params, lam)
    k = twist.matrix()
    return [
        [k[a, 0] * t[0][b] + k[a, 1] * t[1][b] for b in range(2)]
        for a in range(2)
    ]


def transfer_matrix(params: ChainParams, twist: Twist, lam):
    """tr_0 [K_0 T_0(lam)] = a A + b C + c B + d D."""
    t = monodromy(params, lam)
    return (
        twist.a * t[0][0]
        + twist.b * t[1][0]
        + twist.c * t[0][1]
        + twist.d * t[1][1]
    )


def apply_monodromy(params: ChainParams, lam, vec):
    """Fast sweep: returns 2x2 array w with w[a][b] = T_{ab}(lam) vec.

    Cost O(N 2^N); this is how transfer matrices act on states at sizes
    where dense 2^N x 2^N algebra is not affordable.
    """
    N, eta = params.N, params.eta
    v = np.asarray(vec, dtype=np.complex128)
    dim = v.size
    out = np.empty((2, 2, dim), dtype=np.complex128)
    for b in range(2):
        psi = np.zeros((2, dim), dtype=np.complex128)
        psi[b] = v
        for n in range(1, N + 1):
            u = lam - params.xi[n - 1]
            # r4[a_out, s_out, a_in, s_in]: R acts on (aux, site n)
            r4 = build_r_matrix(eta, u).reshape(2, 2, 2, 2)
            ps = psi.reshape(2, 1 << (n - 1), 2, 1 << (N - n))
            ps = np.einsum("aSbs,bxsy->axSy", r4, ps)
            psi = ps.reshape(2, dim)
        out[:, b, :] = psi
    return out


def apply_transfer(params: ChainParams, twist: Twist, lam, vec):
    """Transfer-matrix action via the fast sweep."""
    w = apply_monodromy(params, lam, vec)
    k = twist.matrix()
    return (
        k[0, 0] * w[0, 0] + k[0, 1] * w[1, 0] + k[1, 0] * w[0, 1] + k[1, 1] * w[1, 1]
    )


def apply_twisted_entry(params: ChainParams, twist: Twist, which, lam, vec):
    """Action of a single K-twisted monodromy entry on a vector."""
    w = apply_monodromy(params, lam, vec)
    k = twist.matrix()
    row = 0 if which in ("A", "B") else 1
    col = 0 if which in ("A", "C") else 1
    return k[row, 0] * w[0, col] + k[row, 1] * w[1, col]


def quantum_determinant_residual(params: ChainParams, lam):
    """Frobenius residual of both operator quantum-determinant identities.

    det_q T(lam) = a(lam) d(lam-eta) Id
                 = A(lam) D(lam-eta) - B(lam) C(lam-eta)
                 = D(lam) A(lam-eta) - C(lam) B(lam-eta)
    Returns the max residual of the two lines, normalized by the scale
    |a(lam) d(lam-eta)| + norm of the products.
    """
    t1 = monodromy(params, lam)
    t0 = monodromy(params, lam - params.eta)
    ident = np.eye(params.dim, dtype=np.complex128)
    target = complex(params.a(lam)) * complex(params.d(lam - params.eta)) * ident
    line1 = t1[0][0] @ t0[1][1] - t1[0][1] @ t0[1][0]
    line2 = t1[1][1] @ t0[0][0] - t1[1][0] @ t0[0][1]
    scale = max(np.linalg.norm(line1), np.linalg.norm(line2), np.linalg.norm(target))
    r1 = np.linalg.norm(line1 - target)
    r2 = np.linalg.norm(line2 - target)
    return float(max(r1, r2) / max(scale, 1e-300))


def sx_total(N, sparse=False):
    """S^x = sum_n sigma^x_n."""
    if sparse:
        acc = sp.csr_matrix((1 << N, 1 << N), dtype=np.complex128)
        for n in range(1, N + 1):
            acc = acc + _sparse_embed(N, n, SIGMA_X)
        return acc
    acc = np.zeros((1 << N, 1 << N), dtype=np.complex128)
    for n in range(1, N + 1):
        acc += local_operator_embed(N, n, SIGMA_X)
    return acc


def gamma_x(N):
    """Gamma^x = sigma^x_1 ... sigma^x_N (global spin flip)."""
    out = np.array([[1.0 + 0j]])
    for _ in range(N):
        out = np.kron(out, SIGMA_X)
    return out


def gamma_tensor(N, gmat):
    """gamma^{otimes N} for a 2x2 gamma."""
    out = np.array([[1.0 + 0j]])
    g = np.asarray(gmat, dtype=np.complex128)
    for _ in range(N):
        out = np.kron(out, g)
    return out


def _sparse_embed(N, site, op):
    left = sp.identity(1 << (site - 1), format="csr", dtype=np.complex128)
    right = sp.identity(1 << (N - site), format="csr", dtype=np.complex128)
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format="csr")


def hamiltonian_antiperiodic(N, sparse=False):
    """H = sum_n [sx sx + sy sy + sz sz - 1] with sigma_{N+1}^a = sx_1 sigma_1^a sx_1.

    The closure bond couples site N to the spin-flipped site-1 operators:
    (+ sx_N sx_1 - sy_N sy_1 - sz_N sz_1 - 1).  Hermitian by construction.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    paulis = (SIGMA_X, SIGMA_Y, SIGMA_Z)
    embed = (lambda s, o: _sparse_embed(N, s, o)) if sparse else (
        lambda s, o: local_operator_embed(N, s, o)
    )
    dim = 1 << N
    if sparse:
        ham = sp.csr_matrix((dim, dim), dtype=np.complex128)
        ident = sp.identity(dim, format="csr", dtype=np.complex128)
    else:
        ham = np.zeros((dim, dim), dtype=np.complex128)
        ident = np.eye(dim, dtype=np.complex128)
    for n in range(1, N):
        for pa in paulis:
            ham = ham + embed(n, pa) @ embed(n + 1, pa)
        ham = ham - ident
    signs = (1.0, -1.0, -1.0)  # sx_1 sigma^a_1 sx_1 = +/- sigma^a_1
    for pa, s in zip(paulis, signs):
        ham = ham + s * (embed(N, pa) @ embed(1, pa))
    ham = ham - ident
    return ham


def transfer_log_derivative_hamiltonian(params: ChainParams, twist: Twist):
    """2*eta * T(lam)^{-1} T'(lam) at lam = eta/2, minus 2N.

    T(lam) is a matrix polynomial of degree <= N, so the derivative is taken
    exactly by differentiating a polynomial interpolation through N+1 nodes.
    """
    N = params.N
    deg = N - 1 if abs(twist.trace) < 1e-12 else N
    lam0 = params.eta / 2
    nodes = lam0 + 0.35 * np.exp(2j * np.pi * np.arange(deg + 1) / (deg + 1))
    vals = [transfer_matrix(params, twist, z) for z in nodes]
    # Lagrange differentiation at lam0
    tmat = np.zeros_like(vals[0])
    tprime = np.zeros_like(vals[0])
    for i, zi in enumerate(nodes):
        others = [z for j, z in enumerate(nodes) if j != i]
        wi = np.prod([zi - z for z in others])
        li = np.prod([lam0 - z for z in others]) / wi
        dli = sum(
            np.prod([lam0 - z for k, z in enumerate(others) if k != j])
            for j in range(len(others))
        ) / wi
        tmat += li * vals[i]
        tprime += dli * vals[i]
    return 2 * params.eta * np.linalg.solve(tmat, tprime) - 2 * N * np.eye(
        params.dim, dtype=np.complex128
    )
