"""Dense complex linear algebra and special functions.

Determinants via partial-pivot LU, Pfaffians via Parlett-Reid elimination,
quaternionic determinants of self-dual matrices, Vandermonde products,
physicists' Hermite polynomials, and Haar samples on U(k) and Sp(k).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ANTISYM_TOL = 1e-12

UNITARY = "unitary"
COMPACT_SYMPLECTIC = "compact-symplectic"


def as_square_matrix(m) -> np.ndarray:
    """Validate and return a finite complex square matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def lu_det(m) -> complex:
    """Determinant via LU decomposition with partial pivoting.

    Singular matrices return 0 (within rounding); triangular inputs are exact
    up to the product of the diagonal.
    """
    a = as_square_matrix(m).copy()
    n = a.shape[0]
    det = 1.0 + 0.0j
    for j in range(n):
        p = j + int(np.argmax(np.abs(a[j:, j])))
        if a[p, j] == 0:
            return 0.0 + 0.0j
        if p != j:
            a[[j, p], :] = a[[p, j], :]
            det = -det
        det *= a[j, j]
        if j + 1 < n:
            f = a[j + 1 :, j] / a[j, j]
            a[j + 1 :, j + 1 :] -= np.outer(f, a[j, j + 1 :])
    return det


def det_batch(mats: np.ndarray) -> np.ndarray:
    """Determinants of a stack of square matrices, same LU scheme as lu_det.

    Vectorized over the leading axis and dtype-preserving (real stacks stay
    real, halving the bandwidth); used by the Monte Carlo estimators.
    """
    a = np.array(mats)
    if not np.issubdtype(a.dtype, np.complexfloating):
        a = a.astype(np.float64)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected a (batch, n, n) stack, got shape {a.shape}")
    b, n, _ = a.shape
    det = np.ones(b, dtype=a.dtype)
    rows = np.arange(b)
    for j in range(n):
        p = j + np.argmax(np.abs(a[:, j:, j]), axis=1)
        swap = p != j
        if np.any(swap):
            pr = a[rows, p, :].copy()
            a[rows, p, :] = a[:, j, :]
            a[:, j, :] = pr
            det[swap] = -det[swap]
        piv = a[:, j, j]
        det *= piv
        if j + 1 < n:
            safe = np.where(piv == 0, 1.0, piv)
            f = a[:, j + 1 :, j] / safe[:, None]
            f[piv == 0] = 0.0
            a[:, j + 1 :, j + 1 :] -= f[:, :, None] * a[:, j : j + 1, j + 1 :]
    return det


def _check_antisymmetric(a: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    if float(np.max(np.abs(a + a.T))) > ANTISYM_TOL * scale:
        raise ValueError("matrix is not antisymmetric to 1e-12")


def _pfaffian_cofactor(a: np.ndarray) -> complex:
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n == 2:
        return a[0, 1]
    total = 0.0 + 0.0j
    rest = list(range(1, n))
    for pos, j in enumerate(rest):
        keep = [r for r in rest if r != j]
        sub = a[np.ix_(keep, keep)]
        sign = -1.0 if pos % 2 else 1.0
        total += sign * a[0, j] * _pfaffian_cofactor(sub)
    return total


def pfaffian(m) -> complex:
    """Pfaffian of an antisymmetric even-dimensional matrix.

    Sign convention: Pf [[0, a], [-a, 0]] = +a. Cofactor recursion for
    dim <= 4, Parlett-Reid elimination with partial pivoting above.
    """
    a = as_square_matrix(m)
    n = a.shape[0]
    if n % 2 != 0:
        raise ValueError("Pfaffian requires even dimension")
    _check_antisymmetric(a)
    if n <= 4:
        return _pfaffian_cofactor(a)
    a = a.copy()
    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1 :, k])))
        if a[kp, k] == 0:
            return 0.0 + 0.0j
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2 :] / a[k, k + 1]
            col = a[k + 2 :, k + 1]
            a[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return pf


@dataclass(frozen=True)
class SelfDualQuaternionMatrix:
    """Self-dual quaternion matrix stored as its Hermitian/antisymmetric blocks.

    ``b`` is k x k Hermitian, ``d`` is k x k complex antisymmetric; both are
    validated exactly as stored (no tolerance).
    """

    b: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=complex)
        d = np.asarray(self.d, dtype=complex)
        if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape != d.shape:
            raise ValueError("b and d must be square matrices of the same size")
        if not np.array_equal(b, b.conj().T):
            raise ValueError("b must be Hermitian exactly as stored")
        if not np.array_equal(d, -d.T):
            raise ValueError("d must be antisymmetric exactly as stored")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @property
    def k(self) -> int:
        return self.b.shape[0]


def qdet(m: SelfDualQuaternionMatrix, shifts) -> complex:
    """Quaternionic determinant of m with complex diagonal shifts.

    Assembles the 2k x 2k antisymmetric matrix with blocks
    [[D, L - iB^T], [-(L - iB), D^dagger]], L = diag(shifts), and returns
    (-1)^{k(k-1)/2} Pf of it.  The sign is pinned so that for B = D = 0 the
    result is the plain product of the shifts.
    """
    shifts = np.asarray(shifts, dtype=complex)
    k = m.k
    if shifts.shape != (k,):
        raise ValueError(f"need exactly {k} shifts")
    lam = np.diag(shifts)
    upper = lam - 1j * m.b.T
    big = np.block([[m.d, upper], [-(lam - 1j * m.b), m.d.conj().T]])
    sign = -1.0 if (k * (k - 1) // 2) % 2 else 1.0
    return sign * pfaffian(big)


def vandermonde(xs) -> complex:
    """prod_{i<j} (x_i - x_j); empty and singleton products are 1."""
    vals = [complex(x) for x in xs]
    out = 1.0 + 0.0j
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            out *= vals[i] - vals[j]
    return out


def hermite(n: int, x: float) -> float:
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError("n must be a non-negative integer")
    if n > 200:
        raise ValueError("hermite supports n <= 200")
    h_prev, h = 1.0, 2.0 * x
    if n == 0:
        return 1.0
    for m in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * m * h_prev
    return h


# -- Haar-distributed group elements ----------------------------------------


@dataclass(frozen=True)
class HaarSample:
    """A Haar-distributed element of U(k) or of Sp(k) embedded in U(2k)."""

    group: str
    k: int
    element: np.ndarray


def haar_unitary_batch(k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of Haar unitaries via QR of complex Ginibre with phase fixing."""
    z = rng.standard_normal((count, k, k)) + 1j * rng.standard_normal((count, k, k))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def _symplectic_partner(v: np.ndarray, k: int) -> np.ndarray:
    # quaternionic partner of a 2k column (x; y) is (-conj(y); conj(x))
    out = np.empty_like(v)
    out[:, :k] = -v[:, k:].conj()
    out[:, k:] = v[:, :k].conj()
    return out


def haar_symplectic_batch(k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of Haar elements of Sp(k) as 2k x 2k complex matrices.

    Quaternionic Ginibre embedded as [[A, B], [-conj(B), conj(A)]], then
    quaternionic Gram-Schmidt over column pairs with real-positive norms; the
    partner column of v is fixed by the embedding, which keeps U J U^T = J.
    """
    a = rng.standard_normal((count, k, k)) + 1j * rng.standard_normal((count, k, k))
    b = rng.standard_normal((count, k, k)) + 1j * rng.standard_normal((count, k, k))
    z = np.empty((count, 2 * k, 2 * k), dtype=complex)
    z[:, :k, :k] = a
    z[:, :k, k:] = b
    z[:, k:, :k] = -b.conj()
    z[:, k:, k:] = a.conj()
    u = np.empty_like(z)
    for j in range(k):
        v = z[:, :, j].copy()
        for _ in range(2):  # re-orthogonalization pass for 1e-12 invariants
            for c in range(j):
                for col in (u[:, :, c], u[:, :, k + c]):
                    proj = np.einsum("bi,bi->b", col.conj(), v)
                    v -= proj[:, None] * col
        v /= np.linalg.norm(v, axis=1)[:, None]
        u[:, :, j] = v
        u[:, :, k + j] = _symplectic_partner(v, k)
    return u


def symplectic_form(k: int) -> np.ndarray:
    """The standard antisymmetric form J = [[0, I], [-I, 0]]."""
    j = np.zeros((2 * k, 2 * k))
    j[:k, k:] = np.eye(k)
    j[k:, :k] = -np.eye(k)
    return j


def haar_sample(group: str, k: int, rng: np.random.Generator) -> HaarSample:
    """Draw one Haar-distributed element; rng is explicit, never ambient."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if group == UNITARY:
        element = haar_unitary_batch(k, 1, rng)[0]
    elif group == COMPACT_SYMPLECTIC:
        element = haar_symplectic_batch(k, 1, rng)[0]
    else:
        raise ValueError(f"unknown group {group!r}")
    return HaarSample(group, k, element)
