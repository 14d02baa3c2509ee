"""Harish-Chandra-Itzykson-Zuber group integrals and their symplectic corrections.

For the unitary group the integral int dU exp(iN tr X U Y U^dagger) has the
closed determinant form det(e^{iN x_i y_j}) / (Delta(x) Delta(y)) up to a
constant fixed by the Haar-probability limit.  For the compact symplectic
group the semiclassical permutation sum is exact only after a finite set of
correction factors chi_k(tau), tau_ij = N (lambda_i - lambda_j)(t_i - t_j);
chi_2, chi_3 and chi_4 are implemented here as explicit finite sums.

chi_k solves  [sum_i d^2/dt_i^2 + 2iN sum_i lambda_i d/dt_i
               - sum_{i<j} 4/(t_i - t_j)^2] chi = 0,
which pde_residual verifies by central finite differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import McEstimate, run_chunked_mc
from .linalg import (
    COMPACT_SYMPLECTIC,
    UNITARY,
    haar_symplectic_batch,
    haar_unitary_batch,
    vandermonde,
)

_PAIRS = {
    2: ((1, 2),),
    3: ((1, 2), (2, 3), (1, 3)),
    4: ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)),
}

# chi_2 numerator over subsets of the single pair: tau_12 + 2i.
_CHI2_NUMERATOR = (
    (1.0, ((1, 2),)),
    (2j, ()),
)

# chi_3 numerator: tau12 tau23 tau31 + 2i (sum of double products)
# - 4 (sum of singles) - 12i, with tau31 = tau13.
_CHI3_NUMERATOR = (
    (1.0, ((1, 2), (2, 3), (1, 3))),
    (2j, ((2, 3), (1, 3))),
    (2j, ((1, 3), (1, 2))),
    (2j, ((1, 2), (2, 3))),
    (-4.0, ((1, 2),)),
    (-4.0, ((2, 3),)),
    (-4.0, ((1, 3),)),
    (-12j, ()),
)

# The k=4 polynomial f in the tau_ij, one data row per printed product term so
# the table can be checked orbit by orbit.  The leading coefficient of the
# full product tau12 tau13 tau14 tau23 tau24 tau34 is -1/288; chi_4 divides by
# it (and by the product of all tau) to normalize the semiclassical term to 1.
K4_F_TERMS = (
    (1.0, ()),
    # -i/4: all single tau_ij
    (-0.25j, ((1, 2),)),
    (-0.25j, ((1, 3),)),
    (-0.25j, ((1, 4),)),
    (-0.25j, ((2, 3),)),
    (-0.25j, ((2, 4),)),
    (-0.25j, ((3, 4),)),
    # -1/12: pairs sharing one index
    (-1.0 / 12, ((1, 2), (1, 3))),
    (-1.0 / 12, ((1, 2), (1, 4))),
    (-1.0 / 12, ((1, 3), (1, 4))),
    (-1.0 / 12, ((1, 2), (2, 3))),
    (-1.0 / 12, ((2, 3), (2, 4))),
    (-1.0 / 12, ((1, 2), (2, 4))),
    (-1.0 / 12, ((1, 4), (3, 4))),
    (-1.0 / 12, ((1, 4), (2, 4))),
    (-1.0 / 12, ((2, 4), (3, 4))),
    (-1.0 / 12, ((2, 3), (3, 4))),
    (-1.0 / 12, ((1, 3), (3, 4))),
    (-1.0 / 12, ((1, 3), (2, 3))),
    # -1/18: disjoint pairs
    (-1.0 / 18, ((1, 2), (3, 4))),
    (-1.0 / 18, ((1, 3), (2, 4))),
    (-1.0 / 18, ((1, 4), (2, 3))),
    # +i/24: triples sharing a common index
    (1j / 24, ((1, 2), (1, 3), (1, 4))),
    (1j / 24, ((1, 2), (2, 3), (2, 4))),
    (1j / 24, ((1, 3), (2, 3), (3, 4))),
    (1j / 24, ((1, 4), (2, 4), (3, 4))),
    # +i/36: the remaining triples (triangles and three-edge paths)
    (1j / 36, ((1, 2), (1, 3), (2, 3))),
    (1j / 36, ((1, 2), (1, 4), (2, 4))),
    (1j / 36, ((1, 3), (1, 4), (3, 4))),
    (1j / 36, ((2, 3), (2, 4), (3, 4))),
    (1j / 36, ((1, 4), (3, 4), (2, 3))),
    (1j / 36, ((1, 4), (2, 4), (2, 3))),
    (1j / 36, ((1, 2), (2, 4), (3, 4))),
    (1j / 36, ((1, 2), (2, 3), (3, 4))),
    (1j / 36, ((1, 2), (1, 4), (2, 3))),
    (1j / 36, ((1, 3), (1, 4), (2, 3))),
    (1j / 36, ((1, 2), (1, 3), (3, 4))),
    (1j / 36, ((1, 2), (1, 4), (3, 4))),
    (1j / 36, ((1, 3), (3, 4), (2, 4))),
    (1j / 36, ((1, 3), (2, 4), (2, 3))),
    (1j / 36, ((1, 4), (2, 4), (1, 3))),
    (1j / 36, ((1, 3), (1, 2), (2, 4))),
    # +1/72: all quadruples
    (1.0 / 72, ((1, 2), (2, 3), (3, 4), (1, 4))),
    (1.0 / 72, ((1, 2), (1, 3), (2, 4), (3, 4))),
    (1.0 / 72, ((1, 3), (1, 4), (2, 4), (2, 3))),
    (1.0 / 72, ((1, 2), (1, 4), (2, 4), (3, 4))),
    (1.0 / 72, ((1, 2), (1, 4), (2, 4), (2, 3))),
    (1.0 / 72, ((1, 2), (1, 4), (2, 4), (1, 3))),
    (1.0 / 72, ((1, 2), (1, 3), (2, 3), (3, 4))),
    (1.0 / 72, ((1, 2), (1, 3), (2, 3), (1, 4))),
    (1.0 / 72, ((1, 2), (1, 3), (2, 3), (2, 4))),
    (1.0 / 72, ((1, 2), (2, 4), (2, 3), (3, 4))),
    (1.0 / 72, ((1, 4), (2, 4), (2, 3), (3, 4))),
    (1.0 / 72, ((1, 3), (2, 4), (2, 3), (3, 4))),
    (1.0 / 72, ((1, 2), (1, 4), (1, 3), (3, 4))),
    (1.0 / 72, ((1, 4), (1, 3), (2, 3), (3, 4))),
    (1.0 / 72, ((1, 4), (1, 3), (3, 4), (2, 4))),
    # -i/144: all quintuples
    (-1j / 144, ((1, 2), (1, 3), (2, 4), (2, 3), (3, 4))),
    (-1j / 144, ((1, 2), (1, 4), (2, 4), (1, 3), (2, 3))),
    (-1j / 144, ((1, 2), (1, 4), (2, 4), (1, 3), (3, 4))),
    (-1j / 144, ((1, 4), (1, 3), (2, 4), (2, 3), (3, 4))),
    (-1j / 144, ((1, 2), (1, 4), (1, 3), (3, 4), (2, 3))),
    (-1j / 144, ((1, 2), (1, 4), (2, 4), (2, 3), (3, 4))),
    # -1/288: the full product
    (-1.0 / 288, ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))),
)

_K4_TOP = -1.0 / 288


def _normalized_numerator(k: int):
    if k == 2:
        return _CHI2_NUMERATOR
    if k == 3:
        return _CHI3_NUMERATOR
    if k == 4:
        return tuple((c / _K4_TOP, edges) for c, edges in K4_F_TERMS)
    raise ValueError("chi factors are implemented for k in {2, 3, 4}")


CHI_NUMERATOR_TERMS = {k: _normalized_numerator(k) for k in (2, 3, 4)}


@dataclass(frozen=True)
class TauTable:
    """tau_ij = N (lambda_i - lambda_j)(t_i - t_j) for unordered pairs i < j."""

    k: int
    tau: dict

    def __post_init__(self):
        if self.k not in (2, 3, 4):
            raise ValueError("TauTable supports k in {2, 3, 4}")
        expected = {(i, j) for i in range(self.k) for j in range(i + 1, self.k)}
        if set(self.tau) != expected:
            raise ValueError(f"tau must be keyed by the pairs {sorted(expected)}")
        object.__setattr__(self, "tau", {p: complex(v) for p, v in self.tau.items()})

    @classmethod
    def from_points(cls, n: int, ts, lambdas) -> "TauTable":
        ts = [complex(t) for t in ts]
        lam = [complex(v) for v in lambdas]
        if len(ts) != len(lam):
            raise ValueError("ts and lambdas must have the same length")
        k = len(ts)
        tau = {
            (i, j): n * (lam[i] - lam[j]) * (ts[i] - ts[j])
            for i in range(k)
            for j in range(i + 1, k)
        }
        return cls(k, tau)

    def get(self, i: int, j: int) -> complex:
        if i == j:
            raise ValueError("tau is defined for distinct indices")
        a, b = (i, j) if i < j else (j, i)
        return self.tau[(a, b)]


def chi4_f(tau: TauTable) -> complex:
    """The raw degree-six correction polynomial f(tau) for k = 4 (unnormalized)."""
    if tau.k != 4:
        raise ValueError("chi4_f needs a k=4 TauTable")
    total = 0.0 + 0.0j
    for coeff, edges in K4_F_TERMS:
        prod = coeff
        for (i, j) in edges:
            prod *= tau.get(i - 1, j - 1)
        total += prod
    return total


def chi_eval(k: int, tau: TauTable) -> complex:
    """Finite correction factor chi_k(tau); equals 1 + O(1/tau) at large tau.

    chi_2 = 1 + 2i/tau_12; chi_3 adds the double and triple inverse products
    with coefficients (2i, -4, -12i); chi_4 is the normalized k=4 polynomial
    divided by the product of all tau_ij.
    """
    if k != tau.k:
        raise ValueError("k does not match the TauTable")
    terms = CHI_NUMERATOR_TERMS[k]
    pairs = _PAIRS[k]
    values = {p: tau.get(p[0] - 1, p[1] - 1) for p in pairs}
    if any(v == 0 for v in values.values()):
        raise ValueError("all tau_ij must be nonzero")
    total = 0.0 + 0.0j
    for coeff, edges in terms:
        prod = coeff
        for p in edges:
            prod *= values[p]
        total += prod
    denom = 1.0 + 0.0j
    for p in pairs:
        denom *= values[p]
    return total / denom


# -- PDE verification ---------------------------------------------------------


@dataclass(frozen=True)
class PdeCheckSpec:
    """A point at which to test the radial equation by finite differences."""

    beta: int
    k: int
    n: int
    lambdas: tuple
    ts: tuple
    step: float

    def __post_init__(self):
        if self.beta not in (2, 4):
            raise ValueError("beta must be 2 or 4")
        if self.step <= 0:
            raise ValueError("step must be positive")
        lam = tuple(float(v) for v in self.lambdas)
        ts = tuple(float(v) for v in self.ts)
        if len(lam) != self.k or len(ts) != self.k:
            raise ValueError("lambdas and ts must have length k")
        if len(set(ts)) != self.k or len(set(lam)) != self.k:
            raise ValueError("ts and lambdas must be pairwise distinct")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "ts", ts)


def _chi_at(spec: PdeCheckSpec, ts) -> complex:
    tau = TauTable.from_points(spec.n, ts, spec.lambdas)
    return chi_eval(spec.k, tau)


def _psi_beta2_at(spec: PdeCheckSpec, ts) -> complex:
    return vandermonde(ts) * hiz_unitary(spec.n, ts, spec.lambdas)


def pde_residual(spec: PdeCheckSpec) -> float:
    """Normalized finite-difference residual of the radial equation.

    beta = 4 checks chi against
        sum_i chi'' + 2iN sum_i lambda_i chi' - sum_{i<j} 4/(t_i-t_j)^2 chi = 0;
    beta = 2 checks psi = Delta(t) * hiz_unitary against
        sum_i psi'' + N^2 sum_i lambda_i^2 psi = 0.
    Central differences of step h give O(h^2) residuals for exact solutions.
    """
    h = spec.step
    k = spec.k
    ts = np.array(spec.ts, dtype=float)
    fn = _chi_at if spec.beta == 4 else _psi_beta2_at
    f0 = fn(spec, ts)
    d1 = np.zeros(k, dtype=complex)
    d2 = np.zeros(k, dtype=complex)
    for i in range(k):
        tp = ts.copy()
        tm = ts.copy()
        tp[i] += h
        tm[i] -= h
        fp = fn(spec, tp)
        fm = fn(spec, tm)
        d1[i] = (fp - fm) / (2 * h)
        d2[i] = (fp - 2 * f0 + fm) / (h * h)
    lap = complex(np.sum(d2))
    if spec.beta == 4:
        drift = 2j * spec.n * complex(np.dot(spec.lambdas, d1))
        pot = -4.0 * sum(
            1.0 / (ts[i] - ts[j]) ** 2 for i in range(k) for j in range(i + 1, k)
        ) * f0
        scale = max(abs(lap), abs(drift), abs(pot))
        return abs(lap + drift + pot) / scale
    energy = spec.n**2 * float(np.dot(spec.lambdas, spec.lambdas)) * f0
    scale = max(abs(lap), abs(energy))
    return abs(lap + energy) / scale


# -- closed forms and Haar Monte Carlo ----------------------------------------


def hiz_unitary(n: int, xs, ys) -> complex:
    """int dU exp(iN tr X U Y U^dagger) over Haar-U(k), X = diag(xs), Y = diag(ys).

    Determinant form det(e^{iN x_i y_j}) / (Delta(x) Delta(y)), normalized so
    the value tends to 1 when either argument goes to zero (Haar probability
    measure); for k = 1 it reduces to exp(iN x y).
    """
    xs = [complex(v) for v in xs]
    ys = [complex(v) for v in ys]
    if len(xs) != len(ys):
        raise ValueError("xs and ys must have the same length")
    k = len(xs)
    if len({v for v in xs}) != k or len({v for v in ys}) != k:
        raise ValueError("xs and ys must each be pairwise distinct")
    if k == 1:
        return complex(np.exp(1j * n * xs[0] * ys[0]))
    mat = np.exp(1j * n * np.outer(xs, ys))
    det = np.linalg.det(mat)
    const = 1.0
    for p in range(1, k):
        const *= math.factorial(p)
    return const * det / ((1j * n) ** (k * (k - 1) // 2) * vandermonde(xs) * vandermonde(ys))


def group_integral_mc(
    group: str,
    k: int,
    n: int,
    xs,
    ys,
    samples: int,
    seed: int,
    threads: int = 1,
) -> McEstimate:
    """Haar Monte Carlo estimate of int dg exp(iN tr X g Y g^{-1}).

    The symplectic case uses the 2k x 2k embedding with doubled diagonal
    entries and half the embedded trace, so that g = identity contributes
    exp(iN sum_i x_i y_i) exactly as in the unitary case.
    """
    if samples < 1000:
        raise ValueError("need at least 10^3 samples")
    xs = np.asarray([float(v) for v in xs])
    ys = np.asarray([float(v) for v in ys])
    if xs.shape != (k,) or ys.shape != (k,):
        raise ValueError("xs and ys must have length k")

    if group == UNITARY:

        def chunk_fn(index, size):
            rng = np.random.default_rng([seed & ((1 << 64) - 1), index])
            u = haar_unitary_batch(k, size, rng)
            weights = np.einsum("i,bij,j->b", xs, np.abs(u) ** 2, ys)
            return np.exp(1j * n * weights)

    elif group == COMPACT_SYMPLECTIC:
        xs2 = np.concatenate([xs, xs])
        ys2 = np.concatenate([ys, ys])

        def chunk_fn(index, size):
            rng = np.random.default_rng([seed & ((1 << 64) - 1), index])
            u = haar_symplectic_batch(k, size, rng)
            weights = 0.5 * np.einsum("i,bij,j->b", xs2, np.abs(u) ** 2, ys2)
            return np.exp(1j * n * weights)

    else:
        raise ValueError(f"unknown group {group!r}")

    return run_chunked_mc(chunk_fn, samples, seed, threads)


_VANDERMONDE_POWER = {2: 2, 3: 2, 4: 3}


def symmetrized_hiz_sympl(k: int, n: int, ts, lambdas) -> complex:
    """Permutation sum sum_sigma e^{iN lambda . t_sigma} chi_k(tau(t_sigma, lambda))
    divided by [Delta(t) Delta(lambda)]^{p(k)} with p = {2: 2, 3: 2, 4: 3}.

    The overall constant is left open; callers compare ratios or pin it at the
    confluent corner, where the value has to represent Haar-average 1.
    """
    import itertools as _it

    ts = [float(v) for v in ts]
    lam = [float(v) for v in lambdas]
    if len(ts) != k or len(lam) != k:
        raise ValueError("ts and lambdas must have length k")
    if len(set(ts)) != k or len(set(lam)) != k:
        raise ValueError("ts and lambdas must be pairwise distinct")
    p = _VANDERMONDE_POWER[k]
    total = 0.0 + 0.0j
    for perm in _it.permutations(range(k)):
        tp = [ts[perm[i]] for i in range(k)]
        phase = np.exp(1j * n * np.dot(lam, tp))
        tau = TauTable.from_points(n, tp, lam)
        total += phase * chi_eval(k, tau)
    return total / (vandermonde(ts) * vandermonde(lam)) ** p
