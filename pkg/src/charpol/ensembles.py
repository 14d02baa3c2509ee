"""GOE/GUE sampling, Monte Carlo correlator estimates, and small-N Wick oracles.

The matrix weight is exp(-(N/2) tr X^2): GOE diagonal variance 1/N and
off-diagonal 1/(2N); GUE diagonal variance 1/N and E|X_ij|^2 = 1/N.  An
external source A acts as an exact mean shift X -> A + X (complete the
square), never as importance weighting.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import det_batch
from .poly import SparsePolynomial

GOE = "goe"
GUE = "gue"

_MASK64 = (1 << 64) - 1

# Fixed chunk granularity of the sample stream: sample i draws from the
# substream [seed, i // MC_CHUNK], so results never depend on thread count.
MC_CHUNK = 4096

WICK_MAX_N = 3
WICK_MAX_K = 4


class BudgetError(ValueError):
    """A request exceeded a documented (N, k) budget."""


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble kind ('goe' or 'gue'), dimension, optional source eigenvalues."""

    kind: str
    n: int
    source: tuple | None = None

    def __post_init__(self):
        if self.kind not in (GOE, GUE):
            raise ValueError(f"kind must be '{GOE}' or '{GUE}', got {self.kind!r}")
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if self.source is not None:
            src = tuple(float(a) for a in self.source)
            if len(src) != self.n:
                raise ValueError(f"source must have length {self.n}")
            object.__setattr__(self, "source", src)


@dataclass(frozen=True)
class LambdaPoints:
    """Evaluation points for the correlator; repeats are permitted."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("need at least one lambda")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("lambdas must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return len(self.values)


def as_lambda_points(lambdas) -> LambdaPoints:
    if isinstance(lambdas, LambdaPoints):
        return lambdas
    return LambdaPoints(tuple(lambdas))


@dataclass(frozen=True)
class McEstimate:
    mean: complex
    stderr: float
    samples: int
    seed: int


@dataclass(frozen=True)
class CorrelatorValue:
    """A correlator value on the monic normalization, tagged with provenance."""

    value: complex
    method: str  # "mc" | "monomial" | "quadrature" | "oracle"
    stderr: float | None = None


# -- sampling ----------------------------------------------------------------


def sample_batch(spec: EnsembleSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    n = spec.n
    if spec.kind == GOE:
        a = rng.standard_normal((count, n, n)) * math.sqrt(1.0 / (4.0 * n))
        x = a + a.transpose(0, 2, 1)
    else:
        scale = math.sqrt(1.0 / (4.0 * n))
        a = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) * scale
        x = a + a.conj().transpose(0, 2, 1)
    if spec.source is not None:
        x = x + np.diag(np.asarray(spec.source))
    return x


def sample_matrix(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    """One draw from the ensemble (real symmetric for GOE, Hermitian for GUE)."""
    return sample_batch(spec, 1, rng)[0]


# -- deterministic chunked Monte Carlo ----------------------------------------


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed & _MASK64, index])


def _merge_welford(acc, chunk):
    # Chan's parallel update; applied in chunk order for bitwise determinism.
    n1, mean1, m2re1, m2im1 = acc
    n2, mean2, m2re2, m2im2 = chunk
    if n1 == 0:
        return chunk
    n = n1 + n2
    delta = mean2 - mean1
    mean = mean1 + delta * (n2 / n)
    m2re = m2re1 + m2re2 + delta.real**2 * n1 * n2 / n
    m2im = m2im1 + m2im2 + delta.imag**2 * n1 * n2 / n
    return (n, mean, m2re, m2im)


def _chunk_summary(values: np.ndarray):
    n = values.size
    mean = values.mean()
    m2re = float(np.sum((values.real - mean.real) ** 2))
    m2im = float(np.sum((values.imag - mean.imag) ** 2))
    return (n, complex(mean), m2re, m2im)


def run_chunked_mc(chunk_fn, samples: int, seed: int, threads: int = 1) -> McEstimate:
    """Accumulate chunk_fn(chunk_index, chunk_size) -> complex array into an
    McEstimate.  Chunk summaries merge in index order, so the result is
    bitwise identical for any thread count."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    nchunks = (samples + MC_CHUNK - 1) // MC_CHUNK
    sizes = [min(MC_CHUNK, samples - c * MC_CHUNK) for c in range(nchunks)]

    def work(c):
        return _chunk_summary(chunk_fn(c, sizes[c]))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            summaries = list(pool.map(work, range(nchunks)))
    else:
        summaries = [work(c) for c in range(nchunks)]
    acc = (0, 0.0 + 0.0j, 0.0, 0.0)
    for s in summaries:
        acc = _merge_welford(acc, s)
    n, mean, m2re, m2im = acc
    se_re = math.sqrt(m2re / (n - 1) / n)
    se_im = math.sqrt(m2im / (n - 1) / n)
    return McEstimate(mean=mean, stderr=math.hypot(se_re, se_im), samples=n, seed=seed)


def mc_correlator(
    spec: EnsembleSpec,
    lambdas,
    samples: int,
    seed: int,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of E[prod_l det(lambda_l - X)].

    Deterministic for fixed (seed, samples): sample i is drawn from the
    substream [seed, i // MC_CHUNK] regardless of the worker that runs it.
    """
    lam = as_lambda_points(lambdas)
    n = spec.n
    eye = np.eye(n)

    def chunk_fn(index, size):
        rng = _chunk_rng(seed, index)
        x = sample_batch(spec, size, rng)
        out = np.ones(size, dtype=complex)
        for lv in lam.values:
            out *= det_batch(lv * eye - x)
        return out

    return run_chunked_mc(chunk_fn, samples, seed, threads)


# -- exact small-N Wick/Isserlis oracle ---------------------------------------


def _goe_variables(n: int):
    """Independent real components of a GOE matrix: (i, j) with i <= j."""
    order = [(i, j) for i in range(n) for j in range(i, n)]
    index = {pair: pos for pos, pair in enumerate(order)}
    sigma2 = [1.0 / n if i == j else 1.0 / (2.0 * n) for (i, j) in order]
    return order, index, sigma2


def _gue_variables(n: int):
    """Independent real components of a GUE matrix: diagonal, then re/im pairs."""
    order = [("d", i, i) for i in range(n)]
    sigma2 = [1.0 / n] * n
    for i in range(n):
        for j in range(i + 1, n):
            order.append(("re", i, j))
            order.append(("im", i, j))
            sigma2.extend([1.0 / (2.0 * n)] * 2)
    index = {key: pos for pos, key in enumerate(order)}
    return order, index, sigma2


def _entry_polynomials(spec: EnsembleSpec):
    """Matrix entries of X as polynomials in the independent components."""
    n = spec.n
    if spec.kind == GOE:
        order, index, sigma2 = _goe_variables(n)
        nv = len(order)
        entries = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                a, b = min(i, j), max(i, j)
                entries[i][j] = SparsePolynomial.variable(nv, index[(a, b)])
        return entries, sigma2
    order, index, sigma2 = _gue_variables(n)
    nv = len(order)
    entries = [[None] * n for _ in range(n)]
    for i in range(n):
        entries[i][i] = SparsePolynomial.variable(nv, index[("d", i, i)])
    for i in range(n):
        for j in range(i + 1, n):
            u = SparsePolynomial.variable(nv, index[("re", i, j)])
            w = SparsePolynomial.variable(nv, index[("im", i, j)])
            entries[i][j] = u + 1j * w
            entries[j][i] = u - 1j * w
    return entries, sigma2


def _det_polynomial(matrix) -> SparsePolynomial:
    n = len(matrix)
    nv = matrix[0][0].nvars
    total = SparsePolynomial(nv)
    for perm in itertools.permutations(range(n)):
        sign = 1.0
        seen = [False] * n
        # permutation parity via cycle count
        cycles = 0
        for s in range(n):
            if not seen[s]:
                cycles += 1
                t = s
                while not seen[t]:
                    seen[t] = True
                    t = perm[t]
        sign = 1.0 if (n - cycles) % 2 == 0 else -1.0
        term = SparsePolynomial.constant(nv, sign)
        for i in range(n):
            term = term * matrix[i][perm[i]]
        total = total + term
    return total


def gaussian_expectation(p: SparsePolynomial, sigma2, means=None) -> complex:
    """Expectation of p over independent Gaussian variables.

    E[v^e] = sum_j C(e, 2j) mu^{e-2j} (2j-1)!! sigma^{2j}; with zero means the
    odd moments drop and the double factorial rule remains.
    """
    sig = [float(s) for s in sigma2]
    mu = [0.0] * len(sig) if means is None else [float(m) for m in means]
    if len(mu) != len(sig) or len(sig) != p.nvars:
        raise ValueError("sigma2/means must match the number of variables")
    maxdeg = p.max_degrees()
    moment = []
    for v in range(p.nvars):
        row = [1.0]
        for e in range(1, maxdeg[v] + 1):
            total = 0.0
            for j in range(0, e // 2 + 1):
                total += (
                    math.comb(e, 2 * j)
                    * mu[v] ** (e - 2 * j)
                    * _double_factorial(2 * j - 1)
                    * sig[v] ** j
                )
            row.append(total)
        moment.append(row)
    out = 0.0 + 0.0j
    for exps, c in p.terms.items():
        factor = 1.0
        for v, e in enumerate(exps):
            if e:
                factor *= moment[v][e]
        out += c * factor
    return out


def _double_factorial(n: int) -> float:
    if n <= 0:
        return 1.0
    out = 1.0
    while n > 0:
        out *= n
        n -= 2
    return out


def wick_oracle(spec: EnsembleSpec, lambdas) -> complex:
    """Exact E[prod_l det(lambda_l - X)] by symbolic expansion and Isserlis pairing.

    The product of characteristic polynomials is expanded in the independent
    Gaussian components of X; each monomial's expectation is a product of
    one-dimensional Gaussian moments.  Restricted to N <= 3, k <= 4.
    """
    lam = as_lambda_points(lambdas)
    n, k = spec.n, lam.k
    if n > WICK_MAX_N or k > WICK_MAX_K:
        raise BudgetError(f"wick_oracle supports N <= {WICK_MAX_N} and k <= {WICK_MAX_K}")
    entries, sigma2 = _entry_polynomials(spec)
    nv = entries[0][0].nvars
    source = spec.source if spec.source is not None else (0.0,) * n
    product = SparsePolynomial.constant(nv, 1.0)
    for lv in lam.values:
        matrix = [
            [
                SparsePolynomial.constant(nv, (lv - source[i]) if i == j else 0.0) - entries[i][j]
                for j in range(n)
            ]
            for i in range(n)
        ]
        product = product * _det_polynomial(matrix)
    return gaussian_expectation(product, sigma2)
