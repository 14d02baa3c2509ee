"""Sparse multivariate polynomials with complex coefficients.

Exponent vectors are tuples of non-negative ints of fixed length ``nvars``.
Coefficients with magnitude below ``PRUNE_TOL`` are dropped on construction,
which keeps long product chains from accumulating denormal noise.
"""
from __future__ import annotations

from typing import Iterable, Mapping

PRUNE_TOL = 1e-300


class SparsePolynomial:
    """Polynomial stored as a dict mapping exponent tuples to coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, complex] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = int(nvars)
        clean: dict[tuple, complex] = {}
        if terms:
            for exps, coeff in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != self.nvars:
                    raise ValueError(
                        f"exponent vector {exps} has length {len(exps)}, expected {self.nvars}"
                    )
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = complex(coeff)
                if abs(c) >= PRUNE_TOL:
                    clean[exps] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, nvars: int, value: complex) -> "SparsePolynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "SparsePolynomial":
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for nvars={nvars}")
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1.0})

    @classmethod
    def monomial(cls, nvars: int, exps: Iterable[int], coeff: complex = 1.0) -> "SparsePolynomial":
        return cls(nvars, {tuple(exps): coeff})

    # -- arithmetic ---------------------------------------------------------

    def _check_compatible(self, other: "SparsePolynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"nvars mismatch: {self.nvars} != {other.nvars}")

    def __add__(self, other) -> "SparsePolynomial":
        if not isinstance(other, SparsePolynomial):
            other = SparsePolynomial.constant(self.nvars, other)
        self._check_compatible(other)
        out = dict(self.terms)
        for exps, c in other.terms.items():
            out[exps] = out.get(exps, 0.0) + c
        return SparsePolynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "SparsePolynomial":
        if not isinstance(other, SparsePolynomial):
            other = SparsePolynomial.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other) -> "SparsePolynomial":
        return (-self) + other

    def __mul__(self, other) -> "SparsePolynomial":
        if not isinstance(other, SparsePolynomial):
            c = complex(other)
            return SparsePolynomial(self.nvars, {e: v * c for e, v in self.terms.items()})
        self._check_compatible(other)
        out: dict[tuple, complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return SparsePolynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SparsePolynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = SparsePolynomial.constant(self.nvars, 1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparsePolynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps: Iterable[int]) -> complex:
        return self.terms.get(tuple(exps), 0.0 + 0.0j)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def max_degrees(self) -> tuple:
        """Per-variable maximum exponent."""
        degs = [0] * self.nvars
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e > degs[i]:
                    degs[i] = e
        return tuple(degs)

    def evaluate(self, values) -> complex:
        """Evaluate at a point; `values` has one entry per variable."""
        vals = [complex(v) for v in values]
        if len(vals) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(vals)}")
        total = 0.0 + 0.0j
        # per-variable power tables amortize repeated exponents
        degs = self.max_degrees()
        powers = []
        for v, d in zip(vals, degs):
            row = [1.0 + 0.0j] * (d + 1)
            for p in range(1, d + 1):
                row[p] = row[p - 1] * v
            powers.append(row)
        for exps, c in self.terms.items():
            m = c
            for i, e in enumerate(exps):
                if e:
                    m *= powers[i][e]
            total += m
        return total

    def __repr__(self) -> str:
        n = len(self.terms)
        return f"SparsePolynomial(nvars={self.nvars}, terms={n})"


def poly_add(p: SparsePolynomial, q: SparsePolynomial) -> SparsePolynomial:
    return p + q


def poly_mul(p: SparsePolynomial, q: SparsePolynomial) -> SparsePolynomial:
    return p * q


def poly_scale(p: SparsePolynomial, c: complex) -> SparsePolynomial:
    return p * c


def vandermonde_poly(nvars: int, indices: Iterable[int]) -> SparsePolynomial:
    """prod_{i<j} (x_{indices[i]} - x_{indices[j]}) as a SparsePolynomial."""
    idx = list(indices)
    result = SparsePolynomial.constant(nvars, 1.0)
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            diff = SparsePolynomial.variable(nvars, idx[a]) - SparsePolynomial.variable(nvars, idx[b])
            result = result * diff
    return result


def divide_by_variable_difference(p: SparsePolynomial, i: int, j: int) -> SparsePolynomial:
    """Exact quotient of p by (x_i - x_j); the remainder p|_{x_i=x_j} must vanish.

    Used for confluent limits and for converting alternant numerators into
    their polynomial quotients without numerical limits.
    """
    if i == j:
        raise ValueError("need two distinct variables")
    quotient: dict[tuple, complex] = {}
    # p = sum_e c_e * x_i^{e_i} * rest;  x_i^e = sum_{d<e} x_i^d x_j^{e-1-d} (x_i - x_j) + x_j^e
    for exps, c in p.terms.items():
        ei = exps[i]
        for d in range(ei):
            e = list(exps)
            e[i] = d
            e[j] = exps[j] + (ei - 1 - d)
            key = tuple(e)
            quotient[key] = quotient.get(key, 0.0) + c
    return SparsePolynomial(p.nvars, quotient)
