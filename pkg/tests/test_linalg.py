import numpy as np
import pytest

from charpol.linalg import (
    COMPACT_SYMPLECTIC,
    UNITARY,
    HaarSample,
    SelfDualQuaternionMatrix,
    det_batch,
    haar_sample,
    haar_symplectic_batch,
    haar_unitary_batch,
    hermite,
    lu_det,
    pfaffian,
    qdet,
    symplectic_form,
    vandermonde,
)


def random_antisymmetric(rng, n, real=False):
    g = rng.standard_normal((n, n))
    if not real:
        g = g + 1j * rng.standard_normal((n, n))
    return g - g.T


class TestLuDet:
    def test_identity(self):
        assert lu_det(np.eye(3)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert lu_det(np.diag([2.0, 3.0])) == pytest.approx(6.0)

    def test_det_times_det_of_inverse(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
            prod = lu_det(a) * lu_det(np.linalg.inv(a))
            assert abs(prod - 1.0) < 1e-10

    def test_singular_returns_zero(self):
        a = np.ones((3, 3))
        assert lu_det(a) == 0.0

    def test_batch_matches_single(self):
        rng = np.random.default_rng(8)
        mats = rng.standard_normal((7, 5, 5)) + 1j * rng.standard_normal((7, 5, 5))
        batch = det_batch(mats)
        for i in range(7):
            assert abs(batch[i] - lu_det(mats[i])) < 1e-10 * max(1.0, abs(batch[i]))

    def test_batch_preserves_real_dtype(self):
        rng = np.random.default_rng(9)
        mats = rng.standard_normal((4, 3, 3))
        out = det_batch(mats)
        assert out.dtype == np.float64
        for i in range(4):
            assert abs(out[i] - lu_det(mats[i])) < 1e-12 * max(1.0, abs(out[i]))


class TestPfaffian:
    def test_canonical_2x2(self):
        assert pfaffian([[0.0, 5.0], [-5.0, 0.0]]) == pytest.approx(5.0)

    def test_block_diagonal(self):
        a, b = 2.5, -1.25
        m = np.zeros((4, 4))
        m[0, 1], m[1, 0] = a, -a
        m[2, 3], m[3, 2] = b, -b
        assert pfaffian(m) == pytest.approx(a * b)

    def test_square_is_determinant(self):
        rng = np.random.default_rng(11)
        for dim in (2, 4, 6, 8):
            for _ in range(25):
                a = random_antisymmetric(rng, dim)
                pf = pfaffian(a)
                det = lu_det(a)
                assert abs(pf * pf - det) <= 1e-10 * max(abs(det), 1e-12)

    def test_permutation_covariance(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            a = random_antisymmetric(rng, 6)
            perm = rng.permutation(6)
            signs = rng.choice([-1.0, 1.0], size=6)
            p = np.zeros((6, 6))
            p[np.arange(6), perm] = signs
            transformed = p @ a @ p.T
            lhs = pfaffian(transformed)
            rhs = lu_det(p) * pfaffian(a)
            assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1e-12)

    def test_elimination_matches_cofactor(self):
        from charpol.linalg import _pfaffian_cofactor

        rng = np.random.default_rng(13)
        for dim in (6, 8):
            a = random_antisymmetric(rng, dim)
            assert pfaffian(a) == pytest.approx(_pfaffian_cofactor(a), rel=1e-11)

    def test_odd_dimension_rejected(self):
        with pytest.raises(ValueError):
            pfaffian(np.zeros((3, 3)))

    def test_non_antisymmetric_rejected(self):
        with pytest.raises(ValueError):
            pfaffian(np.eye(4))


def random_self_dual(rng, k):
    g = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    b = (g + g.conj().T) / 2
    h = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    d = h - h.T
    return SelfDualQuaternionMatrix(b, d)


class TestQdet:
    def test_zero_blocks_give_product_of_shifts(self):
        rng = np.random.default_rng(17)
        for k in (1, 2, 3, 4):
            m = SelfDualQuaternionMatrix(np.zeros((k, k)), np.zeros((k, k)))
            shifts = rng.standard_normal(k) + 1j * rng.standard_normal(k)
            assert qdet(m, shifts) == pytest.approx(np.prod(shifts), rel=1e-12)

    def test_k2_explicit_expression(self):
        rng = np.random.default_rng(18)
        for _ in range(100):
            m = random_self_dual(rng, 2)
            lam = rng.standard_normal(2)
            d = m.d[0, 1]
            expected = (
                abs(d) ** 2
                + (lam[0] - 1j * m.b[0, 0]) * (lam[1] - 1j * m.b[1, 1])
                + abs(m.b[0, 1]) ** 2
            )
            assert abs(qdet(m, lam) - expected) <= 1e-12 * max(1.0, abs(expected))

    def test_matches_pfaffian_of_assembled_matrix(self):
        rng = np.random.default_rng(19)
        m = random_self_dual(rng, 2)
        lam = np.array([0.4, -1.1])
        big = np.zeros((4, 4), dtype=complex)
        big[:2, :2] = m.d
        big[:2, 2:] = np.diag(lam) - 1j * m.b.T
        big[2:, :2] = -(np.diag(lam) - 1j * m.b)
        big[2:, 2:] = m.d.conj().T
        assert qdet(m, lam) == pytest.approx(-pfaffian(big), rel=1e-12)

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            SelfDualQuaternionMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]), np.zeros((2, 2)))
        with pytest.raises(ValueError):
            SelfDualQuaternionMatrix(np.zeros((2, 2)), np.eye(2))
        m = random_self_dual(np.random.default_rng(1), 2)
        with pytest.raises(ValueError):
            qdet(m, (1.0,))


class TestVandermonde:
    def test_single_point(self):
        assert vandermonde([4.2]) == 1.0

    def test_pair(self):
        assert vandermonde([2.0, 1.0]) == pytest.approx(1.0)

    def test_triple(self):
        assert vandermonde([3.0, 2.0, 1.0]) == pytest.approx(2.0)


class TestHermite:
    def test_h0(self):
        assert hermite(0, 1.7) == 1.0

    def test_h2_at_one(self):
        assert hermite(2, 1.0) == pytest.approx(2.0)

    def test_h5_explicit(self):
        rng = np.random.default_rng(23)
        for x in rng.uniform(-3, 3, 20):
            explicit = 32 * x**5 - 160 * x**3 + 120 * x
            assert hermite(5, x) == pytest.approx(explicit, rel=1e-10, abs=1e-8)

    def test_degree_cap(self):
        with pytest.raises(ValueError):
            hermite(201, 0.0)


class TestHaar:
    def test_u1_modulus(self):
        rng = np.random.default_rng(29)
        s = haar_sample(UNITARY, 1, rng)
        assert isinstance(s, HaarSample)
        assert abs(abs(s.element[0, 0]) - 1.0) <= 1e-12

    def test_unitarity_k3(self):
        rng = np.random.default_rng(31)
        u = haar_sample(UNITARY, 3, rng).element
        assert np.max(np.abs(u.conj().T @ u - np.eye(3))) <= 1e-12

    def test_symplectic_form_invariant(self):
        rng = np.random.default_rng(37)
        u = haar_sample(COMPACT_SYMPLECTIC, 2, rng).element
        j = symplectic_form(2)
        assert np.max(np.abs(u @ j @ u.T - j)) <= 1e-12
        assert np.max(np.abs(u.conj().T @ u - np.eye(4))) <= 1e-12

    def test_first_moment_vanishes(self):
        rng = np.random.default_rng(41)
        n = 10000
        u = haar_unitary_batch(2, n, rng)
        assert np.max(np.abs(u.mean(axis=0))) <= 4.0 / np.sqrt(n)
        us = haar_symplectic_batch(2, n, rng)
        assert np.max(np.abs(us.mean(axis=0))) <= 4.0 / np.sqrt(n)

    def test_unknown_group_rejected(self):
        with pytest.raises(ValueError):
            haar_sample("orthogonal", 2, np.random.default_rng(0))
