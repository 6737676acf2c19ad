from fractions import Fraction

import numpy as np
import pytest

from crtgemm import (DDMatrix, DimensionError, exact_gemm_bigint,
                     max_relative_error, reference_gemm_dd)


class TestExactGemmBigint:
    def test_tiny(self):
        c = exact_gemm_bigint(np.array([[1, 2]]), np.array([[3], [4]]))
        assert c[0, 0] == 11

    def test_beyond_int64(self):
        big = 2**52
        a = np.array([[big, big, big, big]], dtype=np.float64)
        b = np.array([[big]] * 4, dtype=np.float64)
        c = exact_gemm_bigint(a, b)
        assert c[0, 0] == 4 * big * big  # needs 107 bits

    def test_distributivity(self):
        rng = np.random.default_rng(0)
        a = rng.integers(-10**6, 10**6, (4, 5))
        b = rng.integers(-10**6, 10**6, (5, 3))
        c = rng.integers(-10**6, 10**6, (5, 3))
        left = exact_gemm_bigint(a, b + c)
        right = exact_gemm_bigint(a, b) + exact_gemm_bigint(a, c)
        assert np.array_equal(left, right)

    def test_shape_error(self):
        with pytest.raises(DimensionError):
            exact_gemm_bigint(np.ones((2, 3)), np.ones((2, 3)))


class TestReferenceGemmDD:
    def test_identity(self):
        rng = np.random.default_rng(1)
        b = rng.standard_normal((5, 4))
        ref = reference_gemm_dd(np.eye(5), b)
        assert np.array_equal(ref.hi, b)
        assert not ref.lo.any()

    def test_error_free_one_by_one(self):
        # (1 + 2^-52)(1 - 2^-52) = 1 - 2^-104 held exactly in the pair
        # (the two factors are the closest representable doubles around 1)
        a = np.array([[1.0 + 2.0**-52]])
        b = np.array([[1.0 - 2.0**-52]])
        ref = reference_gemm_dd(a, b)
        assert ref.hi[0, 0] == 1.0
        assert ref.lo[0, 0] == -(2.0**-104)

    def test_against_exact_rational_64(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((8, 64))
        b = rng.standard_normal((64, 8))
        ref = reference_gemm_dd(a, b)
        for i in range(8):
            for j in range(8):
                exact = sum(Fraction(a[i, h]) * Fraction(b[h, j])
                            for h in range(64))
                err = abs(Fraction(ref.hi[i, j]) + Fraction(ref.lo[i, j])
                          - exact)
                norm = float(np.linalg.norm(a[i]) * np.linalg.norm(b[:, j]))
                assert float(err) < 2.0**-100 * norm

    def test_complex_against_exact_rational(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((3, 20)) + 1j * rng.standard_normal((3, 20))
        b = rng.standard_normal((20, 3)) + 1j * rng.standard_normal((20, 3))
        ref = reference_gemm_dd(a, b)
        for i in range(3):
            for j in range(3):
                re = sum(Fraction(a[i, h].real) * Fraction(b[h, j].real)
                         for h in range(20))
                re -= sum(Fraction(a[i, h].imag) * Fraction(b[h, j].imag)
                          for h in range(20))
                im = sum(Fraction(a[i, h].real) * Fraction(b[h, j].imag)
                         for h in range(20))
                im += sum(Fraction(a[i, h].imag) * Fraction(b[h, j].real)
                          for h in range(20))
                got_re = Fraction(ref.hi[i, j].real) + Fraction(ref.lo[i, j].real)
                got_im = Fraction(ref.hi[i, j].imag) + Fraction(ref.lo[i, j].imag)
                assert abs(float(got_re - re)) < 2.0**-95 * (1 + abs(float(re)))
                assert abs(float(got_im - im)) < 2.0**-95 * (1 + abs(float(im)))

    def test_deterministic_across_calls(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((16, 40))
        b = rng.standard_normal((40, 12))
        r1 = reference_gemm_dd(a, b)
        r2 = reference_gemm_dd(a, b)
        assert np.array_equal(r1.hi, r2.hi) and np.array_equal(r1.lo, r2.lo)


class TestMaxRelativeError:
    def test_equal_is_zero(self):
        rng = np.random.default_rng(5)
        c = rng.standard_normal((4, 4))
        assert max_relative_error(c, DDMatrix(c, np.zeros_like(c))) == 0.0

    def test_single_perturbed_element(self):
        c = np.ones((3, 3))
        approx = c.copy()
        eps = 2.0**-40
        approx[1, 2] = 1.0 + 2 * eps
        got = max_relative_error(approx, DDMatrix(c, np.zeros_like(c)))
        assert got == pytest.approx(2 * eps, rel=1e-12)

    def test_zero_reference_components_skipped(self):
        ref = np.array([[0.0, 2.0]])
        approx = np.array([[5.0, 2.0]])
        err, zeros = max_relative_error(approx, ref, return_zero_count=True)
        assert err == 0.0
        assert zeros == 1

    def test_complex_componentwise(self):
        ref = np.array([[1.0 + 1.0j]])
        approx = np.array([[1.0 + 1.0j * (1 + 1e-10)]])
        got = max_relative_error(approx, ref)
        assert got == pytest.approx(1e-10, rel=1e-5)

    def test_plain_array_reference(self):
        ref = np.array([[4.0]])
        approx = np.array([[5.0]])
        assert max_relative_error(approx, ref) == pytest.approx(0.25)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            max_relative_error(np.ones((2, 2)), np.ones((3, 3)))
