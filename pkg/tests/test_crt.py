import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crtgemm import (ConfigError, DomainError, ModulusSet, crt_accumulate,
                     crt_reduce, residue_decompose, select_moduli,
                     symmetric_mod_int, symmetric_mod_wide)


def greedy_oracle(count):
    """Independent greedy gcd-check scan over integers <= 256."""
    chosen = [256]
    candidate = 255
    while len(chosen) < count:
        if all(math.gcd(candidate, p) == 1 for p in chosen):
            chosen.append(candidate)
        candidate -= 1
    return tuple(chosen)


def ceil_log2(n):
    return (n - 1).bit_length()


def significand_width(value: int) -> int:
    if value == 0:
        return 0
    return value.bit_length() - ((value & -value).bit_length() - 1)


class TestSelectModuli:
    def test_single_modulus(self):
        ms = select_moduli(1)
        assert ms.moduli == (256,)
        assert ms.product == 256

    def test_three_moduli_match_greedy_oracle(self):
        ms = select_moduli(3)
        assert ms.moduli == (256, 255, 253) == greedy_oracle(3)
        assert ms.product == 256 * 255 * 253 == 16515840

    @pytest.mark.parametrize("count", range(1, 21))
    def test_matches_greedy_oracle(self, count):
        ms = select_moduli(count)
        assert ms.moduli == greedy_oracle(count)
        assert ms.product == math.prod(ms.moduli)
        assert ms.log2_product == pytest.approx(math.log2(ms.product))

    @pytest.mark.parametrize("count", [1, 4, 9, 16, 20])
    def test_invariants(self, count):
        ms = select_moduli(count)
        assert list(ms.moduli) == sorted(ms.moduli, reverse=True)
        for i in range(count):
            for j in range(i + 1, count):
                assert math.gcd(ms.moduli[i], ms.moduli[j]) == 1
        for p, q in zip(ms.moduli, ms.inverses):
            assert (ms.product // p * q) % p == 1

    @pytest.mark.parametrize("count", [0, 21, -3])
    def test_count_out_of_range(self, count):
        with pytest.raises(ConfigError):
            select_moduli(count)

    def test_from_moduli_rejects_common_factor(self):
        with pytest.raises(ConfigError):
            ModulusSet.from_moduli([256, 254])


class TestCoefficientSplit:
    @pytest.mark.parametrize("count", range(1, 21))
    def test_high_part_bit_budget(self, count):
        # Signed residues leave 53 - 7 - ceil(log2 N) significand bits for
        # the high parts; for N=13 that is 42 bits.
        ms = select_moduli(count)
        budget = 53 - 7 - ceil_log2(count)
        for hi in ms.coeff_hi:
            assert significand_width(int(hi)) <= budget

    def test_n13_budget_value(self):
        assert 53 - 7 - ceil_log2(13) == 42

    @pytest.mark.parametrize("count", range(1, 21))
    def test_pair_approximates_exact_weight(self, count):
        ms = select_moduli(count)
        # Exact while the low remainder fits one double; the worst split
        # error afterwards stays below 2^(ceil(log2 N) - 90).
        for idx, (p, q) in enumerate(zip(ms.moduli, ms.inverses)):
            weight = ms.product // p * q
            pair = Fraction(int(ms.coeff_hi[idx])) + Fraction(ms.coeff_lo[idx])
            rel = abs(pair - weight) / weight
            if ms.product.bit_length() <= 99 - ceil_log2(count):
                assert rel == 0
            else:
                assert rel < Fraction(2) ** (ceil_log2(count) - 90)

    @pytest.mark.parametrize("count", [2, 8, 13, 20])
    def test_high_sum_exact_in_double(self, count):
        # The shared grid makes sum_l coeff_hi[l] * E_l free of rounding.
        ms = select_moduli(count)
        rng = np.random.default_rng(count)
        for _ in range(50):
            res = [int(rng.integers(-(p // 2), (p - 1) // 2 + 1))
                   for p in ms.moduli]
            exact = sum(int(h) * e for h, e in zip(ms.coeff_hi, res))
            acc = 0.0
            for h, e in zip(ms.coeff_hi, res):
                acc += h * e
            assert acc == float(exact) and int(acc) == exact


class TestSymmetricModInt:
    def test_spec_values(self):
        assert symmetric_mod_int(7, 5) == 2
        assert symmetric_mod_int(13, 5) == -2
        assert symmetric_mod_int(128, 256) == -128
        assert symmetric_mod_int(-128, 256) == -128

    @pytest.mark.parametrize("p", [2, 3, 5, 16, 251, 255, 256])
    def test_congruence_and_range_exhaustive(self, p):
        lo = -(p // 2) if p % 2 == 0 else -((p - 1) // 2)
        hi = p // 2 - 1 if p % 2 == 0 else (p - 1) // 2
        for x in range(-3 * 256, 3 * 256 + 1):
            r = symmetric_mod_int(x, p)
            assert (r - x) % p == 0
            assert lo <= r <= hi

    @given(st.integers(-2**60, 2**60), st.integers(2, 256))
    @settings(max_examples=300, deadline=None)
    def test_array_path_matches_scalar(self, x, p):
        scalar = symmetric_mod_int(x, p)
        arr = symmetric_mod_int(np.array([x], dtype=np.int64), p)
        assert arr[0] == scalar
        assert (scalar - x) % p == 0

    def test_float_path_handles_huge_magnitudes(self):
        rng = np.random.default_rng(0)
        exps = rng.integers(40, 76, size=200)
        vals = np.ldexp(rng.integers(1, 2**50, size=200).astype(np.float64),
                        (exps - 50).astype(np.int32))
        vals = np.trunc(vals) * rng.choice([-1.0, 1.0], size=200)
        for p in (256, 255, 251):
            got = symmetric_mod_int(vals, p)
            for v, r in zip(vals.tolist(), np.asarray(got).tolist()):
                assert (int(r) - int(v)) % p == 0
                assert -(p // 2) <= r <= (p - 1) // 2

    def test_bad_modulus(self):
        with pytest.raises(DomainError):
            symmetric_mod_int(3, 1)


class TestSymmetricModWide:
    def test_spec_values(self):
        assert symmetric_mod_wide(22.0, 15) == 7
        assert symmetric_mod_wide(0.0, 15) == 0
        assert symmetric_mod_wide(float(15), 15) == 0

    def test_half_product_kept_positive(self):
        ms = select_moduli(13)
        half = ms.product // 2
        hi = float(half)
        lo = float(half - int(hi))
        got = symmetric_mod_wide((np.float64(hi), np.float64(lo)), ms.product)
        assert Fraction(got) == Fraction(half, 1) or got == pytest.approx(
            float(half), rel=1e-15)

    def test_dd_pair_against_fraction_oracle(self):
        ms = select_moduli(8)
        rng = np.random.default_rng(1)
        for _ in range(200):
            s = (int(rng.integers(-(2**60), 2**60)) << 10) \
                + int(rng.integers(0, 2**10))
            hi = float(s)
            lo = float(s - int(hi))
            got = symmetric_mod_wide((np.float64(hi), np.float64(lo)),
                                     ms.product)
            want = s % ms.product
            if want > ms.product // 2:
                want -= ms.product
            # collapsing the double-double result rounds once
            assert got == float(want)
            if abs(want) < 2**52:
                assert int(got) == want

    def test_plain_double_path(self):
        got = symmetric_mod_wide(np.array([22.0, -22.0, 30.0]), 15,
                                 use_dd=False)
        assert got.tolist() == [7.0, -7.0, 0.0]


class TestResidueDecompose:
    def test_residues_of_seven(self):
        ms = ModulusSet.from_moduli([3, 5])
        stack = residue_decompose(np.array([[7.0]]), ms)
        by_p = dict(zip(ms.moduli, stack.entries[:, 0, 0].tolist()))
        assert by_p[5] == 2 and by_p[3] == 1

    def test_zero_matrix(self):
        ms = select_moduli(4)
        stack = residue_decompose(np.zeros((3, 2)), ms)
        assert not stack.entries.any()

    def test_255_mod_256(self):
        ms = select_moduli(1)
        stack = residue_decompose(np.array([[255.0]]), ms)
        assert stack.entries[0, 0, 0] == -1

    def test_source_not_modified(self):
        ms = select_moduli(2)
        m = np.array([[5.0, -9.0]])
        residue_decompose(m, ms)
        assert m.tolist() == [[5.0, -9.0]]

    @pytest.mark.parametrize("count", [2, 6, 13])
    def test_congruence_and_range_random(self, count):
        ms = select_moduli(count)
        rng = np.random.default_rng(count)
        m = rng.integers(-2**40, 2**40, size=(5, 7)).astype(np.float64)
        stack = residue_decompose(m, ms)
        for idx, p in enumerate(ms.moduli):
            res = stack.entries[idx].astype(np.int64)
            assert np.all((res - m.astype(np.int64)) % p == 0)
            assert res.min() >= -(p // 2) and res.max() <= (p - 1) // 2

    def test_rejects_oversized_entries(self):
        ms = select_moduli(2)
        with pytest.raises(DomainError):
            residue_decompose(np.array([[2.0**90]]), ms)

    def test_rejects_non_integer(self):
        ms = select_moduli(2)
        with pytest.raises(DomainError):
            residue_decompose(np.array([[0.5]]), ms)


class TestCrtAccumulateReduce:
    def test_hand_crt_of_seven(self):
        # P = 15; extended-Euclid oracle gives q = 2 for both moduli, so
        # S = 3*2*mod(7,5) + 5*2*mod(7,3) = 22.
        ms = ModulusSet.from_moduli([3, 5])
        assert ms.inverses == (2, 2)
        stack = residue_decompose(np.array([[7.0]]), ms)
        single = crt_accumulate(stack, ms, "single")
        assert single[0, 0] == 22.0
        s1, s2 = crt_accumulate(stack, ms, "double")
        assert s1[0, 0] + s2[0, 0] == 22.0
        assert crt_reduce((s1, s2), ms)[0, 0] == 7.0
        assert crt_reduce(single, ms)[0, 0] == 7.0

    def test_zero_stack(self):
        ms = select_moduli(5)
        stack = residue_decompose(np.zeros((2, 2)), ms)
        s1, s2 = crt_accumulate(stack, ms, "double")
        assert not s1.any() and not s2.any()

    def test_mismatched_set_rejected(self):
        ms_a = select_moduli(3)
        ms_b = select_moduli(4)
        stack = residue_decompose(np.ones((2, 2)), ms_a)
        with pytest.raises(ConfigError):
            crt_accumulate(stack, ms_b)

    @pytest.mark.parametrize("count", [2, 8, 13, 20])
    def test_s1_bitwise_equals_bigint(self, count):
        ms = select_moduli(count)
        rng = np.random.default_rng(count + 100)
        stack_arr = np.empty((count, 4, 4), dtype=np.int8)
        for idx, p in enumerate(ms.moduli):
            stack_arr[idx] = rng.integers(-(p // 2), (p - 1) // 2 + 1,
                                          size=(4, 4))
        from crtgemm import ResidueStack
        stack = ResidueStack(stack_arr, ms)
        s1, _ = crt_accumulate(stack, ms, "double")
        for i in range(4):
            for j in range(4):
                exact = sum(int(ms.coeff_hi[idx]) * int(stack_arr[idx, i, j])
                            for idx in range(count))
                assert s1[i, j] == float(exact)
                assert int(s1[i, j]) == exact

    def test_round_trip_exhaustive_two_moduli(self):
        # P = 65280 <= 2^16: every representative in (-P/2, P/2].
        ms = select_moduli(2)
        p = ms.product
        xs = np.arange(-(p // 2) + 1, p // 2 + 1, dtype=np.float64)
        stack = residue_decompose(xs[None, :], ms)
        out = crt_reduce(crt_accumulate(stack, ms, "double"), ms)
        assert np.array_equal(out[0], xs)

    @pytest.mark.parametrize("count", range(2, 11))
    def test_round_trip_randomized(self, count):
        ms = select_moduli(count)
        rng = np.random.default_rng(count)
        bound = min(ms.product // 2 - 1, 2**52)
        xs = rng.integers(-bound, bound + 1, size=12000).astype(np.float64)
        stack = residue_decompose(xs[None, :], ms)
        out = crt_reduce(crt_accumulate(stack, ms, "double"), ms)
        assert np.array_equal(out[0], xs)

    def test_reduce_leaves_in_range_values(self):
        ms = select_moduli(3)
        vals = np.array([0.0, 17.0, -4096.0])
        assert np.array_equal(crt_reduce(vals, ms), vals)
