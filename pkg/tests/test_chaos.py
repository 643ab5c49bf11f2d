"""Chaos machinery: Hermite polynomials, cosine basis, multi-indices, Wick weights."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wce_maxwell.chaos import (
    BasisSpec,
    MultiIndex,
    basis_m,
    basis_m_antiderivative,
    enumerate_truncation,
    evaluate_wick_polynomial,
    hermite,
    wick_G,
)


# --- MultiIndex algebra -----------------------------------------------------

class TestMultiIndex:
    def test_canonical_form_rejects_zero_orders(self):
        with pytest.raises(ValueError):
            MultiIndex((((1, 1), 0),))

    def test_canonical_form_rejects_unsorted(self):
        with pytest.raises(ValueError):
            MultiIndex((((1, 2), 1), ((1, 1), 1)))

    def test_from_dict_drops_zeros(self):
        a = MultiIndex.from_dict({(1, 1): 2, (1, 2): 0})
        assert a.entries == (((1, 1), 2),)

    def test_order_degree_channel(self):
        a = MultiIndex.from_dict({(1, 3): 2, (2, 1): 1})
        assert a.order == 3
        assert a.degree == 3
        assert a.max_channel == 2
        assert MultiIndex().order == 0
        assert MultiIndex().degree == 0

    def test_add_sub_roundtrip(self):
        a = MultiIndex.from_dict({(1, 1): 2})
        b = MultiIndex.from_dict({(1, 1): 1, (1, 2): 3})
        assert (a + b) - b == a
        with pytest.raises(ValueError):
            a - b

    def test_leq(self):
        a = MultiIndex.from_dict({(1, 1): 1})
        b = MultiIndex.from_dict({(1, 1): 2, (1, 2): 1})
        assert a.leq(b)
        assert not b.leq(a)
        assert MultiIndex().leq(a)

    @given(
        st.dictionaries(
            st.tuples(st.integers(1, 3), st.integers(1, 3)),
            st.integers(0, 5),
            max_size=4,
        ),
        st.dictionaries(
            st.tuples(st.integers(1, 3), st.integers(1, 3)),
            st.integers(0, 5),
            max_size=4,
        ),
    )
    def test_add_then_subtract_is_identity(self, da, db):
        a = MultiIndex.from_dict(da)
        b = MultiIndex.from_dict(db)
        assert (a + b) - b == a
        assert (a + b).order == a.order + b.order


# --- Hermite polynomials ----------------------------------------------------

class TestHermite:
    def test_h0_is_one(self):
        assert hermite(0, 7.3) == 1.0

    def test_h1_is_identity(self):
        assert hermite(1, 2.5) == 2.5

    def test_h3_closed_form(self):
        # H_3(x) = x^3 - 3x, so H_3(2) = 2.
        assert hermite(3, 2.0) == pytest.approx(2.0, abs=1e-14)

    def test_against_coefficient_oracle(self):
        # Probabilists' Hermite coefficients from numpy's hermite_e module.
        xs = np.linspace(-5, 5, 20)
        for n in range(11):
            coeffs = np.zeros(n + 1)
            coeffs[n] = 1.0
            oracle = np.polynomial.hermite_e.hermeval(xs, coeffs)
            ours = hermite(n, xs)
            scale = 1.0 + np.abs(oracle)
            assert np.max(np.abs(ours - oracle) / scale) < 1e-9

    def test_array_input(self):
        xs = np.array([0.0, 1.0, -1.0])
        np.testing.assert_allclose(hermite(2, xs), xs**2 - 1.0, rtol=1e-15)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            hermite(-1, 0.0)


# --- Cosine basis -----------------------------------------------------------

class TestBasis:
    def test_m1_constant(self):
        assert basis_m(1, 0.37, BasisSpec(1.0)) == 1.0

    def test_m2_at_zero(self):
        assert basis_m(2, 0.0, BasisSpec(1.0)) == pytest.approx(math.sqrt(2.0))

    def test_m3_at_half(self):
        assert basis_m(3, 0.5, BasisSpec(1.0)) == pytest.approx(-math.sqrt(2.0))

    def test_rejects_time_outside_horizon(self):
        with pytest.raises(ValueError):
            basis_m(1, 1.5, BasisSpec(1.0))
        with pytest.raises(ValueError):
            basis_m_antiderivative(1, -0.1, BasisSpec(1.0))

    @pytest.mark.parametrize("T", [1.0, 2.5])
    def test_orthonormality_by_quadrature(self, T):
        spec = BasisSpec(T)
        ts = np.linspace(0.0, T, 10001)
        table = np.array([[basis_m(p, t, spec) for t in ts] for p in range(1, 9)])
        for i in range(8):
            for j in range(8):
                integral = np.trapezoid(table[i] * table[j], ts)
                target = 1.0 if i == j else 0.0
                assert abs(integral - target) < 1e-8

    def test_antiderivative_matches_quadrature(self):
        from scipy.integrate import simpson

        spec = BasisSpec(1.0)
        for p in (1, 2, 3, 5, 8):
            for t in (0.1, 0.25, 0.5, 0.9, 1.0):
                ts = np.linspace(0.0, t, 20001)
                quad = simpson([basis_m(p, s, spec) for s in ts], x=ts)
                assert abs(basis_m_antiderivative(p, t, spec) - quad) < 1e-10

    def test_antiderivative_examples(self):
        spec = BasisSpec(1.0)
        assert basis_m_antiderivative(1, 1.0, spec) == 1.0
        assert basis_m_antiderivative(5, 1.0, spec) == pytest.approx(0.0, abs=1e-15)
        assert basis_m_antiderivative(2, 0.5, spec) == pytest.approx(
            math.sqrt(2.0) / math.pi
        )

    def test_parseval_tail(self):
        # Partial sums of squared antiderivatives are nondecreasing in I,
        # bounded by t, and exactly t at t = T (only p=1 contributes there).
        spec = BasisSpec(1.0)
        for t in (0.2, 0.5, 0.8, 1.0):
            prev = 0.0
            for I in range(1, 33):
                total = sum(
                    basis_m_antiderivative(p, t, spec) ** 2 for p in range(1, I + 1)
                )
                assert total >= prev - 1e-15
                assert total <= t + 1e-12
                prev = total
        for I in (1, 4, 16):
            total = sum(
                basis_m_antiderivative(p, 1.0, spec) ** 2 for p in range(1, I + 1)
            )
            assert abs(total - 1.0) < 1e-12


# --- Truncation sets --------------------------------------------------------

class TestTruncation:
    def test_small_example(self):
        ts = enumerate_truncation(K=1, N=1, I=2)
        assert len(ts) == 3
        assert set(ts.members) == {
            MultiIndex(),
            MultiIndex.unit(1, 1),
            MultiIndex.unit(1, 2),
        }

    def test_experiment_sizes(self):
        assert len(enumerate_truncation(K=1, N=20, I=2)) == 231
        assert len(enumerate_truncation(K=2, N=2, I=1)) == 6

    def test_counts_exhaustive(self):
        for K in (1, 2, 3):
            for I in (1, 2):
                if K * I > 6:
                    continue
                for N in range(0, 11):
                    ts = enumerate_truncation(K, N, I)
                    assert len(ts) == math.comb(N + K * I, K * I)

    def test_invariants(self):
        ts = enumerate_truncation(K=2, N=3, I=2)
        assert ts.members[0] == MultiIndex()
        # Graded ordering and exact lookup inverse.
        grades = [a.order for a in ts.members]
        assert grades == sorted(grades)
        for i, a in enumerate(ts.members):
            assert ts.position(a) == i
            assert a.order <= 3 and a.degree <= 2 and a.max_channel <= 2
        assert len(set(ts.members)) == len(ts)

    def test_membership(self):
        ts = enumerate_truncation(K=1, N=2, I=2)
        assert MultiIndex.unit(1, 1, 2) in ts
        assert MultiIndex.unit(1, 3) not in ts
        assert MultiIndex.unit(2, 1) not in ts

    def test_oversized_set_rejected(self):
        with pytest.raises(ValueError):
            enumerate_truncation(K=3, N=100, I=4)


# --- Wick weights and polynomials ------------------------------------------

class TestWick:
    def test_empty_triple(self):
        z = MultiIndex()
        assert wick_G(z, z, z) == 1.0

    def test_unit_triple(self):
        e = MultiIndex.unit(1, 1)
        assert wick_G(e, e, e) == pytest.approx(math.sqrt(2.0), rel=1e-14)

    def test_order_two_pair(self):
        # C(2,1) * C(1,0) * C(1,0) = 2.
        a = MultiIndex.unit(1, 1, 2)
        e = MultiIndex.unit(1, 1)
        assert wick_G(a, e, MultiIndex()) == pytest.approx(math.sqrt(2.0), rel=1e-14)

    def test_rejects_beta_above_alpha(self):
        with pytest.raises(ValueError):
            wick_G(MultiIndex.unit(1, 1), MultiIndex.unit(1, 1, 2), MultiIndex())

    def test_symmetry_in_beta(self):
        # G(a, b, r) = G(a, a-b, r): the binomial product is invariant under
        # b <-> a-b. Exact equality holds for single-slot indices.
        for an in range(5):
            a = MultiIndex.from_dict({(1, 1): an})
            for bn in range(an + 1):
                b = MultiIndex.from_dict({(1, 1): bn})
                for rn in range(5):
                    r = MultiIndex.from_dict({(1, 1): rn})
                    assert wick_G(a, b, r) == wick_G(a, a - b, r)

    def test_wick_polynomial_examples(self):
        assert evaluate_wick_polynomial(MultiIndex(), {}) == 1.0
        assert evaluate_wick_polynomial(
            MultiIndex.unit(1, 1), {(1, 1): 0.7}
        ) == pytest.approx(0.7)
        # H_2(2) / sqrt(2!) = 3 / sqrt(2).
        assert evaluate_wick_polynomial(
            MultiIndex.unit(1, 1, 2), {(1, 1): 2.0}
        ) == pytest.approx(3.0 / math.sqrt(2.0))

    def test_wick_polynomial_missing_draw(self):
        with pytest.raises(KeyError):
            evaluate_wick_polynomial(MultiIndex.unit(1, 2), {(1, 1): 0.0})

    def test_statistical_orthonormality(self):
        # Sample mean of T_a * T_b over 1e6 Gaussian draws within 5 standard
        # errors of the Kronecker delta, for all pairs with |a|,|b| <= 3 over
        # two slots.
        rng = np.random.default_rng(42)
        n = 10**6
        draws = {(1, 1): rng.standard_normal(n), (1, 2): rng.standard_normal(n)}
        members = enumerate_truncation(K=1, N=3, I=2).members
        values = [np.broadcast_to(
            np.asarray(evaluate_wick_polynomial(a, draws), dtype=float), (n,)
        ) for a in members]
        for i, a in enumerate(members):
            for j in range(i, len(members)):
                prod = values[i] * values[j]
                mean = prod.mean()
                se = prod.std(ddof=1) / math.sqrt(n)
                target = 1.0 if i == j else 0.0
                assert abs(mean - target) <= 5.0 * max(se, 1e-12)
