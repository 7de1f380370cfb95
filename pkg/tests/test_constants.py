"""Exact partial sums, proven tails, enclosures, decimal rendering."""

from fractions import Fraction

import pytest

from eta_lab.constants import (
    SERIES_NAMES,
    ZETA2_HI,
    ZETA2_LO,
    RigorousValue,
    combined_constant,
    default_primes,
    least_negative_density,
    mu_constant,
    pair_sign_probability,
    partial_sum,
    render_decimal,
    rigorous_constant,
    series_terms,
    sign_probability,
    tail_bound,
)

PRIMES = default_primes(2300)


class TestPartialSums:
    def test_single_term_values(self):
        assert partial_sum("Theta", 1, PRIMES) == Fraction(2, 3)
        assert partial_sum("alpha", 1, PRIMES) == Fraction(2, 9)
        assert partial_sum("beta", 1, PRIMES) == Fraction(1, 9)
        assert partial_sum("theta", 1, PRIMES) == Fraction(8, 9)

    def test_erdos_three_terms(self):
        assert partial_sum("erdos", 3, PRIMES) == Fraction(19, 8)

    def test_strictly_increasing_in_k(self):
        for name in SERIES_NAMES:
            sums = [partial_sum(name, k, PRIMES) for k in range(1, 31)]
            assert all(a < b for a, b in zip(sums, sums[1:])), name

    def test_insufficient_primes_rejected(self):
        small = default_primes(10)
        with pytest.raises(ValueError):
            partial_sum("Theta", 10_000, small)

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            partial_sum("gamma", 5, PRIMES)

    def test_evaluation_order_does_not_matter(self):
        # left fold vs balanced tree: identical exact rationals
        def tree(terms):
            while len(terms) > 1:
                nxt = [terms[i] + terms[i + 1] for i in range(0, len(terms) - 1, 2)]
                if len(terms) % 2:
                    nxt.append(terms[-1])
                terms = nxt
            return terms[0]

        for name in SERIES_NAMES:
            terms = series_terms(name, 120, PRIMES)
            fold = Fraction(0)
            for t in terms:
                fold += t
            assert fold == tree(list(terms))

    def test_heuristic_identity_for_theta_terms(self):
        # theta's kth term is p_k * P(sign=-1 at p_k) * prod_{j<k} P(sign 0 or +1)
        terms = series_terms("theta", 50, PRIMES)
        prod = Fraction(1)
        for k in range(1, 51):
            p = PRIMES.p(k)
            expected = p * pair_sign_probability(p, -1) * prod
            assert terms[k - 1] == expected, k
            prod *= pair_sign_probability(p, 0) + pair_sign_probability(p, 1)


class TestTailBounds:
    def test_requires_p_k_at_least_25(self):
        with pytest.raises(ValueError):
            tail_bound("Theta", 9, PRIMES)  # p_9 = 23
        tail_bound("Theta", 10, PRIMES)  # p_10 = 29: fine

    def test_bounds_dominate_deeper_partial_sums(self):
        for name in SERIES_NAMES:
            for k in (10, 50, 120):
                shallow = partial_sum(name, k, PRIMES)
                deep = partial_sum(name, k + 1000, PRIMES)
                assert shallow < deep <= shallow + tail_bound(name, k, PRIMES), (name, k)

    def test_monotone_in_k(self):
        for name in SERIES_NAMES:
            bounds = [tail_bound(name, k, PRIMES) for k in range(20, 80)]
            assert all(b <= a for a, b in zip(bounds, bounds[1:])), name


class TestEnclosures:
    def test_nesting(self):
        for name in SERIES_NAMES:
            for k in (50, 100, 200):
                outer = rigorous_constant(name, k, PRIMES)
                inner = rigorous_constant(name, 2 * k, PRIMES)
                assert outer.lo <= inner.lo and inner.hi <= outer.hi, (name, k)

    def test_reference_decimals_at_k1000(self):
        th = rigorous_constant("theta", 1000, PRIMES)
        big = rigorous_constant("Theta", 1000, PRIMES)
        comb = combined_constant(1000, PRIMES)
        assert render_decimal(th, 10) == "3.9750223902"
        assert render_decimal(big, 10) == "4.9809473396"
        assert render_decimal(comb, 14) == "4.63255603509332"
        assert comb.width < Fraction(1, 10**14)

    def test_erdos_enclosure(self):
        enc = rigorous_constant("erdos", 120, PRIMES)
        deep = partial_sum("erdos", 2200, PRIMES)
        assert enc.lo < deep < enc.hi
        assert render_decimal(enc, 12) == "3.674643966011"
        assert render_decimal(rigorous_constant("erdos", 1000, PRIMES), 14) == "3.67464396601132"

    def test_mu_rendering(self):
        mu = mu_constant(1000, PRIMES)
        assert render_decimal(mu, 10) == "0.6575336448"

    def test_wider_interval_still_contains(self):
        comb50 = combined_constant(50, PRIMES)
        comb1000 = combined_constant(1000, PRIMES)
        assert comb50.width > comb1000.width
        assert comb50.lo <= comb1000.lo and comb1000.hi <= comb50.hi

    def test_rigorous_value_validates(self):
        with pytest.raises(ValueError):
            RigorousValue(name="x", k_terms=1, lo=Fraction(1), hi=Fraction(0))


class TestRenderDecimal:
    def test_exact_terminating(self):
        v = RigorousValue("q", 1, Fraction(1, 4), Fraction(1, 4))
        assert render_decimal(v, 5) == "0.25"
        w = RigorousValue("n", 1, Fraction(-3, 8), Fraction(-3, 8))
        assert render_decimal(w, 2) == "-0.375"

    def test_exact_nonterminating_prints_fraction(self):
        v = RigorousValue("t", 1, Fraction(1, 3), Fraction(1, 3))
        assert render_decimal(v, 4) == "1/3"

    def test_shared_prefix(self):
        v = RigorousValue("a", 1, Fraction(31415, 10**4), Fraction(31419, 10**4))
        assert render_decimal(v, 3) == "3.141"

    def test_wide_interval_uses_plus_minus(self):
        v = RigorousValue("w", 1, Fraction(1, 10), Fraction(9, 10))
        out = render_decimal(v, 3)
        assert "+/-" in out

    def test_rejects_nonpositive_digits(self):
        v = RigorousValue("d", 1, Fraction(1), Fraction(1))
        with pytest.raises(ValueError):
            render_decimal(v, 0)


class TestPredictions:
    def test_sign_probability_rows_sum_to_one(self):
        for p in (2, 3, 5, 7, 11):
            assert sign_probability(p, 1) + sign_probability(p, -1) + sign_probability(p, 0) == 1

    def test_pair_probability_values(self):
        assert pair_sign_probability(2, 0) == Fraction(1, 9)
        assert pair_sign_probability(2, -1) == Fraction(4, 9)
        assert pair_sign_probability(3, -1) == Fraction(15, 32)

    def test_least_negative_density_k1_is_one_third(self):
        assert least_negative_density(1, PRIMES) == Fraction(1, 3)

    def test_least_negative_densities_subprobability(self):
        total = sum(least_negative_density(k, PRIMES) for k in range(1, 26))
        assert total < 1

    def test_zeta2_enclosure_against_mpmath(self):
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 50
        z2 = mp.pi**2 / 6
        assert ZETA2_LO < Fraction(str(z2)) < ZETA2_HI
