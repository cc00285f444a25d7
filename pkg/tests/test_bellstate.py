import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrepsat import oracle
from qrepsat.bellstate import (
    MAXIMALLY_MIXED,
    PHI_PLUS,
    BellDiagonalState,
    depolarized,
    error_rates,
    mix_white_noise,
    nest,
    swap,
)

fidelities = st.floats(min_value=0.0, max_value=1.0)
probabilities = st.floats(min_value=0.0, max_value=1.0)


@st.composite
def bell_states(draw):
    raw = draw(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=4, max_size=4)
               .filter(lambda w: sum(w) > 1e-3))
    w = np.array(raw) / sum(raw)
    return BellDiagonalState.from_weights(w)


def assert_normalised(state):
    w = state.weights
    assert abs(w.sum() - 1.0) <= 1e-12
    assert np.all(w >= -1e-15)


class TestConstruction:
    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            BellDiagonalState(0.5, 0.2, 0.2, 0.2)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            BellDiagonalState(1.1, -0.1, 0.0, 0.0)

    def test_from_weights_clamps_rounding_negatives(self):
        s = BellDiagonalState.from_weights([1.0, -1e-16, 0.0, 0.0])
        assert s.weights.tolist() == [1.0, 0.0, 0.0, 0.0]

    def test_from_weights_rejects_real_negatives(self):
        with pytest.raises(ValueError):
            BellDiagonalState.from_weights([1.0 + 1e-9, -1e-9, 0.0, 0.0])


class TestDepolarized:
    def test_pure(self):
        assert depolarized(1.0) == PHI_PLUS

    def test_maximally_mixed(self):
        assert depolarized(0.25) == MAXIMALLY_MIXED

    def test_initial_fidelity(self):
        s = depolarized(0.98)
        np.testing.assert_allclose(s.weights, [0.98, 0.02 / 3, 0.02 / 3, 0.02 / 3], rtol=1e-14)
        assert s.p_phi_minus == pytest.approx(0.00667, abs=5e-6)

    @pytest.mark.parametrize("f", [-0.01, 1.01, float("nan")])
    def test_domain(self, f):
        with pytest.raises(ValueError):
            depolarized(f)


class TestWhiteNoise:
    def test_no_noise_is_identity(self):
        s = depolarized(0.9)
        assert mix_white_noise(s, 1.0) == s

    def test_full_noise(self):
        assert mix_white_noise(depolarized(0.9), 0.0) == MAXIMALLY_MIXED

    def test_fidelity_example(self):
        # 0.81 * 0.98 + 0.19 / 4
        assert mix_white_noise(depolarized(0.98), 0.81).fidelity == pytest.approx(0.8413, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            mix_white_noise(PHI_PLUS, 1.5)


class TestSwap:
    def test_perfect_pairs(self):
        assert swap(PHI_PLUS, PHI_PLUS) == PHI_PLUS

    @given(bell_states())
    @settings(max_examples=200)
    def test_phi_plus_is_identity(self, q):
        np.testing.assert_array_equal(swap(PHI_PLUS, q).weights, q.weights)

    @given(bell_states(), bell_states())
    @settings(max_examples=500)
    def test_commutative(self, a, b):
        np.testing.assert_array_equal(swap(a, b).weights, swap(b, a).weights)

    def test_maximally_mixed_fixed_point(self):
        np.testing.assert_allclose(swap(MAXIMALLY_MIXED, MAXIMALLY_MIXED).weights,
                                   MAXIMALLY_MIXED.weights, atol=1e-16)

    @given(fidelities)
    @settings(max_examples=200)
    def test_depolarized_matches_oracle(self, f):
        a = depolarized(f)
        np.testing.assert_allclose(swap(a, a).weights,
                                   oracle.swap_oracle(a.weights, a.weights), atol=1e-12)

    def test_oracle_equivalence_random_pairs(self):
        assert oracle.oracle_check(seed=12345, trials=1000) < 1e-12

    def test_oracle_detects_wrong_rule(self):
        # plain elementwise product is not swapping; the oracle must notice
        def wrong(x, y):
            w = x * y
            return w / w.sum()

        assert oracle.oracle_check(seed=1, trials=20, swap_fn=wrong) > 1e-3


class TestNest:
    def test_zero_levels(self):
        s = depolarized(0.9)
        assert nest(s, 0) is s

    def test_perfect_fixed_point(self):
        assert nest(PHI_PLUS, 3) == PHI_PLUS

    def test_two_levels_against_iterated_oracle(self):
        s = depolarized(0.95).weights
        level1 = oracle.swap_oracle(s, s)
        level2 = oracle.swap_oracle(level1, level1)
        np.testing.assert_allclose(nest(depolarized(0.95), 2).weights, level2, atol=1e-12)

    def test_werner_closed_form(self):
        # a Werner parameter p = (4F - 1) / 3 squares at every level
        f = 0.98
        p = (4 * f - 1) / 3
        for n in range(6):
            expected = (3 * p ** (2 ** n) + 1) / 4
            assert nest(depolarized(f), n).fidelity == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("n", [-1, 1.5])
    def test_domain(self, n):
        with pytest.raises(ValueError):
            nest(PHI_PLUS, n)

    # below F = 1/4 the Werner parameter is negative and squaring raises F
    @given(st.floats(min_value=0.25, max_value=0.999999))
    @settings(max_examples=200)
    def test_fidelity_non_increasing(self, f):
        s = depolarized(f)
        fids = [nest(s, n).fidelity for n in range(6)]
        assert all(b <= a + 1e-15 for a, b in zip(fids, fids[1:]))


class TestErrorRates:
    def test_pure(self):
        assert error_rates(PHI_PLUS) == (0.0, 0.0)

    def test_mixed(self):
        assert error_rates(MAXIMALLY_MIXED) == (0.5, 0.5)

    def test_initial_pair(self):
        e_x, e_z = error_rates(depolarized(0.98))
        assert e_x == pytest.approx(0.01333, abs=5e-6)
        assert e_z == pytest.approx(0.04 / 3, rel=1e-12)

    @given(fidelities)
    @settings(max_examples=500)
    def test_depolarized_symmetric(self, f):
        e_x, e_z = error_rates(depolarized(f))
        assert e_x == e_z
        assert e_x == pytest.approx(2 * (1 - f) / 3, abs=1e-15)


@given(bell_states(), bell_states(), probabilities, fidelities, st.integers(0, 5))
@settings(max_examples=500)
def test_normalisation_closure(a, b, p, f, n):
    assert_normalised(depolarized(f))
    assert_normalised(mix_white_noise(a, p))
    assert_normalised(swap(a, b))
    assert_normalised(nest(a, n))
