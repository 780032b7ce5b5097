import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from tridyn import DomainError, ResourceLimitError
from tridyn.wandering import (
    SET_A_AREA,
    decimal_string,
    is_admissible,
    iter_rows,
    lambda_tau,
    image_bounds_check,
    lower_bound_tilde,
    omega_words,
    random_admissible_word,
    slow_variation_diagnostic,
    tau_full,
    tau_sums,
    vector_tree,
    wandering_bounds,
)


def test_omega_examples():
    assert omega_words(1) == ["1"]
    assert omega_words(2) == ["01", "11"]
    assert omega_words(3) == ["011", "101", "111"]


def test_omega_counts_are_fibonacci():
    fib = [1, 2]
    while len(fib) < 16:
        fib.append(fib[-1] + fib[-2])
    for k in range(1, 17):
        words = omega_words(k)
        assert len(words) == fib[k - 1]
        assert words == oracles.admissible_words(k)
        assert all(is_admissible(w) for w in words)


def test_caps():
    with pytest.raises(ResourceLimitError):
        omega_words(33)
    with pytest.raises(ResourceLimitError):
        vector_tree(36)
    with pytest.raises(ResourceLimitError):
        tau_full(40)
    with pytest.raises(DomainError):
        omega_words(0)


def test_first_rows():
    rows = [r.as_tuples() for r in vector_tree(4)]
    assert rows[0] == [(2, 1, 1)]
    assert rows[1] == [(3, 1, 1)]
    assert sorted(rows[2]) == [(4, 1, 1), (4, 2, 1)]
    assert sorted(rows[3]) == [(5, 1, 1), (5, 2, 1), (5, 3, 1)]


def test_lambda_values():
    lam, tilde = lambda_tau(4)
    assert lam == [Fr(1, 2), Fr(1, 3), Fr(3, 8), Fr(11, 30)]
    assert tilde[1] == Fr(5, 6)
    lam8, _ = lambda_tau(8)
    for k in range(1, 9):
        assert lam8[k - 1] == oracles.tau_brute(k, "1") - oracles.tau_brute(k - 1, "1")


def test_tau_full_small():
    assert tau_full(1) == Fr(1, 2)
    # t("01") = 1/6, so the second partial sum is 1/2 + 1/6 + 1/3
    assert tau_full(2) == 1
    assert tau_full(2) == oracles.tau_brute(2)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12, 16, 20])
def test_two_routes_agree(n):
    sums = tau_sums(n, exact=True)
    assert tau_full(n) == sums.tau[-1]
    assert tau_full(n, leading="1") == sums.tau_tilde[-1]


def test_routes_agree_with_brute_oracle():
    for n in range(1, 11):
        assert tau_full(n) == oracles.tau_brute(n)


def test_row_recursion_and_contents_to_35():
    sizes = []
    for row in iter_rows(35):
        v = row.vectors
        sizes.append(len(row))
        k = row.k
        if k >= 2:
            mask = (v[:, 0] == k + 1) & (v[:, 2] == 1)
            assert set(range(1, k)) <= set(v[mask, 1].tolist())
        assert np.all(v > 0)
    assert sizes[:2] == [1, 1]
    assert all(sizes[k] == sizes[k - 1] + sizes[k - 2] for k in range(2, 35))


def test_sandwich():
    sums = tau_sums(25, exact=True)
    # no word of length 1 starts with 0, so the two sums coincide at n = 1
    assert sums.tau_tilde[0] == sums.tau[0] == Fr(1, 2)
    for tt, t in zip(sums.tau_tilde[1:], sums.tau[1:]):
        assert tt < t < tt + Fr(math.pi**2)


@pytest.mark.slow
def test_log_squared_band():
    sums = tau_sums(30)
    for n in (10, 20, 30):
        assert 0.5 < float(sums.tau_tilde[n - 1]) / math.log(n) ** 2 < 1.0


def test_lower_bound():
    tilde = tau_sums(20, exact=True).tau_tilde
    for n in range(1, 21):
        assert lower_bound_tilde(n) <= tilde[n - 1]


def test_float_route_matches_exact():
    a = tau_sums(20, exact=True).tau_tilde
    b = tau_sums(20, exact=False).tau_tilde
    assert all(abs(float(x) - y) < 1e-12 for x, y in zip(a, b))


def test_report():
    rep = wandering_bounds(4)
    assert SET_A_AREA == Fr(1, 12)
    row = rep.rows[1]
    assert row["lambda"] == Fr(1, 3) and row["lower"] == row["tau"] / 12 and row["upper"] == 27 * row["lower"]
    csv = rep.csv_rows()
    assert csv[0][:3] == ["k", "row_size", "lambda"]
    assert csv[1][2] == "0.5" and csv[3][2] == "0.375"
    assert decimal_string(Fr(1, 3)).startswith("0.333333")


def test_slow_variation_examples():
    diag = slow_variation_diagnostic(6)
    assert diag["doubling_ratio"][0] == (1, pytest.approx(5 / 3, rel=1e-15))
    k, value = diag["scaled_lambda"][1]
    assert k == 3 and value == pytest.approx(0.932, abs=5e-4)
    assert diag["summary"]["doubling_ratio"]["steps"] == 2


def test_image_measure_bounds_on_random_words():
    rng = np.random.default_rng(11)
    for _ in range(100):
        word = random_admissible_word(rng, 12)
        ok, lower, mu, upper = image_bounds_check(word)
        assert ok, (word, lower, mu, upper)


def test_image_measure_rejects_inadmissible():
    with pytest.raises(DomainError):
        image_bounds_check("100")


@given(st.integers(0, 2**32 - 1), st.integers(1, 30))
def test_random_words_are_admissible(seed, n):
    assert is_admissible(random_admissible_word(np.random.default_rng(seed), n))
