import cmath
import math
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from fuglede import cyclo
from fuglede.groups import WeightedSet, make_group
from fuglede.spectral import (CharacterPairing, enumerate_spectra, fourier_zero, gram_is_scalar,
                              hadamard_columns, hadamard_rows_spectrum, is_spectral, log_hadamard_search,
                              verify_spectral_pair, zero_set)


def _float_sum(S, lam):
    pair = CharacterPairing(S.group)
    N = S.group.exponent
    return sum(w * cmath.exp(2j * math.pi * pair(lam, s) / N) for s, w in S.weights.items())


def _float_zero(S, lam):
    return abs(_float_sum(S, lam)) < 1e-9


def _brute_spectral(S):
    """Independent oracle: try every Lambda containing 0 with float orthogonality."""
    g = S.group
    elems = [x for x in g.elements() if x != g.zero]
    zeros = {x for x in g.elements() if _float_zero(S, x)}
    for rest in combinations(elems, S.total - 1):
        lam = [g.zero, *rest]
        if all(g.sub(a, b) in zeros for i, a in enumerate(lam) for b in lam[i + 1:]):
            return True
    return False


def test_fourier_zero_examples():
    assert fourier_zero(WeightedSet.from_ints(4, [0, 2]), 1)
    S = WeightedSet.from_ints(6, [0, 2, 4])
    assert fourier_zero(S, 1) and not fourier_zero(S, 3)


def test_fourier_zero_hadamard_rows():
    L = log_hadamard_search(6, 3)
    S = hadamard_columns(L, 3)
    g = S.group
    for i in range(6):
        for j in range(i + 1, 6):
            # the character given by row i minus row j pairs with column c to L[i][c] - L[j][c]
            lam = [0] * 6
            lam[i], lam[j] = 1, 2
            assert fourier_zero(S, tuple(lam)) == _float_zero(S, tuple(lam))
    rows = hadamard_rows_spectrum(L, 3)
    assert all(fourier_zero(S, g.sub(a, b)) for a in rows for b in rows if a != b)


def test_zero_set_examples():
    assert zero_set(WeightedSet.from_ints(4, [0, 2])) == {(1,), (3,)}
    assert zero_set(WeightedSet.from_ints(6, [0, 3])) == {(1,), (3,), (5,)}
    assert zero_set(WeightedSet.from_ints(7, [3])) == frozenset()
    assert zero_set(WeightedSet.from_elements(make_group([2, 3]), [(1, 2)])) == frozenset()


def test_is_spectral_examples():
    cert = is_spectral(WeightedSet.from_ints(4, [0, 2]))
    assert cert is not None and verify_spectral_pair(WeightedSet.from_ints(4, [0, 2]), cert.spectrum)
    assert is_spectral(WeightedSet.from_ints(4, [0, 1, 2])) is None
    for orders in ([6], [2, 3], [2, 2, 2]):
        g = make_group(orders)
        G = WeightedSet.from_elements(g, g.elements())
        cert = is_spectral(G)
        assert sorted(cert.spectrum) == sorted(g.elements())


def test_verify_examples():
    S = WeightedSet.from_ints(4, [0, 2])
    assert verify_spectral_pair(S, [0, 1])
    assert not verify_spectral_pair(S, [0, 2])
    assert not verify_spectral_pair(S, [0])


@pytest.mark.parametrize("k, t, L", [(2, 2, [[0, 0], [0, 1]]), (3, 3, [[0, 0, 0], [0, 1, 2], [0, 2, 1]])])
def test_log_hadamard_examples(k, t, L):
    assert log_hadamard_search(k, t) == L


def test_log_hadamard_6_3():
    L = log_hadamard_search(6, 3)
    assert L is not None and len(L) == 6
    assert all(v == 0 for v in L[0]) and all(row[0] == 0 for row in L)
    for a in range(6):
        for b in range(a + 1, 6):
            diff = [(x - y) % 3 for x, y in zip(L[a], L[b])]
            assert sorted(diff.count(s) for s in range(3)) == [2, 2, 2]
    S = hadamard_columns(L, 3)
    assert S.total == 6 and is_spectral(S) is not None


def test_log_hadamard_rejects():
    with pytest.raises(ValueError):
        log_hadamard_search(4, 4)
    assert log_hadamard_search(4, 3) is None


def test_exhaustive_against_float_oracle():
    for n in range(2, 11):
        for k in range(1, n + 1):
            for rest in combinations(range(1, n), k - 1):
                S = WeightedSet.from_ints(n, (0, *rest))
                assert (is_spectral(S) is not None) == _brute_spectral(S), (n, rest)


def test_product_group_against_float_oracle():
    g = make_group([2, 4])
    elems = list(g.elements())
    for k in (2, 4):
        for pts in combinations(elems, k):
            S = WeightedSet.from_elements(g, pts)
            assert (is_spectral(S) is not None) == _brute_spectral(S)


def test_enumerate_spectra_bounded():
    S = WeightedSet.from_ints(6, [0, 3])
    certs = enumerate_spectra(S, limit=10)
    assert [c.spectrum for c in certs] == [((0,), (1,)), ((0,), (3,)), ((0,), (5,))]
    assert len(enumerate_spectra(S, limit=2)) == 2


# ---------------------------------------------------------------------------
# properties

cyclic_sets = st.integers(2, 24).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, n - 1), min_size=1, max_size=6, unique=True)))


@given(cyclic_sets)
def test_zero_set_matches_float(case):
    n, pts = case
    S = WeightedSet.from_ints(n, pts)
    Z = zero_set(S)
    assert (0,) not in Z
    for x in range(n):
        assert ((x,) in Z) == _float_zero(S, (x,))
        assert fourier_zero(S, x) == fourier_zero(S, -x % n)


@given(st.integers(2, 60).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, n - 1), max_size=8))), st.data())
def test_fourier_zero_matches_divides(case, data):
    n, pts = case
    S = WeightedSet.from_ints(n, pts)
    lam = data.draw(st.integers(0, n - 1))
    assert fourier_zero(S, lam) == cyclo.divides(cyclo.mask_poly(S), n // math.gcd(lam, n))


@given(cyclic_sets, st.data())
def test_translation_and_dilation_invariance(case, data):
    n, pts = case
    S = WeightedSet.from_ints(n, pts)
    g = data.draw(st.integers(0, n - 1))
    units = [u for u in range(1, n) if math.gcd(u, n) == 1] or [1]
    u = data.draw(st.sampled_from(units))
    assert zero_set(S.translate(g)) == zero_set(S)
    spectral = is_spectral(S) is not None
    assert (is_spectral(S.translate(g)) is not None) == spectral
    assert (is_spectral(S.dilate(u)) is not None) == spectral


@given(cyclic_sets)
def test_certificates_verify_and_gram_is_scalar(case):
    n, pts = case
    S = WeightedSet.from_ints(n, pts)
    cert = is_spectral(S)
    if cert is None:
        return
    assert len(cert) == S.total and (0,) in cert.spectrum
    assert verify_spectral_pair(S, cert.spectrum)
    assert gram_is_scalar(S, cert.spectrum)
    # duality
    L = WeightedSet.from_elements(S.group, cert.spectrum)
    assert verify_spectral_pair(L, S.support)


@given(st.sampled_from([[2, 2], [2, 4], [3, 3]]), st.data())
def test_duality_random(orders, data):
    g = make_group(orders)
    elems = list(g.elements())
    k = data.draw(st.integers(1, 4))
    S = data.draw(st.lists(st.sampled_from(elems), min_size=k, max_size=k, unique=True))
    L = data.draw(st.lists(st.sampled_from(elems), min_size=k, max_size=k, unique=True))
    WS, WL = WeightedSet.from_elements(g, S), WeightedSet.from_elements(g, L)
    assert verify_spectral_pair(WS, L) == verify_spectral_pair(WL, S)
