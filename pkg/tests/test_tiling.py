from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from fuglede import cyclo
from fuglede.groups import WeightedSet, make_group
from fuglede.tiling import (TilingCertificate, cyclic_verify_tiling, is_tile, quotient_complement, shi_hypothesis,
                            shi_reduction, tile_from_coset_union, tiling_complements, verify_tiling)


def _brute_tiles(n, pts):
    """Independent oracle: greedily cover the smallest uncovered point, trying every translate."""
    if n % len(pts):
        return False

    def rec(covered):
        if len(covered) == n:
            return True
        c = min(set(range(n)) - covered)
        for s in pts:
            tr = {(x - s + c) % n for x in pts}
            if not tr & covered:
                if rec(covered | tr):
                    return True
        return False

    return rec(frozenset())


def _set(n, pts):
    return WeightedSet.from_ints(n, pts)


def test_is_tile_examples():
    assert is_tile(_set(4, [0, 2])).ints() == [0, 1]
    assert is_tile(_set(4, [0, 1, 2])) is None
    assert is_tile(_set(6, [0, 2, 4])).ints() == [0, 1]


def test_verify_tiling_examples():
    g6 = make_group([6])
    assert verify_tiling([0, 3], [0, 1, 2], g6)
    assert not verify_tiling([0, 3], [0, 1, 3], g6)
    sub = _set(1332, range(0, 1332, 36))
    assert verify_tiling(sub, range(36))
    assert verify_tiling(sub, TilingCertificate(tuple((t,) for t in range(36))))


def test_tile_from_coset_union_examples():
    assert tile_from_coset_union(_set(6, [0, 2, 4]), 3).ints() == [0, 1]
    assert tile_from_coset_union(_set(6, range(6)), 3).ints() == [0]
    assert tile_from_coset_union(_set(6, [0, 1, 2]), 3) is None
    with pytest.raises(ValueError):
        tile_from_coset_union(_set(6, [0]), 5)


def test_shi_reduction_examples():
    assert shi_reduction(_set(6, [0, 1]), 3).ints() == [0, 2, 4]
    # Phi_2 divides 1 + x while Phi_1 does not
    assert not shi_hypothesis(_set(6, [0, 1]), 2)
    with pytest.raises(ValueError):
        shi_reduction(_set(6, [0, 1]), 2)
    with pytest.raises(ValueError):
        shi_reduction(_set(4, [0, 1]), 2)
    # 2{0, 1, 2} = {0, 2, 0} collapses although the hypothesis holds vacuously
    assert shi_hypothesis(_set(4, [0, 1, 2]), 2)
    assert shi_reduction(_set(4, [0, 1, 2]), 2) is None


def test_shi_reduction_returns_none_when_hypothesis_fails():
    failing = [pts for k in (1, 2, 4, 5) for pts in combinations(range(12), k)
               if not shi_hypothesis(_set(12, pts), 3)]
    assert failing
    assert all(shi_reduction(_set(12, pts), 3) is None for pts in failing)


def test_is_tile_matches_brute_force():
    for n in range(2, 13):
        for k in range(1, n + 1):
            if n % k:
                continue
            for rest in combinations(range(1, n), k - 1):
                pts = (0, *rest)
                cert = is_tile(_set(n, pts))
                assert (cert is not None) == _brute_tiles(n, pts), (n, pts)
                if cert is not None:
                    assert 0 in cert.ints() and verify_tiling(_set(n, pts), cert)


def test_product_group_tiling():
    g = make_group([2, 4])
    S = WeightedSet.from_elements(g, [(0, 0), (1, 1)])
    cert = is_tile(S)
    assert cert is not None and verify_tiling(S, cert)
    assert is_tile(WeightedSet.from_elements(g, [(0, 0), (1, 0), (0, 1)])) is None


def test_tiling_complements_limit():
    S = _set(8, [0, 1, 4, 5])
    sols = tiling_complements(S, limit=2)
    assert len(sols) == 2 and len({c.complement for c in sols}) == 2
    assert all(verify_tiling(S, c) for c in sols)
    assert len(tiling_complements(_set(8, [0, 4]), limit=5)) <= 5


def test_quotient_complement():
    # injective projection of {0, 1, 8} into Z_6 (from Z_12)
    T = quotient_complement(12, [0, 1, 8], 6)
    assert T is not None and cyclic_verify_tiling(12, [0, 1, 8], T)
    assert quotient_complement(12, [0, 6], 6) is None


# ---------------------------------------------------------------------------
# properties

tileable = st.sampled_from([4, 6, 8, 9, 10, 12, 16, 18]).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, n - 1), min_size=1, max_size=6, unique=True)))


@given(tileable, st.data())
def test_translation_invariance(case, data):
    n, pts = case
    g = data.draw(st.integers(0, n - 1))
    S = _set(n, pts)
    cert = is_tile(S)
    moved = is_tile(S.translate(g))
    assert (cert is None) == (moved is None)
    if cert is not None:
        assert verify_tiling(S.translate(g), cert)


@given(tileable)
def test_verify_symmetric(case):
    n, pts = case
    S = _set(n, pts)
    cert = is_tile(S)
    if cert is not None:
        T = _set(n, cert.ints())
        assert verify_tiling(T, S.ints())
    g = make_group([n])
    other = [(x * 3 + 1) % n for x in pts]
    assert verify_tiling(pts, other, g) == verify_tiling(other, pts, g)


@given(tileable, st.data())
def test_constructions_verify(case, data):
    n, pts = case
    S = _set(n, pts)
    from sympy import factorint
    p = data.draw(st.sampled_from(sorted(factorint(n))))
    # saturate S into a coset union
    step = n // p
    union = _set(n, sorted({(x + j * step) % n for x in pts for j in range(p)}))
    cert = tile_from_coset_union(union, p)
    if cert is not None:
        assert verify_tiling(union, cert)
    else:
        assert is_tile(union) is None
    if len(pts) % p:
        cert = shi_reduction(S, p)
        if cert is not None:
            assert verify_tiling(S, cert)


@given(tileable)
def test_t1_t2_implies_tile(case):
    n, pts = case
    M = cyclo.mask_poly(_set(n, pts))
    if cyclo.check_T1(M) and cyclo.check_T2(M):
        assert is_tile(_set(n, pts)) is not None
