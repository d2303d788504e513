import numpy as np
import pytest

from fuglede.corpus import dilate_pair, pqr_corpus, small_pairs, translate_pair, twisted_product
from fuglede.groups import WeightedSet
from fuglede.scan import (affine_canonical, fuglede_scan, hadamard_pipeline, scan_domain, scan_masks,
                          tao_counterexample)
from fuglede.spectral import is_spectral, verify_spectral_pair
from fuglede.tiling import is_tile


@pytest.mark.parametrize("n", [1, 2, 5, 8, 12])
def test_small_scans_clean(n):
    rep = fuglede_scan(n)
    assert rep.checked == max(1, 2 ** (n - 1))
    assert rep.violations == [] and rep.t1t2_violations == []
    assert rep.spectral == rep.tiles


def test_scan_counts_match_direct_search():
    n = 9
    rep = fuglede_scan(n)
    spectral = tiles = 0
    for mask in range(1, 1 << n, 2):
        S = WeightedSet.from_ints(n, [i for i in range(n) if mask >> i & 1])
        spectral += is_spectral(S) is not None
        tiles += is_tile(S) is not None
    assert (rep.spectral, rep.tiles) == (spectral, tiles)


def test_affine_canonical_orbits():
    canon = affine_canonical(6)
    # {0, 1} and {0, 5} lie in one orbit (dilation by 5)
    assert canon[0b000011] == canon[0b100001]
    assert np.all(canon <= np.arange(64))


def test_scan_modes_and_bounds():
    masks, label = scan_domain(18)
    assert label == "exhaustive-affine" and np.all(masks & 1)
    masks, label = scan_domain(30, "sample", seed=3, samples=50)
    assert label == "sample" and len(masks) <= 50
    assert np.array_equal(masks, scan_domain(30, "sample", seed=3, samples=50)[0])
    with pytest.raises(ValueError):
        fuglede_scan(40)
    with pytest.raises(ValueError):
        fuglede_scan(70, "sample")
    with pytest.raises(ValueError):
        fuglede_scan(8, "bogus")


def test_threaded_scan_matches_serial():
    assert fuglede_scan(13, threads=3).to_json() == fuglede_scan(13).to_json()


def test_scan_masks_bookkeeping():
    # {0, 1, 2} is neither spectral nor a tile; {0, 2} is both
    rep = scan_masks(4, np.array([0b0111, 0b0101], dtype=np.int64))
    assert rep.checked == 2 and rep.spectral == 1 and rep.tiles == 1


def test_hadamard_pipeline_analogues():
    for k, t in ((2, 2), (3, 3)):
        rep = hadamard_pipeline(k, t)
        assert rep.spectral and rep.tile


def test_tao():
    rep = tao_counterexample()
    assert rep.spectral and not rep.tile
    assert len(rep.S) == 6 and "729" in rep.tile_reason
    S = WeightedSet.from_elements(__import__("fuglede").make_group([3] * 6), rep.S)
    assert verify_spectral_pair(S, rep.spectrum)


def test_corpus_generators():
    for m in (4, 9):
        for S, L in small_pairs(m):
            assert verify_spectral_pair(WeightedSet.from_ints(m, S), L)
    pair = twisted_product(4, ((0, 1), (0, 2)), 9, ((0, 3, 6), (0, 1, 2)), {0: 1, 3: 2, 6: 3})
    S, L = (WeightedSet.from_ints(36, x) for x in pair)
    assert verify_spectral_pair(S, L)
    for moved in (dilate_pair(36, pair, 5), translate_pair(36, pair, 7, 13)):
        assert verify_spectral_pair(*(WeightedSet.from_ints(36, x) for x in moved))
    with pytest.raises(ValueError):
        twisted_product(4, pair, 6, pair)


def test_corpus_deterministic_and_diverse():
    a = pqr_corpus(2, 3, 37, size=40, seed=4)
    b = pqr_corpus(2, 3, 37, size=40, seed=4)
    assert a == b and len({e.S for e in a}) == 40
    kinds = {e.kind.split("+")[0] for e in a}
    assert {"subgroup", "whole", "coset_union_of_transversal"} <= kinds
    assert any("dilate" in e.kind for e in a)
