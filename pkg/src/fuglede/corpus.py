"""Generators of spectral pairs in cyclic groups, mainly Z_1332 = Z_4 x Z_9 x Z_37.

Pairs are assembled through the CRT. For coprime n1, n2 with N = n1 n2 the
character pairing of Z_N splits as ``lam = lam1 (N/n1) + lam2 (N/n2)``, so a
spectral pair in each factor gives one in Z_N. Twisting the first coordinate
by any function of the second keeps spectrality:
``{(a + g(b), b)}`` with spectrum ``Lam_A x Lam_B``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .groups import WeightedSet
from .spectral import is_spectral, verify_spectral_pair

Pair = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class CorpusEntry:
    n: int
    S: tuple[int, ...]
    spectrum: tuple[int, ...]
    kind: str

    def sets(self) -> tuple[WeightedSet, WeightedSet]:
        return WeightedSet.from_ints(self.n, self.S), WeightedSet.from_ints(self.n, self.spectrum)


def _crt(n1: int, n2: int, a: int, b: int) -> int:
    N = n1 * n2
    return (a * n2 * pow(n2, -1, n1) + b * n1 * pow(n1, -1, n2)) % N


@lru_cache(maxsize=None)
def small_pairs(m: int) -> tuple[Pair, ...]:
    """Every spectral subset of Z_m with one spectrum each (m <= 12), or
    the trivial pairs for prime m beyond that (only singletons and Z_m)."""
    if m > 12:
        return (((0,), (0,)), (tuple(range(m)), tuple(range(m))))
    out = []
    for k in range(1, m + 1):
        for S in combinations(range(m), k):
            cert = is_spectral(WeightedSet.from_ints(m, S))
            if cert is not None:
                out.append((S, tuple(x[0] for x in cert.spectrum)))
    return tuple(out)


def twisted_product(n1: int, pair1: Pair, n2: int, pair2: Pair, twist: dict[int, int] | None = None) -> Pair:
    """``{(a + g(b), b)}`` in Z_{n1 n2} with spectrum Lam_1 x Lam_2."""
    if math.gcd(n1, n2) != 1:
        raise ValueError("factors must be coprime")
    N = n1 * n2
    (A, LA), (B, LB) = pair1, pair2
    g = twist or {}
    S = sorted(_crt(n1, n2, (a + g.get(b, 0)) % n1, b) for a in A for b in B)
    L = sorted((la * n2 + lb * n1) % N for la in LA for lb in LB)
    return tuple(S), tuple(L)


def dilate_pair(n: int, pair: Pair, u: int) -> Pair:
    """uS has spectrum u^{-1} Lam."""
    inv = pow(u, -1, n)
    S, L = pair
    return tuple(sorted(u * x % n for x in S)), tuple(sorted(inv * x % n for x in L))


def translate_pair(n: int, pair: Pair, s: int, t: int) -> Pair:
    S, L = pair
    return tuple(sorted((x + s) % n for x in S)), tuple(sorted((x + t) % n for x in L))


def _random_pair(rng: random.Random, factors: tuple[int, ...]) -> Pair:
    """Random spectral pair in the product of pairwise coprime factors."""
    if len(factors) == 1:
        return rng.choice(small_pairs(factors[0]))
    k = rng.randrange(1, len(factors))
    left, right = factors[:k], factors[k:]
    if rng.random() < 0.5:
        left, right = right, left
    n1, n2 = math.prod(left), math.prod(right)
    a, b = _random_pair(rng, left), _random_pair(rng, right)
    twist = {x: rng.randrange(n1) for x in range(n2)} if rng.random() < 0.8 else None
    return twisted_product(n1, a, n2, b, twist)


def pqr_corpus(p: int, q: int, r: int, size: int = 300, seed: int = 0) -> list[CorpusEntry]:
    """Deterministic corpus of verified spectral pairs in Z_{p^2 q^2 r}.

    Built from the factors Z_{p^2}, Z_{q^2}, Z_r by random splits into two
    coprime parts and twisted products (subgroups, coset unions and
    transversals all arise this way), their duals, and unit dilates with
    translates of a quarter of the entries.
    """
    rng = random.Random(seed)
    factors = (p * p, q * q, r)
    n = math.prod(factors)
    seen: set = set()
    out: list[CorpusEntry] = []

    def add(pair: Pair, kind: str) -> None:
        if pair[0] in seen:
            return
        S, L = (WeightedSet.from_ints(n, x) for x in pair)
        if not verify_spectral_pair(S, L):
            raise AssertionError(f"generator produced a non-spectral pair ({kind})")
        seen.add(pair[0])
        out.append(CorpusEntry(n, pair[0], pair[1], kind))

    sub_r = tuple(range(0, n, n // r))
    add((sub_r, sub_r), "subgroup")
    add((tuple(range(n)), tuple(range(n))), "whole")
    # Z_r cosets over a transversal of the order-pq subgroup of Z_{p^2 q^2}
    m = p * p * q * q
    transversal = twisted_product(m, (tuple(range(p * q)), tuple(range(0, m, p * q))), r, small_pairs(r)[1])
    add(transversal, "coset_union_of_transversal")
    base_target = size - size // 4
    while len(out) < base_target:
        pair = _random_pair(rng, factors)
        if rng.random() < 0.3:
            add((pair[1], pair[0]), "dual")
        else:
            add(pair, "twisted")
    units = [u for u in range(2, n) if math.gcd(u, n) == 1]
    base_entries = list(out)
    while len(out) < size:
        e = rng.choice(base_entries)
        pair = dilate_pair(n, (e.S, e.spectrum), rng.choice(units))
        pair = translate_pair(n, pair, rng.randrange(n), rng.randrange(n))
        add(pair, f"{e.kind}+dilate")
    return out


def z1332_corpus(size: int = 300, seed: int = 0) -> list[CorpusEntry]:
    return pqr_corpus(2, 3, 37, size, seed)
