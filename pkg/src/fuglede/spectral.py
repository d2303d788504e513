"""Exact Fourier zeros, spectra and log-Hadamard matrices.

Characters of G are identified with elements of G through the pairing
``<l, s> = sum_i l_i s_i (N / n_i) mod N`` where N is the exponent. A
character sum vanishes exactly when ``Phi_N`` divides the polynomial
``sum_s w(s) x^<l, s>``, so no floating point is involved anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator

import numpy as np
from sympy import isprime

from . import cyclo
from .groups import Element, Group, WeightedSet
from .polyarith import poly_divmod


@dataclass(frozen=True)
class CharacterPairing:
    group: Group

    @property
    def exponent(self) -> int:
        return self.group.exponent

    def __call__(self, lam: Element, s: Element) -> int:
        N = self.group.exponent
        return sum(a * b * (N // n) for a, b, n in zip(lam, s, self.group.orders)) % N


@dataclass(frozen=True)
class SpectralCertificate:
    spectrum: tuple[Element, ...]

    def __len__(self):
        return len(self.spectrum)


def _character_poly(S: WeightedSet, lam: Element) -> np.ndarray:
    pair = CharacterPairing(S.group)
    coeffs = np.zeros(S.group.exponent, dtype=np.int64)
    for s, w in S.weights.items():
        coeffs[pair(lam, s)] += w
    return coeffs


def fourier_zero(S: WeightedSet, lam) -> bool:
    """Whether the character sum of S at lam is exactly zero."""
    lam = S.group.element(lam)
    N = S.group.exponent
    coeffs = _character_poly(S, lam)
    if N == 1:
        return not coeffs.any()
    return cyclo.divides(cyclo.MaskPoly(N, coeffs), N)


@lru_cache(maxsize=4096)
def zero_set(S: WeightedSet) -> frozenset[Element]:
    g = S.group
    if g.is_cyclic_factor:
        n = g.orders[0]
        D = cyclo.divisor_profile(S)
        return frozenset((x,) for x in range(n) if n // math.gcd(x, n) in D)
    return frozenset(lam for lam in g.elements() if fourier_zero(S, lam))


def _cyclic_zero_test(n: int, profile: frozenset[int]):
    return lambda x: n // math.gcd(x, n) in profile


# ---------------------------------------------------------------------------
# clique search


def _greedy_colour(order: list[int], P: int, adj: list[int]) -> tuple[list[int], list[int]]:
    """Colour the vertices of P (in the given order) greedily; returns vertices
    sorted by colour together with their colour numbers."""
    verts, colours = [], []
    uncoloured = P
    colour = 0
    while uncoloured:
        colour += 1
        avail = uncoloured
        for v in order:
            if avail >> v & 1:
                verts.append(v)
                colours.append(colour)
                uncoloured &= ~(1 << v)
                avail &= ~adj[v] & ~(1 << v)
    return verts, colours


def find_cliques(adj: list[int], need: int, order: list[int] | None = None) -> Iterator[list[int]]:
    """Yield cliques of exactly ``need`` vertices (as index lists).

    Branch and bound with a greedy colouring bound; ``order`` fixes the
    branching priority so the enumeration is deterministic.
    """
    nv = len(adj)
    if order is None:
        order = sorted(range(nv), key=lambda v: (-bin(adj[v]).count("1"), v))
    if need <= 0:
        yield []
        return

    def expand(R: list[int], P: int) -> Iterator[list[int]]:
        verts, colours = _greedy_colour(order, P, adj)
        for i in range(len(verts) - 1, -1, -1):
            if len(R) + colours[i] < need:
                return
            v = verts[i]
            R.append(v)
            if len(R) == need:
                yield list(R)
            else:
                newP = P & adj[v]
                if newP:
                    yield from expand(R, newP)
            R.pop()
            P &= ~(1 << v)

    yield from expand([], (1 << nv) - 1)


def _neighbourhood_graph(g: Group, zeros: frozenset[Element]):
    cand = sorted(zeros)
    idx = {x: i for i, x in enumerate(cand)}
    adj = [0] * len(cand)
    for i, x in enumerate(cand):
        bits = 0
        for z in zeros:
            y = g.add(x, z)
            j = idx.get(y)
            if j is not None:
                bits |= 1 << j
        adj[i] = bits & ~(1 << i)
    return cand, adj


@lru_cache(maxsize=None)
def _spectrum_search(g: Group, zeros: frozenset[Element], k: int, limit: int) -> tuple:
    if k == 1:
        return ((g.zero,),)
    if len(zeros) < k - 1:
        return ()
    cand, adj = _neighbourhood_graph(g, zeros)
    found = []
    for clique in find_cliques(adj, k - 1):
        found.append(tuple(sorted([g.zero] + [cand[i] for i in clique])))
        if len(found) >= limit:
            break
    return tuple(sorted(found))


def is_spectral(S: WeightedSet) -> SpectralCertificate | None:
    """Exhaustive search for a spectrum containing 0; None proves non-spectrality."""
    if not S.is_set or S.total == 0:
        raise ValueError("is_spectral needs a nonempty set")
    found = _spectrum_search(S.group, zero_set(S), S.total, 1)
    return SpectralCertificate(found[0]) if found else None


def enumerate_spectra(S: WeightedSet, limit: int = 100) -> list[SpectralCertificate]:
    """Up to ``limit`` spectra containing 0, in canonical order."""
    if not S.is_set or S.total == 0:
        raise ValueError("enumerate_spectra needs a nonempty set")
    return [SpectralCertificate(c) for c in _spectrum_search(S.group, zero_set(S), S.total, limit)]


@lru_cache(maxsize=None)
def cyclic_spectral_by_profile(n: int, profile: frozenset[int], k: int) -> tuple[int, ...] | None:
    """Spectrum search in Z_n driven only by the divisibility profile of the set.

    Sets with equal profile and size have identical zero sets, so scans share
    one clique search per (profile, size).
    """
    g = Group((n,))
    zeros = frozenset((x,) for x in range(1, n) if n // math.gcd(x, n) in profile)
    found = _spectrum_search(g, zeros, k, 1)
    return tuple(x[0] for x in found[0]) if found else None


def verify_spectral_pair(S: WeightedSet, Lam: WeightedSet | Iterable) -> bool:
    g = S.group
    if not isinstance(Lam, WeightedSet):
        Lam = WeightedSet.from_elements(g, Lam)
    if Lam.group != g or not S.is_set or not Lam.is_set:
        return False
    if Lam.total != S.total:
        return False
    pts = Lam.support
    if g.is_cyclic_factor:
        n = g.orders[0]
        test = _cyclic_zero_test(n, cyclo.divisor_profile(S))
        return all(test((a[0] - b[0]) % n) for i, a in enumerate(pts) for b in pts[i + 1:])
    zeros = zero_set(S) if len(pts) ** 2 > 2 * g.size else None
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            d = g.sub(a, b)
            ok = d in zeros if zeros is not None else fourier_zero(S, d)
            if not ok:
                return False
    return True


def gram_matrix(S: WeightedSet, Lam: Iterable) -> list[list[tuple[int, ...]]]:
    """Gram matrix of the characters in Lam restricted to S.

    Entries are cyclotomic integers written as coefficient tuples of the
    reduced representative modulo Phi_N.
    """
    g = S.group
    N = g.exponent
    lams = [g.element(x) for x in Lam]
    phi = cyclo.cyclotomic(N).array()
    out = []
    for a in lams:
        row = []
        for b in lams:
            coeffs = _character_poly(S, g.sub(a, b))
            _, r = poly_divmod(coeffs, phi)
            r = [int(c) for c in r]
            while r and r[-1] == 0:
                r.pop()
            row.append(tuple(r))
        out.append(row)
    return out


def gram_is_scalar(S: WeightedSet, Lam: Iterable) -> bool:
    G = gram_matrix(S, Lam)
    size = S.total
    for i, row in enumerate(G):
        for j, entry in enumerate(row):
            want = (size,) if i == j else ()
            if entry != want:
                return False
    return True


# ---------------------------------------------------------------------------
# log-Hadamard matrices


def _balanced(vec: tuple[int, ...], t: int) -> bool:
    counts = [0] * t
    for v in vec:
        counts[v] += 1
    return len(set(counts)) == 1


def log_hadamard_search(k: int, t: int) -> list[list[int]] | None:
    """A k x k matrix over Z_t with zero first row and column whose distinct
    rows have balanced differences (every symbol equally often)."""
    if k < 1:
        raise ValueError("size must be >= 1")
    if not isprime(t):
        raise ValueError(f"alphabet order {t} must be prime")
    if k == 1:
        return [[0]]
    if k % t:
        return None
    cands = [(0,) + rest for rest in product(range(t), repeat=k - 1)
             if _balanced((0,) + rest, t)]
    diff_ok = {}

    def compatible(a, b):
        key = (a, b)
        if key not in diff_ok:
            diff_ok[key] = _balanced(tuple((x - y) % t for x, y in zip(a, b)), t)
        return diff_ok[key]

    adj = [0] * len(cands)
    for i, a in enumerate(cands):
        for j, b in enumerate(cands):
            if i != j and compatible(a, b):
                adj[i] |= 1 << j
    for clique in find_cliques(adj, k - 1, order=list(range(len(cands)))):
        rows = [cands[i] for i in sorted(clique)]
        return [[0] * k] + [list(r) for r in rows]
    return None


def hadamard_columns(L: list[list[int]], t: int) -> WeightedSet:
    """The columns of a log-Hadamard matrix as a subset of Z_t^k."""
    k = len(L)
    g = Group((t,) * k)
    return WeightedSet.from_elements(g, [tuple(L[i][j] for i in range(k)) for j in range(k)])


def hadamard_rows_spectrum(L: list[list[int]], t: int) -> list[Element]:
    """Spectrum for the column set: the standard basis vectors, with the
    zero row's vector replaced by 0."""
    k = len(L)
    out = []
    for i in range(k):
        if all(v == 0 for v in L[i]):
            out.append((0,) * k)
        else:
            out.append(tuple(1 if j == i else 0 for j in range(k)))
    return out

