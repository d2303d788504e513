"""Translational tilings: exact-cover search, verification and constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from sympy import isprime

from . import cyclo
from .groups import Element, Group, WeightedSet, make_group


@dataclass(frozen=True)
class TilingCertificate:
    complement: tuple[Element, ...]

    def __len__(self):
        return len(self.complement)

    def ints(self) -> list[int]:
        return [x[0] for x in self.complement]


def _index_maps(g: Group):
    elems = list(g.elements())
    return elems, {x: i for i, x in enumerate(elems)}


def _exact_cover(n_cells: int, placements: list[int], covering: list[list[int]],
                 first: int | None) -> Iterator[list[int]]:
    """Yield sets of placement ids partitioning the cells.

    Branches on the uncovered cell with the fewest admissible placements;
    ties go to the lowest cell so results are reproducible.
    """
    full = (1 << n_cells) - 1

    def search(covered: int, chosen: list[int]) -> Iterator[list[int]]:
        if covered == full:
            yield list(chosen)
            return
        best, best_opts = -1, None
        free = ~covered & full
        while free:
            low = free & -free
            c = low.bit_length() - 1
            free ^= low
            opts = [g for g in covering[c] if not placements[g] & covered]
            if best_opts is None or len(opts) < len(best_opts):
                best, best_opts = c, opts
                if len(opts) <= 1:
                    break
        for g in best_opts:
            chosen.append(g)
            yield from search(covered | placements[g], chosen)
            chosen.pop()

    if first is None:
        yield from search(0, [])
    else:
        yield from search(placements[first], [first])


def _cyclic_reduce(n: int, pts: list[int]):
    """Shift so 0 is in the set and shrink to the generated subgroup."""
    base = pts[0]
    shifted = sorted((x - base) % n for x in pts)
    g = n
    for x in shifted:
        g = math.gcd(g, x)
    return base, g, [x // g for x in shifted]


def _cyclic_tile(n: int, pts: list[int], limit: int = 1) -> list[list[int]]:
    k = len(pts)
    if n % k:
        return []
    base, step, reduced = _cyclic_reduce(n, pts)
    if step > 1:
        m = n // step
        sub = _cyclic_tile(m, reduced, limit) if m > 1 else [[0]]
        out = []
        for T in sub:
            # complement inside the subgroup, then coset representatives
            out.append(sorted(t * step + j for t in T for j in range(step)))
        return out
    mask = 0
    for x in reduced:
        mask |= 1 << x
    full = (1 << n) - 1
    placements = [((mask << g) | (mask >> (n - g))) & full if g else mask for g in range(n)]
    covering = [sorted({(c - s) % n for s in reduced}) for c in range(n)]
    out = []
    for sol in _exact_cover(n, placements, covering, first=0):
        out.append(sorted(sol))
        if len(out) >= limit:
            break
    return out


def is_tile(S: WeightedSet) -> TilingCertificate | None:
    """Exhaustive exact-cover search for a complement containing 0."""
    sols = tiling_complements(S, limit=1)
    return sols[0] if sols else None


def tiling_complements(S: WeightedSet, limit: int = 1) -> list[TilingCertificate]:
    if not S.is_set or S.total == 0:
        raise ValueError("tiling search needs a nonempty set")
    g = S.group
    if g.size % S.total:
        return []
    if g.is_cyclic_factor:
        return [TilingCertificate(tuple((t,) for t in T))
                for T in _cyclic_tile(g.orders[0], S.ints(), limit)]
    elems, index = _index_maps(g)
    pts = S.support
    placements = []
    for t in elems:
        m = 0
        for s in pts:
            m |= 1 << index[g.add(s, t)]
        placements.append(m)
    covering = [[index[g.sub(c, s)] for s in pts] for c in elems]
    out = []
    for sol in _exact_cover(len(elems), placements, covering, first=index[g.zero]):
        out.append(TilingCertificate(tuple(sorted(elems[i] for i in sol))))
        if len(out) >= limit:
            break
    return out


def verify_tiling(S: WeightedSet | Iterable, T: Iterable, group: Group | None = None) -> bool:
    """Every element of G is uniquely s + t."""
    if isinstance(S, WeightedSet):
        g = S.group
        if not S.is_set:
            return False
        pts = S.support
    else:
        if group is None:
            raise ValueError("group required when S is not a WeightedSet")
        g = group
        pts = [g.element(x) for x in S]
    if isinstance(T, TilingCertificate):
        T = T.complement
    elif isinstance(T, WeightedSet):
        if not T.is_set:
            return False
        T = T.support
    comp = [g.element(x) for x in T]
    if len(set(pts)) != len(pts) or len(set(comp)) != len(comp):
        return False
    if len(pts) * len(comp) != g.size:
        return False
    seen = set()
    for s in pts:
        for t in comp:
            y = g.add(s, t)
            if y in seen:
                return False
            seen.add(y)
    return True


def cyclic_verify_tiling(n: int, S: Iterable[int], T: Iterable[int]) -> bool:
    S, T = list(S), list(T)
    if len(S) * len(T) != n:
        return False
    return len({(s + t) % n for s in S for t in T}) == n


def quotient_complement(n: int, pts: list[int], m: int) -> list[int] | None:
    """Complement of a set whose projection to Z_m is injective.

    Tiles the projection inside Z_m by exact cover and lifts: the lift of the
    quotient complement plus the kernel (the order n/m subgroup) tiles Z_n.
    """
    proj = sorted({x % m for x in pts})
    if len(proj) != len(pts):
        return None
    if m == 1:
        sub = [[0]]
    else:
        sub = _cyclic_tile(m, proj)
    if not sub:
        return None
    return sorted(t + j * m for t in sub[0] for j in range(n // m))


def tile_from_coset_union(S: WeightedSet, p: int) -> TilingCertificate | None:
    """Complement for a union of cosets of the order-p subgroup of Z_n.

    The set is a union of cosets exactly when it is invariant under the
    subgroup; the quotient set in Z_{n/p} is tiled by exact cover and its
    complement, read as integers in [0, n/p), tiles Z_n.
    """
    n = S.group.require_cyclic()
    if not isprime(p) or n % p:
        raise ValueError(f"{p} is not a prime divisor of {n}")
    pts = set(S.ints())
    step = n // p
    if any((x + step) % n not in pts for x in pts):
        return None
    m = n // p
    quotient = sorted({x % m for x in pts})
    if len(quotient) == m:
        return TilingCertificate(((0,),))
    sub = _cyclic_tile(m, quotient)
    if not sub:
        return None
    return TilingCertificate(tuple((t,) for t in sub[0]))


def shi_hypothesis(S, u: int) -> bool:
    """For every m | n coprime to u: Phi_{mu} | m_S implies Phi_m | m_S."""
    M = S if isinstance(S, cyclo.MaskPoly) else cyclo.mask_poly(S)
    n = M.n
    for m in cyclo._divisors(n):
        if math.gcd(m, u) != 1 or n % (m * u):
            continue
        if cyclo.divides(M, m * u) and not cyclo.divides(M, m):
            return False
    return True


def shi_reduction(S: WeightedSet, u: int) -> TilingCertificate | None:
    """Tile S through the dilate uS when the divisibility hypothesis holds.

    uS sits in the index-u subgroup uZ_n; identifying that subgroup with
    Z_{n/u} (divide by u) turns uS into the reduction of S mod n/u. A
    complement T there, read as integers in [0, n/u), plus the order-u
    subgroup, is a complement of S. Returns None when the hypothesis fails
    or when uS collapses points, which the hypothesis rules out only for
    spectral S.
    """
    n = S.group.require_cyclic()
    if not isprime(u) or n % u:
        raise ValueError(f"{u} is not a prime divisor of {n}")
    if S.total % u == 0:
        raise ValueError(f"u={u} divides |S|={S.total}")
    if not shi_hypothesis(S, u):
        return None
    m = n // u
    pts = S.ints()
    uS = sorted({u * x % n for x in pts})
    if len(uS) != len(pts):
        return None
    reduced = sorted(x // u for x in uS)
    sub = _cyclic_tile(m, reduced) if m > 1 else [[0]]
    if not sub:
        return None
    T = sorted(t + j * m for t in sub[0] for j in range(u))
    return TilingCertificate(tuple((t,) for t in T))


def cyclic_group(n: int) -> Group:
    return make_group([n])
