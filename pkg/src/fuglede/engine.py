"""Constructive spectral-to-tile replay for Z_{p^2 q^2 r} with p^2 q^2 < r.

Every structural fact the argument relies on is recomputed on the input
before it is used; a failed check raises ``InternalContradiction`` carrying
the trace so far. Coset language: a "Z_m coset" is a coset of the unique
order-m subgroup ``(n/m) Z_n``, i.e. a residue class mod n/m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from sympy import factorint, isprime

from . import cyclo
from .groups import WeightedSet, projection_counts
from .spectral import verify_spectral_pair
from .structure import find_pair_coprime_diff, laba_marshall_check, padic_complement, padic_digit_structure
from .tiling import (TilingCertificate, _cyclic_tile, cyclic_verify_tiling, quotient_complement,
                     shi_hypothesis, shi_reduction, tile_from_coset_union)


class EngineError(Exception):
    def __init__(self, message: str, trace: "CaseTrace | None" = None):
        super().__init__(message)
        self.trace = trace


class NotSpectral(EngineError):
    pass


class InternalContradiction(EngineError):
    """A fact the argument guarantees failed on the input."""


class UncoveredCase(EngineError):
    """The input reaches a branch the written argument does not treat."""


class EngineHypothesisError(EngineError):
    pass


@dataclass(frozen=True)
class PqrContext:
    p: int
    q: int
    r: int

    def __post_init__(self):
        primes = (self.p, self.q, self.r)
        if len(set(primes)) != 3 or not all(isprime(x) for x in primes):
            raise ValueError(f"{primes} must be three distinct primes")

    @property
    def n(self) -> int:
        return self.p ** 2 * self.q ** 2 * self.r

    @property
    def hypothesis_ok(self) -> bool:
        return self.p ** 2 * self.q ** 2 < self.r

    def swapped(self) -> "PqrContext":
        return PqrContext(self.q, self.p, self.r)


@dataclass
class Step:
    case: str
    lemma: str
    facts: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"case": self.case, "lemma": self.lemma, "facts": _jsonable(self.facts)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_jsonable(v) for v in items]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


@dataclass
class CaseTrace:
    steps: list[Step] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    certificate: TilingCertificate | None = None

    def add(self, case: str, lemma: str, **facts) -> Step:
        step = Step(case, lemma, facts)
        self.steps.append(step)
        return step

    @property
    def cases(self) -> list[str]:
        return [s.case for s in self.steps]

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self.steps]


# ---------------------------------------------------------------------------
# coset bookkeeping


def coset_counts(n: int, pts, m: int) -> list[int]:
    """Points of the set in each coset of the order-m subgroup."""
    return projection_counts(n, n // m, pts)


def coset_pieces(n: int, pts, m: int) -> dict[int, list[int]]:
    """Nonempty intersections with cosets of the order-m subgroup, each read
    as a subset of Z_m: x = c + (n/m) y with c = x mod n/m."""
    h = n // m
    out: dict[int, list[int]] = {}
    for x in sorted(pts):
        out.setdefault(x % h, []).append(x // h)
    return out


def _is_coset_union(n: int, pts, m: int) -> bool:
    step = n // m
    s = set(pts)
    return all((x + step) % n in s for x in s)


def _piece_kind(piece: list[int], s: int) -> str:
    """Type of an s-point piece of Z_{s^2}: one Z_s coset or a Z_s transversal."""
    residues = {y % s for y in piece}
    if len(piece) == s and len(residues) == 1:
        return "coset"
    if len(piece) == s and len(residues) == s:
        return "transversal"
    return "other"


def _common_complement(m: int, pieces: list[list[int]], limit: int = 4096) -> list[int] | None:
    first = pieces[0]
    for T in _cyclic_tile(m, first, limit):
        if all(cyclic_verify_tiling(m, Y, T) for Y in pieces[1:]):
            return T
    return None


def layered_complement(n: int, pts, chain: list[int]) -> list[int] | None:
    """Fill cosets of a subgroup chain level by level.

    At each level the pieces of the current set in the cosets of the
    order-m subgroup must share a complement T_m inside Z_m; then the set
    plus T_m is a union of whole cosets and the problem passes to the
    quotient Z_{n/m}. The last quotient is tiled by exact cover. The result
    is ``sum_levels (n/m) T_m`` lifted through the quotients.
    """
    pts = sorted(set(pts))
    if not chain:
        sols = _cyclic_tile(n, pts) if n > 1 else [[0]]
        return sols[0] if sols else None
    m, rest = chain[0], chain[1:]
    if n % m:
        raise ValueError(f"{m} does not divide {n}")
    h = n // m
    pieces = coset_pieces(n, pts, m)
    TH = _common_complement(m, list(pieces.values()))
    if TH is None:
        return None
    TQ = layered_complement(h, sorted(pieces), rest) if h > 1 else [0]
    if TQ is None:
        return None
    return sorted((h * t + u) % n for t in TH for u in TQ)


def gcd_class(ctx: PqrContext, S: WeightedSet) -> int:
    if S.total == 0:
        raise ValueError("empty set")
    return math.gcd(ctx.n, S.total)


@dataclass(frozen=True)
class TableRow:
    base: int
    indices: tuple[int, int, int]
    over_z: tuple[bool, bool, bool]
    over_fq: bool

    @property
    def any_over_z(self) -> bool:
        return any(self.over_z)

    @property
    def implication_ok(self) -> bool:
        return self.over_fq or not self.any_over_z


def divisibility_table(ctx: PqrContext, Lam) -> list[TableRow]:
    """Rows for base indices p, pr, p^2, p^2 r: divisibility of m_Lam by
    Phi_{base}, Phi_{base q}, Phi_{base q^2} over Z, and by Phi_{base} over F_q."""
    p, q, r = ctx.p, ctx.q, ctx.r
    M = Lam if isinstance(Lam, cyclo.MaskPoly) else cyclo.mask_poly(Lam)
    rows = []
    for base in (p, p * r, p * p, p * p * r):
        idx = (base, base * q, base * q * q)
        over_z = tuple(cyclo.divides(M, d) for d in idx)
        rows.append(TableRow(base, idx, over_z, cyclo.divides_mod_p(M, base, q)))
    return rows


# ---------------------------------------------------------------------------
# driver


class _Run:
    def __init__(self, ctx: PqrContext, S: list[int], L: list[int], trace: CaseTrace):
        self.ctx = ctx
        self.n = ctx.n
        self.S = S
        self.L = L
        self.trace = trace
        self.MS = cyclo.mask_from_ints(self.n, S)
        self.ML = cyclo.mask_from_ints(self.n, L)

    def fail(self, message: str, **facts):
        self.trace.add("CLAIM_FAILED", message, **facts)
        raise InternalContradiction(message, self.trace)

    def uncovered(self, message: str, **facts):
        self.trace.add("UNCOVERED", message, **facts)
        raise UncoveredCase(message, self.trace)

    def div_S(self, d: int) -> bool:
        return cyclo.divides(self.MS, d)

    def div_L(self, d: int) -> bool:
        return cyclo.divides(self.ML, d)

    def subgroup(self, order: int) -> list[int]:
        step = self.n // order
        return list(range(0, self.n, step))

    # -- reductions ---------------------------------------------------------

    def reduce_in_subgroup(self, reason: str) -> list[int]:
        h = self.n // _gcd_all(self.n, self.S)
        if h == self.n:
            self.fail("set expected inside a proper subgroup", reason=reason)
        sols = _cyclic_tile(self.n, self.S)
        self.trace.add("SUBGROUP_REDUCTION", "set inside a proper subgroup tiles by induction",
                       reason=reason, subgroup_order=h, found=bool(sols))
        if not sols:
            self.fail("no complement inside the generated subgroup", subgroup_order=h)
        return sols[0]

    def reduce_by_spectrum_subgroup(self, reason: str) -> list[int]:
        k = self.n // _gcd_all(self.n, self.L)
        if k == self.n:
            self.fail("spectrum expected inside a proper subgroup", reason=reason)
        T = quotient_complement(self.n, self.S, k)
        self.trace.add("SPECTRUM_SUBGROUP_REDUCTION", "spectrum inside a proper subgroup",
                       reason=reason, quotient_order=k, found=T is not None)
        if T is None:
            self.fail("projection to the quotient is not a tile", quotient_order=k)
        return T

    # -- large sets ---------------------------------------------------------

    def large(self, d: int) -> list[int]:
        p, q, r, n = self.ctx.p, self.ctx.q, self.ctx.r, self.n
        (s, j), = factorint(n // d).items()
        size = len(self.S)
        if j == 1 and s in (p, q):
            tag = "LARGE_p2qr" if s == q else "LARGE_pq2r"
            counts = coset_counts(n, self.S, s * s)
            if max(counts) > s:
                self.fail(f"a Z_{s * s} coset holds more than {s} points", counts_max=max(counts))
            if min(counts) != s:
                self.fail(f"Z_{s * s} cosets do not all hold {s} points", counts_min=min(counts))
            no_s = not self.div_L(s)
            no_s2 = not self.div_L(s * s)
            if not (no_s or no_s2):
                self.fail(f"both Phi_{s} and Phi_{s * s} divide m_Lambda")
            kinds = {_piece_kind(y, s) for y in coset_pieces(n, self.S, s * s).values()}
            self.trace.add(tag, "pigeonhole on Z_{s^2} cosets", prime=s, piece_kinds=kinds,
                           phi_s_divides_lambda=not no_s, phi_s2_divides_lambda=not no_s2)
            if kinds == {"transversal"}:
                return self.subgroup(s)
            if kinds == {"coset"}:
                cert = tile_from_coset_union(WeightedSet.from_ints(n, self.S), s)
                if cert is None:
                    self.fail(f"Z_{s} coset union without complement")
                return cert.ints()
            self.fail("pieces are neither all transversals nor all cosets", piece_kinds=kinds)
        if (j == 2 and s in (p, q)) or (j == 1 and s == r):
            m = s ** j
            tag = {p: "LARGE_q2r", q: "LARGE_p2r", r: "LARGE_p2q2"}[s]
            counts = coset_counts(n, self.S, m)
            self.trace.add(tag, "projection along the missing prime power is a set",
                           missing=m, counts_max=max(counts), size=size)
            if max(counts) > 1:
                self.fail(f"two points share a Z_{m} coset although {s} does not divide |S|")
            if size != n // m:
                self.fail("size differs from the index", size=size, index=n // m)
            return self.subgroup(m)
        T, steps = _big_set(n, self.S, self.L)
        self.trace.steps.extend(steps)
        return T

    # -- r does not divide |S| ------------------------------------------------

    def shi(self) -> list[int]:
        n, r = self.n, self.ctx.r
        if shi_hypothesis(self.MS, r):
            cert = shi_reduction(WeightedSet.from_ints(n, self.S), r)
            self.trace.add("SHI_REDUCTION", "dilation by r lands in a proper subgroup",
                           found=cert is not None)
            if cert is None:
                self.fail("dilated set collapses or does not tile its subgroup")
            return cert.ints()
        witness = None
        for m in cyclo._divisors(n):
            if math.gcd(m, r) == 1 and n % (m * r) == 0 and self.div_S(m * r) and not self.div_S(m):
                witness = m
                break
        report = laba_marshall_check(WeightedSet.from_ints(n, self.S), r, witness)
        self.trace.add("SHI_HYPOTHESIS_FAILS", "every index-r coset meets S",
                       m=witness, holds=report.holds, uncovered=report.uncovered_classes)
        if not report.holds:
            self.fail("index-r coset missed by S", m=witness)
        pair = _pair_in_same_coset(n, self.S, r)
        if pair is None:
            self.uncovered("no two points share a Z_r coset", size=len(self.S))
        phi_r = self.div_L(r)
        self.fail("r does not divide |S| although Phi_r | m_Lambda is forced",
                  pair=pair, phi_r_divides_lambda=phi_r)

    def phi_r(self):
        r = self.ctx.r
        fs, fl = self.div_S(r), self.div_L(r)
        self.trace.add("PHI_R", "r | |S| with more points than Z_r cosets", phi_r_S=fs, phi_r_Lambda=fl)
        if not (fs and fl):
            self.fail("Phi_r does not divide both masks", phi_r_S=fs, phi_r_Lambda=fl)

    # -- gcd class r ---------------------------------------------------------

    def r_exact(self) -> list[int]:
        n, p, q, r = self.n, self.ctx.p, self.ctx.q, self.ctx.r
        if self.div_S(n):
            self.trace.add("R_EXACT", "Phi_n | m_S: union of Z_r cosets")
            return claim_union_zr(self.ctx, WeightedSet.from_ints(n, self.S),
                                  WeightedSet.from_ints(n, self.L), self.trace).ints()
        if self.div_L(n):
            residues = {x % r for x in self.S}
            self.trace.add("R_EXACT", "Phi_n | m_Lambda: transversal of Z_{p^2q^2} cosets",
                           size=len(self.S), residues=len(residues))
            if len(self.S) != r or len(residues) != r:
                self.fail("S is not a transversal of the Z_{p^2q^2} cosets")
            return self.subgroup(p * p * q * q)
        pair = find_pair_coprime_diff(WeightedSet.from_ints(n, self.S), p, q)
        self.trace.add("R_EXACT", "coprime difference pair", pair=pair)
        if pair is None:
            return self.reduce_in_subgroup("no pair with difference prime to p and q")
        self.fail("gcd class r with Phi_n dividing neither mask",
                  pair=pair, phi_p2q2_S=self.div_S(p * p * q * q))

    # -- gcd class pr (or qr) ------------------------------------------------

    def pr_case(self, a: int, b: int) -> list[int]:
        n, r = self.n, self.ctx.r
        size = len(self.S)
        self.trace.add("PR_CASE", "gcd class a r", a=a, b=b, swapped=a != self.ctx.p)
        for d in (b, b * b):
            if self.div_L(d) or self.div_S(d):
                self.fail(f"Phi_{d} divides a mask although {b} does not divide |S|")
        if max(coset_counts(n, self.S, b * b)) > 1:
            self.fail(f"projection to Z_{a * a * r} is not a set")
        m = a * a * r
        counts = coset_counts(n, self.S, a * a * b * b)
        rel = {d: cyclo.divides_mod_p(self.ML, d, b) for d in (a, a * a, r, a * r, a * a * r)}
        facts = dict(counts_max=max(counts), counts_min=min(counts), mod_b=rel)
        if max(counts) > a or all(rel.values()):
            kl = cyclo.mod_p_size_constraint(WeightedSet.from_ints(n, self.L), b, m)
            self.fail("mod-b relations force |S| = k a^2 r + l b", size_constraint=kl, **facts)
        if min(counts) != a or size != a * r:
            self.fail("Z_{a^2} cosets of the projection do not all hold a points", size=size, **facts)
        self.trace.add("PR_CASE", "each Z_{a^2} coset of the projection holds a points", **facts)
        if not rel[a]:
            if len({x % (a * r) for x in self.S}) != size:
                self.fail("projection is not a Z_a transversal")
            T = sorted(u * (m // a) + j * m for u in range(a) for j in range(n // m))
            self.trace.add("PR_CASE", "projection is a Z_a transversal", complement_size=len(T))
            return T
        if not rel[a * a]:
            return self.reduce_in_subgroup(f"Phi_{a * a} fails mod {b}")
        self.fail("remaining mod-b relation fails although it is forced", **facts)

    # -- gcd class pqr -------------------------------------------------------

    def pqr_case(self) -> list[int]:
        n, p, q, r = self.n, self.ctx.p, self.ctx.q, self.ctx.r
        size = len(self.S)
        table = divisibility_table(self.ctx, self.ML)
        facts = {"rows": [(row.base, row.over_z, row.over_fq) for row in table]}
        if not all(row.implication_ok for row in table):
            self.fail("a table row holds over Z but not over F_q", **facts)
        cp, cq = coset_counts(n, self.S, p * p), coset_counts(n, self.S, q * q)
        facts.update(max_per_p2=max(cp), max_per_q2=max(cq))
        if max(cp) > p or max(cq) > q:
            self.fail("a Z_{p^2} or Z_{q^2} coset is overfull", **facts)
        if all(row.any_over_z for row in table):
            kl = cyclo.mod_p_size_constraint(WeightedSet.from_ints(n, self.L), q, p * p * r)
            self.trace.add("PQR_TABLE_CASE1", "every row has a divisibility", size_constraint=kl, **facts)
            if kl is None:
                self.fail("mod-q relations fail in the first table case")
            return self.pqr_case1(kl[0])
        first = next(i for i, row in enumerate(table) if not row.any_over_z)
        tag = f"PQR_SUBCASE_{first + 1}"
        self.trace.add(tag, "a table row fails entirely", **facts)
        return [self.subcase1, self.subcase2, self.subcase3, self.subcase4][first](tag)

    def _q_structure(self, s: int) -> str | None:
        """'union' when S is a union of Z_s cosets, 'transversal' when every
        occupied Z_{s^2} coset holds a Z_s transversal, else None."""
        n = self.n
        if _is_coset_union(n, self.S, s):
            return "union"
        kinds = {_piece_kind(y, s) for y in coset_pieces(n, self.S, s * s).values()}
        return "transversal" if kinds == {"transversal"} else None

    def pqr_case1(self, k: int) -> list[int]:
        n, p, q, r = self.n, self.ctx.p, self.ctx.q, self.ctx.r
        counts = coset_counts(n, self.S, q * q)
        if k > 0 and min(counts) != q:
            self.fail("k > 0 but a Z_{q^2} coset does not hold q points", k=k)
        if any(c not in (0, q) for c in counts):
            self.fail("Z_{q^2} coset sizes outside {0, q}", k=k)
        kind_q = self._q_structure(q)
        self.trace.add("PQR_TABLE_CASE1", "Z_{q^2} pieces", k=k, kind=kind_q)
        if kind_q == "union":
            return tile_from_coset_union(WeightedSet.from_ints(n, self.S), q).ints()
        if kind_q is None:
            self.fail("mixed Z_{q^2} pieces")
        if k > 0:
            return self.subgroup(q)
        if any(c not in (0, p) for c in coset_counts(n, self.S, p * p)):
            self.uncovered("Z_{p^2} coset sizes outside {0, p} after swapping p and q")
        kind_p = self._q_structure(p)
        self.trace.add("PQR_TABLE_CASE1", "Z_{p^2} pieces (p and q swapped)", kind=kind_p)
        if kind_p == "union":
            return tile_from_coset_union(WeightedSet.from_ints(n, self.S), p).ints()
        if kind_p is None:
            self.uncovered("mixed Z_{p^2} pieces after swapping p and q")
        if len(self.S) == p * q * r:
            counts_pq = coset_counts(n, self.S, p * q)
            if set(counts_pq) != {1}:
                self.fail("|S| = pqr but S is not a Z_pq transversal")
            self.trace.add("PQR_TABLE_CASE1", "|S| = pqr: transversal of Z_pq cosets")
            return self.subgroup(p * q)
        self.trace.add("PQR_TABLE_CASE1", "|S| > pqr: union of Z_r cosets")
        return claim_union_zr(self.ctx, WeightedSet.from_ints(n, self.S),
                              WeightedSet.from_ints(n, self.L), self.trace).ints()

    def _layered(self, tag: str, chain: list[int]) -> list[int]:
        T = layered_complement(self.n, self.S, chain)
        self.trace.add(tag, "common complement level by level", chain=chain, found=T is not None)
        if T is None:
            self.fail("pieces have no common complement", chain=chain)
        return T

    def subcase1(self, tag: str) -> list[int]:
        n, p, q, r = self.n, self.ctx.p, self.ctx.q, self.ctx.r
        per_block = coset_pieces(n, self.S, p * q * q)
        occupied = [len(set(_subpieces(Y, p * q * q, q * q))) for Y in per_block.values()]
        self.trace.add(tag, "each Z_{pq^2} coset meets one Z_{q^2} coset",
                       occupied_max=max(occupied), size=len(self.S))
        if max(occupied) > 1 or len(self.S) != p * q * r:
            self.fail("subcase 1 structure fails")
        return self._layered(tag, [q * q])

    def subcase2(self, tag: str) -> list[int]:
        n, p, q, r = self.n, self.ctx.p, self.ctx.q, self.ctx.r
        l, other = 0, 0
        for c in range(p):
            part = [x for x in self.S if x % p == c]
            if part and _gcd_all(n, part) % (p * r) == 0:
                l += 1
            elif part and _gcd_all(n, part) % (p * p) == 0:
                other += 1
            elif part:
                self.fail("a Z_{pq^2 r} coset piece lies in neither a Z_{pq^2} nor a Z_{q^2 r} coset")
        bound = l * p * q + (p - l) * q * r
        self.trace.add(tag, "size bound |S| <= l pq + (p - l) qr", l=l, bound=bound, size=len(self.S))
        if len(self.S) > bound or len(self.S) != p * q * r or l != 0:
            self.fail("subcase 2 counting fails", l=l, bound=bound)
        return self._layered(tag, [q * q])

    def subcase3(self, tag: str) -> list[int]:
        n, p, q, r = self.n, self.ctx.p, self.ctx.q, self.ctx.r
        blocks = 0
        for Y in coset_pieces(n, self.S, p * p * q * q).values():
            blocks = max(blocks, len({y % p for y in Y}))
        self.trace.add(tag, "each Z_{p^2q^2} coset meets one Z_{pq^2} coset",
                       blocks_max=blocks, size=len(self.S))
        if blocks > 1 or len(self.S) != p * q * r:
            self.fail("subcase 3 structure fails")
        return self._layered(tag, [q * q])

    def subcase4(self, tag: str) -> list[int]:
        if _gcd_all(self.n, self.L) > 1:
            return self.reduce_by_spectrum_subgroup("last table row fails entirely")
        self.fail("last table row fails for a spectrum in no proper subgroup")


def _subpieces(Y: list[int], m: int, k: int) -> list[int]:
    # Y lives in Z_m; residues mod m/k index the Z_k cosets inside it
    return [y % (m // k) for y in Y]


def _gcd_all(n: int, pts) -> int:
    pts = list(pts)
    base = pts[0]
    g = n
    for x in pts:
        g = math.gcd(g, (x - base) % n)
    return g


def _pair_in_same_coset(n: int, pts, r: int):
    seen: dict[int, int] = {}
    h = n // r
    for x in pts:
        c = x % h
        if c in seen:
            return seen[c], x
        seen[c] = x
    return None


def _normalise(n: int, pts) -> list[int]:
    pts = sorted(pts)
    base = pts[0]
    return sorted((x - base) % n for x in pts)


def spectral_to_tile(ctx: PqrContext, S: WeightedSet, Lam: WeightedSet,
                     strict: bool = False) -> tuple[TilingCertificate, CaseTrace]:
    """Tiling complement for a spectral set of Z_{p^2 q^2 r}.

    When a claimed intermediate fact fails on the input, the trace records
    it (``CLAIM_FAILED`` or ``UNCOVERED``) and, unless ``strict``, a ladder
    of directly checked constructions takes over. Only when that ladder
    also fails does ``InternalContradiction`` escape.
    """
    n = ctx.n
    if S.group.orders != (n,):
        raise ValueError(f"set does not live in Z_{n}")
    if not isinstance(Lam, WeightedSet):
        Lam = WeightedSet.from_ints(n, Lam)
    trace = CaseTrace()
    if not verify_spectral_pair(S, Lam):
        raise NotSpectral("pair fails the spectral check", trace)
    if not ctx.hypothesis_ok:
        trace.warnings.append(f"p^2 q^2 = {ctx.p ** 2 * ctx.q ** 2} >= r = {ctx.r}: best effort only")
    run = _Run(ctx, _normalise(n, S.ints()), _normalise(n, Lam.ints()), trace)
    try:
        T = _dispatch(run)
    except (InternalContradiction, UncoveredCase):
        if strict:
            raise
        T = structural_complement(n, run.S, trace)
        if T is None:
            raise InternalContradiction("no verified construction after a failed claim", trace)
    if not cyclic_verify_tiling(n, run.S, T):
        raise InternalContradiction("emitted complement fails verification", trace)
    cert = TilingCertificate(tuple((t,) for t in sorted(T)))
    trace.certificate = cert
    return cert, trace


def structural_complement(n: int, pts: list[int], trace: CaseTrace | None = None) -> list[int] | None:
    """Complements justified by structure checked on the set itself.

    Tried in order: a union of cosets of a prime-order subgroup; a
    transversal of the cosets of a subgroup of order n/|S|; an injective
    projection to a proper quotient, tiled there and lifted; containment in
    a proper subgroup. The last two finish with exact cover in the smaller
    group.
    """
    trace = trace if trace is not None else CaseTrace()
    size = len(pts)
    primes = sorted(factorint(n), reverse=True)
    for s in primes:
        if _is_coset_union(n, pts, s):
            cert = tile_from_coset_union(WeightedSet.from_ints(n, pts), s)
            if cert is not None:
                trace.add("FALLBACK_COSET_UNION", "union of cosets of a prime-order subgroup", prime=s)
                return cert.ints()
    if n % size == 0:
        m = n // size
        if set(coset_counts(n, pts, m)) == {1}:
            trace.add("FALLBACK_TRANSVERSAL", "one point in every coset", subgroup_order=m)
            return list(range(0, n, n // m))
    for m in cyclo._divisors(n):
        if size <= m < n and len({x % m for x in pts}) == size:
            T = quotient_complement(n, pts, m)
            if T is not None:
                trace.add("FALLBACK_INJECTIVE_PROJECTION", "tile the projection and lift", quotient_order=m)
                return T
    if _gcd_all(n, pts) > 1:
        sols = _cyclic_tile(n, pts)
        trace.add("FALLBACK_SUBGROUP", "exact cover inside the generated subgroup", found=bool(sols))
        return sols[0] if sols else None
    return None


def _dispatch(run: _Run) -> list[int]:
    ctx, n = run.ctx, run.n
    p, q, r = ctx.p, ctx.q, ctx.r
    size = len(run.S)
    d = math.gcd(n, size)
    run.trace.add("GCD_CLASS", "case split on gcd(|G|, |S|)", size=size, gcd=d)
    if size == n:
        run.trace.add("LARGE_FULL", "S is the whole group")
        return [0]
    if len(factorint(n // d)) == 1:
        return run.large(d)
    if size % r:
        return run.shi()
    run.phi_r()
    if d == r:
        return run.r_exact()
    if d == p * r:
        return run.pr_case(p, q)
    if d == q * r:
        return run.pr_case(q, p)
    if d == p * q * r:
        return run.pqr_case()
    run.uncovered("gcd class outside the written cases", gcd=d)


def claim_union_zr(ctx: PqrContext, S: WeightedSet, Lam: WeightedSet,
                   trace: CaseTrace | None = None) -> TilingCertificate:
    """Under Phi_n | m_S with Phi_p, Phi_q not dividing m_Lam, S is a union of
    Z_r cosets; returns the coset-union complement."""
    n = ctx.n
    trace = trace if trace is not None else CaseTrace()
    if S.total == n:
        trace.add("CLAIM_UNION_ZR", "whole group")
        return TilingCertificate(((0,),))
    MS, ML = cyclo.mask_poly(S), cyclo.mask_poly(Lam)
    hyp = {"phi_n_S": cyclo.divides(MS, n), "phi_p_Lambda": cyclo.divides(ML, ctx.p),
           "phi_q_Lambda": cyclo.divides(ML, ctx.q)}
    if not hyp["phi_n_S"] or hyp["phi_p_Lambda"] or hyp["phi_q_Lambda"]:
        raise EngineHypothesisError(f"union-of-Z_r hypotheses fail: {hyp}", trace)
    cert = tile_from_coset_union(S, ctx.r)
    trace.add("CLAIM_UNION_ZR", "cube rule with no order-p or order-q differences", found=cert is not None)
    if cert is None:
        trace.add("CLAIM_FAILED", "S is not a union of Z_r cosets")
        raise InternalContradiction("S is not a union of Z_r cosets", trace)
    return cert


# ---------------------------------------------------------------------------
# sets whose size leaves a prime power index


def _big_fail(steps: list[Step], message: str, facts: dict):
    steps.append(Step("CLAIM_FAILED", message, facts))
    raise InternalContradiction(message, CaseTrace(steps))


def _big_set(n: int, S: list[int], L: list[int]) -> tuple[list[int], list[Step]]:
    steps: list[Step] = []
    size = len(S)
    g = math.gcd(n, size)
    fac = factorint(n // g)
    if not fac:
        return [0], [Step("BIG_SET_PROP", "whole group")]
    if len(fac) != 1:
        raise ValueError(f"|G|/gcd(|G|,|S|) = {n // g} is not a prime power")
    (p, k), = fac.items()
    a = 0
    while n % p ** (a + 1) == 0:
        a += 1
    d = n // p ** a
    ML = cyclo.mask_from_ints(n, L)
    holds = [i for i in range(1, a + 1) if cyclo.divides(ML, p ** i)]
    fibre = max(projection_counts(n, d, S))
    facts = dict(prime=p, k=k, a=a, d=d, fibre_max=fibre, relations=holds)
    if fibre < p ** (a - k) or len(holds) != a - k:
        _big_fail(steps, "relation count differs from a - k", facts)
    # a difference of order p^i inside Z_{p^a} has valuation a - i
    free = tuple(sorted(a - i for i in holds))
    pieces = coset_pieces(n, S, p ** a)
    facts["free_positions"] = free
    if len(pieces) != d or any(len(Y) != p ** (a - k) for Y in pieces.values()):
        _big_fail(steps, "Z_{p^a} cosets not evenly filled", facts)
    for Y in pieces.values():
        rep = padic_digit_structure(WeightedSet.from_ints(p ** a, Y))
        if not rep.tight or not rep.tree_ok or not set(rep.free_positions) <= set(free):
            _big_fail(steps, "piece lacks the digit structure", facts)
    B = padic_complement(p, a, free)
    steps.append(Step("BIG_SET_PROP", "free digit positions in every Z_{p^a} coset", facts))
    return sorted(d * b for b in B), steps


def big_set_spectral_to_tile(S: WeightedSet, Lam) -> tuple[TilingCertificate, CaseTrace]:
    """Complement for a spectral set of Z_n whose index |G|/gcd(|G|,|S|) is a
    prime power p^k, read off the base-p digits in each Z_{p^a} coset."""
    n = S.group.require_cyclic()
    if not isinstance(Lam, WeightedSet):
        Lam = WeightedSet.from_ints(n, Lam)
    trace = CaseTrace()
    if not verify_spectral_pair(S, Lam):
        raise NotSpectral("pair fails the spectral check", trace)
    Sn, Ln = _normalise(n, S.ints()), _normalise(n, Lam.ints())
    try:
        T, steps = _big_set(n, Sn, Ln)
    except InternalContradiction as exc:
        trace.steps.extend(exc.trace.steps)
        exc.trace = trace
        raise
    trace.steps.extend(steps)
    if not cyclic_verify_tiling(n, Sn, T):
        raise InternalContradiction("emitted complement fails verification", trace)
    cert = TilingCertificate(tuple((t,) for t in T))
    trace.certificate = cert
    return cert, trace
