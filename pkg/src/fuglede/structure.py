"""Cube rule, coset-sum decompositions and the structural lemmas.

Cubes live on a squarefree product ``Z_{p_1} x ... x Z_{p_k}``; a weighted
set on ``Z_m`` (m squarefree) is moved there through the CRT coordinates
``x -> (x mod p_1, ..., x mod p_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product

import numpy as np
from sympy import Matrix, factorint, isprime
from sympy.matrices.normalforms import smith_normal_decomp

from . import cyclo
from .groups import Element, Group, WeightedSet, make_group

MAX_CUBE_PRIMES = 3


class HypothesisError(ValueError):
    """A lemma was invoked on an input that does not meet its hypotheses."""


@dataclass(frozen=True)
class Cube:
    primes: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    base: Element

    def __post_init__(self):
        if len(self.primes) != len(self.pairs) or len(self.base) != len(self.primes):
            raise ValueError("cube dimension mismatch")
        for p, (a, b), c in zip(self.primes, self.pairs, self.base):
            if a == b or not (0 <= a < p and 0 <= b < p) or c not in (a, b):
                raise ValueError(f"bad cube edge {(a, b)} with base {c} in Z_{p}")

    @property
    def dimension(self) -> int:
        return len(self.primes)

    def vertices(self):
        """Vertices with their sign (-1)^(Hamming distance to the base)."""
        for choice in product(*self.pairs):
            dist = sum(x != c for x, c in zip(choice, self.base))
            yield choice, (-1) ** dist


def _check_squarefree_group(g: Group) -> tuple[int, ...]:
    primes = g.orders
    if len(set(primes)) != len(primes) or not all(isprime(p) for p in primes):
        raise ValueError(f"{g} is not a product of distinct prime-order factors")
    if len(primes) > MAX_CUBE_PRIMES:
        raise ValueError(f"cube enumeration is capped at {MAX_CUBE_PRIMES} primes")
    return primes


def cube_rule_holds(W: WeightedSet, C: Cube) -> bool:
    if W.group.orders != C.primes:
        raise ValueError(f"cube over {C.primes} does not match {W.group}")
    return sum(sign * W.weight(v) for v, sign in C.vertices()) == 0


def iter_cubes(primes: tuple[int, ...]):
    """All cubes, each once, based at their lexicographically first vertex."""
    for pairs in product(*(list(combinations(range(p), 2)) for p in primes)):
        yield Cube(primes, pairs, tuple(a for a, _ in pairs))


def all_cubes_hold(W: WeightedSet) -> bool:
    primes = _check_squarefree_group(W.group)
    return all(cube_rule_holds(W, C) for C in iter_cubes(primes))


@lru_cache(maxsize=None)
def cube_matrix(m: int) -> np.ndarray:
    """Signed incidence of all cubes against Z_m (m squarefree), CRT-indexed.

    For m = 1 the single cube is the one vertex, so the rule reads W(0) = 0.
    """
    if m == 1:
        return np.ones((1, 1), dtype=np.int64)
    fac = factorint(m)
    if any(a > 1 for a in fac.values()):
        raise ValueError(f"{m} is not squarefree")
    primes = tuple(sorted(fac))
    if len(primes) > MAX_CUBE_PRIMES:
        raise ValueError(f"cube enumeration is capped at {MAX_CUBE_PRIMES} primes")
    to_cyclic = {}
    for x in range(m):
        to_cyclic[tuple(x % p for p in primes)] = x
    rows = []
    for C in iter_cubes(primes):
        row = np.zeros(m, dtype=np.int64)
        for v, sign in C.vertices():
            row[to_cyclic[v]] += sign
        rows.append(row)
    out = np.array(rows)
    out.flags.writeable = False
    return out


def cubes_hold_cyclic(weights: np.ndarray, m: int) -> np.ndarray | bool:
    """Cube rule for weight vector(s) on Z_m with m squarefree.

    Accepts a single vector of length m or a (count, m) batch.
    """
    C = cube_matrix(m)
    w = np.asarray(weights, dtype=np.int64)
    if w.ndim == 1:
        return not np.any(C @ w)
    return ~np.any(w @ C.T, axis=1)


def cube_rule_divisibility(S, m: int) -> bool:
    """Decide Phi_m | m_S through the cube rule.

    The set is projected to Z_m; with e = m / rad(m) the classes j + e*Z_m are
    cosets of the order-rad(m) subgroup, each identified with Z_rad(m), and
    Phi_m | m_S exactly when the cube rule holds in every one of them.
    """
    M = S if isinstance(S, cyclo.MaskPoly) else cyclo.mask_poly(S)
    if M.n % m:
        raise ValueError(f"{m} does not divide {M.n}")
    rad = math.prod(factorint(m)) if m > 1 else 1
    e = m // rad
    folded = M.fold(m)
    # entry j + e*t of the projection is weight t in coset j
    fibres = folded.reshape(rad, e).T
    return bool(np.all(cubes_hold_cyclic(fibres, rad)))


def to_prime_product(W: WeightedSet) -> WeightedSet:
    """Move a weighted set on Z_m (m squarefree) to its CRT product group."""
    m = W.group.require_cyclic()
    primes = tuple(sorted(factorint(m)))
    g = make_group(primes)
    out: dict = {}
    for (x,), w in W.weights.items():
        key = tuple(x % p for p in primes)
        out[key] = out.get(key, 0) + w
    return WeightedSet(g, out)


@dataclass(frozen=True)
class CosetDecomposition:
    """Integer coefficients on coset indicators: ``(axis, coset point) -> c``.

    A coset along axis i is the line through a point with coordinate i set to
    0; the point is stored with that coordinate zeroed.
    """

    group: Group
    coefficients: dict = field(default_factory=dict)

    def evaluate(self) -> WeightedSet:
        g = self.group
        out: dict = {}
        for (axis, point), c in self.coefficients.items():
            for a in range(g.orders[axis]):
                x = list(point)
                x[axis] = a
                x = tuple(x)
                out[x] = out.get(x, 0) + c
        return WeightedSet(g, out)


@lru_cache(maxsize=None)
def _coset_system(orders: tuple[int, ...]):
    g = Group(orders)
    elems = list(g.elements())
    index = {x: i for i, x in enumerate(elems)}
    cosets = []
    for axis in range(len(orders)):
        for x in elems:
            if x[axis] == 0:
                cosets.append((axis, x))
    A = Matrix.zeros(len(elems), len(cosets))
    for j, (axis, point) in enumerate(cosets):
        for a in range(orders[axis]):
            y = list(point)
            y[axis] = a
            A[index[tuple(y)], j] = 1
    D, U, V = smith_normal_decomp(A)
    return elems, cosets, D, U, V


def coset_sum_decomposition(W: WeightedSet) -> CosetDecomposition | None:
    """Integer combination of Z_{p_i}-coset indicators equal to W, if any.

    Solved exactly over Z through a Smith decomposition D = U A V; the free
    parameters of the solution are set to zero, which makes the answer
    canonical.
    """
    orders = _check_squarefree_group(W.group)
    elems, cosets, D, U, V = _coset_system(orders)
    w = Matrix([W.weight(x) for x in elems])
    Uw = U * w
    y = [0] * len(cosets)
    for i in range(D.rows):
        d = D[i, i] if i < D.cols else 0
        if d == 0:
            if Uw[i] != 0:
                return None
        else:
            q, r = divmod(int(Uw[i]), int(d))
            if r:
                return None
            y[i] = q
    c = V * Matrix(y)
    coeffs = {cosets[j]: int(c[j]) for j in range(len(cosets)) if c[j] != 0}
    dec = CosetDecomposition(W.group, coeffs)
    if dec.evaluate() != W:
        raise ArithmeticError("coset decomposition does not reproduce the input")
    return dec


def find_pair_coprime_diff(S: WeightedSet, p: int, q: int) -> tuple[int, int] | None:
    """First pair (in canonical order) whose difference is prime to p and q."""
    n = S.group.require_cyclic()
    if p == q or n % p or n % q:
        raise ValueError(f"{p}, {q} must be distinct prime divisors of {n}")
    pts = S.ints()
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            d = (b - a) % n
            if d % p and d % q:
                return a, b
    return None


@dataclass(frozen=True)
class LabaMarshallReport:
    size: int
    r: int
    m: int
    size_at_least_r: bool
    uncovered_classes: tuple[int, ...]

    @property
    def holds(self) -> bool:
        return self.size_at_least_r and not self.uncovered_classes


def laba_marshall_check(S: WeightedSet, r: int, m: int) -> LabaMarshallReport:
    """Given Phi_{mr} | m_S and Phi_m not dividing it, S must have at least r
    points and meet every coset of the index-r subgroup."""
    n = S.group.require_cyclic()
    if not isprime(r) or n % r:
        raise ValueError(f"{r} is not a prime divisor of {n}")
    if math.gcd(m, r) != 1 or n % (m * r):
        raise ValueError(f"m={m} must be prime to r={r} with mr | n")
    M = cyclo.mask_poly(S)
    if not cyclo.divides(M, m * r):
        raise HypothesisError(f"Phi_{m * r} does not divide m_S")
    if cyclo.divides(M, m):
        raise HypothesisError(f"Phi_{m} divides m_S")
    hit = {x % r for x in S.ints()}
    missing = tuple(c for c in range(r) if c not in hit)
    return LabaMarshallReport(S.total, r, m, S.total >= r, missing)


@dataclass(frozen=True)
class PadicReport:
    p: int
    exponent: int
    size: int
    k: int
    free_positions: tuple[int, ...]
    digits_constant: bool | None = None
    tree_ok: bool | None = None

    @property
    def lower_bound(self) -> int:
        return self.p ** self.k

    @property
    def meets_lower_bound(self) -> bool:
        return self.size >= self.p ** self.k

    @property
    def tight(self) -> bool:
        return self.size == self.p ** self.k


def _digits(x: int, p: int, e: int) -> tuple[int, ...]:
    out = []
    for _ in range(e):
        x, d = divmod(x, p)
        out.append(d)
    return tuple(out)


def _valuation(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def padic_digit_structure(S: WeightedSet) -> PadicReport:
    """Difference-order count and base-p digit structure of S in Z_{p^e}.

    k counts distinct orders in (S - S) minus 0. Two points first differ in
    the digit given by the valuation of their difference, so the digit tree
    of S branches only at k levels and |S| <= p^k; a larger set raises.
    ``meets_lower_bound`` reports the reverse inequality, which fails in
    general (``{0, 1, 2}`` in Z_4). When |S| = p^k the free digit positions
    are those valuations, every other digit is a function of the lower
    digits (``tree_ok``), and ``digits_constant`` reports whether those
    digits are in fact constant across S (false for ``{0, 3}`` in Z_8).
    """
    n = S.group.require_cyclic()
    fac = factorint(n)
    if len(fac) != 1:
        raise ValueError(f"{n} is not a prime power")
    (p, e), = fac.items()
    pts = S.ints()
    vals = {_valuation((b - a) % n, p) for i, a in enumerate(pts) for b in pts[i + 1:]}
    k = len(vals)
    free = tuple(sorted(vals))
    if len(pts) > p ** k:
        raise ArithmeticError(f"|S|={len(pts)} exceeds p^k={p ** k}")
    if len(pts) != p ** k:
        return PadicReport(p, e, len(pts), k, free)
    digs = [_digits(x, p, e) for x in pts]
    constant = all(len({d[i] for d in digs}) == 1 for i in range(e) if i not in vals)
    tree_ok = True
    for i in range(e):
        children: dict = {}
        for d in digs:
            children.setdefault(d[:i], set()).add(d[i])
        want = p if i in vals else 1
        if any(len(c) != want for c in children.values()):
            tree_ok = False
            break
    return PadicReport(p, e, len(pts), k, free, constant, tree_ok)


def padic_reconstruct(S: WeightedSet, report: PadicReport) -> list[int]:
    """Rebuild a tight set from its digit tree: full branching at the free
    positions, the recorded single digit elsewhere."""
    p, e = report.p, report.exponent
    fixed: dict = {}
    for x in S.ints():
        d = _digits(x, p, e)
        for i in range(e):
            if i not in report.free_positions:
                fixed[d[:i]] = d[i]
    out = [()]
    for i in range(e):
        if i in report.free_positions:
            out = [pre + (a,) for pre in out for a in range(p)]
        else:
            out = [pre + (fixed[pre],) for pre in out]
    return sorted(sum(a * p ** i for i, a in enumerate(d)) for d in out)


def padic_complement(p: int, e: int, free: tuple[int, ...]) -> list[int]:
    """Digit set on the positions outside ``free``; it tiles Z_{p^e} together
    with any tight p-adic tree set branching exactly at ``free``."""
    others = [i for i in range(e) if i not in free]
    return sorted(sum(b * p ** i for b, i in zip(choice, others))
                  for choice in product(range(p), repeat=len(others)))


def padic_batch(p: int, e: int, masks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised (|S|, k) for many subsets of Z_{p^e} given as bitmasks.

    A difference of valuation v occurs exactly when some class mod p^v holds
    points in two different classes mod p^(v+1).
    """
    n = p ** e
    masks = np.asarray(masks, dtype=np.uint64)
    size = np.bitwise_count(masks).astype(np.int64)
    k = np.zeros(masks.shape, dtype=np.int64)
    for v in range(e):
        mod_hi = p ** (v + 1)
        found = np.zeros(masks.shape, dtype=bool)
        for a in range(p ** v):
            occupied = np.zeros(masks.shape, dtype=np.int64)
            for j in range(p):
                cls = a + j * p ** v
                cmask = np.uint64(sum(1 << x for x in range(cls, n, mod_hi)))
                occupied += (masks & cmask) != 0
            found |= occupied >= 2
        k += found
    return size, k
