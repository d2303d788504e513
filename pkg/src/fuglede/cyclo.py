"""Mask polynomials, cyclotomic polynomials and the mod-p method.

Divisibility of a mask polynomial by ``Phi_d`` (``d | n``) is decided by
folding the coefficient vector modulo ``x^d - 1`` and applying the cached
linear map ``x^j -> x^j mod Phi_d``; a long-division route is kept for
cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable

import numpy as np
from sympy import divisors, factorint, isprime, mobius, totient

from .groups import WeightedSet, projection_counts
from .polyarith import (as_int_array, compose_power, poly_divmod, poly_mul,
                        poly_rem_mod_p, trim, x_pow_minus_one)


@dataclass(frozen=True, eq=False)
class MaskPoly:
    n: int
    coeffs: np.ndarray

    def __eq__(self, other):
        return (isinstance(other, MaskPoly) and self.n == other.n
                and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.n, self.coeffs.tobytes()))

    @property
    def total(self) -> int:
        return int(self.coeffs.sum())

    def fold(self, d: int) -> np.ndarray:
        """Coefficients of the image in Z[x]/(x^d - 1), i.e. the projection to Z_d."""
        if self.n % d:
            raise ValueError(f"{d} does not divide {self.n}")
        return self.coeffs.reshape(-1, d).sum(axis=0)


def mask_poly(S: WeightedSet) -> MaskPoly:
    n = S.group.require_cyclic()
    coeffs = np.zeros(n, dtype=np.int64)
    for (x,), w in S.weights.items():
        coeffs[x] += w
    coeffs.flags.writeable = False
    return MaskPoly(n, coeffs)


def mask_from_ints(n: int, elements: Iterable[int]) -> MaskPoly:
    coeffs = np.zeros(n, dtype=np.int64)
    for x in elements:
        coeffs[x % n] += 1
    coeffs.flags.writeable = False
    return MaskPoly(n, coeffs)


def _as_mask(S) -> MaskPoly:
    return S if isinstance(S, MaskPoly) else mask_poly(S)


@dataclass(frozen=True, eq=False)
class CycloPoly:
    d: int
    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def array(self) -> np.ndarray:
        return self.coeffs.astype(np.int64)

    def at_one(self) -> int:
        return int(self.coeffs.sum(dtype=np.int64))

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = int(self.coeffs[i])
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            mag = abs(c)
            body = mono if mag == 1 and mono else f"{mag}{mono}" if mono else str(mag)
            terms.append(("-" if c < 0 else "+", body))
        if not terms:
            return "0"
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def _compact(a: np.ndarray) -> np.ndarray:
    m = int(np.abs(a).max())
    for dt in (np.int8, np.int16, np.int32):
        if m <= np.iinfo(dt).max:
            a = a.astype(dt)
            break
    a.flags.writeable = False
    return a


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> CycloPoly:
    """Phi_d, built from x^d - 1 by exact division by binomials x^e - 1.

    Uses Phi_d = prod_{e | d} (1 - x^e)^mu(d/e) for d > 1, evaluated as a
    power series truncated at degree phi(d).
    """
    if d < 1:
        raise ValueError("cyclotomic index must be >= 1")
    if d == 1:
        return CycloPoly(1, _compact(np.array([-1, 1], dtype=np.int64)))
    deg = int(totient(d))
    s = np.zeros(deg + 1, dtype=np.int64)
    s[0] = 1
    divs = [int(e) for e in divisors(d)]
    # multiply first so the cumulative sums below act on already-reduced data
    for e in divs:
        if mobius(d // e) == 1 and e <= deg:
            s[e:] = s[e:] - s[:-e].copy()
    for e in divs:
        if mobius(d // e) == -1 and e <= deg:
            pad = (-s.size) % e
            blk = np.concatenate([s, np.zeros(pad, dtype=np.int64)]).reshape(-1, e)
            s = np.cumsum(blk, axis=0).reshape(-1)[: deg + 1]
    if s[deg] != 1:
        raise ArithmeticError(f"cyclotomic construction for d={d} is not monic")
    return CycloPoly(d, _compact(s))


@lru_cache(maxsize=None)
def remainder_matrix(d: int) -> np.ndarray:
    """Matrix whose column j holds the coefficients of x^j mod Phi_d, j < d."""
    phi = cyclotomic(d).array()
    deg = phi.size - 1
    R = np.zeros((deg, d), dtype=object)
    r = [0] * deg
    for j in range(d):
        if j < deg:
            r = [0] * deg
            r[j] = 1
        else:
            top = r[-1]
            r = [0] + r[:-1]
            if top:
                r = [ri - top * int(c) for ri, c in zip(r, phi[:deg])]
        R[:, j] = r
    if max((abs(int(v)) for v in R.flat), default=0) < (1 << 40):
        R = R.astype(np.int64)
    R.flags.writeable = False
    return R


def _divides_folded(folded: np.ndarray, d: int) -> bool:
    R = remainder_matrix(d)
    if R.shape[0] == 0:
        return True
    if R.dtype == object:
        vec = np.array([int(v) for v in folded], dtype=object)
        return not any(R.dot(vec))
    return not np.any(R @ folded.astype(np.int64))


def divides(S, d: int) -> bool:
    """Whether Phi_d divides the mask polynomial over Z (d must divide n)."""
    M = _as_mask(S)
    if d < 1 or M.n % d:
        raise ValueError(f"{d} does not divide {M.n}")
    return _divides_folded(M.fold(d), d)


def divides_by_division(S, d: int) -> bool:
    """Same decision as ``divides`` via explicit long division (slow route)."""
    M = _as_mask(S)
    if d < 1 or M.n % d:
        raise ValueError(f"{d} does not divide {M.n}")
    _, r = poly_divmod(M.coeffs, cyclotomic(d).array())
    return not any(r)


def divisor_profile(S) -> frozenset[int]:
    """All d | n with Phi_d | m_S."""
    M = _as_mask(S)
    return frozenset(d for d in _divisors(M.n) if _divides_folded(M.fold(d), d))


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(int(d) for d in divisors(n))


def batch_divisibility(n: int, vectors: np.ndarray) -> tuple[tuple[int, ...], np.ndarray]:
    """Divisibility table for many weight vectors on Z_n at once.

    ``vectors`` has shape (count, n). Returns the divisors of n and a boolean
    array of shape (count, len(divisors)).
    """
    vectors = np.asarray(vectors, dtype=np.int64)
    divs = _divisors(n)
    out = np.zeros((vectors.shape[0], len(divs)), dtype=bool)
    for k, d in enumerate(divs):
        folded = vectors.reshape(vectors.shape[0], -1, d).sum(axis=1)
        R = remainder_matrix(d)
        if R.shape[0] == 0:
            out[:, k] = True
        elif R.dtype == object:
            out[:, k] = [_divides_folded(row, d) for row in folded]
        else:
            out[:, k] = ~np.any(folded @ R.T, axis=1)
    return divs, out


def divides_mod_p(S, d: int, p: int) -> bool:
    """Whether Phi_d mod p divides m_S mod p in F_p[x]."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if d < 1:
        raise ValueError("cyclotomic index must be >= 1")
    M = _as_mask(S)
    r = poly_rem_mod_p(M.coeffs, cyclotomic(d).array(), p)
    return r.size == 0


def _split_prime_power(n: int, p: int) -> tuple[int, int]:
    a = 0
    while n % p == 0:
        n //= p
        a += 1
    return a, n


def mod_p_size_constraint(S: WeightedSet, p: int, m: int, include_one: bool = False):
    """Size arithmetic of the mod-p method.

    With ``n = p^a m`` and ``Phi_d | m_S`` in F_p[x] for every divisor ``d > 1``
    of ``m``, every fibre of the projection to Z_m has the same size mod p,
    say ``k``, and ``|S| = k m + l p``. Returns ``(k, l)`` or None when the
    hypothesis fails. ``include_one`` also demands ``Phi_1``, which forces
    ``k = 0``.
    """
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    M = mask_poly(S)
    n = M.n
    if m < 1 or m % p == 0:
        raise ValueError(f"p={p} must not divide m={m}")
    if n % m or _split_prime_power(n // m, p)[1] != 1:
        raise ValueError(f"n={n} is not p^a * {m} for p={p}")
    for d in _divisors(m):
        if d == 1 and not include_one:
            continue
        if not divides_mod_p(M, d, p):
            return None
    counts = M.fold(m)
    residues = {int(c) % p for c in counts}
    if len(residues) != 1:
        raise ArithmeticError(f"fibre sizes {counts.tolist()} are not constant mod {p}")
    k = residues.pop()
    total = int(counts.sum())
    l, rem = divmod(total - k * m, p)
    if rem or l < 0:
        raise ArithmeticError(f"|S|={total} is not {k}*{m} + l*{p} with l >= 0")
    return k, l


def cyclo_identity_mp(m: int, p: int) -> bool:
    """Check Phi_{mp}(x) * Phi_m(x) == Phi_m(x^p) exactly."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if m < 1 or m % p == 0:
        raise ValueError(f"p={p} must not divide m={m}")
    lhs = poly_mul(cyclotomic(m * p).array(), cyclotomic(m).array())
    rhs = compose_power(cyclotomic(m).array(), p)
    return np.array_equal(trim(lhs), trim(rhs))


def cyclo_identity_mpk(m: int, p: int, k: int) -> bool:
    """Check Phi_{p^k m}(x) == Phi_{pm}(x^{p^(k-1)}) exactly."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if m < 1 or m % p == 0:
        raise ValueError(f"p={p} must not divide m={m}")
    if k < 1:
        raise ValueError("k must be >= 1")
    lhs = cyclotomic(p ** k * m).array()
    rhs = compose_power(cyclotomic(p * m).array(), p ** (k - 1))
    return np.array_equal(lhs, rhs)


def product_identity(n: int) -> bool:
    """Check prod_{d | n} Phi_d == x^n - 1 exactly."""
    acc = np.ones(1, dtype=np.int64)
    for d in _divisors(n):
        acc = poly_mul(acc, cyclotomic(d).array())
    return np.array_equal(trim(as_int_array(acc)), x_pow_minus_one(n))


def prime_power_support(S) -> frozenset[int]:
    """Prime powers s | n, s > 1, with Phi_s | m_S."""
    M = _as_mask(S)
    out = set()
    for p, a in factorint(M.n).items():
        for i in range(1, a + 1):
            if divides(M, p ** i):
                out.add(p ** i)
    return frozenset(out)


def _base_prime(s: int) -> int:
    return next(iter(factorint(s)))


def check_T1(S) -> bool:
    M = _as_mask(S)
    return M.total == math.prod(_base_prime(s) for s in prime_power_support(M))


def check_T2(S) -> bool:
    M = _as_mask(S)
    by_prime: dict[int, list[int]] = {}
    for s in prime_power_support(M):
        by_prime.setdefault(_base_prime(s), []).append(s)
    options = [[1] + sorted(v) for v in by_prime.values()]
    for choice in product(*options):
        picked = [s for s in choice if s > 1]
        if len(picked) >= 2 and not divides(M, math.prod(picked)):
            return False
    return True


def t1_t2_from_profile(n: int, size: int, profile: frozenset[int]) -> tuple[bool, bool]:
    """T1/T2 decided from a precomputed divisibility profile (scan fast path)."""
    fac = factorint(n)
    support = [p ** i for p, a in fac.items() for i in range(1, a + 1) if p ** i in profile]
    t1 = size == math.prod(_base_prime(s) for s in support)
    by_prime: dict[int, list[int]] = {}
    for s in support:
        by_prime.setdefault(_base_prime(s), []).append(s)
    t2 = True
    for choice in product(*([1] + v for v in by_prime.values())):
        picked = [s for s in choice if s > 1]
        if len(picked) >= 2 and math.prod(picked) not in profile:
            t2 = False
            break
    return t1, t2
