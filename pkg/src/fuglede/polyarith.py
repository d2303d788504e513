"""Exact dense polynomial arithmetic over Z and F_p.

Coefficient vectors are numpy arrays indexed by exponent (constant term
first). Everything stays in integers; int64 is used only when a coefficient
bound proves it cannot overflow, otherwise Python integers take over.
"""

from __future__ import annotations

import numpy as np

try:
    import gmpy2
except ImportError:  # pragma: no cover - gmpy2 ships with the environment
    gmpy2 = None

_SAFE = 1 << 62
# products with more coefficient pairs than this go through Kronecker substitution
_DIRECT_LIMIT = 1 << 21


def as_int_array(coeffs) -> np.ndarray:
    arr = np.asarray(coeffs)
    if arr.dtype == object:
        return arr
    return arr.astype(np.int64, copy=False)


def trim(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return a[:0]
    return a[: nz[-1] + 1]


def _max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a)
    return int(np.abs(a).max())


def _l1(a: np.ndarray) -> int:
    if a.dtype == object:
        return sum(abs(int(x)) for x in a)
    return int(np.abs(a).sum(dtype=object)) if a.size else 0


def _pack(a: np.ndarray) -> int:
    pos = np.where(a > 0, a, 0).astype("<u8").tobytes()
    neg = np.where(a < 0, -a, 0).astype("<u8").tobytes()
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _kronecker_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # 64-bit slots; caller guarantees every output coefficient is below 2**62
    length = a.size + b.size - 1
    x, y = _pack(a), _pack(b)
    z = gmpy2.mpz(x) * gmpy2.mpz(y) if gmpy2 is not None else x * y
    offset = int.from_bytes(np.full(length, _SAFE, dtype="<u8").tobytes(), "little")
    raw = int(z + offset).to_bytes(8 * length, "little")
    return np.frombuffer(raw, dtype="<u8").astype(np.int64) - _SAFE


def _object_mul(a, b) -> np.ndarray:
    a = [int(x) for x in a]
    b = [int(x) for x in b]
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return np.array(out, dtype=object)


def poly_mul(a, b) -> np.ndarray:
    """Exact product of two integer polynomials."""
    a, b = as_int_array(a), as_int_array(b)
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.int64)
    bound = min(_l1(a) * _max_abs(b), _l1(b) * _max_abs(a))
    if bound >= _SAFE or a.dtype == object or b.dtype == object:
        return _object_mul(a, b)
    if a.size * b.size <= _DIRECT_LIMIT:
        return np.convolve(a, b)
    return _kronecker_mul(a, b)


def poly_sub(a, b) -> np.ndarray:
    a, b = as_int_array(a), as_int_array(b)
    size = max(a.size, b.size)
    dtype = object if object in (a.dtype, b.dtype) else np.int64
    out = np.zeros(size, dtype=dtype)
    out[: a.size] += a
    out[: b.size] -= b
    return out


def compose_power(a, k: int) -> np.ndarray:
    """a(x^k)."""
    a = as_int_array(a)
    out = np.zeros((a.size - 1) * k + 1 if a.size else 0, dtype=a.dtype)
    out[::k] = a
    return out


def poly_divmod(a, b):
    """Quotient and remainder of a by a monic integer polynomial b."""
    a = np.array(as_int_array(a), dtype=object)
    b = trim(np.array(as_int_array(b), dtype=object))
    if b.size == 0 or b[-1] != 1:
        raise ValueError("divisor must be monic")
    db = b.size - 1
    if a.size <= db:
        return np.zeros(0, dtype=object), a
    q = np.zeros(a.size - db, dtype=object)
    r = a.copy()
    for i in range(a.size - 1, db - 1, -1):
        c = r[i]
        if c:
            q[i - db] = c
            r[i - db: i + 1] -= c * b
    return q, r[:db]


def poly_rem_mod_p(a, b, p: int) -> np.ndarray:
    """Remainder of a modulo b in F_p[x], coefficients in [0, p)."""
    a = np.asarray(a, dtype=object) % p
    a = np.array([int(x) for x in a], dtype=np.int64)
    b = trim(np.array([int(x) % p for x in as_int_array(b)], dtype=np.int64))
    if b.size == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    db = b.size - 1
    inv = pow(int(b[-1]), -1, p)
    r = trim(a.copy())
    while r.size > db:
        c = int(r[-1]) * inv % p
        shift = r.size - 1 - db
        r[shift:] = (r[shift:] - c * b) % p
        r = trim(r)
    return r


def x_pow_minus_one(n: int) -> np.ndarray:
    out = np.zeros(n + 1, dtype=np.int64)
    out[0] = -1
    out[n] = 1
    return out
