"""Exhaustive and sampled scans over subsets of Z_n, plus the Z_3^6 construction."""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import cyclo
from .spectral import (hadamard_columns, hadamard_rows_spectrum, is_spectral, log_hadamard_search,
                       cyclic_spectral_by_profile, verify_spectral_pair)
from .tiling import _cyclic_tile, is_tile, verify_tiling

EXHAUSTIVE_LIMIT = 24


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _mask_matrix(n: int, masks: np.ndarray) -> np.ndarray:
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int64)


def affine_canonical(n: int) -> np.ndarray:
    """Smallest image of every n-bit mask under x -> u x + t (u a unit)."""
    masks = np.arange(1 << n, dtype=np.int64)
    full = (1 << n) - 1
    best = masks.copy()
    for u in (u for u in range(1, n) if math.gcd(u, n) == 1):
        dil = np.zeros_like(masks)
        for i in range(n):
            dil |= ((masks >> i) & 1) << (u * i % n)
        rot = dil
        for _ in range(n):
            np.minimum(best, rot, out=best)
            rot = ((rot << 1) | (rot >> (n - 1))) & full
    return best


@dataclass
class ScanReport:
    n: int
    mode: str
    checked: int = 0
    spectral: int = 0
    tiles: int = 0
    t1t2: int = 0
    violations: list[dict] = field(default_factory=list)
    t1t2_violations: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"n": self.n, "mode": self.mode, "checked": self.checked, "spectral": self.spectral,
                "tiles": self.tiles, "t1t2": self.t1t2,
                "violations": sorted(self.violations, key=lambda v: v["set"]),
                "t1t2_violations": sorted(self.t1t2_violations, key=lambda v: v["set"])}


def _profiles(n: int, masks: np.ndarray) -> tuple[tuple[int, ...], np.ndarray]:
    return cyclo.batch_divisibility(n, _mask_matrix(n, masks))


def scan_masks(n: int, masks, mode: str = "exhaustive", chunk: int = 1 << 14) -> ScanReport:
    """Check spectral <=> tile and (T1 and T2) => tile on the given masks."""
    report = ScanReport(n, mode)
    masks = np.asarray(masks, dtype=np.int64)
    if n == 1:
        # the trivial group: {0} is its own spectrum and complement
        report.checked = report.spectral = report.tiles = report.t1t2 = int(masks.size)
        return report
    for lo in range(0, masks.size, chunk):
        part = masks[lo:lo + chunk]
        divs, table = _profiles(n, part)
        for mask, row in zip(part.tolist(), table):
            pts = _bits(mask)
            k = len(pts)
            profile = frozenset(d for d, hit in zip(divs, row) if hit and d > 1)
            spectral = cyclic_spectral_by_profile(n, profile, k) is not None
            tile = bool(_cyclic_tile(n, pts)) if n % k == 0 else False
            t1, t2 = cyclo.t1_t2_from_profile(n, k, profile)
            report.checked += 1
            report.spectral += spectral
            report.tiles += tile
            report.t1t2 += t1 and t2
            if spectral != tile:
                report.violations.append({"set": pts, "spectral": spectral, "tile": tile})
            if t1 and t2 and not tile:
                report.t1t2_violations.append({"set": pts})
    return report


def scan_domain(n: int, mode: str = "exhaustive", seed: int = 0, samples: int = 10000,
                canonical: bool | None = None) -> tuple[np.ndarray, str]:
    """Masks visited by a scan of Z_n and the mode label to report."""
    if n < 1:
        raise ValueError("n must be positive")
    if mode == "exhaustive":
        if n > EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive scans are limited to n <= {EXHAUSTIVE_LIMIT}")
        if canonical is None:
            canonical = n > 16
        if not canonical:
            return np.arange(1, 1 << n, 2, dtype=np.int64), mode
        canon = affine_canonical(n)
        masks = np.flatnonzero(canon == np.arange(1 << n))
        # the canonical representative of a nonempty orbit contains 0
        masks = masks[(masks & 1) == 1]
        return masks.astype(np.int64), "exhaustive-affine"
    if mode == "sample":
        if n > 62:
            raise ValueError("sample scans use 64-bit masks; n must be <= 62")
        rng = random.Random(seed)
        masks = np.array(sorted({1 | rng.getrandbits(n) for _ in range(samples)}), dtype=np.int64)
        return masks, mode
    raise ValueError(f"unknown mode {mode!r}")


def _scan_part(args) -> ScanReport:
    n, masks, mode = args
    return scan_masks(n, masks, mode)


def fuglede_scan(n: int, mode: str = "exhaustive", seed: int = 0, samples: int = 10000,
                 canonical: bool | None = None, threads: int = 1) -> ScanReport:
    """Spectral <=> tile over subsets of Z_n containing 0.

    Exhaustive mode visits every such subset, or one per orbit of the
    affine group when ``canonical`` is set (default for n > 16). Sample mode
    draws ``samples`` random subsets containing 0. With ``threads > 1`` the
    masks are split across worker processes; the merged report does not
    depend on the split.
    """
    masks, label = scan_domain(n, mode, seed, samples, canonical)
    if threads <= 1 or masks.size < 1 << 12:
        return scan_masks(n, masks, label)
    parts = [(n, part, label) for part in np.array_split(masks, threads * 4) if part.size]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        reports = list(pool.map(_scan_part, parts))
    total = ScanReport(n, label)
    for rep in reports:
        total.checked += rep.checked
        total.spectral += rep.spectral
        total.tiles += rep.tiles
        total.t1t2 += rep.t1t2
        total.violations.extend(rep.violations)
        total.t1t2_violations.extend(rep.t1t2_violations)
    return total


@dataclass
class TaoReport:
    matrix: list[list[int]]
    S: list[tuple[int, ...]]
    spectrum: list[tuple[int, ...]]
    spectral: bool
    tile: bool
    tile_reason: str

    def to_json(self) -> dict:
        return {"matrix": self.matrix, "set": [list(x) for x in self.S],
                "spectrum": [list(x) for x in self.spectrum], "spectral": self.spectral,
                "tile": self.tile, "tile_reason": self.tile_reason}


def hadamard_pipeline(k: int, t: int) -> TaoReport:
    """Columns of a k x k log-Hadamard matrix over Z_t as a subset of Z_t^k."""
    L = log_hadamard_search(k, t)
    if L is None:
        raise RuntimeError(f"no {k}x{k} log-Hadamard matrix over Z_{t}")
    S = hadamard_columns(L, t)
    spectrum = hadamard_rows_spectrum(L, t)
    if len(S) != k or not verify_spectral_pair(S, spectrum):
        raise RuntimeError("row spectrum does not certify the column set")
    spectral = is_spectral(S) is not None
    size, order = S.total, S.group.size
    if order % size:
        tile, reason = False, f"|S| = {size} does not divide |G| = {order}"
    else:
        cert = is_tile(S)
        tile = cert is not None and verify_tiling(S, cert)
        reason = "exact cover" + (" found a verified complement" if tile else " is exhausted")
    return TaoReport(L, S.support, spectrum, spectral, tile, reason)


def tao_counterexample() -> TaoReport:
    """A spectral 6-subset of Z_3^6 that does not tile."""
    return hadamard_pipeline(6, 3)
