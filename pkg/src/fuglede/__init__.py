"""Exact tools for spectral sets and tilings of finite abelian groups."""

__version__ = "0.1.0"

from .groups import Group, WeightedSet, make_group, parse_set_json, set_to_json
from .cyclo import MaskPoly, cyclotomic, divides, divides_mod_p, mask_poly
from .spectral import SpectralCertificate, is_spectral, verify_spectral_pair
from .tiling import TilingCertificate, is_tile, verify_tiling
from .engine import PqrContext, spectral_to_tile

__all__ = [
    "Group", "WeightedSet", "make_group", "parse_set_json", "set_to_json",
    "MaskPoly", "cyclotomic", "divides", "divides_mod_p", "mask_poly",
    "SpectralCertificate", "is_spectral", "verify_spectral_pair",
    "TilingCertificate", "is_tile", "verify_tiling",
    "PqrContext", "spectral_to_tile",
]
