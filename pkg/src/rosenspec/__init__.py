"""Spectra of module categories over finite rings, F_p[t] and glued schemes."""
from .errors import RosenspecError
from .rings import FiniteRing, PolyRing, gf, make_ring, parse_shorthand, zmod
from .spectrum import equivalent, is_spectral, precedes, spec_points

__all__ = ["RosenspecError", "FiniteRing", "PolyRing", "gf", "make_ring", "parse_shorthand", "zmod",
           "equivalent", "is_spectral", "precedes", "spec_points"]
__version__ = "0.1.0"
