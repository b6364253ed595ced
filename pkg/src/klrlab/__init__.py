"""klrlab: exact-arithmetic engine for type-A KLR modules, R-matrices,
quantum affine sl_N fusion, and the localized Grothendieck ring."""

__version__ = "0.1.0"
