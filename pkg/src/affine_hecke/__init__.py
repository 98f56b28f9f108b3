"""Exact computation with affine Hecke algebras.

Subpackages cover scalar arithmetic, root systems and Weyl combinatorics,
weights and their root sets, local regions, the algebra itself, finite
dimensional modules, and the generalized standard tableaux dictionary.
"""

__version__ = "0.1.0"
