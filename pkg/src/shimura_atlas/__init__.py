"""Exact discrete invariants of one-dimensional Shimura subvarieties of A_g.

Number fields are modelled by finite Galois permutation data, quaternion
algebras by their local Brauer invariants.  Nothing in the package uses
floating point.
"""

__version__ = "0.1.0"
