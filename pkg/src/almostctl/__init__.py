"""Exact computations with idempotent ideals over the dyadic valuation ring.

The ground ring is V = k[x^(1/2^oo)], modelled level by level as k[y] with
y = x^(1/2^n).  Objects are lazy directed systems of finitely presented
level modules and bounded complexes of them.
"""

__version__ = "0.1.0"
