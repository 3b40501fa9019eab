"""Separating morphisms and separating semigroups of real curves.

Genus-4 curves on real quadrics (quadric and cubic in projective 3-space)
and hyperelliptic curves y^2 = F(x).
"""

__version__ = "0.1.0"
