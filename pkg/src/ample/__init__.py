"""Exact computation with ample groupoids presented by compact open bisections.

Subpackages cover the clopen algebra of the unit space, the bisection
calculus, the type semigroup with checkable certificates, paradoxical
decompositions, invariant states via exact rational LP, the rational
convolution algebra, and finite ideal-lattice verification.
"""

__version__ = "0.1.0"
