"""Orbit-based representation calculus for the Poincare 2-group.

Subpackages cover Minkowski orbit geometry, coadjoint-orbit invariants,
the strict 2-group of Lorentz transformations and translations, orbit
representation objects and their tensor calculus, quadrature-backed
intertwiner spaces, and triangulation state sums, plus a CLI harness.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
