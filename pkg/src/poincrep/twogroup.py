"""Strict 2-group of Lorentz transformations with translation 2-cells.

1-morphisms are proper orthochronous Lorentz transformations; a 2-cell
attaches a translation to a transformation g and goes from g to g, so
vertical composition adds translations over a common g, and horizontal
composition multiplies the transformations while transporting the second
translation through the first transformation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .minkowski import FourVector, LorentzTransform, METRIC
from .numerics import TAU_GROUP


@dataclass(frozen=True)
class TwoMorphism:
    g: LorentzTransform
    x: FourVector

    @property
    def source(self) -> LorentzTransform:
        return self.g

    @property
    def target(self) -> LorentzTransform:
        return self.g


def identity2(g: LorentzTransform) -> TwoMorphism:
    return TwoMorphism(g, FourVector.zero())


def vcompose(a: TwoMorphism, b: TwoMorphism, tol: float = TAU_GROUP) -> TwoMorphism:
    """Stack two 2-cells over the same transformation; translations add."""
    if not a.g.is_close(b.g, tol):
        raise ValueError("vertical composition needs a common underlying transformation")
    return TwoMorphism(a.g, a.x + b.x)


def hcompose(a: TwoMorphism, b: TwoMorphism) -> TwoMorphism:
    """Compose side by side: transformations multiply, the second
    translation is transported through the first transformation."""
    return TwoMorphism(a.g.compose(b.g), a.x + a.g.apply(b.x))


def whisker_left(g: LorentzTransform, b: TwoMorphism) -> TwoMorphism:
    return hcompose(identity2(g), b)


def whisker_right(a: TwoMorphism, g: LorentzTransform) -> TwoMorphism:
    return hcompose(a, identity2(g))


def pair_character(chi: FourVector, x: FourVector) -> complex:
    """Unit-modulus character of the translation x at frequency chi."""
    return complex(np.exp(1j * chi.minkowski_dot(x)))


def character_dual_transform(g: LorentzTransform, chi: FourVector) -> FourVector:
    """Frequency transport that matches transporting the translation.

    pair_character(chi, g x) equals
    pair_character(character_dual_transform(g, chi), x) because the
    pairing is invariant under simultaneous transformation of both slots.
    """
    return g.inverse().apply(chi)


def interchange_residual(
    a: TwoMorphism, b: TwoMorphism, c: TwoMorphism, d: TwoMorphism, tol: float = TAU_GROUP
) -> float:
    """Deviation between the two ways of collapsing a 2x2 cell grid.

    a, b stack vertically over one transformation and c, d over another;
    the residual compares horizontal-after-vertical with
    vertical-after-horizontal, relative to the coordinate scale.
    """
    lhs = hcompose(vcompose(a, b, tol), vcompose(c, d, tol))
    rhs = vcompose(hcompose(a, c), hcompose(b, d), tol)
    xl, xr = lhs.x.as_array(), rhs.x.as_array()
    scale = max(1.0, float(np.max(np.abs(xl))), float(np.max(np.abs(xr))))
    x_dev = float(np.max(np.abs(xl - xr))) / scale
    g_dev = float(np.max(np.abs(lhs.g.matrix - rhs.g.matrix))) / max(
        1.0, float(np.max(np.abs(lhs.g.matrix)))
    )
    return max(x_dev, g_dev)
