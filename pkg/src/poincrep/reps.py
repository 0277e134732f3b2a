"""Representation objects fibered over translation orbits.

An irreducible object is a base orbit together with a catalogued subgroup
of the orbit's stabilizer; the fiber is the quotient of the stabilizer by
that subgroup.  Four kinds occur: elementary (full stabilizer, point
fiber), Lie (connected positive-codimension subgroup), crystallographic
(nontrivial discrete subgroup), and non-Hausdorff (non-closed subgroup,
carried opaquely and excluded from numerics).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .minkowski import (
    CausalClass,
    FourVector,
    LorentzTransform,
    OrbitLabel,
    orbit_sum_range,
    random_lorentz,
    sample_orbit,
    SumRangeReport,
)
from .numerics import TAU_NUM, empirical_dimension
from .rng import substream


class GroupTag(enum.Enum):
    SL2C = "SL2C"
    SU2 = "SU2"
    SO21 = "SO21"
    E2 = "E2"
    U1 = "U1"
    SO2 = "SO2"
    CYCLIC = "CyclicZn"
    TRIVIAL = "Trivial"
    NON_LIE = "NonLie"


_GROUP_DIM = {
    GroupTag.SL2C: 6,
    GroupTag.SU2: 3,
    GroupTag.SO21: 3,
    GroupTag.E2: 3,
    GroupTag.U1: 1,
    GroupTag.SO2: 1,
    GroupTag.CYCLIC: 0,
    GroupTag.TRIVIAL: 0,
}


@dataclass(frozen=True)
class StabilizerGroup:
    tag: GroupTag
    order: int | None = None
    note: str = ""

    def __post_init__(self) -> None:
        if self.tag is GroupTag.CYCLIC:
            if self.order is None or self.order < 2:
                raise ValueError("cyclic subgroups need order >= 2")
        elif self.order is not None:
            raise ValueError(f"{self.tag.value} does not take an order")

    @property
    def dim(self) -> int | None:
        return _GROUP_DIM.get(self.tag)

    @classmethod
    def sl2c(cls) -> "StabilizerGroup":
        return cls(GroupTag.SL2C)

    @classmethod
    def su2(cls) -> "StabilizerGroup":
        return cls(GroupTag.SU2)

    @classmethod
    def so21(cls) -> "StabilizerGroup":
        return cls(GroupTag.SO21)

    @classmethod
    def e2(cls) -> "StabilizerGroup":
        return cls(GroupTag.E2)

    @classmethod
    def u1(cls) -> "StabilizerGroup":
        return cls(GroupTag.U1)

    @classmethod
    def so2(cls) -> "StabilizerGroup":
        return cls(GroupTag.SO2)

    @classmethod
    def cyclic(cls, n: int) -> "StabilizerGroup":
        return cls(GroupTag.CYCLIC, order=n)

    @classmethod
    def trivial(cls) -> "StabilizerGroup":
        return cls(GroupTag.TRIVIAL)

    @classmethod
    def non_lie(cls, note: str = "dense winding subgroup") -> "StabilizerGroup":
        return cls(GroupTag.NON_LIE, note=note)


class FiberKind(enum.Enum):
    POINT = "Point"
    SPHERE2 = "Sphere2"
    SPHERE3 = "Sphere3"
    QUOTIENT = "Quotient"
    OPAQUE = "Opaque"


@dataclass(frozen=True)
class FiberSpace:
    kind: FiberKind
    dim: int | None
    quotient: tuple[StabilizerGroup, StabilizerGroup] | None = None

    def __post_init__(self) -> None:
        expected = {FiberKind.POINT: 0, FiberKind.SPHERE2: 2, FiberKind.SPHERE3: 3}
        if self.kind in expected and self.dim != expected[self.kind]:
            raise ValueError(f"{self.kind.value} fiber must have dim {expected[self.kind]}")


class IrrepKind(enum.Enum):
    ELEMENTARY = "Elementary"
    LIE = "Lie"
    CRYSTALLOGRAPHIC = "Crystallographic"
    NON_HAUSDORFF = "NonHausdorff"


@dataclass(frozen=True)
class Irrep:
    base: OrbitLabel
    subgroup: StabilizerGroup
    fiber: FiberSpace
    kind: IrrepKind

    @property
    def is_maximal(self) -> bool:
        return self.subgroup.tag is GroupTag.TRIVIAL

    @property
    def radius(self) -> float:
        return self.base.radius


def full_stabilizer(base: OrbitLabel) -> StabilizerGroup:
    """Stabilizer of a point of the orbit, by causal class."""
    cls = base.causal_class
    if cls is CausalClass.ZERO:
        return StabilizerGroup.sl2c()
    if cls.is_timelike:
        return StabilizerGroup.su2()
    if cls.is_null:
        return StabilizerGroup.e2()
    return StabilizerGroup.so21()


_CATALOG: dict[GroupTag, tuple[GroupTag, ...]] = {
    GroupTag.SL2C: (GroupTag.SL2C,),
    GroupTag.SU2: (GroupTag.SU2, GroupTag.U1, GroupTag.CYCLIC, GroupTag.TRIVIAL),
    GroupTag.SO21: (GroupTag.SO21, GroupTag.SO2, GroupTag.CYCLIC, GroupTag.TRIVIAL),
    GroupTag.E2: (GroupTag.E2, GroupTag.SO2, GroupTag.CYCLIC, GroupTag.TRIVIAL),
}


def subgroup_catalog(stabilizer: StabilizerGroup) -> tuple[GroupTag, ...]:
    """Catalogued subgroup tags for a stabilizer (plus NonLie, always legal)."""
    return _CATALOG[stabilizer.tag] + (GroupTag.NON_LIE,)


def _fiber_for(stabilizer: StabilizerGroup, subgroup: StabilizerGroup) -> FiberSpace:
    if subgroup.tag is GroupTag.NON_LIE:
        return FiberSpace(FiberKind.OPAQUE, None)
    if subgroup.tag == stabilizer.tag:
        return FiberSpace(FiberKind.POINT, 0)
    if stabilizer.tag is GroupTag.SU2 and subgroup.tag is GroupTag.U1:
        return FiberSpace(FiberKind.SPHERE2, 2, (stabilizer, subgroup))
    if stabilizer.tag is GroupTag.SU2 and subgroup.tag is GroupTag.TRIVIAL:
        return FiberSpace(FiberKind.SPHERE3, 3, (stabilizer, subgroup))
    dim = (stabilizer.dim or 0) - (subgroup.dim or 0)
    return FiberSpace(FiberKind.QUOTIENT, dim, (stabilizer, subgroup))


def _kind_for(subgroup: StabilizerGroup, stabilizer: StabilizerGroup) -> IrrepKind:
    if subgroup.tag is GroupTag.NON_LIE:
        return IrrepKind.NON_HAUSDORFF
    if subgroup.tag == stabilizer.tag:
        return IrrepKind.ELEMENTARY
    if subgroup.tag is GroupTag.CYCLIC:
        return IrrepKind.CRYSTALLOGRAPHIC
    return IrrepKind.LIE


def make_irrep(base: OrbitLabel, subgroup: StabilizerGroup) -> Irrep:
    """Build the representation object for a base orbit and residual subgroup."""
    stab = full_stabilizer(base)
    if subgroup.tag not in subgroup_catalog(stab):
        raise ValueError(
            f"{subgroup.tag.value} is not a catalogued subgroup of {stab.tag.value}"
        )
    return Irrep(
        base=base,
        subgroup=subgroup,
        fiber=_fiber_for(stab, subgroup),
        kind=_kind_for(subgroup, stab),
    )


def elementary(radius: float, causal_class: CausalClass = CausalClass.TIMELIKE_FUTURE) -> Irrep:
    """Elementary object over the orbit of the given class and radius."""
    if radius == 0.0:
        base = OrbitLabel.zero()
    else:
        base = OrbitLabel(causal_class, radius)
    return make_irrep(base, full_stabilizer(base))


def classify_irrep(irrep: Irrep) -> IrrepKind:
    """Recompute the kind from the (stabilizer, subgroup) pair."""
    return _kind_for(irrep.subgroup, full_stabilizer(irrep.base))


# ---------------------------------------------------------------------------
# equivariance of the bundle charts

def orbit_seed(label: OrbitLabel) -> FourVector:
    cls = label.causal_class
    if cls is CausalClass.ZERO:
        return FourVector.zero()
    if cls is CausalClass.TIMELIKE_FUTURE:
        return FourVector(label.radius, 0, 0, 0)
    if cls is CausalClass.TIMELIKE_PAST:
        return FourVector(-label.radius, 0, 0, 0)
    if cls is CausalClass.NULL_FUTURE:
        return FourVector(1, 0, 0, 1)
    if cls is CausalClass.NULL_PAST:
        return FourVector(-1, 0, 0, 1)
    return FourVector(0, label.radius, 0, 0)


def _rotation_between(u: np.ndarray, v: np.ndarray) -> LorentzTransform:
    """Spatial rotation taking unit vector u to unit vector v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    c = float(np.clip(u @ v, -1.0, 1.0))
    axis = np.cross(u, v)
    norm = float(np.linalg.norm(axis))
    if norm < 1e-12:
        if c > 0:
            return LorentzTransform.identity()
        # antiparallel: half turn about any orthogonal direction
        helper = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        axis = np.cross(u, helper)
        axis /= np.linalg.norm(axis)
        return LorentzTransform.rotation(axis, np.pi)
    return LorentzTransform.rotation(axis / norm, float(np.arctan2(norm, c)))


def standard_transport(label: OrbitLabel, point: FourVector) -> LorentzTransform:
    """Group element carrying the orbit seed to the given orbit point."""
    cls = label.causal_class
    if cls is CausalClass.ZERO:
        return LorentzTransform.identity()
    p = point.as_array()
    spatial = p[1:]
    sn = float(np.linalg.norm(spatial))
    if cls.is_timelike:
        r = label.radius
        chi = float(np.arccosh(max(1.0, abs(p[0]) / r)))
        if sn < 1e-14:
            return LorentzTransform.identity()
        direction = spatial / sn
        if cls is CausalClass.TIMELIKE_PAST:
            direction = -direction
        return LorentzTransform.boost(direction, chi)
    if cls.is_null:
        energy = abs(p[0])
        if energy <= 0:
            raise ValueError("null orbit points have nonzero time component")
        direction = spatial / sn if sn > 1e-14 else np.array([0.0, 0.0, 1.0])
        # the past seed (-1, e_z) shrinks under a positive z-boost
        chi = float(np.log(energy))
        if cls is CausalClass.NULL_PAST:
            chi = -chi
        boost = LorentzTransform.boost([0, 0, 1], chi)
        return _rotation_between(np.array([0.0, 0.0, 1.0]), direction).compose(boost)
    # spacelike: boost along the first axis then rotate it into place
    r = label.radius
    chi = float(np.arcsinh(p[0] / r))
    direction = spatial / sn
    boost = LorentzTransform.boost([1, 0, 0], chi)
    return _rotation_between(np.array([1.0, 0.0, 0.0]), direction).compose(boost)


TransportChart = Callable[[OrbitLabel, FourVector], LorentzTransform]


@dataclass(frozen=True)
class EquivarianceReport:
    passed: bool
    n_samples: int
    max_chart_defect: float
    max_stabilizer_defect: float
    max_cocycle_defect: float


def check_equivariance(
    irrep: Irrep,
    n_samples: int = 40,
    seed: int = 0,
    tol: float = TAU_NUM,
    transport: TransportChart | None = None,
) -> EquivarianceReport:
    """Verify the bundle charts transform compatibly with the group action.

    Samples orbit points p and group elements g, and checks that (a) the
    chart carries the seed to p, (b) the chart-transition element
    inverse(chart(g p)) g chart(p) fixes the seed, so it lies in the
    stabilizer and acts on the model fiber, and (c) these transition
    elements satisfy the composition cocycle.  All defects are relative
    to the coordinate scale.  Opaque-fiber objects are rejected.
    """
    if irrep.kind is IrrepKind.NON_HAUSDORFF:
        raise ValueError("non-Hausdorff objects carry no usable charts")
    chart = transport or standard_transport
    label = irrep.base
    seed_pt = orbit_seed(label).as_array()
    pts = sample_orbit(label, n_samples, seed=seed, rapidity_max=2.0)
    rng = substream(seed, "equivariance", label.causal_class.name)
    chart_defect = 0.0
    stab_defect = 0.0
    cocycle_defect = 0.0
    for i in range(n_samples):
        p = FourVector.from_array(pts[i])
        lam = chart(label, p)
        scale = max(1.0, float(np.max(np.abs(pts[i]))))
        chart_defect = max(
            chart_defect, float(np.max(np.abs(lam.matrix @ seed_pt - pts[i]))) / scale
        )
        g = random_lorentz(rng, rapidity_max=1.5)
        gp = FourVector.from_array(g.matrix @ pts[i])
        w = chart(label, gp).inverse().compose(g).compose(lam)
        wscale = max(1.0, float(np.max(np.abs(w.matrix))))
        stab_defect = max(
            stab_defect, float(np.max(np.abs(w.matrix @ seed_pt - seed_pt))) / wscale
        )
        # cocycle: transition of a product is the product of transitions
        g2 = random_lorentz(rng, rapidity_max=1.5)
        g2p = FourVector.from_array(g2.matrix @ pts[i])
        w2 = chart(label, g2p).inverse().compose(g2).compose(lam)
        w12 = (
            chart(label, FourVector.from_array(g.matrix @ g2p.as_array()))
            .inverse()
            .compose(g.compose(g2))
            .compose(lam)
        )
        w1_at = chart(label, FourVector.from_array(g.matrix @ g2p.as_array())).inverse().compose(
            g
        ).compose(chart(label, g2p))
        combined = w1_at.matrix @ w2.matrix
        cscale = max(1.0, float(np.max(np.abs(combined))))
        cocycle_defect = max(
            cocycle_defect, float(np.max(np.abs(w12.matrix - combined))) / cscale
        )
    passed = chart_defect <= tol and stab_defect <= tol and cocycle_defect <= tol
    return EquivarianceReport(
        passed=passed,
        n_samples=n_samples,
        max_chart_defect=chart_defect,
        max_stabilizer_defect=stab_defect,
        max_cocycle_defect=cocycle_defect,
    )


# ---------------------------------------------------------------------------
# tensor decomposition of elementary objects

@dataclass(frozen=True)
class ContinuumFamily:
    """One-parameter family of objects entering a direct integral."""

    r_min: float
    r_max: float
    residual: StabilizerGroup
    fiber: FiberSpace
    includes_lower_endpoint: bool = False
    measure: str = "lebesgue_radius"

    def __post_init__(self) -> None:
        if not self.r_min < self.r_max:
            raise ValueError("continuum family range is degenerate")

    def member(self, r: float) -> Irrep:
        if not (self.r_min < r < self.r_max or (self.includes_lower_endpoint and r == self.r_min)):
            raise ValueError(f"radius {r} outside family range")
        return make_irrep(OrbitLabel(CausalClass.TIMELIKE_FUTURE, r), self.residual)

    def contains(self, r: float, tol: float = TAU_NUM) -> bool:
        return r > self.r_min + tol * max(1.0, self.r_min) and r < self.r_max


@dataclass(frozen=True)
class DirectIntegralDecomposition:
    continuum_families: tuple[ContinuumFamily, ...]
    discrete_terms: tuple[Irrep, ...]

    def locate_radius(self, r: float, tol: float = TAU_NUM) -> str | None:
        """'continuum', 'discrete', or None for a future-timelike radius."""
        for term in self.discrete_terms:
            scale = max(1.0, abs(term.radius))
            if abs(term.radius - r) <= tol * scale:
                return "discrete"
        for fam in self.continuum_families:
            if fam.contains(r, tol):
                return "continuum"
        return None


@dataclass(frozen=True)
class UnsupportedTensorReport:
    """Structured refusal for orbit-class pairs outside the worked domain."""

    label1: OrbitLabel
    label2: OrbitLabel
    reason: str
    class_histogram: Mapping[CausalClass, int]
    sum_range: SumRangeReport


def elementary_tensor(
    e1: Irrep, e2: Irrep, n_pairs: int = 20000, seed: int = 0
) -> DirectIntegralDecomposition | UnsupportedTensorReport:
    """Decompose a product of two elementary objects.

    Implemented for future-timelike bases (plus the zero-orbit identity
    object): a continuum of sphere-fiber families over radii above the
    sum, plus the discrete boundary term at the sum.  Other class pairs
    return a structured report with the sampled class census of the orbit
    sum instead of a decomposition.
    """
    for e in (e1, e2):
        if e.kind is not IrrepKind.ELEMENTARY:
            raise ValueError("tensor decomposition takes elementary objects")
    l1, l2 = e1.base, e2.base
    if l1.causal_class is CausalClass.ZERO:
        return DirectIntegralDecomposition((), (e2,))
    if l2.causal_class is CausalClass.ZERO:
        return DirectIntegralDecomposition((), (e1,))
    supported = (
        l1.causal_class is CausalClass.TIMELIKE_FUTURE
        and l2.causal_class is CausalClass.TIMELIKE_FUTURE
    )
    if not supported:
        census = orbit_sum_range(l1, l2, n_pairs=n_pairs, seed=seed)
        return UnsupportedTensorReport(
            label1=l1,
            label2=l2,
            reason=(
                "decomposition implemented only for future-timelike factors; "
                f"got {l1.causal_class.name} x {l2.causal_class.name}"
            ),
            class_histogram=census.class_counts,
            sum_range=census,
        )
    threshold = l1.radius + l2.radius
    family = ContinuumFamily(
        r_min=threshold,
        r_max=np.inf,
        residual=StabilizerGroup.u1(),
        fiber=FiberSpace(FiberKind.SPHERE2, 2, (StabilizerGroup.su2(), StabilizerGroup.u1())),
    )
    boundary = elementary(threshold)
    return DirectIntegralDecomposition((family,), (boundary,))


# ---------------------------------------------------------------------------
# triangle fibers and quadrilateral shape spaces

@dataclass(frozen=True)
class TriangleFiberReport:
    r1: float
    r2: float
    r: float
    status: str  # 'empty' | 'collinear' | 'generic'
    points: np.ndarray
    time_component: float | None
    spatial_radius: float | None
    empirical_dim: int | None
    transitive: bool | None
    max_transitivity_defect: float | None


def triangle_fiber(
    r1: float,
    r2: float,
    r: float,
    n_samples: int = 400,
    seed: int = 0,
    tol: float = TAU_NUM,
) -> TriangleFiberReport:
    """Points u on the radius-r1 future hyperboloid with (r,0,0,0) - u on
    the radius-r2 one, plus the empirical geometry of the solution set.

    The time component of any solution is fixed by the three radii; the
    spatial part sweeps a sphere whose squared radius can be negative
    (empty fiber, r below r1 + r2) or zero (single collinear solution).
    Transitivity of the rotations fixing the target is checked by
    explicitly rotating sample pairs onto each other.
    """
    if r1 <= 0 or r2 <= 0 or r <= 0:
        raise ValueError("radii must be positive")
    t = (r * r + r1 * r1 - r2 * r2) / (2.0 * r)
    scale = max(1.0, r * r, r1 * r1, r2 * r2)
    s2 = t * t - r1 * r1
    if t <= 0 or (r - t) <= 0 or s2 < -tol * scale:
        return TriangleFiberReport(r1, r2, r, "empty", np.empty((0, 4)), None, None, None, None, None)
    if s2 <= tol * scale:
        pt = np.array([[t, 0.0, 0.0, 0.0]])
        return TriangleFiberReport(r1, r2, r, "collinear", pt, t, 0.0, 0, True, 0.0)
    s = float(np.sqrt(s2))
    rng = substream(seed, "triangle-fiber")
    dirs = rng.standard_normal((n_samples, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    points = np.concatenate([np.full((n_samples, 1), t), s * dirs], axis=1)
    dim = empirical_dimension(points)
    # rotations about the target axis act on the spatial sphere; check
    # that sampled pairs are connected by an explicit rotation
    worst = 0.0
    m = min(40, n_samples - 1)
    for i in range(m):
        u, v = dirs[i], dirs[i + 1]
        rot = _rotation_between(u, v)
        moved = rot.matrix[1:, 1:] @ (s * u)
        worst = max(worst, float(np.max(np.abs(moved - s * v))) / max(1.0, s))
    return TriangleFiberReport(
        r1, r2, r, "generic", points, t, s, dim, bool(worst <= tol), worst
    )


class IsotropyTag(enum.Enum):
    TRIVIAL = "Trivial"
    SO2 = "SO2"
    SU2 = "SU2"


def quadrilateral_isotropy(u: np.ndarray, tol: float = 1e-9) -> IsotropyTag:
    """Isotropy of a closed 4-gon under rotations fixing the total vector.

    Determined by the rank of the span of the three free spatial edge
    vectors: full rank or rank 2 pins the frame (trivial isotropy), rank
    1 leaves the rotations about that axis, rank 0 leaves all rotations.
    """
    u = np.asarray(u, dtype=float).reshape(3, 4)
    spatial = u[:, 1:]
    s = np.linalg.svd(spatial, compute_uv=False)
    scale = max(float(s[0]), 1e-300)
    rank = int(np.sum(s > tol * max(1.0, scale)))
    if float(s[0]) <= tol:
        rank = 0
    if rank >= 2:
        return IsotropyTag.TRIVIAL
    if rank == 1:
        return IsotropyTag.SO2
    return IsotropyTag.SU2


@dataclass(frozen=True)
class QuadrilateralReport:
    radii: tuple[float, float, float]
    total: float
    feasible: bool
    samples: np.ndarray  # (n, 3, 4) edge vectors u1, u2, u3
    isotropy_counts: Mapping[IsotropyTag, int]
    tags: tuple[IsotropyTag, ...]
    measure_zero_tags: frozenset[IsotropyTag] = frozenset({IsotropyTag.SU2})


def quadrilateral_shape_space(
    r1: float,
    r2: float,
    r3: float,
    r_total: float,
    n_samples: int = 200,
    seed: int = 0,
    tol: float = TAU_NUM,
) -> QuadrilateralReport:
    """Sample closed 4-gons with future-timelike edges of the given radii
    summing to (r_total, 0, 0, 0) and classify the isotropy per sample.

    Closure is built through an intermediate radius s for the first two
    edges: s must sit between r1 + r2 and r_total - r3, so the data is
    feasible exactly when r_total >= r1 + r2 + r3.
    """
    for val in (r1, r2, r3, r_total):
        if val <= 0:
            raise ValueError("radii must be positive")
    s_lo, s_hi = r1 + r2, r_total - r3
    if s_hi < s_lo - tol * max(1.0, r_total):
        return QuadrilateralReport(
            (r1, r2, r3), r_total, False, np.empty((0, 3, 4)), {}, ()
        )
    rng = substream(seed, "quadrilateral")
    samples = np.empty((n_samples, 3, 4))
    target = np.array([r_total, 0.0, 0.0, 0.0])
    for i in range(n_samples):
        s = float(rng.uniform(s_lo, s_hi)) if s_hi > s_lo else s_lo
        u3 = _fiber_point(r3, s, r_total, rng)
        w = target - u3
        u1 = _split_first_edge(w, s, r1, r2, rng)
        samples[i, 0] = u1
        samples[i, 1] = w - u1
        samples[i, 2] = u3
    tags = tuple(quadrilateral_isotropy(samples[i]) for i in range(n_samples))
    counts: dict[IsotropyTag, int] = {}
    for tag in tags:
        counts[tag] = counts.get(tag, 0) + 1
    return QuadrilateralReport((r1, r2, r3), r_total, True, samples, counts, tags)


def _fiber_point(r_edge: float, r_other: float, r_tot: float, rng: np.random.Generator) -> np.ndarray:
    """Random solution u of |u| = r_edge, |target - u| = r_other."""
    t = (r_tot * r_tot + r_edge * r_edge - r_other * r_other) / (2.0 * r_tot)
    s2 = max(0.0, t * t - r_edge * r_edge)
    d = rng.standard_normal(3)
    d /= np.linalg.norm(d)
    return np.concatenate([[t], np.sqrt(s2) * d])


def _split_first_edge(
    w: np.ndarray, s: float, r1: float, r2: float, rng: np.random.Generator
) -> np.ndarray:
    """Random u1 with |u1| = r1 and |w - u1| = r2, for w of radius s."""
    t1 = (s * s + r1 * r1 - r2 * r2) / (2.0 * s)
    rho2 = max(0.0, t1 * t1 - r1 * r1)
    d = rng.standard_normal(3)
    d /= np.linalg.norm(d)
    local = np.concatenate([[t1], np.sqrt(rho2) * d])
    label = OrbitLabel(CausalClass.TIMELIKE_FUTURE, s)
    lam = standard_transport(label, FourVector.from_array(w))
    return lam.matrix @ local


def planar_quadrilateral(r1: float, r2: float, r3: float, r_total: float) -> np.ndarray:
    """Closed 4-gon with all spatial edge components on one axis."""
    s_lo, s_hi = r1 + r2, r_total - r3
    if s_hi <= s_lo:
        raise ValueError("needs strictly feasible data, r_total > r1 + r2 + r3")
    s = 0.5 * (s_lo + s_hi)
    t3 = (r_total**2 + r3**2 - s**2) / (2.0 * r_total)
    x3 = float(np.sqrt(max(0.0, t3 * t3 - r3 * r3)))
    u3 = np.array([t3, x3, 0.0, 0.0])
    w = np.array([r_total - t3, -x3, 0.0, 0.0])
    t1 = (s * s + r1 * r1 - r2 * r2) / (2.0 * s)
    rho = float(np.sqrt(max(0.0, t1 * t1 - r1 * r1)))
    local = np.array([t1, rho, 0.0, 0.0])
    label = OrbitLabel(CausalClass.TIMELIKE_FUTURE, s)
    lam = standard_transport(label, FourVector.from_array(w))
    u1 = lam.matrix @ local
    return np.stack([u1, w - u1, u3])


def collinear_quadrilateral(r1: float, r2: float, r3: float) -> np.ndarray:
    """Fully degenerate 4-gon: every edge on the time axis."""
    return np.array(
        [[r1, 0.0, 0.0, 0.0], [r2, 0.0, 0.0, 0.0], [r3, 0.0, 0.0, 0.0]]
    )


# ---------------------------------------------------------------------------
# duality and the two Hom decompositions

def dual(irrep: Irrep) -> Irrep:
    """Reflect the base orbit through the origin; residual data unchanged."""
    cls = irrep.base.causal_class
    flip = {
        CausalClass.TIMELIKE_FUTURE: CausalClass.TIMELIKE_PAST,
        CausalClass.TIMELIKE_PAST: CausalClass.TIMELIKE_FUTURE,
        CausalClass.NULL_FUTURE: CausalClass.NULL_PAST,
        CausalClass.NULL_PAST: CausalClass.NULL_FUTURE,
    }
    new_cls = flip.get(cls, cls)
    base = OrbitLabel(new_cls, irrep.base.radius)
    return make_irrep(base, irrep.subgroup)


@dataclass(frozen=True)
class OppositePairDecomposition:
    """Orbit content of sums of a future and a past timelike orbit."""

    r_future: float
    r_past: float
    future_window: tuple[float, float] | None  # (0, r_future - r_past]
    zero_atom: bool
    sampled_future_max: float | None
    census: SumRangeReport


def opposite_pair_decomposition(
    r_future: float, r_past: float, n_pairs: int = 20000, seed: int = 0, tol: float = TAU_NUM
) -> OppositePairDecomposition:
    """Decompose sums over a future orbit of radius r_future and a past
    orbit of radius r_past, with the future-timelike window cross-checked
    against the sampled census."""
    census = orbit_sum_range(
        OrbitLabel(CausalClass.TIMELIKE_FUTURE, r_future),
        OrbitLabel(CausalClass.TIMELIKE_PAST, r_past),
        n_pairs=n_pairs,
        seed=seed,
    )
    diff = r_future - r_past
    scale = max(1.0, r_future, r_past)
    zero_atom = abs(diff) <= tol * scale
    window = (0.0, diff) if diff > tol * scale else None
    sampled_max = None
    tf_range = census.radius_ranges.get(CausalClass.TIMELIKE_FUTURE)
    if tf_range is not None:
        sampled_max = tf_range[1]
    return OppositePairDecomposition(
        r_future=r_future,
        r_past=r_past,
        future_window=window,
        zero_atom=zero_atom,
        sampled_future_max=sampled_max,
        census=census,
    )


@dataclass(frozen=True)
class HomDecomposition:
    """The two routes to the morphism space between A and B tensor C."""

    a: Irrep
    b: Irrep
    c: Irrep
    via_tensor: DirectIntegralDecomposition  # decomposition of B (x) C
    via_tensor_match: str | None  # where A's radius lands
    via_dual_pair: OppositePairDecomposition  # content of A (x) dual(B)
    via_dual_pair_match: str | None  # where C's radius lands
    c_window_via_tensor: tuple[float, float] | None
    c_window_via_dual_pair: tuple[float, float] | None
    windows_agree: bool
    reduction_note: str | None

    @property
    def nonzero(self) -> bool:
        return self.via_tensor_match is not None


def hom_decomposition(
    a: Irrep, b: Irrep, c: Irrep, n_pairs: int = 20000, seed: int = 0, tol: float = TAU_NUM
) -> HomDecomposition:
    """Compute Hom(A, B (x) C) and Hom(A (x) dual(B), C) structurally.

    Route one decomposes B (x) C and locates A's radius in it; route two
    decomposes A (x) dual(B) by its orbit census and locates C's radius
    in the future-timelike window.  The window of admissible C radii is
    reported from both routes; they must agree.
    """
    for name, e in (("a", a), ("b", b), ("c", c)):
        if e.kind is not IrrepKind.ELEMENTARY:
            raise ValueError(f"{name} must be elementary")
        ok = e.base.causal_class in (CausalClass.TIMELIKE_FUTURE, CausalClass.ZERO)
        if not ok:
            raise ValueError(f"{name} must sit over a future-timelike or zero orbit")
    ra, rb, rc = a.radius, b.radius, c.radius
    side1 = elementary_tensor(b, c)
    assert isinstance(side1, DirectIntegralDecomposition)
    if b.base.causal_class is CausalClass.ZERO or c.base.causal_class is CausalClass.ZERO:
        # degenerate factors: B (x) C is a single discrete term
        term = side1.discrete_terms[0]
        match1 = "discrete" if abs(term.radius - ra) <= tol * max(1.0, ra) else None
    else:
        match1 = side1.locate_radius(ra, tol)

    reduction_note = None
    if c.base.causal_class is CausalClass.ZERO:
        reduction_note = (
            "trivial third factor: both routes reduce to the pairing of A "
            "against the dual of B, nonzero exactly when the radii match"
        )

    if b.base.causal_class is CausalClass.ZERO:
        # dual of the identity object is itself, so A (x) dual(B) is A
        match2 = "discrete" if abs(ra - rc) <= tol * max(1.0, ra, rc) else None
        window1 = None
        window2 = None
        agree = True
        census = orbit_sum_range(a.base, OrbitLabel.zero(), n_pairs=1000, seed=seed)
        side2 = OppositePairDecomposition(ra, 0.0, None, ra == 0.0, None, census)
    else:
        side2 = opposite_pair_decomposition(ra, rb, n_pairs=n_pairs, seed=seed, tol=tol)
        if c.base.causal_class is CausalClass.ZERO:
            match2 = "zero_atom" if side2.zero_atom else None
        elif side2.future_window is None:
            match2 = None
        else:
            hi = side2.future_window[1]
            scale = max(1.0, rc, hi)
            if abs(rc - hi) <= tol * scale:
                match2 = "boundary"
            elif 0.0 < rc < hi:
                match2 = "continuum"
            else:
                match2 = None
        # admissible C window from route one: subtract, from A's radius,
        # the B contribution as the tensor code reports it
        if side1.continuum_families:
            rb_from_tensor = side1.continuum_families[0].r_min - rc
        else:
            rb_from_tensor = side1.discrete_terms[0].radius - rc
        hi1 = ra - rb_from_tensor
        window1 = (0.0, hi1) if hi1 > tol * max(1.0, ra, rb) else None
        # route two's endpoint from the sampled census extreme
        hi2 = side2.sampled_future_max
        window2 = None
        if side2.future_window is not None and hi2 is not None:
            window2 = (0.0, hi2)
        if window1 is None and window2 is None:
            agree = True
        elif window1 is None or window2 is None:
            agree = False
        else:
            agree = abs(window1[1] - window2[1]) <= 1e-9 * max(1.0, window1[1])
    return HomDecomposition(
        a=a,
        b=b,
        c=c,
        via_tensor=side1,
        via_tensor_match=match1,
        via_dual_pair=side2,
        via_dual_pair_match=match2,
        c_window_via_tensor=window1,
        c_window_via_dual_pair=window2,
        windows_agree=agree,
        reduction_note=reduction_note,
    )
