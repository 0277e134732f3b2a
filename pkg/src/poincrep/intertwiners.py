"""Maps between representation objects and the surfaces between those maps.

Level-1 maps carry an orbit-component support table with Hilbert
dimension bookkeeping; level-2 maps are scalar fields on a quadrature
discretization of the common support, composed pointwise (vertical) or
by contraction over the middle orbit (horizontal).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .minkowski import (
    CausalClass,
    FourVector,
    LorentzTransform,
    OrbitLabel,
    random_lorentz,
)
from .numerics import TAU_NUM, nullspace_dimension
from .quadrature import HyperboloidWindow, ZonalTransform, hyperboloid_window
from .reps import (
    FiberKind,
    GroupTag,
    Irrep,
    IrrepKind,
    StabilizerGroup,
    orbit_seed,
    standard_transport,
    subgroup_catalog,
)
from .rng import substream

__all__ = [
    "Bridge",
    "bridge",
    "bridge_tangent_rank",
    "CocycleField",
    "sample_cocycle_triples",
    "CocycleCheckResult",
    "cocycle_check",
    "cocycle_solution_dimension",
    "random_positive_field",
    "SelfIntertwinerReport",
    "elementary_self_intertwiners",
    "SupportComponent",
    "OneIntertwiner",
    "build_strong_intertwiner",
    "identity_intertwiner",
    "zero_intertwiner",
    "promote_weak",
    "compose_1",
    "tensor_1",
    "tensor_whisker_orders",
    "TwoIntertwiner",
    "constant_cell",
    "unit_cell",
    "band_limited_cell",
    "compose_2_vertical",
    "compose_2_horizontal",
    "InterchangeReport",
    "check_interchange_conditions",
]


# ---------------------------------------------------------------------------
# bridges


@dataclass(frozen=True)
class Bridge:
    group: StabilizerGroup
    h1: StabilizerGroup
    h2: StabilizerGroup
    intersection: StabilizerGroup
    dim: int


def _intersect_same_axis(group: StabilizerGroup, a: StabilizerGroup, b: StabilizerGroup) -> StabilizerGroup:
    # circle subgroups of every catalogued group share one axis by convention
    if a.tag is GroupTag.NON_LIE or b.tag is GroupTag.NON_LIE:
        raise ValueError("opaque subgroups have no computable intersection")
    if a.tag == b.tag and a.tag is not GroupTag.CYCLIC:
        return a
    if a.tag == group.tag:
        return b
    if b.tag == group.tag:
        return a
    trivial = StabilizerGroup.trivial()
    if a.tag is GroupTag.TRIVIAL or b.tag is GroupTag.TRIVIAL:
        return trivial
    circle_tags = (GroupTag.U1, GroupTag.SO2)
    if a.tag in circle_tags and b.tag is GroupTag.CYCLIC:
        return b
    if b.tag in circle_tags and a.tag is GroupTag.CYCLIC:
        return a
    if a.tag is GroupTag.CYCLIC and b.tag is GroupTag.CYCLIC:
        g = math.gcd(a.order, b.order)
        return StabilizerGroup.cyclic(g) if g >= 2 else trivial
    raise ValueError(f"no shipped intersection for {a.tag.name} with {b.tag.name}")


def bridge(group: StabilizerGroup, h1: StabilizerGroup, h2: StabilizerGroup) -> Bridge:
    """Common-refinement data for a pair of subgroups of one stabilizer."""
    catalog = subgroup_catalog(group)
    for h in (h1, h2):
        if h.tag not in catalog:
            raise ValueError(f"{h.tag.name} is not a catalogued subgroup of {group.tag.name}")
    inter = _intersect_same_axis(group, h1, h2)
    if group.dim is None or inter.dim is None:
        raise ValueError("bridge dimension needs Lie inputs")
    return Bridge(group, h1, h2, inter, group.dim - inter.dim)


def _random_rotation_matrices(n: int, seed: int) -> np.ndarray:
    rng = substream(seed, "bridge-rank")
    out = np.empty((n, 3, 3))
    for i in range(n):
        # quaternion draw, uniform on the rotation group
        q = rng.standard_normal(4)
        q /= np.linalg.norm(q)
        w, x, y, z = q
        out[i] = [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    return out


def bridge_tangent_rank(b: Bridge, n_samples: int = 300, seed: int = 0) -> int:
    """Estimate the bridge dimension from sampled quotient-chart points."""
    from .numerics import empirical_dimension

    if b.group.tag is not GroupTag.SU2:
        raise ValueError("tangent-rank sampling is shipped for compact stabilizers only")
    rots = _random_rotation_matrices(n_samples, seed)
    if b.intersection.tag is GroupTag.SU2:
        pts = np.zeros((n_samples, 3))
    elif b.intersection.tag is GroupTag.U1:
        pts = rots @ np.array([0.0, 0.0, 1.0])
    else:
        # discrete or trivial intersection leaves the full group
        pts = rots.reshape(n_samples, 9)
    return empirical_dimension(pts)


# ---------------------------------------------------------------------------
# cocycle fields


def _apply(g: LorentzTransform, x: np.ndarray) -> np.ndarray:
    return g.matrix @ x


def _compose_in_action_order(g1: LorentzTransform, g2: LorentzTransform) -> LorentzTransform:
    # "g1 g2" acts as g1 first, then g2
    return g2.compose(g1)


@dataclass(frozen=True)
class CocycleField:
    """Scalar values n(g, x) over group elements paired with orbit points."""

    label: OrbitLabel
    fn: Callable[[LorentzTransform, np.ndarray], float]

    @staticmethod
    def constant(label: OrbitLabel, c: float) -> "CocycleField":
        return CocycleField(label, lambda g, x: c)

    @staticmethod
    def point_function(label: OrbitLabel, f: Callable[[np.ndarray], float]) -> "CocycleField":
        return CocycleField(label, lambda g, x: f(x))

    @staticmethod
    def coboundary(label: OrbitLabel, f: Callable[[np.ndarray], float]) -> "CocycleField":
        return CocycleField(label, lambda g, x: f(_apply(g, x)) / f(x))

    def value(self, g: LorentzTransform, x: np.ndarray) -> float:
        return float(self.fn(g, x))


def sample_cocycle_triples(
    label: OrbitLabel, n_triples: int, seed: int = 0, rapidity_max: float = 1.5
) -> list[tuple[LorentzTransform, LorentzTransform, np.ndarray]]:
    from .minkowski import sample_orbit

    rng = substream(seed, "cocycle-triples", label.causal_class.name)
    points = sample_orbit(label, n_triples, seed=seed, rapidity_max=rapidity_max)
    return [
        (random_lorentz(rng, rapidity_max), random_lorentz(rng, rapidity_max), points[i])
        for i in range(n_triples)
    ]


@dataclass(frozen=True)
class CocycleCheckResult:
    passed: bool
    max_residual: float
    n_triples: int


def cocycle_check(
    field: CocycleField,
    triples: Sequence[tuple[LorentzTransform, LorentzTransform, np.ndarray]],
    tol: float = TAU_NUM,
) -> CocycleCheckResult:
    """Verify n(g1, x) n(g2, g1 x) = n(g1 g2, x) on the sampled triples."""
    worst = 0.0
    for g1, g2, x in triples:
        lhs = field.value(g1, x) * field.value(g2, _apply(g1, x))
        rhs = field.value(_compose_in_action_order(g1, g2), x)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return CocycleCheckResult(worst <= tol, worst, len(triples))


def random_positive_field(label: OrbitLabel, seed: int = 0) -> CocycleField:
    """Smooth positive non-constant field, a negative control for the check."""
    rng = substream(seed, "positive-field")
    k = rng.normal(scale=1.0, size=4)
    phase = rng.uniform(0, 2 * np.pi)
    return CocycleField.point_function(
        label, lambda x: 1.0 + 0.5 * math.sin(float(k @ x) + phase)
    )


def cocycle_solution_dimension(
    label: OrbitLabel, n_points: int = 48, n_pairs: int = 300, seed: int = 0
) -> int:
    """Dimension of the field space the identity leaves free on one orbit.

    Each sampled point is an exact group translate of the orbit seed, so
    every pair (i, j) is connected by an explicit group element and the
    identity pins phi(x_j) = phi(x_i) without interpolation.  The null
    space of the stacked difference rows is the space of invariant fields.
    """
    from .minkowski import sample_orbit

    rng = substream(seed, "cocycle-lsq")
    points = sample_orbit(label, n_points, seed=seed, rapidity_max=1.5)
    seed_pt = orbit_seed(label).as_array()
    rows = np.zeros((n_pairs + n_points - 1, n_points))
    # a chain keeps the constraint graph connected
    for i in range(n_points - 1):
        rows[i, i] = -1.0
        rows[i, i + 1] = 1.0
    for k in range(n_pairs):
        i, j = rng.integers(0, n_points, size=2)
        if i == j:
            j = (i + 1) % n_points
        if k < 8 and label.causal_class is not CausalClass.ZERO:
            # spot-check the group element licensing this constraint
            hi = standard_transport(label, FourVector.from_array(points[i]))
            hj = standard_transport(label, FourVector.from_array(points[j]))
            moved = hj.compose(hi.inverse()).apply_batch(points[i : i + 1])[0]
            if not np.allclose(moved, points[j], atol=1e-8 * max(1.0, abs(label.radius))):
                raise AssertionError("transport chart failed to connect sampled points")
            assert np.allclose(hi.apply_batch(seed_pt[None])[0], points[i], atol=1e-8)
        rows[n_points - 1 + k, i] = -1.0
        rows[n_points - 1 + k, j] = 1.0
    return nullspace_dimension(rows)


@dataclass(frozen=True)
class SelfIntertwinerReport:
    family: str
    normalized_value: float
    solution_dimension: int


def elementary_self_intertwiners(e: Irrep, seed: int = 0) -> SelfIntertwinerReport:
    """Self-maps of a point-fiber object: the one-parameter constant family."""
    if e.kind is not IrrepKind.ELEMENTARY:
        raise ValueError("constants-only description applies to point-fiber objects")
    dim = cocycle_solution_dimension(e.base, seed=seed)
    return SelfIntertwinerReport("constants", 1.0, dim)


# ---------------------------------------------------------------------------
# level-1 maps

N_SPHERE_CELLS = 8

_SMOOTH_KINDS = (IrrepKind.ELEMENTARY, IrrepKind.LIE, IrrepKind.CRYSTALLOGRAPHIC)


@dataclass(frozen=True)
class SupportComponent:
    key: tuple[int, int]
    orbit_dim: int
    measure: float


@dataclass(frozen=True)
class OneIntertwiner:
    source: Irrep
    target: Irrep
    support: tuple[SupportComponent, ...]
    hilbert_dims: Mapping[tuple[int, int], int]
    measure_tag: str = "lebesgue"
    weak_data: Mapping[tuple[int, int], float] | None = None
    interchange_cell: "TwoIntertwiner | None" = None

    @property
    def is_zero(self) -> bool:
        return not self.support

    @property
    def base(self) -> OrbitLabel:
        return self.source.base

    def dims_table(self) -> tuple[tuple[tuple[int, int], int], ...]:
        return tuple(sorted(self.hilbert_dims.items()))

    def support_multiset(self) -> tuple[tuple[tuple[int, int], int], ...]:
        return tuple(sorted((c.key, c.orbit_dim) for c in self.support))


def _check_smooth(irrep: Irrep) -> None:
    if irrep.kind not in _SMOOTH_KINDS:
        raise ValueError("maps are defined between smooth-kind objects only")


def _same_base(a: OrbitLabel, b: OrbitLabel, tol: float = TAU_NUM) -> bool:
    if a.causal_class is not b.causal_class:
        return False
    return abs(a.radius - b.radius) <= tol * max(1.0, abs(a.radius))


def _fiber_cells(irrep: Irrep, n_cells: int) -> tuple[int, np.ndarray]:
    """Cell count and equal-measure cell weights for the supported fibers."""
    kind = irrep.fiber.kind
    if kind is FiberKind.POINT:
        return 1, np.array([1.0])
    if kind is FiberKind.SPHERE2:
        # equal-area colatitude bands, so each cell carries measure 1/n
        return n_cells, np.full(n_cells, 1.0 / n_cells)
    raise NotImplementedError("support tables are shipped for point and 2-sphere fibers")


def zero_intertwiner(source: Irrep, target: Irrep) -> OneIntertwiner:
    _check_smooth(source)
    _check_smooth(target)
    return OneIntertwiner(source, target, (), {})


def build_strong_intertwiner(
    source: Irrep,
    target: Irrep,
    hilbert_dims: Mapping[tuple[int, int], int] | int = 1,
    measure_tag: str = "lebesgue",
    n_cells: int = N_SPHERE_CELLS,
) -> OneIntertwiner:
    """Support table of the fiber product over the shared base orbit."""
    _check_smooth(source)
    _check_smooth(target)
    if measure_tag not in ("lebesgue", "custom"):
        raise ValueError("measure_tag must be 'lebesgue' or 'custom'")
    if not _same_base(source.base, target.base):
        return zero_intertwiner(source, target)
    n1, w1 = _fiber_cells(source, n_cells)
    n2, w2 = _fiber_cells(target, n_cells)
    pair_dim = source.fiber.dim + target.fiber.dim
    orbit_dim = pair_dim if pair_dim == 0 else 2
    support = []
    dims = {}
    for i in range(n1):
        for j in range(n2):
            key = (i, j)
            support.append(SupportComponent(key, orbit_dim, float(w1[i] * w2[j])))
            if isinstance(hilbert_dims, int):
                dims[key] = hilbert_dims
            else:
                dims[key] = int(hilbert_dims.get(key, 1))
    return OneIntertwiner(source, target, tuple(support), dims, measure_tag)


def identity_intertwiner(irrep: Irrep, n_cells: int = N_SPHERE_CELLS) -> OneIntertwiner:
    """Diagonal support with unit dimensions."""
    _check_smooth(irrep)
    n, w = _fiber_cells(irrep, n_cells)
    orbit_dim = 0 if irrep.fiber.kind is FiberKind.POINT else 2
    support = tuple(SupportComponent((i, i), orbit_dim, float(w[i])) for i in range(n))
    dims = {(i, i): 1 for i in range(n)}
    return OneIntertwiner(irrep, irrep, support, dims)


def promote_weak(
    i: OneIntertwiner, isotropy_rep_labels: Mapping[tuple[int, int], float]
) -> OneIntertwiner:
    """Attach an isotropy-representation label to every support component."""
    tag = i.source.subgroup.tag
    for key, lam in isotropy_rep_labels.items():
        if key not in i.hilbert_dims:
            raise ValueError(f"label for unknown support component {key}")
        if tag in (GroupTag.U1, GroupTag.SO2):
            if lam != int(lam):
                raise ValueError("circle-isotropy labels are integers")
        else:
            if (2 * lam) != int(2 * lam) or lam < 0:
                raise ValueError("rotation-isotropy labels are half-integer spins")
    missing = set(c.key for c in i.support) - set(isotropy_rep_labels)
    if missing:
        raise ValueError(f"missing labels for components {sorted(missing)}")
    return replace(i, weak_data=dict(isotropy_rep_labels))


def compose_1(f: OneIntertwiner, g: OneIntertwiner) -> OneIntertwiner:
    """Relative product over the shared middle object."""
    if f.target != g.source:
        raise ValueError("middle objects do not match")
    if f.is_zero or g.is_zero:
        return zero_intertwiner(f.source, g.target)
    middle_cells, middle_w = _fiber_cells(f.target, _cell_count(f, side=1))
    f_by_mid: dict[int, list[SupportComponent]] = {}
    for c in f.support:
        f_by_mid.setdefault(c.key[1], []).append(c)
    support: dict[tuple[int, int], SupportComponent] = {}
    dims: dict[tuple[int, int], int] = {}
    for cg in g.support:
        b, c = cg.key
        for cf in f_by_mid.get(b, ()):
            a = cf.key[0]
            key = (a, c)
            # disintegrate over the middle cell so identities compose strictly
            m = cf.measure * cg.measure / float(middle_w[b])
            d = f.hilbert_dims[cf.key] * g.hilbert_dims[cg.key]
            if key in support:
                old = support[key]
                support[key] = replace(old, measure=old.measure + m)
                dims[key] += d
            else:
                orbit_dim = max(cf.orbit_dim, cg.orbit_dim)
                support[key] = SupportComponent(key, orbit_dim, m)
                dims[key] = d
    tag = "lebesgue" if f.measure_tag == g.measure_tag == "lebesgue" else "custom"
    comps = tuple(support[k] for k in sorted(support))
    return OneIntertwiner(f.source, g.target, comps, dims, tag)


def _cell_count(i: OneIntertwiner, side: int) -> int:
    keys = [c.key[side] for c in i.support]
    return max(keys) + 1 if keys else 1


def tensor_1(
    f: OneIntertwiner,
    g: OneIntertwiner,
    interchange_choice: "TwoIntertwiner | None" = None,
) -> OneIntertwiner:
    """Product map on the distinguished summand of the tensor object."""
    from .reps import DirectIntegralDecomposition, elementary_tensor

    for end in (f.source, f.target, g.source, g.target):
        if end.kind is not IrrepKind.ELEMENTARY:
            raise NotImplementedError("tensor maps are shipped for point-fiber objects")
    src = elementary_tensor(f.source, g.source, n_pairs=200)
    tgt = elementary_tensor(f.target, g.target, n_pairs=200)
    if not isinstance(src, DirectIntegralDecomposition) or not isinstance(
        tgt, DirectIntegralDecomposition
    ):
        raise NotImplementedError("tensor factors outside the implemented domain")
    source = src.discrete_terms[0]
    target = tgt.discrete_terms[0]
    if f.is_zero or g.is_zero:
        return zero_intertwiner(source, target)
    key = (0, 0)
    dim = f.hilbert_dims[(0, 0)] * g.hilbert_dims[(0, 0)]
    tag = "lebesgue" if f.measure_tag == g.measure_tag == "lebesgue" else "custom"
    return OneIntertwiner(
        source,
        target,
        (SupportComponent(key, 0, 1.0),),
        {key: dim},
        tag,
        interchange_cell=interchange_choice,
    )


# ---------------------------------------------------------------------------
# level-2 maps


@dataclass(frozen=True, eq=False)
class TwoIntertwiner:
    """Scalar field on the quadrature nodes of the common support orbit."""

    source: OneIntertwiner
    target: OneIntertwiner
    values: np.ndarray
    domain: "ZonalTransform | HyperboloidWindow"
    volume_factor: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", vals)
        if vals.shape != (_domain_size(self.domain),):
            raise ValueError("field length does not match the node set")


def _domain_size(domain) -> int:
    if isinstance(domain, ZonalTransform):
        return domain.n_nodes
    return domain.nodes.shape[0]


def _domain_for(i: OneIntertwiner, n_nodes: int) -> "ZonalTransform | HyperboloidWindow":
    if i.source.fiber.kind is FiberKind.SPHERE2 or i.target.fiber.kind is FiberKind.SPHERE2:
        return _sphere_transform(n_nodes)
    return hyperboloid_window(max(i.base.radius, 1e-3))


_TRANSFORM_CACHE: dict[int, ZonalTransform] = {}


def _sphere_transform(n_nodes: int) -> ZonalTransform:
    if n_nodes not in _TRANSFORM_CACHE:
        _TRANSFORM_CACHE[n_nodes] = ZonalTransform(n_nodes)
    return _TRANSFORM_CACHE[n_nodes]


def constant_cell(i: OneIntertwiner, c: float, n_nodes: int = 256) -> TwoIntertwiner:
    domain = _domain_for(i, n_nodes)
    return TwoIntertwiner(i, i, np.full(_domain_size(domain), float(c)), domain)


def unit_cell(i: OneIntertwiner, n_nodes: int = 256) -> TwoIntertwiner:
    return constant_cell(i, 1.0, n_nodes)


def band_limited_cell(
    i: OneIntertwiner, seed: int = 0, amplitude: float = 0.5, n_nodes: int = 256
) -> TwoIntertwiner:
    domain = _domain_for(i, n_nodes)
    if not isinstance(domain, ZonalTransform):
        raise ValueError("band-limited fields are defined on sphere supports")
    rng = substream(seed, "cell-field")
    return TwoIntertwiner(i, i, domain.random_band_limited(rng, amplitude), domain)


def _require_same_domain(a: TwoIntertwiner, b: TwoIntertwiner) -> None:
    if a.domain is b.domain:
        return
    na, nb = _domain_size(a.domain), _domain_size(b.domain)
    if na != nb:
        raise ValueError("node sets differ; resample one field onto the other's nodes")
    ga = a.domain.nodes if hasattr(a.domain, "nodes") else None
    gb = b.domain.nodes if hasattr(b.domain, "nodes") else None
    if ga is not None and gb is not None and not np.array_equal(ga, gb):
        raise ValueError("node sets differ; resample one field onto the other's nodes")


def compose_2_vertical(a: TwoIntertwiner, b: TwoIntertwiner) -> TwoIntertwiner:
    """Stack b then a: pointwise product on the shared node set."""
    _require_same_domain(a, b)
    if a.source != b.target:
        raise ValueError("cells are not stacked: endpoints do not match")
    return TwoIntertwiner(b.source, a.target, a.values * b.values, a.domain)


def compose_2_horizontal(a: TwoIntertwiner, b: TwoIntertwiner) -> TwoIntertwiner:
    """Paste a then b sideways: contract over the middle orbit."""
    _require_same_domain(a, b)
    src = compose_1(a.source, b.source)
    tgt = compose_1(a.target, b.target)
    if isinstance(a.domain, ZonalTransform):
        t = a.domain
        return TwoIntertwiner(src, tgt, t.convolve(a.values, b.values), t)
    # truncated non-compact orbit: constant output, window volume explicit
    w = a.domain.weights
    value = float(np.dot(w, a.values * b.values))
    vals = np.full(a.values.shape, value)
    return TwoIntertwiner(src, tgt, vals, a.domain, volume_factor=float(w.sum()))


def tensor_whisker_orders(
    f: OneIntertwiner,
    g: OneIntertwiner,
    choice: TwoIntertwiner,
) -> tuple[TwoIntertwiner, TwoIntertwiner]:
    """Both pasting orders of the product square; they differ by `choice`."""
    t = tensor_1(f, g)
    strict = unit_cell(t, n_nodes=_domain_size(choice.domain))
    weak = compose_2_vertical(strict, choice)
    return strict, weak


@dataclass(frozen=True)
class InterchangeReport:
    passed: bool
    square_residual: float
    collapse_residual: float


def _rel_dev(x: np.ndarray, y: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(y))))
    return float(np.max(np.abs(x - y))) / scale


def check_interchange_conditions(
    grid: Sequence[Sequence[TwoIntertwiner]], tol: float = TAU_NUM
) -> InterchangeReport:
    """Verify the square exchange and the full-grid collapse on a 3x3 grid."""
    if len(grid) != 3 or any(len(row) != 3 for row in grid):
        raise ValueError("a 3x3 grid of cells is required")
    cells = [c for row in grid for c in row]
    for c in cells[1:]:
        _require_same_domain(cells[0], c)

    v, h = compose_2_vertical, compose_2_horizontal
    a, b_, c_, d = grid[0][0], grid[0][1], grid[1][0], grid[1][1]
    square_lhs = h(v(a, c_), v(b_, d))
    square_rhs = v(h(a, b_), h(c_, d))
    square_res = _rel_dev(square_lhs.values, square_rhs.values)

    def h3(row):
        return h(h(row[0], row[1]), row[2])

    def v3(col):
        return v(v(col[0], col[1]), col[2])

    rows_first = v3([h3(grid[0]), h3(grid[1]), h3(grid[2])])
    cols = [[grid[i][j] for i in range(3)] for j in range(3)]
    cols_first = h3([v3(cols[0]), v3(cols[1]), v3(cols[2])])
    collapse_res = _rel_dev(rows_first.values, cols_first.values)

    return InterchangeReport(
        square_res <= tol and collapse_res <= tol, square_res, collapse_res
    )
