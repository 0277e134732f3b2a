"""Triangulated 4-complex ingestion and the regularized partition sum.

Edge colors range over a hard cutoff window (0, cutoff]; every report
carries the cutoff so the regulator is never implicit.  Pentagon traces
pair the five boundary cells of a 4-simplex along two pasting orders and
the partition sum uses the plus order throughout.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dataclass_field, replace
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import _kernels
from .minkowski import sample_orbit, OrbitLabel, CausalClass
from .numerics import exact_sum, sorted_product
from .quadrature import ZonalTransform
from .rng import substream

__all__ = [
    "ParseError",
    "Triangulation",
    "load_triangulation",
    "FieldSpec",
    "FaceLabel",
    "Labelling",
    "load_labelling",
    "causal_chain_labelling",
    "unit_labelling",
    "AdmissibilityReport",
    "admissible",
    "AmplitudeConfig",
    "load_config",
    "bc_face_weight",
    "PentagonTrace",
    "five_j",
    "SphericityReport",
    "sphericity_check",
    "sphericity_sweep",
    "EvaluationResult",
    "evaluate_Z",
]


class ParseError(ValueError):
    """Malformed triangulation or label text; carries the 1-based line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _subtuples(vertices: Iterable[int], k: int) -> Iterator[tuple[int, ...]]:
    return itertools.combinations(sorted(vertices), k)


@dataclass(frozen=True)
class Triangulation:
    vertices: tuple[int, ...]
    simplices: tuple[tuple[int, int, int, int, int], ...]
    edges: tuple[tuple[int, int], ...]
    triangles: tuple[tuple[int, int, int], ...]
    tetrahedra: tuple[tuple[int, int, int, int], ...]
    triangle_edge_indices: np.ndarray
    tetra_simplex_count: Mapping[tuple[int, int, int, int], int]

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (
            len(self.edges),
            len(self.triangles),
            len(self.tetrahedra),
            len(self.simplices),
        )

    def simplex_tetrahedra(self, simplex: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
        return tuple(_subtuples(simplex, 4))


def _build_triangulation(simplices: list[tuple[int, ...]]) -> Triangulation:
    edges: set[tuple[int, int]] = set()
    triangles: set[tuple[int, int, int]] = set()
    tetras: dict[tuple[int, int, int, int], int] = {}
    vertices: set[int] = set()
    for s in simplices:
        vertices.update(s)
        edges.update(_subtuples(s, 2))
        triangles.update(_subtuples(s, 3))
        for tet in _subtuples(s, 4):
            tetras[tet] = tetras.get(tet, 0) + 1
    for tet, count in tetras.items():
        if count > 2:
            raise ValueError(
                f"tetrahedron {tet} belongs to {count} 4-simplices; "
                "at most 2 are allowed"
            )
    edge_list = tuple(sorted(edges))
    tri_list = tuple(sorted(triangles))
    edge_index = {e: i for i, e in enumerate(edge_list)}
    tri_edges = np.array(
        [
            [edge_index[(a, b)], edge_index[(a, c)], edge_index[(b, c)]]
            for a, b, c in tri_list
        ],
        dtype=np.int64,
    ).reshape(len(tri_list), 3)
    return Triangulation(
        tuple(sorted(vertices)),
        tuple(sorted(tuple(sorted(s)) for s in simplices)),
        edge_list,
        tri_list,
        tuple(sorted(tetras)),
        tri_edges,
        dict(tetras),
    )


def load_triangulation(text: str) -> Triangulation:
    """Parse `dim 4` followed by `simplex v0 v1 v2 v3 v4` lines."""
    simplices: list[tuple[int, ...]] = []
    saw_dim = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if not saw_dim:
            if tokens[0] != "dim" or len(tokens) != 2 or tokens[1] != "4":
                raise ParseError("expected 'dim 4' header", lineno)
            saw_dim = True
            continue
        if tokens[0] != "simplex":
            raise ParseError(f"unknown directive {tokens[0]!r}", lineno)
        if len(tokens) != 6:
            raise ParseError("a 4-simplex needs exactly 5 vertices", lineno)
        try:
            verts = tuple(int(v) for v in tokens[1:])
        except ValueError:
            raise ParseError("vertex labels must be integers", lineno) from None
        if len(set(verts)) != 5:
            raise ParseError(f"duplicated vertex in simplex {verts}", lineno)
        simplices.append(verts)
    if not saw_dim:
        raise ParseError("empty input, expected 'dim 4' header", 1)
    if not simplices:
        raise ParseError("no simplices given", 1)
    return _build_triangulation(simplices)


# ---------------------------------------------------------------------------
# labellings


@dataclass(frozen=True)
class FieldSpec:
    """Recipe for a scalar cell field on the trace node set."""

    kind: str = "unit"
    value: float = 1.0
    seed: int = 0
    amplitude: float = 0.5

    def resolve(self, transform: ZonalTransform) -> np.ndarray:
        if self.kind == "unit":
            return np.ones(transform.n_nodes)
        if self.kind == "constant":
            return np.full(transform.n_nodes, float(self.value))
        if self.kind == "band":
            rng = substream(self.seed, "cell-field")
            return transform.random_band_limited(rng, self.amplitude)
        raise ValueError(f"unknown field kind {self.kind!r}")


@dataclass(frozen=True)
class FaceLabel:
    kind: str = "constant"
    n: int = 0


@dataclass(frozen=True)
class Labelling:
    edge_colors: Mapping[tuple[int, int], float] = dataclass_field(default_factory=dict)
    face_labels: Mapping[tuple[int, int, int], FaceLabel] = dataclass_field(default_factory=dict)
    tetra_labels: Mapping[tuple[int, int, int, int], FieldSpec] = dataclass_field(default_factory=dict)


def load_labelling(text: str, t: Triangulation) -> Labelling:
    """Parse `edge v_a v_b rho <real>` lines into edge colors."""
    colors: dict[tuple[int, int], float] = {}
    known = set(t.edges)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] != "edge" or len(tokens) != 5 or tokens[3] != "rho":
            raise ParseError("expected 'edge v_a v_b rho <real>'", lineno)
        try:
            a, b = int(tokens[1]), int(tokens[2])
            rho = float(tokens[4])
        except ValueError:
            raise ParseError("malformed edge line", lineno) from None
        key = (min(a, b), max(a, b))
        if key not in known:
            raise ParseError(f"edge {key} is not in the complex", lineno)
        if rho < 0:
            raise ParseError("colors must be nonnegative", lineno)
        colors[key] = rho
    tetra = {tet: FieldSpec() for tet in t.tetrahedra}
    return Labelling(edge_colors=colors, tetra_labels=tetra)


def causal_chain_labelling(t: Triangulation, seed: int = 0, step_scale: float = 1.0) -> Labelling:
    """Admissible edge colors from a random future-directed vertex chain.

    Consecutive vertices are separated by future-timelike steps, so every
    pairwise separation is future-timelike and radii grow at least
    additively along any triangle: each triangle's longest side dominates
    the other two automatically.
    """
    order = list(t.vertices)
    steps = sample_orbit(
        OrbitLabel(CausalClass.TIMELIKE_FUTURE, step_scale),
        max(len(order) - 1, 1),
        seed=seed,
        rapidity_max=1.0,
    )
    positions = {order[0]: np.zeros(4)}
    for i, v in enumerate(order[1:]):
        positions[v] = positions[order[i]] + steps[i]
    colors = {}
    for a, b in t.edges:
        d = positions[b] - positions[a]
        colors[(a, b)] = float(np.sqrt(d[0] ** 2 - d[1] ** 2 - d[2] ** 2 - d[3] ** 2))
    tetra = {tet: FieldSpec() for tet in t.tetrahedra}
    faces = {tri: FaceLabel() for tri in t.triangles}
    return Labelling(edge_colors=colors, face_labels=faces, tetra_labels=tetra)


def unit_labelling(t: Triangulation) -> Labelling:
    """Unit cell fields with no edge colors (colors integrated elsewhere)."""
    return Labelling(tetra_labels={tet: FieldSpec() for tet in t.tetrahedra})


@dataclass(frozen=True)
class AdmissibilityReport:
    passed: bool
    triangle_status: Mapping[tuple[int, int, int], str]
    missing_edges: tuple[tuple[int, int], ...]

    @property
    def collinear(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(k for k, v in self.triangle_status.items() if v == "collinear")


def admissible(t: Triangulation, l: Labelling) -> AdmissibilityReport:
    """Check every triangle's colors against the dominant-side condition."""
    missing = tuple(e for e in t.edges if e not in l.edge_colors)
    if missing:
        return AdmissibilityReport(False, {}, missing)
    status = {}
    ok = True
    for a, b, c in t.triangles:
        sides = (
            l.edge_colors[(a, b)],
            l.edge_colors[(a, c)],
            l.edge_colors[(b, c)],
        )
        total = (sides[0] + sides[1]) + sides[2]
        mx = max(sides)
        gap = 2.0 * mx - total
        scale = max(1.0, total)
        if abs(gap) <= 1e-12 * scale:
            status[(a, b, c)] = "collinear"
        elif gap > 0:
            status[(a, b, c)] = "pass"
        else:
            status[(a, b, c)] = "fail"
            ok = False
    return AdmissibilityReport(ok, status, ())


# ---------------------------------------------------------------------------
# amplitude configuration


@dataclass(frozen=True)
class AmplitudeConfig:
    face_amplitude: str = "unit"
    tetra_amplitude: str = "unit"
    edge_weight: str = "rho"
    cutoff: float = 1.0
    integrator: str = "grid"
    resolution: int = 4
    samples: int = 10000
    seed: int = 0
    normalization: float = 1.0
    face_n: float = 0.0
    trace_nodes: int = 256
    custom_face_table: Mapping[tuple[int, int, int], float] | None = None
    custom_tetra_table: Mapping[tuple[int, int, int, int], float] | None = None

    def __post_init__(self):
        if self.cutoff <= 0:
            raise ValueError("cutoff must be positive")
        if self.integrator not in ("grid", "monte_carlo"):
            raise ValueError("integrator must be 'grid' or 'monte_carlo'")
        if self.resolution < 1 or self.samples < 1:
            raise ValueError("resolution and samples must be at least 1")
        if self.face_amplitude not in ("unit", "bc_weight", "custom"):
            raise ValueError("unknown face amplitude strategy")
        if self.tetra_amplitude not in ("unit", "custom"):
            raise ValueError("unknown tetra amplitude strategy")
        if self.edge_weight not in ("rho", "unit"):
            raise ValueError("edge weight must be 'rho' or 'unit'")


_CONFIG_FIELDS = {
    "face_amplitude": str,
    "tetra_amplitude": str,
    "edge_weight": str,
    "cutoff": float,
    "integrator": str,
    "resolution": int,
    "samples": int,
    "seed": int,
    "normalization": float,
    "face_n": float,
    "trace_nodes": int,
}


def load_config(text: str) -> AmplitudeConfig:
    """Parse flat `key = value` lines."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_FIELDS:
            raise ParseError(f"unknown config key {key!r}", lineno)
        try:
            values[key] = _CONFIG_FIELDS[key](val.strip())
        except ValueError:
            raise ParseError(f"bad value for {key!r}", lineno) from None
    return AmplitudeConfig(**values)


def bc_face_weight(rho: float, n: float) -> float:
    """Squared face label magnitude: rho**2 + n**2."""
    return rho * rho + n * n


# ---------------------------------------------------------------------------
# pentagon traces


@dataclass(frozen=True)
class PentagonTrace:
    plus_value: float
    minus_value: float
    residual: float
    n_nodes: int


_TRANSFORMS: dict[int, ZonalTransform] = {}


def _transform(n_nodes: int) -> ZonalTransform:
    if n_nodes not in _TRANSFORMS:
        _TRANSFORMS[n_nodes] = ZonalTransform(n_nodes)
    return _TRANSFORMS[n_nodes]


def _pentagon_pairing(
    fields: list[np.ndarray], transform: ZonalTransform
) -> tuple[float, float]:
    a1, a2, a3, a4, a5 = fields
    conv = transform.convolve
    left_minus = conv(a1, a3)
    right_plus = conv(a2, a4)
    left_plus = conv(left_minus, a5)
    right_minus = conv(right_plus, a5)
    w = transform.weights
    plus = float(np.dot(w, left_plus * right_plus))
    minus = float(np.dot(w, left_minus * right_minus))
    return plus, minus


def five_j(
    simplex: tuple[int, int, int, int, int],
    l: Labelling,
    cfg: AmplitudeConfig,
) -> PentagonTrace:
    """Trace the five boundary cells along both pasting orders."""
    verts = tuple(sorted(simplex))
    if len(set(verts)) != 5:
        raise ValueError("a 4-simplex needs 5 distinct vertices")
    tetras = list(_subtuples(verts, 4))
    missing = [tet for tet in tetras if tet not in l.tetra_labels]
    if missing:
        raise ValueError(f"unlabelled tetrahedra: {missing}")
    if l.edge_colors:
        colors = {}
        for e in _subtuples(verts, 2):
            if e not in l.edge_colors:
                raise ValueError(f"edge {e} of the simplex is uncolored")
            colors[e] = l.edge_colors[e]
        sub = _build_triangulation([verts])
        report = admissible(sub, replace(l, edge_colors=colors))
        if not report.passed:
            bad = [k for k, v in report.triangle_status.items() if v == "fail"]
            raise ValueError(f"incompatible face labels on triangles {bad}")
    transform = _transform(cfg.trace_nodes)
    fields = [l.tetra_labels[tet].resolve(transform) for tet in tetras]
    plus, minus = _pentagon_pairing(fields, transform)
    if not (math.isfinite(plus) and math.isfinite(minus)):
        raise ValueError("pentagon trace produced non-finite values")
    return PentagonTrace(plus, minus, abs(plus - minus), cfg.trace_nodes)


@dataclass(frozen=True)
class SphericityReport:
    max_residual: float
    trials: int
    n_nodes: int
    n_simplices: int


def sphericity_check(
    t: Triangulation,
    l: Labelling,
    cfg: AmplitudeConfig,
    trials: int = 20,
    amplitude: float = 0.5,
) -> SphericityReport:
    """Max plus/minus residual over random cell-field draws.

    With trials=0 the labelled fields themselves are traced once per
    4-simplex instead of random draws.
    """
    transform = _transform(cfg.trace_nodes)
    worst = 0.0
    if trials == 0:
        for s in t.simplices:
            trace = five_j(s, l, cfg)
            worst = max(worst, trace.residual)
        return SphericityReport(worst, 0, cfg.trace_nodes, len(t.simplices))
    for trial in range(trials):
        for si, s in enumerate(t.simplices):
            rng = substream(cfg.seed, "sphericity", str(trial), str(si))
            fields = [
                transform.random_band_limited(rng, amplitude) for _ in range(5)
            ]
            plus, minus = _pentagon_pairing(fields, transform)
            worst = max(worst, abs(plus - minus))
    return SphericityReport(worst, trials, cfg.trace_nodes, len(t.simplices))


def sphericity_sweep(
    t: Triangulation,
    l: Labelling,
    cfg: AmplitudeConfig,
    node_sizes: tuple[int, ...] = (64, 256, 1024, 4096),
    trials: int = 6,
    amplitude: float = 0.5,
) -> tuple[float, ...]:
    """Max residual at each node count, a quadrature convergence study."""
    out = []
    for n in node_sizes:
        rep = sphericity_check(
            t, l, replace(cfg, trace_nodes=n), trials=trials, amplitude=amplitude
        )
        out.append(rep.max_residual)
    return tuple(out)


# ---------------------------------------------------------------------------
# the partition sum


@dataclass(frozen=True)
class EvaluationResult:
    value: float
    std_error: float | None
    integrator: str
    n_evaluations: int
    admissible_fraction: float
    five_j_factor: float
    cutoff: float
    normalization: float
    backend: str


def _constant_prefactor(t: Triangulation, cfg: AmplitudeConfig) -> float:
    factors: list[float] = []
    if cfg.face_amplitude == "custom":
        table = cfg.custom_face_table or {}
        factors.extend(float(table.get(tri, 1.0)) for tri in t.triangles)
    if cfg.tetra_amplitude == "custom":
        table = cfg.custom_tetra_table or {}
        factors.extend(float(table.get(tet, 1.0)) for tet in t.tetrahedra)
    return sorted_product(factors) if factors else 1.0


def _grid_colors(flat: np.ndarray, n_edges: int, resolution: int, cutoff: float) -> np.ndarray:
    digits = np.empty((flat.size, n_edges), dtype=np.float64)
    rem = flat.copy()
    for e in range(n_edges - 1, -1, -1):
        digits[:, e] = rem % resolution
        rem //= resolution
    return (digits + 0.5) * (cutoff / resolution)


def evaluate_Z(t: Triangulation, cfg: AmplitudeConfig) -> EvaluationResult:
    """Integrate the color weight over the cutoff window.

    Grid integration streams every cell value through one exactly rounded
    sum, so the result is independent of enumeration order and therefore
    of vertex relabelling.  Monte Carlo reports a standard error instead.
    """
    n_edges = len(t.edges)
    tri_idx = t.triangle_edge_indices
    face_mode = 1 if cfg.face_amplitude == "bc_weight" else 0
    weight_by_color = cfg.edge_weight == "rho"

    unit = unit_labelling(t)
    eta = five_j(t.simplices[0], unit, cfg).plus_value if t.simplices else 1.0
    simplex_factor = np.full(len(t.simplices), eta)

    prefactor = cfg.normalization * _constant_prefactor(t, cfg)

    def integrand(colors: np.ndarray) -> np.ndarray:
        return _kernels.statesum_integrand(
            colors,
            tri_idx,
            tri_idx,
            simplex_factor,
            weight_by_color,
            face_mode,
            cfg.face_n,
        )

    if cfg.integrator == "grid":
        total = cfg.resolution**n_edges
        chunk = 200_000
        n_admissible = 0

        def stream():
            nonlocal n_admissible
            for start in range(0, total, chunk):
                flat = np.arange(start, min(start + chunk, total), dtype=np.int64)
                vals = integrand(_grid_colors(flat, n_edges, cfg.resolution, cfg.cutoff))
                n_admissible += int(np.count_nonzero(vals))
                yield from vals.tolist()

        cell = (cfg.cutoff / cfg.resolution) ** n_edges
        value = prefactor * exact_sum(stream()) * cell
        return EvaluationResult(
            value,
            None,
            "grid",
            total,
            n_admissible / total,
            eta,
            cfg.cutoff,
            cfg.normalization,
            _kernels.BACKEND,
        )

    rng = substream(cfg.seed, "statesum-mc")
    colors = cfg.cutoff * (1.0 - rng.random((cfg.samples, n_edges)))
    vals = integrand(colors)
    volume = cfg.cutoff**n_edges
    mean = float(vals.mean())
    value = prefactor * volume * mean
    spread = float(vals.std(ddof=1)) if cfg.samples > 1 else 0.0
    std_error = abs(prefactor) * volume * spread / math.sqrt(cfg.samples)
    return EvaluationResult(
        value,
        std_error,
        "monte_carlo",
        cfg.samples,
        float(np.count_nonzero(vals)) / cfg.samples,
        eta,
        cfg.cutoff,
        cfg.normalization,
        _kernels.BACKEND,
    )
