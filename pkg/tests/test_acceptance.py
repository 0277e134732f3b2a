"""The ten gate checks, one test per criterion, with pinned tolerances.

Each test prints a single verdict line (visible under ``pytest -s`` or in
captured output) and asserts its own runtime budget.
"""
from __future__ import annotations

import itertools
import math
import time
from collections import Counter

import numpy as np

from poincrep import statesum as ss
from poincrep.intertwiners import (
    CocycleField,
    cocycle_check,
    cocycle_solution_dimension,
    random_positive_field,
    sample_cocycle_triples,
)
from poincrep.kirillov import su2_flux, su2_tensor_decompose
from poincrep.minkowski import (
    CausalClass,
    FourVector,
    OrbitLabel,
    classify_batch,
    orbit_sum_range,
    random_lorentz,
    sample_orbit,
)
from poincrep.numerics import TAU_NUM
from poincrep.reps import elementary, hom_decomposition, triangle_fiber
from poincrep.rng import substream
from poincrep.twogroup import TwoMorphism, interchange_residual

SINGLE = "dim 4\nsimplex 0 1 2 3 4\n"


def _verdict(n: int, budget: float, started: float, detail: str) -> None:
    elapsed = time.perf_counter() - started
    assert elapsed < budget, f"criterion {n} took {elapsed:.2f}s, budget {budget}s"
    print(f"ACCEPTANCE {n}: PASS - {detail} ({elapsed:.2f}s < {budget:.0f}s)")


# -- 1 ----------------------------------------------------------------------


def spin_product_oracle(j: float, l: float) -> list[float]:
    """Peel highest weights off the product weight multiset."""
    counts: Counter[int] = Counter()
    for two_m1 in range(-int(2 * j), int(2 * j) + 1, 2):
        for two_m2 in range(-int(2 * l), int(2 * l) + 1, 2):
            counts[two_m1 + two_m2] += 1
    spins = []
    while counts:
        top = max(counts)
        spins.append(top / 2.0)
        for two_m in range(-top, top + 1, 2):
            counts[two_m] -= 1
            if counts[two_m] == 0:
                del counts[two_m]
    return sorted(spins)


def test_criterion_01_spin_product_oracle():
    started = time.perf_counter()
    for two_j, two_l in itertools.product(range(9), repeat=2):
        j, l = two_j / 2.0, two_l / 2.0
        assert sorted(su2_tensor_decompose(j, l)) == spin_product_oracle(j, l)
    _verdict(1, 1.0, started, "81 spin products match the weight-multiplicity oracle exactly")


# -- 2 ----------------------------------------------------------------------


def test_criterion_02_invariant_preservation():
    started = time.perf_counter()
    labels = [
        OrbitLabel(CausalClass.TIMELIKE_FUTURE, 1.5),
        OrbitLabel(CausalClass.SPACELIKE, 2.0),
        OrbitLabel(CausalClass.TIMELIKE_FUTURE, 0.7),
        OrbitLabel(CausalClass.SPACELIKE, 1.0),
    ]
    points = np.vstack([sample_orbit(lb, 25, seed=20) for lb in labels])
    codes0, radii0 = classify_batch(points)
    rng = substream(21, "acceptance-invariants")
    worst = 0.0
    for _ in range(100):
        g = random_lorentz(rng, rapidity_max=3.0)
        codes, radii = classify_batch(g.apply_batch(points))
        assert np.array_equal(codes, codes0)
        drift = np.abs(radii - radii0) / np.maximum(1.0, np.abs(radii0))
        worst = max(worst, float(drift.max()))
    assert worst <= 1e-8
    _verdict(2, 5.0, started, f"10000 transported points: class fixed, radius drift {worst:.2e}")


# -- 3 ----------------------------------------------------------------------


def test_criterion_03_sum_radius_bound():
    started = time.perf_counter()
    details = []
    for r1, r2 in ((1.0, 1.0), (1.0, 2.0), (0.5, 3.0)):
        rep = orbit_sum_range(
            OrbitLabel(CausalClass.TIMELIKE_FUTURE, r1),
            OrbitLabel(CausalClass.TIMELIKE_FUTURE, r2),
            n_pairs=1_000_000,
            seed=30,
        )
        floor = r1 + r2
        assert rep.radius_min >= floor - 1e-6
        # the steered near-collinear stratum must brush the bound
        assert rep.radius_min <= floor + 1e-3
        assert rep.classes == {CausalClass.TIMELIKE_FUTURE}
        details.append(f"({r1},{r2}): min {rep.radius_min:.6f}")
    _verdict(3, 30.0, started, "3x10^6 pairs respect the radius floor; " + "; ".join(details))


# -- 4 ----------------------------------------------------------------------


def test_criterion_04_triangle_fiber_geometry():
    started = time.perf_counter()
    rng = substream(40, "acceptance-triangles")
    for k in range(20):
        r1, r2 = rng.uniform(0.5, 2.0, size=2)
        gap = rng.uniform(0.3, 2.0)
        generic = triangle_fiber(r1, r2, r1 + r2 + gap, seed=k)
        assert generic.status == "generic"
        assert generic.empirical_dim == 2
        collinear = triangle_fiber(r1, r2, r1 + r2, seed=k)
        assert collinear.status == "collinear"
        assert collinear.empirical_dim == 0
        below = triangle_fiber(r1, r2, max(0.1, (r1 + r2) * 0.9), seed=k)
        assert below.status == "empty"
        assert len(below.points) == 0
    _verdict(4, 30.0, started, "20 triples: rank 2 generic, 0 collinear, empty below the floor")


# -- 5 ----------------------------------------------------------------------


def test_criterion_05_cocycle_rigidity():
    started = time.perf_counter()
    label = OrbitLabel(CausalClass.TIMELIKE_FUTURE, 1.0)
    triples = sample_cocycle_triples(label, n_triples=60, seed=50)
    unit = cocycle_check(CocycleField.constant(label, 1.0), triples)
    assert unit.max_residual == 0.0
    failures = 0
    for k in range(100):
        field = random_positive_field(label, seed=1000 + k)
        res = cocycle_check(field, triples)
        if res.max_residual > 1e-3:
            failures += 1
    assert failures == 100
    dim = cocycle_solution_dimension(label, seed=51)
    assert dim == 1
    _verdict(5, 10.0, started, "unit passes exactly, 100/100 random fields fail, solution dim 1")


# -- 6 ----------------------------------------------------------------------


def test_criterion_06_flux_quantization():
    started = time.perf_counter()
    base = su2_flux(0.5, n_nodes=10_000).value
    worst = 0.0
    for two_j in range(1, 9):
        j = two_j / 2.0
        ratio = su2_flux(j, n_nodes=10_000).value / base
        worst = max(worst, abs(ratio - two_j))
    assert worst <= 1e-4
    _verdict(6, 10.0, started, f"flux ratios integral to {worst:.2e} at 10^4 nodes")


# -- 7 ----------------------------------------------------------------------


def test_criterion_07_interchange_law():
    started = time.perf_counter()
    rng = substream(70, "acceptance-interchange")
    worst = 0.0
    for _ in range(1000):
        g1 = random_lorentz(rng, rapidity_max=2.0)
        g2 = random_lorentz(rng, rapidity_max=2.0)
        xs = rng.normal(scale=2.0, size=(4, 4))
        a = TwoMorphism(g1, FourVector.from_array(xs[0]))
        b = TwoMorphism(g1, FourVector.from_array(xs[1]))
        c = TwoMorphism(g2, FourVector.from_array(xs[2]))
        d = TwoMorphism(g2, FourVector.from_array(xs[3]))
        worst = max(worst, interchange_residual(a, b, c, d))
    assert worst <= TAU_NUM
    _verdict(7, 1.0, started, f"1000 quadruples, worst residual {worst:.2e}")


# -- 8 ----------------------------------------------------------------------


def test_criterion_08_sphericity():
    started = time.perf_counter()
    t = ss.load_triangulation(SINGLE)
    lab = ss.causal_chain_labelling(t, seed=80)
    cfg = ss.AmplitudeConfig(trace_nodes=1024)
    rep = ss.sphericity_check(t, lab, cfg, trials=20)
    assert rep.max_residual <= 1e-3
    sweep = ss.sphericity_sweep(t, lab, cfg, node_sizes=(64, 256, 1024, 4096), trials=5)
    assert all(hi > lo for hi, lo in zip(sweep, sweep[1:]))
    _verdict(
        8, 60.0, started,
        f"residual {rep.max_residual:.2e} at 1024 nodes; sweep {['%.1e' % s for s in sweep]}",
    )


# -- 9 ----------------------------------------------------------------------


def brute_force_Z(t: ss.Triangulation, cfg: ss.AmplitudeConfig, eta: float) -> float:
    n_edges = len(t.edges)
    tris = [tuple(row) for row in t.triangle_edge_indices]
    step = cfg.cutoff / cfg.resolution
    grid_vals = [(i + 0.5) * step for i in range(cfg.resolution)]
    kept = []
    for combo in itertools.product(grid_vals, repeat=n_edges):
        ok = True
        for i, j, k in tris:
            a, b, d = combo[i], combo[j], combo[k]
            if 2.0 * max(a, b, d) < (a + b) + d:
                ok = False
                break
        if not ok:
            continue
        prod = 1.0
        for f in sorted(list(combo) + [eta]):
            prod *= f
        kept.append(prod)
    return cfg.normalization * math.fsum(kept) * step**n_edges


def test_criterion_09_state_sum_oracle():
    started = time.perf_counter()
    t = ss.load_triangulation(SINGLE)
    cfg = ss.AmplitudeConfig(resolution=4)
    grid = ss.evaluate_Z(t, cfg)
    oracle = brute_force_Z(t, cfg, grid.five_j_factor)
    rel = abs(grid.value - oracle) / abs(oracle)
    assert rel <= 1e-10
    mc = ss.evaluate_Z(
        t, ss.AmplitudeConfig(integrator="monte_carlo", samples=50_000, seed=11)
    )
    sigma = abs(mc.value - grid.value) / mc.std_error
    assert sigma <= 3.0
    relabelled = ss.load_triangulation("dim 4\nsimplex 23 5 19 7 11\n")
    assert ss.evaluate_Z(relabelled, cfg).value == grid.value
    _verdict(
        9, 60.0, started,
        f"grid vs brute force rel {rel:.1e}; MC at {sigma:.2f} sigma; relabelling bit-identical",
    )


# -- 10 ---------------------------------------------------------------------


def test_criterion_10_hom_duality_consistency():
    started = time.perf_counter()
    rng = substream(100, "acceptance-hom")
    worst = 0.0
    for k in range(20):
        rb, rc = rng.uniform(0.5, 2.5, size=2)
        ra = rb + rc + rng.uniform(0.05, 2.0)
        dec = hom_decomposition(elementary(ra), elementary(rb), elementary(rc), seed=k)
        assert dec.nonzero
        assert dec.windows_agree
        w1, w2 = dec.c_window_via_tensor, dec.c_window_via_dual_pair
        assert w1 is not None and w2 is not None
        gap = max(abs(w1[0] - w2[0]), abs(w1[1] - w2[1]))
        worst = max(worst, gap)
    assert worst <= 1e-9
    _verdict(10, 5.0, started, f"20 triples, window gap {worst:.2e}")
