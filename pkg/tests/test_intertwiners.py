"""Level-1 and level-2 map calculus."""
from __future__ import annotations

import numpy as np
import pytest

from poincrep import intertwiners as itw
from poincrep import reps
from poincrep.minkowski import CausalClass, OrbitLabel
from poincrep.numerics import TAU_NUM
from poincrep.quadrature import hyperboloid_window
from poincrep.reps import GroupTag, StabilizerGroup

TF = CausalClass.TIMELIKE_FUTURE


def sphere_bundle(r=1.0):
    return reps.make_irrep(OrbitLabel(TF, r), StabilizerGroup.u1())


class TestBridge:
    def test_full_pair(self):
        b = itw.bridge(StabilizerGroup.su2(), StabilizerGroup.su2(), StabilizerGroup.su2())
        assert b.intersection.tag is GroupTag.SU2
        assert b.dim == 0

    def test_circle_pair(self):
        b = itw.bridge(StabilizerGroup.su2(), StabilizerGroup.u1(), StabilizerGroup.u1())
        assert b.intersection.tag is GroupTag.U1
        assert b.dim == 2

    def test_circle_trivial(self):
        b = itw.bridge(StabilizerGroup.su2(), StabilizerGroup.u1(), StabilizerGroup.trivial())
        assert b.intersection.tag is GroupTag.TRIVIAL
        assert b.dim == 3

    def test_cyclic_pairs(self):
        su2 = StabilizerGroup.su2()
        b = itw.bridge(su2, StabilizerGroup.cyclic(6), StabilizerGroup.cyclic(4))
        assert b.intersection.order == 2
        b2 = itw.bridge(su2, StabilizerGroup.cyclic(3), StabilizerGroup.cyclic(4))
        assert b2.intersection.tag is GroupTag.TRIVIAL
        b3 = itw.bridge(su2, StabilizerGroup.u1(), StabilizerGroup.cyclic(5))
        assert b3.intersection.order == 5

    def test_uncatalogued_rejected(self):
        with pytest.raises(ValueError):
            itw.bridge(StabilizerGroup.su2(), StabilizerGroup.so2(), StabilizerGroup.u1())
        with pytest.raises(ValueError):
            itw.bridge(StabilizerGroup.su2(), StabilizerGroup.non_lie(), StabilizerGroup.u1())

    def test_tangent_rank_matches_formula(self):
        su2 = StabilizerGroup.su2()
        cases = [
            (StabilizerGroup.u1(), StabilizerGroup.u1()),
            (StabilizerGroup.u1(), StabilizerGroup.trivial()),
            (su2, su2),
        ]
        for h1, h2 in cases:
            b = itw.bridge(su2, h1, h2)
            assert itw.bridge_tangent_rank(b, n_samples=250, seed=1) == b.dim


class TestCocycle:
    def setup_method(self):
        self.label = OrbitLabel(TF, 1.0)
        self.triples = itw.sample_cocycle_triples(self.label, 40, seed=5)

    def test_unit_constant_passes_with_zero_residual(self):
        res = itw.cocycle_check(itw.CocycleField.constant(self.label, 1.0), self.triples)
        assert res.passed
        assert res.max_residual == 0.0

    def test_other_constants_fail(self):
        res = itw.cocycle_check(itw.CocycleField.constant(self.label, 1.3), self.triples)
        assert not res.passed
        assert np.isclose(res.max_residual, abs(1.3 * 1.3 - 1.3) / 1.3)

    def test_random_nonconstant_fields_fail(self):
        for k in range(100):
            f = itw.random_positive_field(self.label, seed=k)
            res = itw.cocycle_check(f, self.triples, tol=1e-3)
            assert not res.passed
            assert res.max_residual > 1e-3

    def test_coboundary_passes(self):
        f = lambda x: 1.0 + 0.25 * float(np.tanh(x[1] + 0.3 * x[2]))
        res = itw.cocycle_check(itw.CocycleField.coboundary(self.label, f), self.triples)
        assert res.passed

    def test_solution_dimension_is_one(self):
        assert itw.cocycle_solution_dimension(self.label, seed=2) == 1

    def test_elementary_report(self):
        rep = itw.elementary_self_intertwiners(reps.elementary(1.5))
        assert rep.family == "constants"
        assert rep.normalized_value == 1.0
        assert rep.solution_dimension == 1

    def test_rejects_larger_fiber(self):
        with pytest.raises(ValueError):
            itw.elementary_self_intertwiners(sphere_bundle())


class TestStrongIntertwiner:
    def test_point_fiber_support(self):
        e = reps.elementary(1.0)
        f = itw.build_strong_intertwiner(e, e)
        assert len(f.support) == 1
        assert f.hilbert_dims == {(0, 0): 1}
        assert not f.is_zero

    def test_sphere_fiber_support(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=6)
        assert len(f.support) == 36
        assert all(c.orbit_dim == 2 for c in f.support)
        total = sum(c.measure for c in f.support)
        assert np.isclose(total, 1.0)

    def test_different_radii_give_zero(self):
        f = itw.build_strong_intertwiner(reps.elementary(1.0), reps.elementary(2.0))
        assert f.is_zero

    def test_rejects_opaque_kind(self):
        bad = reps.make_irrep(OrbitLabel(TF, 1.0), StabilizerGroup.non_lie())
        with pytest.raises(ValueError):
            itw.build_strong_intertwiner(bad, bad)

    def test_promote_weak_validates_labels(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=2)
        labels = {k: 1 for k in f.hilbert_dims}
        w = itw.promote_weak(f, labels)
        assert w.weak_data == labels
        with pytest.raises(ValueError):
            itw.promote_weak(f, {k: 0.5 for k in f.hilbert_dims})
        with pytest.raises(ValueError):
            itw.promote_weak(f, {(0, 0): 1})

    def test_promote_weak_spin_labels_on_point_fiber(self):
        e = reps.elementary(1.0)
        f = itw.build_strong_intertwiner(e, e)
        assert itw.promote_weak(f, {(0, 0): 1.5}).weak_data == {(0, 0): 1.5}
        with pytest.raises(ValueError):
            itw.promote_weak(f, {(0, 0): 0.3})


class TestComposeOne:
    def test_identity_neutral_both_sides(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=4)
        ident = itw.identity_intertwiner(i, n_cells=4)
        left = itw.compose_1(ident, f)
        right = itw.compose_1(f, ident)
        for h in (left, right):
            assert h.support_multiset() == f.support_multiset()
            assert h.dims_table() == f.dims_table()
        assert np.allclose(
            [c.measure for c in right.support], [c.measure for c in f.support]
        )

    def test_mismatch_rejected(self):
        f = itw.build_strong_intertwiner(reps.elementary(1.0), reps.elementary(1.0))
        g = itw.build_strong_intertwiner(reps.elementary(2.0), reps.elementary(2.0))
        with pytest.raises(ValueError):
            itw.compose_1(f, g)

    def test_zero_absorbs(self):
        e = reps.elementary(1.0)
        z = itw.zero_intertwiner(e, e)
        f = itw.build_strong_intertwiner(e, e)
        assert itw.compose_1(z, f).is_zero
        assert itw.compose_1(f, z).is_zero

    def test_associative_support_on_three_chain(self):
        i = sphere_bundle()
        rng = np.random.default_rng(3)
        chain = []
        for _ in range(3):
            dims = {
                (a, b): int(rng.integers(1, 4)) for a in range(3) for b in range(3)
            }
            chain.append(itw.build_strong_intertwiner(i, i, hilbert_dims=dims, n_cells=3))
        f, g, h = chain
        left = itw.compose_1(itw.compose_1(f, g), h)
        right = itw.compose_1(f, itw.compose_1(g, h))
        assert left.support_multiset() == right.support_multiset()
        assert left.dims_table() == right.dims_table()
        assert np.allclose(
            [c.measure for c in left.support], [c.measure for c in right.support]
        )

    def test_smooth_kinds_closed_under_composition(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=3)
        out = itw.compose_1(itw.compose_1(f, f), f)
        smooth = (reps.IrrepKind.ELEMENTARY, reps.IrrepKind.LIE, reps.IrrepKind.CRYSTALLOGRAPHIC)
        assert out.source.kind in smooth and out.target.kind in smooth


class TestTensorOne:
    def test_identity_pair_gives_identity_on_tensor_object(self):
        ia = itw.identity_intertwiner(reps.elementary(1.0))
        ib = itw.identity_intertwiner(reps.elementary(2.0))
        t = itw.tensor_1(ia, ib)
        assert t.source.radius == 3.0
        assert t.target.radius == 3.0
        assert t.dims_table() == ((((0, 0)), 1),)
        assert t.interchange_cell is None

    def test_zero_absorbs(self):
        ia = itw.identity_intertwiner(reps.elementary(1.0))
        z = itw.zero_intertwiner(reps.elementary(2.0), reps.elementary(2.0))
        assert itw.tensor_1(ia, z).is_zero

    def test_records_interchange_cell(self):
        ia = itw.identity_intertwiner(reps.elementary(1.0))
        ib = itw.identity_intertwiner(reps.elementary(2.0))
        cell = itw.constant_cell(itw.tensor_1(ia, ib), 1.2)
        t = itw.tensor_1(ia, ib, interchange_choice=cell)
        assert t.interchange_cell is cell

    def test_whisker_orders_differ_by_recorded_cell(self):
        ia = itw.identity_intertwiner(reps.elementary(1.0))
        ib = itw.identity_intertwiner(reps.elementary(2.0))
        base = itw.tensor_1(ia, ib)
        cell = itw.constant_cell(base, 1.7)
        strict, weak = itw.tensor_whisker_orders(ia, ib, cell)
        assert np.allclose(weak.values, strict.values * cell.values)
        recovered = itw.compose_2_vertical(strict, cell)
        assert np.allclose(recovered.values, weak.values)
        unit = itw.unit_cell(base)
        s2, w2 = itw.tensor_whisker_orders(ia, ib, unit)
        assert np.allclose(s2.values, w2.values)

    def test_rejects_larger_fibers(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=2)
        with pytest.raises(NotImplementedError):
            itw.tensor_1(f, f)


class TestComposeTwo:
    def test_vertical_unit_neutral(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=3)
        a = itw.band_limited_cell(f, seed=4)
        unit = itw.unit_cell(f)
        assert np.allclose(itw.compose_2_vertical(unit, a).values, a.values)
        assert np.allclose(itw.compose_2_vertical(a, unit).values, a.values)

    def test_vertical_associative_exact(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=3)
        a, b, c = (itw.band_limited_cell(f, seed=s) for s in (1, 2, 3))
        left = itw.compose_2_vertical(itw.compose_2_vertical(a, b), c)
        right = itw.compose_2_vertical(a, itw.compose_2_vertical(b, c))
        # product regrouping moves the result by at most a few ulps
        assert np.allclose(left.values, right.values, rtol=1e-14, atol=0)

    def test_node_mismatch_mentions_resample(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=3)
        a = itw.unit_cell(f, n_nodes=256)
        b = itw.unit_cell(f, n_nodes=64)
        with pytest.raises(ValueError, match="resample"):
            itw.compose_2_vertical(a, b)

    def test_horizontal_constants_carry_window_volume(self):
        e = reps.elementary(1.3)
        f = itw.build_strong_intertwiner(e, e)
        a = itw.constant_cell(f, 2.0)
        b = itw.constant_cell(f, 0.5)
        out = itw.compose_2_horizontal(a, b)
        w = hyperboloid_window(1.3)
        expected = 2.0 * 0.5 * w.volume
        assert np.allclose(out.values, expected, rtol=1e-9)
        assert np.isclose(out.volume_factor, w.volume)

    def test_horizontal_associative_within_quadrature(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=3)
        a, b, c = (itw.band_limited_cell(f, seed=s, amplitude=0.3) for s in (5, 6, 7))
        left = itw.compose_2_horizontal(itw.compose_2_horizontal(a, b), c)
        right = itw.compose_2_horizontal(a, itw.compose_2_horizontal(b, c))
        scale = max(1.0, float(np.max(np.abs(right.values))))
        assert np.max(np.abs(left.values - right.values)) / scale < 1e-6

    def test_interchange_on_band_limited_fields(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=3)
        a, b, c, d = (itw.band_limited_cell(f, seed=s, amplitude=1e-3) for s in (8, 9, 10, 11))
        lhs = itw.compose_2_horizontal(itw.compose_2_vertical(a, c), itw.compose_2_vertical(b, d))
        rhs = itw.compose_2_vertical(itw.compose_2_horizontal(a, b), itw.compose_2_horizontal(c, d))
        scale = max(1.0, float(np.max(np.abs(rhs.values))))
        assert np.max(np.abs(lhs.values - rhs.values)) / scale < 1e-4


class TestInterchangeConditions:
    def grid(self, maker):
        return [[maker(i, j) for j in range(3)] for i in range(3)]

    def test_all_identity_grid_passes_exactly(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=3)
        g = self.grid(lambda i_, j: itw.unit_cell(f))
        rep = itw.check_interchange_conditions(g)
        assert rep.passed
        assert rep.square_residual < 1e-12
        assert rep.collapse_residual < 1e-12

    def test_constant_grid_passes_within_tolerance(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=3)
        g = self.grid(lambda i_, j: itw.constant_cell(f, 1.0 + 0.1 * (i_ + j)))
        rep = itw.check_interchange_conditions(g, tol=TAU_NUM)
        assert rep.passed

    def test_perturbed_cell_fails(self):
        # both compositions are bilinear with neutral units, so the base
        # grid must be non-constant for a single bad cell to show up
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=3)
        seeds = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
        g = [[itw.band_limited_cell(f, seed=s, amplitude=1e-3) for s in row] for row in seeds]
        assert itw.check_interchange_conditions(g, tol=1e-6).passed
        g[1][1] = itw.band_limited_cell(f, seed=99, amplitude=0.3)
        rep = itw.check_interchange_conditions(g, tol=1e-6)
        assert not rep.passed
        assert max(rep.square_residual, rep.collapse_residual) > 1e-6

    def test_wrong_shape_rejected(self):
        i = sphere_bundle()
        f = itw.build_strong_intertwiner(i, i, n_cells=3)
        with pytest.raises(ValueError):
            itw.check_interchange_conditions([[itw.unit_cell(f)] * 2] * 2)
