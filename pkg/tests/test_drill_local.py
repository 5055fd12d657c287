import itertools

import numpy as np
import pytest

from cornerforge.drill_local import (
    EMPTY, Atom, BlowupNode, DepthExceeded, blowup_charts, cell_from_str, cell_to_str,
    chart_layout, chart_numeric_oracle, desingularize, divisor_preimage, flip_antipodal,
    sampled_min_distance, sphere_cells, strict_transform_orthant, transforms_intersection_dim,
)
from cornerforge.germs import (
    GermError, OrthantGerm, all_germs, disconnecting_coords, e_value, grid_connectivity_oracle,
    normalize,
)

PP, PM, MP, MM = (1, 1), (1, -1), (-1, 1), (-1, -1)


def germ2(*orthants):
    return OrthantGerm(2, (1, 2), orthants)


# -- descriptors -------------------------------------------------------------------


def test_divisor_preimage_examples():
    pre = divisor_preimage(1, 0, 2)
    assert pre.nonempty_atoms() == [Atom.make(0, 2, "point"), Atom.make(0, 2, "half", {1: "=0"})]
    assert pre.dimension() == 1
    # the second atom would be S^0 cut by {w2 = 0}, which has no points
    pre = divisor_preimage(2, 1, 2)
    assert pre.nonempty_atoms() == [Atom.make(1, 2, "point")]
    pre = divisor_preimage(3, 2, 4)
    assert pre.nonempty_atoms() == [Atom.make(2, 4, "point"), Atom.make(2, 4, "half", {3: "=0"})]
    with pytest.raises(ValueError):
        divisor_preimage(1, 1, 2)


def test_divisor_preimage_samples_lie_over_the_divisor():
    rng = np.random.default_rng(1)
    pre = divisor_preimage(3, 1, 3)
    for y, rho, w2, w3 in pre.sample(rng, 200):
        # image point (y, rho*w) must have x3 = rho*w3 = 0
        assert abs(rho * w3) < 1e-12


def test_strict_transform_examples():
    assert strict_transform_orthant((1, 1)).nonempty_atoms() == [Atom.make(0, 2, "half", {1: ">=0", 2: ">=0"})]
    assert strict_transform_orthant((1, -1), e=1).nonempty_atoms() == [Atom.make(1, 3, "half", {2: ">=0", 3: "<=0"})]
    assert strict_transform_orthant((-1, -1)).nonempty_atoms() == [Atom.make(0, 2, "half", {1: "<=0", 2: "<=0"})]
    assert strict_transform_orthant((1, 1)).dimension() == 2


def test_intersection_dim_examples():
    assert transforms_intersection_dim((1, 1), (-1, -1)) == EMPTY
    assert transforms_intersection_dim((1, 1, 1), (1, -1, -1), e=1) == 2
    for eps in itertools.product((1, -1), repeat=3):
        assert transforms_intersection_dim(eps, eps, e=1) == 4
    with pytest.raises(ValueError):
        transforms_intersection_dim((1,), (1, 1))


def test_intersection_dim_matches_agreement_count():
    # agreeing on m' coordinates and opposite on the rest gives dimension e + m'
    for ell in range(1, 5):
        for e in range(3):
            for eps in itertools.product((1, -1), repeat=ell):
                for eps2 in itertools.product((1, -1), repeat=ell):
                    agree = sum(a == b for a, b in zip(eps, eps2))
                    expected = EMPTY if agree == 0 else e + agree
                    assert transforms_intersection_dim(eps, eps2, e) == expected


def test_empty_verdicts_confirmed_by_sampling():
    rng = np.random.default_rng(7)
    for eps in [(1, 1), (1, -1, 1), (-1, 1, 1, -1)]:
        a = strict_transform_orthant(eps, 1)
        b = strict_transform_orthant(tuple(-s for s in eps), 1)
        assert sampled_min_distance(a, b, rng, 10_000) > 1e-9
    # a nonempty intersection is approached by samples
    a, b = strict_transform_orthant((1, 1)), strict_transform_orthant((1, -1))
    assert sampled_min_distance(a, b, rng, 10_000) < 0.05


# -- charts --------------------------------------------------------------------------


def test_cells_round_trip():
    cells = sphere_cells(3)
    assert len(cells) == 26
    assert all(cell_from_str(cell_to_str(c)) == c for c in cells)
    with pytest.raises(ValueError):
        cell_from_str("+x")


def test_chart_layout_is_pivot_free():
    g = OrthantGerm(3, (1, 2, 3), [(1, 1, 1)])
    assert chart_layout(g, (1, 2), (1, 0)) == ["rho", "w2", "x3"]
    assert chart_layout(g, (1, 2), (1, -1)) == ["rho", "w2", "x3"]


def test_two_sheet_chart_examples():
    charts = blowup_charts(germ2(PP, MM), (1, 2), sheet="both")
    plus_zero = charts[(1, 0)]
    assert plus_zero.divisor == (2,) and plus_zero.orthants == {(1,)} and e_value(plus_zero) == 0
    assert charts[(1, 1)].divisor == () and e_value(charts[(1, 1)]) == 0
    assert (1, -1) not in charts

    g3 = OrthantGerm(3, (1, 2, 3), [(1, 1, 1), (-1, -1, 1)])
    chart = blowup_charts(g3, (1, 2), sheet="both")[(1, 0)]
    assert chart.divisor == (2, 3) and chart.orthants == {(1, 1)} and e_value(chart) == 0

    single = blowup_charts(germ2(PP), (1, 2), sheet="both")
    assert len(single[(1, 1)].orthants) == 1 and e_value(single[(1, 1)]) == 0
    assert all(e_value(c) == 0 for c in single.values())


def test_one_sheet_charts_keep_rho_nonnegative():
    charts = blowup_charts(germ2(PP, MM), (1, 2))
    for cell, g in charts.items():
        assert e_value(g) == 0
        if 1 in g.divisor:
            assert all(eps[g.divisor.index(1)] == 1 for eps in g.orthants)
    # the plane minus an open quadrant: two sheets reproduce it, one sheet does not
    g = germ2(PP, PM, MM)
    assert e_value(g) == 2
    assert e_value(blowup_charts(g, (1, 2), sheet="both")[(1, 0)]) == 2
    assert max(e_value(c) for c in blowup_charts(g, (1, 2)).values()) <= 1


def test_center_must_have_codimension_two():
    with pytest.raises(GermError, match="codimension"):
        blowup_charts(germ2(PP, MM), (1,))
    with pytest.raises(ValueError):
        blowup_charts(germ2(PP, MM), (1, 2), sheet="left")


@pytest.mark.parametrize("sheet", ["plus", "both"])
def test_charts_match_numeric_oracle(sheet):
    rng = np.random.default_rng(3)
    for d in (2, 3):
        for g in all_germs(d):
            center = disconnecting_coords(g)
            if len(center) < 2:
                continue
            charts = blowup_charts(g, center, sheet=sheet)
            for cell in sphere_cells(len(center)):
                oracle = chart_numeric_oracle(g, center, cell, samples=6, rng=rng, sheet=sheet)
                assert charts.get(cell) == oracle, (g, cell)


def test_chart_examples_against_grid_oracle():
    # the half-plane chart really is connected after removing its divisor coordinate
    chart = blowup_charts(germ2(PP, MM), (1, 2), sheet="both")[(1, 0)]
    assert grid_connectivity_oracle(chart, removed=2) == 1


@pytest.mark.parametrize("sheet", ["plus", "both"])
def test_pivot_independence(sheet):
    for d in (2, 3):
        for g in all_germs(d):
            center = g.divisor
            if len(center) < 2:
                continue
            assert blowup_charts(g, center, "first", sheet) == blowup_charts(g, center, "last", sheet)


def test_antipodal_consistency_two_sheets():
    for d in (2, 3):
        for g in all_germs(d):
            center = g.divisor
            if len(center) < 2:
                continue
            charts = blowup_charts(g, center, sheet="both")
            for cell in sphere_cells(len(center)):
                anti = tuple(-s for s in cell)
                if cell not in charts:
                    assert anti not in charts
                    continue
                lhs = _unnormalized_chart(g, center, cell)
                assert normalize(flip_antipodal(lhs, center, cell)) == charts[anti], (g, cell)


def _unnormalized_chart(g, center, cell):
    """Two-sheet chart germ before normalization, straight from the compatibility rule."""
    slots = [g.slot(i) for i in center]
    rest = [g.slot(i) for i in g.divisor if i not in center]
    names = chart_layout(g, center, cell)
    divisor = [names.index("rho") + 1] + [names.index(f"w{center[j]}") + 1 for j, s in enumerate(cell) if s == 0]
    divisor += [names.index(f"x{i}") + 1 for i in g.divisor if i not in center]
    p = next(j for j, s in enumerate(cell) if s)
    F = set()
    for eps in g.orthants:
        delta = eps[slots[p]] * cell[p]
        if all(not s or eps[slots[j]] == delta * s for j, s in enumerate(cell)):
            F.add((delta,) + tuple(eps[slots[j]] * delta for j, s in enumerate(cell) if s == 0)
                  + tuple(eps[k] for k in rest))
    return OrthantGerm(g.dim, divisor, F)


def test_e_reduction_and_weak_monotonicity():
    for d in (2, 3):
        for g in all_germs(d):
            e = e_value(g)
            if e < 2:
                continue
            center = disconnecting_coords(g)
            assert all(e_value(c) <= e - 1 for c in blowup_charts(g, center).values()), g
            for k in range(2, len(center) + 1):
                for sub in itertools.combinations(center, k):
                    assert all(e_value(c) <= e for c in blowup_charts(g, sub).values()), (g, sub)


# -- desingularization ----------------------------------------------------------------


def test_desingularize_examples():
    tree = desingularize(germ2(PP, MM), sheet="both")
    assert tree.depth() == 1
    leaves = tree.leaves()
    assert all(e_value(leaf) == 0 for leaf in leaves)
    assert {len(leaf.divisor) for leaf in leaves} == {0, 1}  # full germs and half-planes

    leaf = desingularize(germ2(PP))
    assert leaf.is_leaf and leaf.depth() == 0

    g = OrthantGerm(3, (1, 2, 3), [(1, 1, 1), (-1, -1, -1)])
    tree = desingularize(g)
    assert all(e_value(c.germ) <= 2 for c in tree.children.values())
    assert all(e_value(leaf) == 0 for leaf in tree.leaves())


def test_desingularize_terminates_on_all_small_germs():
    for d in (1, 2, 3):
        for g in all_germs(d):
            tree = desingularize(g)
            assert tree.depth() <= 4
            assert all(len(normalize(leaf).orthants) == 1 for leaf in tree.leaves())


def test_desingularize_depth_valve():
    with pytest.raises(DepthExceeded):
        desingularize(germ2(PP, PM, MM), max_depth=3, sheet="both")
    with pytest.raises(ValueError):
        desingularize(germ2(PP), max_depth=0)


def test_tree_json_round_trip():
    tree = desingularize(OrthantGerm(3, (1, 2, 3), [(1, 1, 1), (-1, -1, 1), (1, -1, -1)]))
    data = tree.to_json()
    assert set(data) == {"germ", "e", "center", "children"}
    assert all(set(k) <= set("+0-") for k in data["children"])
    back = BlowupNode.from_json(data)
    assert back.to_json() == data
    assert [str(x) for x in back.leaves()] == [str(x) for x in tree.leaves()]
