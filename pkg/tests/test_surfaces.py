import itertools
from fractions import Fraction

import numpy as np
import pytest

from cornerforge.poly import eval_poly, variables
from cornerforge.surfaces import (
    INVALID, EdgePartition, PolygonError, check_compatibility, compatible_cyclic,
    compatible_geometric, compatible_partitions, emit_surface, euler_formula, genus_formula,
    lattice_polygon, polygon_from_vertices, quotient_complex, random_partition, set_partitions,
    standard_partition, table, table_grid, unit_square, verify_regularity,
)

# genus of D_s(P_n) for n = 3..7 (rows) and s = 2..7 (columns)
PUBLISHED = [
    [INVALID, 0, INVALID, INVALID, INVALID, INVALID],
    [1, 1, 1, INVALID, INVALID, INVALID],
    [INVALID, 2, 3, 5, INVALID, INVALID],
    [2, 3, 5, 9, 17, INVALID],
    [INVALID, 4, 7, 13, 25, 49],
]

x, y = variables("x", "y")
TRIANGLE = polygon_from_vertices([(0, 0), (1, 0), (0, 1)])
OPPOSITE = EdgePartition([[1, 3], [2, 4]])


def test_square_and_triangle_forms():
    sq = unit_square()
    assert set(sq.edge_lines) == {x, y, 1 - x, 1 - y}
    assert list(TRIANGLE.edge_lines) == [y, 1 - x - y, x]


def test_lattice_pentagon():
    pent = polygon_from_vertices([(0, 0), (2, 0), (3, 1), (1, 3), (0, 2)])
    assert pent.n == 5
    assert all(h.degree() == 1 for h in pent.edge_lines)
    assert all(pent.h_at(i, (1, 1)) > 0 for i in range(1, 6))
    # each form vanishes on both endpoints of its edge
    for i, h in enumerate(pent.edge_lines):
        a, b = pent.vertices[i], pent.vertices[(i + 1) % 5]
        assert eval_poly(h, dict(zip("xy", a))) == 0 == eval_poly(h, dict(zip("xy", b)))


def test_polygon_errors():
    with pytest.raises(PolygonError):
        polygon_from_vertices([(0, 0), (1, 0), (2, 0), (0, 1)])  # collinear triple
    with pytest.raises(PolygonError):
        polygon_from_vertices([(0, 0), (0, 1), (1, 0)])  # clockwise
    with pytest.raises(PolygonError):
        polygon_from_vertices([(0, 0), (2, 0), (1, 1), (2, 2), (0, 2)])  # reflex vertex
    with pytest.raises(PolygonError):
        polygon_from_vertices([(0, 0), (1, 0)])


@pytest.mark.parametrize("n", range(3, 13))
def test_lattice_polygons_are_rational_and_convex(n):
    p = lattice_polygon(n)
    assert p.n == n
    assert all(isinstance(c, Fraction) for v in p.vertices for c in v)
    c = p.interior_point()
    assert p.contains(c) and all(p.h_at(i, c) > 0 for i in range(1, n + 1))


def test_compatibility_examples():
    sq = unit_square()
    assert check_compatibility(sq, OPPOSITE)
    assert not check_compatibility(sq, EdgePartition([[1, 2], [3, 4]]))
    assert check_compatibility(TRIANGLE, EdgePartition([[1], [2], [3]]))
    with pytest.raises(ValueError):
        check_compatibility(sq, EdgePartition([[1, 2], [4]]))


def test_compatibility_tests_agree_on_random_partitions():
    rng = np.random.default_rng(2024)
    polys = {n: lattice_polygon(n) for n in range(3, 11)}
    for _ in range(1000):
        n = int(rng.integers(3, 11))
        part = random_partition(n, rng)
        assert compatible_geometric(polys[n], part) == compatible_cyclic(n, part), part.to_json()


def test_emit_examples():
    torus = emit_surface(unit_square(), OPPOSITE)
    t1, t2 = variables("t1", "t2")
    assert torus.vars == ("x", "y", "t1", "t2")
    # edges of the unit square run y, 1 - x, 1 - y, x
    assert list(torus.equations) == [
        (t1 * t1 - y * (1 - y)).embed(torus.vars), (t2 * t2 - x * (1 - x)).embed(torus.vars)]
    tri = emit_surface(TRIANGLE, EdgePartition([[1], [2], [3]]))
    assert len(tri.vars) == 5 and len(tri.equations) == 3
    hexagon = emit_surface(lattice_polygon(6), standard_partition(6, 2))
    assert len(hexagon.equations) == 2
    with pytest.raises(ValueError):
        emit_surface(unit_square(), EdgePartition([[1, 2], [3, 4]]))


def test_sign_symmetry_of_emitted_system():
    system = emit_surface(lattice_polygon(5), standard_partition(5, 3))
    # every t_k occurs only squared
    for eq in system.equations:
        for exps in eq.terms:
            assert all(exps[system.vars.index(f"t{k}")] % 2 == 0 for k in range(1, 4))
    pt = (Fraction(1), Fraction(1), Fraction(3), Fraction(2), Fraction(5))
    values = [eval_poly(eq, dict(zip(system.vars, pt))) for eq in system.equations]
    for flips in itertools.product((1, -1), repeat=3):
        flipped = pt[:2] + tuple(f * v for f, v in zip(flips, pt[2:]))
        assert [eval_poly(eq, dict(zip(system.vars, flipped))) for eq in system.equations] == values


def test_regularity_examples():
    rep = verify_regularity(unit_square(), OPPOSITE)
    assert rep["ok"]
    vertex = next(r for r in rep["checked"] if r["point"] == ["0", "0"])
    assert vertex["vanishing"] == 2 and vertex["rank"] == 2
    mid = next(r for r in rep["checked"] if r["point"] == ["1/2", "0"])
    assert mid["vanishing"] == 1 and mid["rank"] == 2
    inner = next(r for r in rep["checked"] if r["stratum"] == "interior")
    assert inner["vanishing"] == 0 and inner["rank"] == 2


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_regularity_exhaustive(n):
    p = lattice_polygon(n)
    for s in range(2, n + 1):
        for part in compatible_partitions(n, s):
            assert verify_regularity(p, part)["ok"], part.to_json()


def test_genus_formula_examples():
    assert genus_formula(6, 6) == 17
    assert genus_formula(7, 7) == 49
    assert genus_formula(3, 2) == INVALID
    assert genus_formula(4, 5) == INVALID


def test_table_reproduces_published_grid():
    assert table_grid(7, 7) == PUBLISHED
    lines = table(7, 7).splitlines()
    assert lines[2].split() == ["4", "1", "1", "1", "--", "--", "--"]
    assert lines[3].split() == ["5", "--", "2", "3", "5", "--", "--"]
    assert lines[0].split()[0] == "n\\s"


def test_euler_formula_examples():
    assert euler_formula(6, 2) == (6, 12, 4, -2) and genus_formula(6, 2) == 2
    assert euler_formula(4, 2) == (4, 8, 4, 0) and genus_formula(4, 2) == 1
    assert euler_formula(3, 3) == (6, 12, 8, 2) and genus_formula(3, 3) == 0
    with pytest.raises(ValueError):
        euler_formula(3, 2)


def test_quotient_examples():
    top = quotient_complex(unit_square(), OPPOSITE)
    assert (top.V, top.E, top.F, top.chi, top.genus) == (4, 8, 4, 0, 1) and top.connected
    top = quotient_complex(TRIANGLE, EdgePartition([[1], [2], [3]]))
    assert (top.V, top.E, top.F, top.chi, top.genus) == (6, 12, 8, 2, 0) and top.connected
    top = quotient_complex(lattice_polygon(6), standard_partition(6, 2))
    assert top.chi == -2 and top.genus == 2 and top.orientable


def test_quotient_matches_formula_for_all_compatible_partitions():
    for n in range(3, 9):
        p = lattice_polygon(n)
        for s in range(2, 6):
            for part in compatible_partitions(n, s):
                top = quotient_complex(p, part)
                V, E, F, chi = euler_formula(n, s)
                assert (top.V, top.E, top.F, top.chi) == (V, E, F, chi)
                assert top.connected
                assert top.genus == genus_formula(n, s) or genus_formula(n, s) == INVALID


def test_partition_enumeration_counts():
    # Stirling numbers of the second kind
    assert sum(1 for _ in set_partitions(4, 2)) == 7
    assert sum(1 for _ in set_partitions(5, 3)) == 25
    # proper colourings of the 4-cycle with exactly 2 unlabeled colours
    assert [p.to_json() for p in compatible_partitions(4, 2)] == [[[1, 3], [2, 4]]]


@pytest.mark.parametrize("n,s", [(n, s) for n in range(3, 10) for s in range(2, n + 1) if s >= 2 + n % 2])
def test_standard_partition_is_compatible(n, s):
    part = standard_partition(n, s)
    assert part.s == s and compatible_cyclic(n, part)
