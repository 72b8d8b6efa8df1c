from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from oracles import distance_lp, hull_vertices_bruteforce, nu_sympy
from osc_decay.newton_geometry import (
    Face,
    UnboundedPrincipalFace,
    analyze,
    edge_inequalities,
    newton_diagram,
    newton_distance,
    newton_multiplicity,
    newton_polyhedron,
    principal_face,
    principal_part,
    root_order_on_circle,
)
from osc_decay.phase_algebra import NotNormalized, PolynomialPhase, parse_phase

supports = st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=1, max_size=12)
normal_supports = supports.map(lambda s: [p for p in s if p[0] + p[1] >= 2]).filter(bool)
coeffs = st.sampled_from([Fraction(1), Fraction(-1), Fraction(2), Fraction(-3, 2), Fraction(1, 3)])


@st.composite
def phases(draw):
    sup = draw(normal_supports)
    return PolynomialPhase({p: draw(coeffs) for p in sup})


def inv(text):
    return analyze(parse_phase(text))


class TestFixtures:
    @pytest.mark.parametrize(
        "text,d,nu,m",
        [("x^2+y^2", 1, 0, 0), ("x^3+y^3", Fraction(3, 2), 1, 0), ("x^2*y^2", 2, 2, 1),
         ("x^2-y^2", 1, 1, 1), ("x^4+y^4", 2, 0, 0), ("x^2*y+y^4", Fraction(8, 5), 1, 0)],
    )
    def test_catalog(self, text, d, nu, m):
        i = inv(text)
        assert (i.distance_d, i.nu, i.multiplicity_m) == (d, nu, m)
        assert i.height_in_coords == i.distance_d
        assert isinstance(i.distance_d, Fraction)

    def test_hull_examples(self):
        assert newton_polyhedron([(2, 2)]) == [(2, 2)]
        assert newton_polyhedron([(3, 0), (0, 3)]) == [(0, 3), (3, 0)]
        assert newton_polyhedron([(5, 0), (2, 2), (0, 5)]) == [(0, 5), (2, 2), (5, 0)]
        # (2, 2) above the segment joining (0, 3) and (3, 0) is not a vertex
        assert newton_polyhedron([(3, 0), (2, 2), (0, 3)]) == [(0, 3), (3, 0)]

    def test_diagram(self):
        faces = newton_diagram(newton_polyhedron([(0, 5), (2, 2), (5, 0)]))
        edges = [f for f in faces if f.kind == "edge"]
        assert [f.points for f in edges] == [((0, 5), (2, 2)), ((2, 2), (5, 0))]
        assert len([f for f in faces if f.kind == "vertex"]) == 3
        assert newton_diagram([(2, 2)]) == [Face("vertex", ((2, 2),))]

    def test_principal_faces(self):
        assert inv("x^2*y^2").principal_face == Face("vertex", ((2, 2),))
        assert inv("x^3+y^3").principal_face == Face("edge", ((0, 3), (3, 0)))
        assert inv("x^2*y^2+x^5").principal_face == Face("vertex", ((2, 2),))

    def test_principal_parts(self):
        assert inv("x^3+y^3+x^2*y^2").principal_part == parse_phase("x^3+y^3")
        assert inv("x^2*y^2").principal_part == parse_phase("x^2*y^2")
        assert inv("x^2-y^2+x^4").principal_part == parse_phase("x^2-y^2")

    def test_root_orders(self):
        assert root_order_on_circle(parse_phase("x^2*y^2")) == 2
        assert root_order_on_circle(parse_phase("x^2+y^2")) == 0
        assert root_order_on_circle(parse_phase("x^2-y^2")) == 1
        assert root_order_on_circle(parse_phase("x^3-3*x^2*y+3*x*y^2-y^3")) == 3  # (x - y)^3

    def test_multiplicity_rule(self):
        assert newton_multiplicity(2, Fraction(2)) == (1, [])
        assert newton_multiplicity(0, Fraction(1))[0] == 0
        assert newton_multiplicity(1, Fraction(3, 2))[0] == 0
        m, flags = newton_multiplicity(2, Fraction(2), adapted_declared=False)
        assert m == 1 and flags == ["m provisional: coordinates not certified adapted"]


class TestRefusals:
    def test_unbounded_face(self):
        with pytest.raises(UnboundedPrincipalFace, match="unbounded principal face") as err:
            inv("x^2")
        assert err.value.partial.distance_d == 2
        assert err.value.partial.principal_face.kind == "ray"

    def test_unbounded_face_mixed(self):
        # single vertex (3, 2) below the bisectrix: (d, d) = (3, 3) sits on the vertical ray
        with pytest.raises(UnboundedPrincipalFace):
            inv("x^3*y^2 + x^5*y^3")

    def test_not_normalized(self):
        with pytest.raises(NotNormalized):
            analyze(parse_phase("x + y^2", warn=False))

    def test_principal_part_of_ray(self):
        with pytest.raises(UnboundedPrincipalFace):
            principal_part(parse_phase("x^2"), Face("ray", ((2, 0),), (0, 1)))


class TestAgainstOracles:
    @given(supports)
    def test_hull_matches_bruteforce(self, sup):
        assert newton_polyhedron(sup) == hull_vertices_bruteforce(sup)

    @given(supports)
    def test_distance_matches_lp(self, sup):
        d = newton_distance(newton_polyhedron(sup))
        assert abs(float(d) - distance_lp(sup)) <= 1e-9

    @given(phases())
    def test_nu_matches_sympy(self, f):
        try:
            i = analyze(f)
        except UnboundedPrincipalFace:
            assume(False)
        assert i.nu == nu_sympy(i.principal_part.terms)


class TestProperties:
    @given(supports)
    def test_transpose_invariance(self, sup):
        a = newton_distance(newton_polyhedron(sup))
        b = newton_distance(newton_polyhedron([(k, j) for j, k in sup]))
        assert a == b

    @given(supports, st.tuples(st.integers(0, 9), st.integers(0, 9)))
    def test_adding_a_point_never_increases_d(self, sup, p):
        before = newton_distance(newton_polyhedron(sup))
        after = newton_distance(newton_polyhedron(sup + [p]))
        assert after <= before

    @given(supports)
    def test_dd_on_boundary(self, sup):
        verts = newton_polyhedron(sup)
        d = newton_distance(verts)
        assert d > 0 or (0, 0) in sup
        face = principal_face(verts, d)
        assert face.contains((d, d))
        tight = []
        for a, b, c in edge_inequalities(verts):
            assert a * d + b * d >= c
            tight.append(a * d + b * d == c)
        assert any(tight)

    @given(supports)
    def test_principal_face_minimal(self, sup):
        verts = newton_polyhedron(sup)
        d = newton_distance(verts)
        face = principal_face(verts, d)
        if face.kind != "vertex":
            assert all(not Face("vertex", (v,)).contains((d, d)) for v in verts)

    @given(supports)
    def test_vertices_sorted_and_strictly_convex(self, sup):
        v = newton_polyhedron(sup)
        assert all(a[0] < b[0] and a[1] > b[1] for a, b in zip(v, v[1:]))
        for o, a, b in zip(v, v[1:], v[2:]):
            assert (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]) > 0

    @given(phases())
    def test_m_rule(self, f):
        try:
            i = analyze(f)
        except UnboundedPrincipalFace:
            assume(False)
        assert i.multiplicity_m in (0, 1)
        assert (i.multiplicity_m == 1) == (Fraction(i.nu) == i.distance_d)

    @given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=2, max_size=4, unique=True),
           st.integers(0, 3), st.integers(0, 3))
    def test_simple_circle_roots(self, roots, ax, ay):
        # x^ax y^ay prod (y - r x): homogeneous, simple roots off the axes
        import sympy
        x, y = sympy.symbols("x y")
        roots = [r for r in roots if r != 0]
        assume(roots)
        expr = sympy.expand(x**ax * y**ay * sympy.prod([y - sympy.Rational(r.numerator, r.denominator) * x for r in roots]))
        terms = {m: Fraction(int(c.p), int(c.q)) for m, c in sympy.Poly(expr, x, y).terms()}
        assert root_order_on_circle(PolynomialPhase(terms)) == max(ax, ay, 1)
