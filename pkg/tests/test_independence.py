"""Independence-theorem testing: STRONG failure, STANDARD success."""

import pytest

from amalgam.amalgamation import build_generic
from amalgam.classes import parse_class_text, preset_p0
from amalgam.formulas import instance_text
from amalgam.graphs import InvalidInput, distances_from, girth
from amalgam.independence import (
    STANDARD,
    STRONG,
    canonical_quadruple,
    search_quadruples,
    type_over,
)
from amalgam.independence import test_independence_theorem as run_amalgamation

from amalgam.inconsistency import replay_certificate
from amalgam.predimension import dimension, dimension_rel

CLS = preset_p0()


def adjacent_quadruple(g):
    a, b = g.sorted_edges()[0]
    da = distances_from(g, a)
    db = distances_from(g, b)
    c0 = next(v for v in range(g.n) if da[v] == 2 and v != b)
    c1 = next(v for v in range(g.n) if db[v] == 2 and v != a)
    return a, b, c0, c1


class TestTypeFormulas:
    def test_distances_become_atoms(self):
        ap = build_generic(CLS, 6)
        g = ap.graph
        da = distances_from(g, 0)
        nb = next(v for v in range(6) if da[v] == 1)
        two = next(v for v in range(6) if da[v] == 2)
        t = type_over(g, 0, [nb, two])
        txt = instance_text(t)
        assert f"E(x,v{nb})" in txt
        assert f"dist=2(x,v{two})" in txt

    def test_far_parameters(self):
        ap = build_generic(CLS, 12)
        g = ap.graph
        far = next(v for v in range(g.n) if distances_from(g, 0)[v] < 0)
        t = type_over(g, 0, [far])
        assert "!" in instance_text(t) and "dist<=4" in instance_text(t)


class TestStrongMode:
    def test_adjacent_base_fails_with_certificate(self):
        ap = build_generic(CLS, 40)
        a, b, c0, c1 = adjacent_quadruple(ap.graph)
        res = run_amalgamation(CLS, ap, STRONG, [a], [b], [c0], [c1])
        assert not res.holds
        assert res.reason == "inconsistent"
        pats = sorted(c.pattern_name for c in res.certificate.cases)
        assert pats == ["C3", "C5"]
        assert replay_certificate(CLS, res.certificate)

    @pytest.mark.parametrize("budget", [20, 33, 40, 60])
    def test_failure_stable_across_budgets(self, budget):
        ap = build_generic(CLS, budget)
        a, b, c0, c1 = adjacent_quadruple(ap.graph)
        res = run_amalgamation(CLS, ap, STRONG, [a], [b], [c0], [c1])
        assert not res.holds
        assert sorted(c.pattern_name for c in res.certificate.cases) == ["C3", "C5"]

    def test_without_c5_forbidden_it_holds(self):
        c3only = parse_class_text(
            "cv 2\nalpha 1\nf 0 2 3 4 4 5 5\nf_tail 1/2 2\nforbid cycle 3\n"
        )
        ap = build_generic(c3only, 12)
        a, b, c0, c1 = adjacent_quadruple(ap.graph)
        res = run_amalgamation(c3only, ap, STRONG, [a], [b], [c0], [c1])
        assert res.holds and res.reason == "realized"


class TestStandardMode:
    def test_distance_two_base_holds(self):
        ap = build_generic(CLS, 40)
        quad = canonical_quadruple(CLS, ap, 2)
        assert quad is not None
        a, b, c0, c1 = quad
        res = run_amalgamation(CLS, ap, STANDARD, [a], [b], [c0], [c1])
        assert res.holds

    @pytest.mark.parametrize("budget", [20, 40, 60])
    def test_holds_across_budgets(self, budget):
        ap = build_generic(CLS, budget)
        quad = canonical_quadruple(CLS, ap, 2)
        a, b, c0, c1 = quad
        res = run_amalgamation(CLS, ap, STANDARD, [a], [b], [c0], [c1])
        assert res.holds

    def test_distance_three_base_needs_fresh_vertices(self):
        ap = build_generic(CLS, 6)
        g = ap.graph
        d0 = distances_from(g, 0)
        b = next(v for v in range(6) if d0[v] == 3)
        c0 = next(v for v in range(6) if d0[v] == 2)
        db = distances_from(g, b)
        c1 = next(v for v in range(6) if db[v] == 2)
        res = run_amalgamation(CLS, ap, STANDARD, [0], [b], [c0], [c1])
        assert res.holds and res.reason == "realized"
        assert len(res.new_vertices) >= 1
        assert CLS.in_class(res.amalgam).ok
        assert girth(res.amalgam) == 6
        # the realization keeps full dimension over the base
        lhs = dimension_rel(CLS.pre, res.amalgam, [res.realization], {0, b})
        assert lhs == dimension(CLS.pre, res.amalgam, [res.realization])

    def test_trivial_when_c0_equals_c1_and_independent(self):
        ap = build_generic(CLS, 12)
        g = ap.graph
        a, b = g.sorted_edges()[0]
        far = next(v for v in range(g.n) if distances_from(g, a)[v] < 0)
        res = run_amalgamation(CLS, ap, STRONG, [a], [b], [far], [far])
        assert res.holds and res.reason == "trivial"


class TestPreconditions:
    def test_strong_rejects_dependent_base(self):
        ap = build_generic(CLS, 12)
        g = ap.graph
        a, b = g.sorted_edges()[0]
        da = distances_from(g, a)
        c0 = next(v for v in range(g.n) if da[v] == 2 and v != b)
        with pytest.raises(InvalidInput, match="weakly"):
            run_amalgamation(CLS, ap, STRONG, [a], [a], [c0], [c0])

    def test_standard_rejects_adjacent_base(self):
        ap = build_generic(CLS, 12)
        a, b, c0, c1 = adjacent_quadruple(ap.graph)
        with pytest.raises(InvalidInput, match="d-independent"):
            run_amalgamation(CLS, ap, STANDARD, [a], [b], [c0], [c1])

    def test_rejects_orbit_mismatch(self):
        # Hand-built host with two vertex orbits: a C6 plus an isolated
        # vertex (a legal class member outside the builder's path).
        from amalgam.amalgamation import GenericApproximation
        from amalgam.graphs import FinGraph
        g = FinGraph(7, [(i, (i + 1) % 6) for i in range(6)])
        assert CLS.in_class(g).ok
        ap = GenericApproximation(graph=g, log=(), cls=CLS, seed=0,
                                  budget=7, truncated=False)
        a, b = 0, 2
        c0 = next(v for v in range(6) if distances_from(g, a)[v] == 2 and v != b)
        lone = 6
        with pytest.raises(InvalidInput, match="type over the empty set"):
            run_amalgamation(CLS, ap, STRONG, [a], [b], [c0], [lone])

    def test_rejects_dependent_c0(self):
        ap = build_generic(CLS, 12)
        g = ap.graph
        a, b = g.sorted_edges()[0]
        nb = next(v for v in g.neighbors(a) if v != b)
        with pytest.raises(InvalidInput, match="c0"):
            run_amalgamation(CLS, ap, STRONG, [a], [b], [nb], [nb])


def test_search_mode_lists_quadruples():
    ap = build_generic(CLS, 20)
    rows = search_quadruples(CLS, ap, STRONG)
    assert rows
    quad, res = rows[0]
    assert res.reason == "inconsistent"
