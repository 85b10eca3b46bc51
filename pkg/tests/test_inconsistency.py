"""Bounded-witness case analysis: certificates and consistent witnesses."""

import pytest

from amalgam.amalgamation import build_generic
from amalgam.classes import parse_class_text, preset_p0
from amalgam.formulas import FormulaInstance, UnsupportedFormula, neg, parse_shape
from amalgam.graphs import distance, distances_from
from amalgam.inconsistency import certify_inconsistent, replay_certificate

CLS = preset_p0()


def _approx():
    return build_generic(CLS, 12)


def _inst(text, *params):
    shape, _ = parse_shape(text)
    return FormulaInstance(shape, params)


class TestHeadlineCertificate:
    def test_adjacent_pair_two_cases(self):
        g = _approx().graph
        a, b = g.sorted_edges()[0]
        out = certify_inconsistent(
            CLS, g, [_inst("dist=2(x,a)", a), _inst("dist=2(x,a)", b)]
        )
        assert out.verdict == "INCONSISTENT"
        assert len(out.cases) == 2
        by_name = {c.pattern_name: c for c in out.cases}
        assert set(by_name) == {"C3", "C5"}
        # shared midpoint: one fresh witness; distinct: two
        assert by_name["C3"].graph.n == 4
        assert by_name["C5"].graph.n == 5
        assert replay_certificate(CLS, out)

    def test_certificate_text_format(self):
        g = _approx().graph
        a, b = g.sorted_edges()[0]
        out = certify_inconsistent(
            CLS, g, [_inst("dist=2(x,a)", a), _inst("dist=2(x,a)", b)]
        )
        text = out.text()
        assert "case 0:" in text and "case 1:" in text
        assert "forbidden C3 at" in text
        assert "forbidden C5 at" in text
        assert "vertices" in text and "edges" in text

    def test_distance_two_base_consistent(self):
        g = _approx().graph
        a = 0
        da = distances_from(g, a)
        c = next(v for v in range(g.n) if da[v] == 2)
        out = certify_inconsistent(
            CLS, g, [_inst("dist=2(x,a)", a), _inst("dist=2(x,a)", c)]
        )
        assert out.verdict == "CONSISTENT"
        assert CLS.in_class(out.graph).ok
        # the witness realizes both distance atoms
        xr = out.x_vertex
        va = out.roles.index(f"v{a}")
        vc = out.roles.index(f"v{c}")
        assert distance(out.graph, xr, va) == 2
        assert distance(out.graph, xr, vc) == 2

    def test_without_c5_forbidden_consistent(self):
        c3only = parse_class_text(
            "cv 2\nalpha 1\nf 0 2 3 4 4 5 5\nf_tail 1/2 2\nforbid cycle 3\n"
        )
        ap = build_generic(c3only, 8)
        g = ap.graph
        a, b = g.sorted_edges()[0]
        out = certify_inconsistent(
            c3only, g, [_inst("dist=2(x,a)", a), _inst("dist=2(x,a)", b)]
        )
        assert out.verdict == "CONSISTENT"


class TestPropositional:
    def test_edge_and_its_negation(self):
        g = _approx().graph
        e = _inst("E(x,a)", 0)
        out = certify_inconsistent(CLS, g, [e, neg(e)])
        assert out.verdict == "INCONSISTENT"
        assert out.cases == ()
        assert any("propositional" in p.reason for p in out.pruned)
        assert replay_certificate(CLS, out)

    def test_common_neighbor_of_edge_is_triangle(self):
        g = _approx().graph
        a, b = g.sorted_edges()[0]
        out = certify_inconsistent(CLS, g, [_inst("E(x,a)", a), _inst("E(x,a)", b)])
        assert out.verdict == "INCONSISTENT"
        assert [c.pattern_name for c in out.cases] == ["C3"]

    def test_equality_conflicts(self):
        g = _approx().graph
        a, b = g.sorted_edges()[0]
        out = certify_inconsistent(CLS, g, [_inst("x=a", a), _inst("x=a", b)])
        assert out.verdict == "INCONSISTENT"

    def test_far_constraint_vs_distance(self):
        g = _approx().graph
        a, b = g.sorted_edges()[0]
        out = certify_inconsistent(
            CLS, g, [_inst("E(x,a)", a), _inst("!dist<=4(x,a)", b)]
        )
        # x adjacent to a while unreachable-from-b within 4 contradicts
        # the type fact dist(a,b) = 1.
        assert out.verdict == "INCONSISTENT"
        assert out.cases == ()

    def test_negated_tautology(self):
        g = _approx().graph
        out = certify_inconsistent(CLS, g, [neg(_inst("x=x"))])
        assert out.verdict == "INCONSISTENT"


class TestConsistentWitnesses:
    def test_single_distance_atom(self):
        g = _approx().graph
        out = certify_inconsistent(CLS, g, [_inst("dist=2(x,a)", 0)])
        assert out.verdict == "CONSISTENT"

    def test_negated_edge(self):
        g = _approx().graph
        out = certify_inconsistent(CLS, g, [_inst("!E(x,a)", 0)])
        assert out.verdict == "CONSISTENT"

    def test_tautology(self):
        g = _approx().graph
        out = certify_inconsistent(CLS, g, [_inst("x=x")])
        assert out.verdict == "CONSISTENT"

    def test_disjunction_splits_branches(self):
        g = _approx().graph
        a, b = g.sorted_edges()[0]
        # left disjunct impossible (triangle), right fine
        out = certify_inconsistent(
            CLS, g,
            [_inst("(E(x,a) & E(x,b)) | dist=2(x,a)", a, b)],
        )
        assert out.verdict == "CONSISTENT"

    def test_undecidable_negative_exact_distance(self):
        g = _approx().graph
        a, b = g.sorted_edges()[0]
        # x adjacent to b, not equal to a, not at distance exactly 2 from
        # a: the one surviving layout forces dist(x,a) = 2, which a member
        # might or might not shorten; refusing beats guessing.
        with pytest.raises(UnsupportedFormula):
            certify_inconsistent(
                CLS, g,
                [_inst("E(x,m) & !dist=2(x,a) & !x=a", b, a)],
            )
