"""Formula fragment: parsing, evaluation, orbit-keyed identity."""

import pytest

from amalgam.amalgamation import build_generic
from amalgam.classes import preset_p0
from amalgam.formulas import (
    And,
    Atom,
    FormulaInstance,
    Not,
    UnsupportedFormula,
    conj,
    evaluate,
    evaluate_at_infinity,
    instance_key,
    instance_text,
    neg,
    parse_shape,
    satisfying_vertices,
    shape_text,
)
from amalgam.graphs import InvalidInput, cycle

CLS = preset_p0()


class TestParsing:
    @pytest.mark.parametrize("text", [
        "E(x,a)",
        "x=a",
        "x=x",
        "dist=2(x,a)",
        "dist<=3(x,a)",
        "!E(x,a)",
        "E(x,a) & dist=2(x,b)",
        "(E(x,a) | x=b) & !dist<=2(x,a)",
    ])
    def test_round_trip(self, text):
        shape, names = parse_shape(text)
        again, names2 = parse_shape(shape_text(shape))
        assert again == shape
        assert names2 == names

    def test_distance_one_normalizes_to_edge(self):
        shape, _ = parse_shape("dist=1(x,a)")
        assert shape == Atom("edge", 0)

    def test_k_max_enforced(self):
        with pytest.raises(UnsupportedFormula):
            parse_shape("dist=5(x,a)")

    def test_x_not_a_parameter(self):
        with pytest.raises(InvalidInput):
            parse_shape("E(x,x)")

    def test_trailing_garbage(self):
        with pytest.raises(InvalidInput):
            parse_shape("E(x,a) q")

    def test_instance_text_avoids_letter_clashes(self):
        shape, _ = parse_shape("E(x,a) & E(x,b) & E(x,c) & E(x,d)")
        inst = FormulaInstance(shape, (9, 8, 7, 6))
        assert instance_text(inst) == "E(x,v9) & E(x,v8) & E(x,v7) & E(x,v6)"


class TestEvaluation:
    def test_distance_atoms_on_cycle(self):
        g = cycle(6)
        d2 = FormulaInstance(parse_shape("dist=2(x,a)")[0], (0,))
        assert satisfying_vertices(g, d2) == [2, 4]
        le2 = FormulaInstance(parse_shape("dist<=2(x,a)")[0], (0,))
        assert satisfying_vertices(g, le2) == [0, 1, 2, 4, 5]

    def test_boolean_structure(self):
        g = cycle(6)
        sh, _ = parse_shape("E(x,a) & !x=b")
        inst = FormulaInstance(sh, (0, 1))
        assert satisfying_vertices(g, inst) == [5]

    def test_tautology(self):
        g = cycle(6)
        inst = FormulaInstance(parse_shape("x=x")[0], ())
        assert satisfying_vertices(g, inst) == list(range(6))

    def test_at_infinity(self):
        assert evaluate_at_infinity(parse_shape("x=x")[0])
        assert not evaluate_at_infinity(parse_shape("E(x,a)")[0])
        assert evaluate_at_infinity(parse_shape("!dist<=4(x,a)")[0])
        assert evaluate_at_infinity(parse_shape("E(x,a) | !E(x,a)")[0])

    def test_wrong_arity(self):
        with pytest.raises(InvalidInput):
            FormulaInstance(parse_shape("E(x,a)")[0], (0, 1))


class TestInstanceKeys:
    def test_transitive_host_merges_parameters(self):
        approx = build_generic(CLS, 12)
        g = approx.graph
        d2 = parse_shape("dist=2(x,a)")[0]
        keys = {instance_key(g, FormulaInstance(d2, (v,))) for v in range(g.n)}
        assert len(keys) == 1

    def test_conjunction_order_irrelevant(self):
        approx = build_generic(CLS, 12)
        g = approx.graph
        a, b = g.sorted_edges()[0]
        e = parse_shape("E(x,a)")[0]
        d2 = parse_shape("dist=2(x,a)")[0]
        k1 = instance_key(g, conj(FormulaInstance(e, (a,)), FormulaInstance(d2, (b,))))
        k2 = instance_key(g, conj(FormulaInstance(d2, (b,)), FormulaInstance(e, (a,))))
        assert k1 == k2

    def test_swapped_adjacent_pair_merges(self):
        approx = build_generic(CLS, 12)
        g = approx.graph
        a, b = g.sorted_edges()[0]
        e = parse_shape("E(x,a)")[0]
        d2 = parse_shape("dist=2(x,a)")[0]
        k1 = instance_key(g, conj(FormulaInstance(e, (a,)), FormulaInstance(d2, (b,))))
        k2 = instance_key(g, conj(FormulaInstance(e, (b,)), FormulaInstance(d2, (a,))))
        assert k1 == k2

    def test_distinct_shapes_stay_apart(self):
        g = cycle(6)
        e = FormulaInstance(parse_shape("E(x,a)")[0], (0,))
        d2 = FormulaInstance(parse_shape("dist=2(x,a)")[0], (0,))
        assert instance_key(g, e) != instance_key(g, d2)
        assert instance_key(g, e) != instance_key(g, neg(e))
