"""Constraint systems, zero certificates, and exact feasibility."""

from fractions import Fraction

import pytest

from amalgam.amalgamation import build_generic
from amalgam.classes import preset_p0
from amalgam.formulas import FormulaInstance, conj, disj, instance_key, neg, parse_shape
from amalgam.measures import (
    ConstraintSystem,
    Infeasible,
    Linear,
    Product,
    Solution,
    Variable,
    build_constraint_system,
    certify_zero,
    replay_zero_certificate,
    solve_feasible,
)

CLS = preset_p0()


def _inst(text, *params):
    return FormulaInstance(parse_shape(text)[0], params)


def headline_fragment(approx):
    g = approx.graph
    a, b = g.sorted_edges()[0]
    fa = _inst("dist=2(x,a)", a)
    fb = _inst("dist=2(x,a)", b)
    return [fa, fb, conj(fa, fb)], (a, b)


class TestBuildSystem:
    def test_headline_fragment_shape(self):
        approx = build_generic(CLS, 12)
        fragment, _ = headline_fragment(approx)
        system = build_constraint_system(approx, CLS, fragment)
        # the two singles merge into one orbit variable, plus the meet
        assert len(system.variables) == 2
        assert len(system.products) == 1
        zeros = [c for c in system.linears if c.kind == "fixed-zero"]
        assert len(zeros) == 1
        p = system.products[0]
        assert p.left == p.right  # orbit-equal factors
        assert system.warning is None

    def test_tautology_fragment(self):
        approx = build_generic(CLS, 6)
        system = build_constraint_system(approx, CLS, [_inst("x=x")])
        assert len(system.variables) == 1
        ones = [c for c in system.linears if c.kind == "fixed-one"]
        assert len(ones) == 1

    def test_edge_fragment(self):
        approx = build_generic(CLS, 12)
        g = approx.graph
        a, b = g.sorted_edges()[0]
        ea, eb = _inst("E(x,a)", a), _inst("E(x,a)", b)
        system = build_constraint_system(approx, CLS, [ea, eb, conj(ea, eb)])
        assert len(system.products) == 1
        assert any(c.kind == "fixed-zero" for c in system.linears)

    def test_additivity_needs_join_and_meet(self):
        approx = build_generic(CLS, 12)
        g = approx.graph
        a, _ = g.sorted_edges()[0]
        ea = _inst("E(x,a)", a)
        na = neg(ea)
        with_both = [ea, na, conj(ea, na), disj(ea, na)]
        system = build_constraint_system(approx, CLS, with_both)
        assert any(c.kind == "additivity" for c in system.linears)
        system2 = build_constraint_system(approx, CLS, [ea, na])
        assert not any(c.kind == "additivity" for c in system2.linears)

    def test_multi_orbit_host_warns(self):
        from amalgam.amalgamation import GenericApproximation
        from amalgam.graphs import FinGraph
        g = FinGraph(3, [(0, 1)])
        ap = GenericApproximation(graph=g, log=(), cls=CLS, seed=0,
                                  budget=3, truncated=False)
        system = build_constraint_system(ap, CLS, [_inst("E(x,a)", 0)])
        assert system.warning is not None

    def test_dump_format(self):
        approx = build_generic(CLS, 12)
        fragment, _ = headline_fragment(approx)
        system = build_constraint_system(approx, CLS, fragment)
        dump = system.dump()
        assert dump.startswith("var m0 ")
        assert "constraint" in dump and "product" in dump


class TestCertifyZero:
    def test_headline_derivation(self):
        approx = build_generic(CLS, 12)
        fragment, _ = headline_fragment(approx)
        system = build_constraint_system(approx, CLS, fragment)
        cert = certify_zero(system, fragment[0], approx.graph)
        assert cert is not None
        rules = [s.rule for s in cert.steps]
        assert "square-root-of-zero" in rules
        assert rules[-1] == "ergodic-decomposition"
        assert cert.text().strip().endswith(
            "for every invariant Keisler measure on the fragment"
        )
        assert replay_zero_certificate(system, cert)

    def test_negated_edge_unknown_with_value_one(self):
        approx = build_generic(CLS, 12)
        g = approx.graph
        a, b = g.sorted_edges()[0]
        ea, eb = _inst("E(x,a)", a), _inst("E(x,a)", b)
        na = neg(ea)
        fragment = [ea, eb, na, conj(ea, eb), conj(ea, na), disj(ea, na)]
        system = build_constraint_system(approx, CLS, fragment)
        assert certify_zero(system, na, g) is None
        from amalgam.measures import _propagate
        values, _ = _propagate(system)
        idx = system.var_by_key(instance_key(g, na)).index
        assert values[idx] == 1

    def test_tautology_not_zero(self):
        approx = build_generic(CLS, 6)
        system = build_constraint_system(approx, CLS, [_inst("x=x")])
        assert certify_zero(system, _inst("x=x"), approx.graph) is None

    def test_replay_rejects_tampering(self):
        approx = build_generic(CLS, 12)
        fragment, _ = headline_fragment(approx)
        system = build_constraint_system(approx, CLS, fragment)
        cert = certify_zero(system, fragment[0], approx.graph)
        from amalgam.measures import Step, ZeroCertificate
        bad = ZeroCertificate(
            target=cert.target,
            target_text=cert.target_text,
            steps=(Step("substitution", "c0", f"{cert.target} = 0"),),
        )
        assert not replay_zero_certificate(system, bad)

    def test_branching_zero_product(self):
        # prod = l * r with prod = 0 but l != r: target derivable only by
        # branching when extra constraints force both branches to zero it.
        vs = [Variable(i, f"k{i}", (f"t{i}",), Fraction(0)) for i in range(3)]
        system = ConstraintSystem(
            variables=vs,
            linears=[
                Linear("c0", "fixed-zero", ((2, Fraction(1)),), "eq",
                       Fraction(0), "given"),
                Linear("c1", "additivity",
                       ((0, Fraction(1)), (1, Fraction(-1))), "eq",
                       Fraction(0), "m0 = m1"),
            ],
            products=[Product("c2", "product", 2, 0, 1, "given")],
        )
        cert = certify_zero(system, 0)
        assert cert is not None
        assert any(s.rule == "branch" for s in cert.steps)


class TestSolveFeasible:
    def test_square_zero_system(self):
        # mu(phi) = mu(psi), mu(phi & psi) = mu(phi)*mu(psi) = 0
        vs = [Variable(i, f"k{i}", (f"t{i}",), Fraction(1)) for i in range(3)]
        system = ConstraintSystem(
            variables=vs,
            linears=[
                Linear("c0", "additivity",
                       ((0, Fraction(1)), (1, Fraction(-1))), "eq",
                       Fraction(0), "equal"),
                Linear("c1", "fixed-zero", ((2, Fraction(1)),), "eq",
                       Fraction(0), "zero"),
            ],
            products=[Product("c2", "product", 2, 0, 1, "prod")],
        )
        res = solve_feasible(system)
        assert isinstance(res, Solution)
        assert res.values[0] == res.values[1] == res.values[2] == 0

    def test_infeasible_chain(self):
        # mu(phi) = 1, mu(phi) <= mu(psi), mu(psi) = 0
        vs = [Variable(i, f"k{i}", (f"t{i}",), Fraction(0)) for i in range(2)]
        system = ConstraintSystem(
            variables=vs,
            linears=[
                Linear("c0", "fixed-one", ((0, Fraction(1)),), "eq",
                       Fraction(1), "one"),
                Linear("c1", "order", ((0, Fraction(1)), (1, Fraction(-1))),
                       "le", Fraction(0), "phi <= psi"),
                Linear("c2", "fixed-zero", ((1, Fraction(1)),), "eq",
                       Fraction(0), "zero"),
            ],
            products=[],
        )
        res = solve_feasible(system)
        assert isinstance(res, Infeasible)
        assert res.core

    def test_empty_system(self):
        system = ConstraintSystem(variables=[], linears=[], products=[])
        res = solve_feasible(system)
        assert isinstance(res, Solution)

    def test_zero_certificate_implies_floor_infeasible(self):
        approx = build_generic(CLS, 12)
        fragment, _ = headline_fragment(approx)
        system = build_constraint_system(approx, CLS, fragment)
        idx = system.var_by_key(
            instance_key(approx.graph, fragment[0])
        ).index
        floor = Linear("audit", "audit", ((idx, Fraction(1)),), "ge",
                       Fraction(1, 1000), "audit floor")
        assert isinstance(solve_feasible(system, extra=[floor]), Infeasible)

    def test_positive_solution_when_not_forced(self):
        # single free variable with a product to itself
        vs = [Variable(0, "k0", ("t0",), Fraction(0)),
              Variable(1, "k1", ("t1",), Fraction(0))]
        system = ConstraintSystem(
            variables=vs,
            linears=[],
            products=[Product("c0", "product", 1, 0, 0, "square")],
        )
        floor = Linear("audit", "audit", ((0, Fraction(1)),), "ge",
                       Fraction(1, 1000), "floor")
        res = solve_feasible(system, extra=[floor])
        assert isinstance(res, Solution)
        assert res.values[0] >= Fraction(1, 1000)
        assert res.values[1] == res.values[0] ** 2
