"""Command-line front end.

Subcommands delegate to the engine operations; all output is also usable
as report material (fixed fields, no timestamps).  Exit codes: 0 success,
1 a required property failed, 2 invalid input, 3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .amalgamation import (
    approximation_from_text,
    approximation_to_text,
    build_generic,
)
from .classes import load_class
from .ergodic import check_ergodic_finite, ergodic_decompose_finite, parse_action_text
from .formulas import FormulaInstance, UnsupportedFormula, instance_text, parse_shape
from .graphs import InvalidInput, ResourceBudget, from_text
from .independence import search_quadruples
from .measures import build_constraint_system, certify_zero
from .pipeline import (
    EXIT_INVALID_INPUT,
    EXIT_OK,
    EXIT_PROPERTY_FAILED,
    EXIT_RESOURCE,
    expand_fragment,
    load_config,
    run_pipeline,
    select_pair,
)
from .predimension import d_independent, weakly_alg_independent
from .sampling import er_product_check
from .verify import verify_construction_properties


def _load_approx(args, cls):
    if getattr(args, "approx", None):
        return approximation_from_text(Path(args.approx).read_text(), cls)
    return build_generic(cls, args.budget, getattr(args, "seed", 0))


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    report, code = run_pipeline(cfg, fmt=args.format)
    sys.stdout.write(report.render(args.format))
    return code


def cmd_class_check(args) -> int:
    cls = load_class(args.cls)
    g = from_text(Path(args.graph).read_text())
    check = cls.in_class(g)
    if check.ok:
        print(f"ACCEPT {args.graph} ({g.n} vertices, {len(g.edges)} edges)")
        return EXIT_OK
    print(f"REJECT {check.violation.describe()}")
    return EXIT_PROPERTY_FAILED


def cmd_generic_build(args) -> int:
    cls = load_class(args.cls)
    approx = build_generic(cls, args.budget, args.seed)
    text = approximation_to_text(approx)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out} ({approx.graph.n} vertices, "
              f"truncated={'yes' if approx.truncated else 'no'})")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_props_verify(args) -> int:
    cls = load_class(args.cls)
    approx = _load_approx(args, cls)
    rep = verify_construction_properties(cls, approx)
    for c in rep.clauses:
        print(f"{c.name}: {c.status} ({c.witness})")
    for a in rep.assumptions:
        print(f"assumption: {a}")
    return EXIT_OK if rep.passed else EXIT_PROPERTY_FAILED


def cmd_indep(args) -> int:
    cls = load_class(args.cls)
    approx = _load_approx(args, cls)
    g = approx.graph
    a, b = args.a, args.b
    w = weakly_alg_independent(cls.pre, cls, g, [a], [b])
    d = d_independent(cls.pre, g, [a], [b])
    weak_text = str(w.independent).lower()
    if not w.resolved:
        weak_text += " (UNRESOLVED)"
    print(f"weakly independent: {weak_text}; d-independent: "
          f"{str(d.independent).lower()}")
    print(f"d(a/b) = {d.d_over_base_and_other}, d(a) = {d.d_over_base}")
    return EXIT_OK


def cmd_indep_theorem(args) -> int:
    cls = load_class(args.cls)
    approx = _load_approx(args, cls)
    for quad, res in search_quadruples(cls, approx, args.mode):
        if isinstance(res, str):
            print(f"quadruple {quad}: {res}")
        else:
            print(f"quadruple {quad}: {res.verdict()} ({res.reason})")
    return EXIT_OK


def cmd_measure_certify_zero(args) -> int:
    cls = load_class(args.cls)
    approx = _load_approx(args, cls)
    va, vb = select_pair(approx.graph, args.pair)
    templates = [args.formula]
    if args.formula != "x=x":
        templates.append("x=x")
    fragment, rows = expand_fragment(templates, va, vb)
    system = build_constraint_system(approx, cls, fragment)
    shape, names = parse_shape(args.formula)
    target = FormulaInstance(shape, (va,) if names else ())
    cert = certify_zero(system, target, approx.graph)
    if cert is None:
        print(f"UNKNOWN: no zero derivation for {instance_text(target)}")
        return EXIT_OK
    sys.stdout.write(cert.text())
    return EXIT_OK


def cmd_measure_decompose(args) -> int:
    action, mu = parse_action_text(Path(args.action).read_text())
    comps = ergodic_decompose_finite(action, mu)
    print("weights " + ", ".join(str(c.weight) for c in comps))
    for c in comps:
        pts = " ".join(str(i) for i in c.orbit)
        print(f"component weight {c.weight} uniform on {{{pts}}}")
    print(f"ergodic: {str(check_ergodic_finite(action, mu)).lower()}")
    return EXIT_OK


def cmd_measure_er_check(args) -> int:
    from fractions import Fraction

    shape_phi, names_phi = parse_shape(args.phi)
    shape_psi, names_psi = parse_shape(args.psi)
    phi = FormulaInstance(shape_phi, tuple(range(len(names_phi))))
    psi = FormulaInstance(
        shape_psi, tuple(range(len(names_phi), len(names_phi) + len(names_psi)))
    )
    rep = er_product_check(
        Fraction(args.p), phi, psi,
        sample=args.sample, seed=args.seed,
    )
    sys.stdout.write(rep.text())
    return EXIT_OK if rep.passed else EXIT_PROPERTY_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="amalgam",
        description="generic-graph and invariant-measure workbench",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="full build/verify/certify pipeline")
    p.add_argument("config")
    p.add_argument("--format", choices=["text", "records"], default="text")
    p.set_defaults(fn=cmd_run)

    pc = sub.add_parser("class", help="amalgamation-class operations")
    pcs = pc.add_subparsers(dest="subcmd", required=True)
    p = pcs.add_parser("check", help="membership check for a graph file")
    p.add_argument("graph")
    p.add_argument("--class", dest="cls", required=True)
    p.set_defaults(fn=cmd_class_check)

    pg = sub.add_parser("generic", help="generic approximations")
    pgs = pg.add_subparsers(dest="subcmd", required=True)
    p = pgs.add_parser("build", help="build an approximation")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_generic_build)

    pp = sub.add_parser("props", help="construction properties")
    pps = pp.add_subparsers(dest="subcmd", required=True)
    p = pps.add_parser("verify")
    _approx_args(p)
    p.set_defaults(fn=cmd_props_verify)

    p = sub.add_parser("indep", help="independence of two vertices")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--weak", action="store_true",
                   help="emphasize the weak-independence reading")
    p.add_argument("--dim", action="store_true",
                   help="emphasize the dimension reading")
    _approx_args(p)
    p.set_defaults(fn=cmd_indep)

    p = sub.add_parser("indep-theorem", help="independence-theorem search")
    p.add_argument("--mode", choices=["STRONG", "STANDARD"], default="STRONG")
    _approx_args(p)
    p.set_defaults(fn=cmd_indep_theorem)

    pm = sub.add_parser("measure", help="measure-engine operations")
    pms = pm.add_subparsers(dest="subcmd", required=True)
    p = pms.add_parser("certify-zero")
    p.add_argument("formula")
    p.add_argument("--pair", choices=["adjacent", "dist2"], default="adjacent")
    _approx_args(p)
    p.set_defaults(fn=cmd_measure_certify_zero)
    p = pms.add_parser("decompose")
    p.add_argument("action")
    p.set_defaults(fn=cmd_measure_decompose)
    p = pms.add_parser("er-check")
    p.add_argument("--p", default="1/2")
    p.add_argument("--phi", default="E(x,a)")
    p.add_argument("--psi", default="E(x,b)")
    p.add_argument("--sample", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_measure_er_check)

    return ap


def _approx_args(p):
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--approx", help="approximation file (else build)")
    p.add_argument("--budget", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InvalidInput, UnsupportedFormula) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except ResourceBudget as e:
        print(f"resource budget exceeded: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
