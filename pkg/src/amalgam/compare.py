"""Per-instance comparison of the forking surrogate against forced zeros.

A row is NONFORKING when some realization in a class-legal bounded
extension of the approximation keeps full dimension over the parameters,
FORKING when every witness layout, realized every legal way over the
approximation, drops dimension, and UNDECIDED-FORKING when the bounded
search gives out.  Zero status comes from certify_zero on the shared
constraint system; OPEN rows carry the propagated value when one is
forced, and the no-false-zero audit exhibits a positive solution for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .amalgamation import GenericApproximation
from .classes import ClassSpec
from .formulas import (
    FormulaInstance,
    UnsupportedFormula,
    instance_key,
    instance_text,
)
from .graphs import ResourceBudget
from .inconsistency import CaseAnalysis
from .measures import (
    ConstraintSystem,
    Infeasible,
    Linear,
    Solution,
    ZeroCertificate,
    certify_zero,
    solve_feasible,
    _propagate,
)
from .predimension import dimension, dimension_rel

NONFORKING = "NONFORKING"
FORKING = "FORKING"
UNDECIDED = "UNDECIDED-FORKING"
ZERO = "ZERO"
OPEN = "OPEN"


@dataclass(frozen=True)
class ForkZeroRow:
    instance: str
    forking: str
    fork_detail: str
    zero: str
    zero_detail: str
    certificate: ZeroCertificate | None = None
    audit_value: Fraction | None = None


def _fork_status(cls: ClassSpec, approx: GenericApproximation, inst: FormulaInstance):
    """Bounded dimension-witness search for one instance."""
    from .independence import _realize_witness

    g = approx.graph
    params = frozenset(inst.params)
    d_free = Fraction(cls.pre.c_v)  # d(point) = c_v in any class member
    # Realizations already inside the approximation first.
    from .formulas import satisfying_vertices

    for c in satisfying_vertices(g, inst):
        lhs = dimension_rel(cls.pre, g, [c], params)
        rhs = dimension(cls.pre, g, [c])
        if lhs == rhs:
            return NONFORKING, (
                f"witness vertex {c}: d(c/params) = {lhs} = d(c)"
            )
    # Otherwise try every surviving witness layout over the approximation.
    try:
        analysis = CaseAnalysis(cls, g, inst)
        witnesses, _cases, _pruned, undecided = analysis.run()
    except (UnsupportedFormula, ResourceBudget) as e:
        return UNDECIDED, f"bounded analysis unavailable: {e}"
    if undecided:
        return UNDECIDED, "witness analysis undecided"
    if not witnesses:
        return FORKING, "no realization exists at all (inconsistent instance)"
    realized_dependent = False
    for w in witnesses:
        try:
            got = _realize_witness(cls, approx, w, inst, params)
        except ResourceBudget as e:
            return UNDECIDED, f"realization search budget: {e}"
        if got is not None:
            amalgam, xh, _new = got
            lhs = dimension_rel(cls.pre, amalgam, [xh], params)
            return NONFORKING, (
                f"witness in extension ({w.description}): "
                f"d(c/params) = {lhs} = d(c)"
            )
        realized_dependent = True
    detail = "every bounded realization drops dimension below %s" % d_free
    if not realized_dependent:
        detail = "no witness layout realizes over the approximation"
    return FORKING, detail


def compare_fork_vs_zero(
    approx: GenericApproximation,
    cls: ClassSpec,
    rows: list[FormulaInstance],
    system: ConstraintSystem,
) -> list[ForkZeroRow]:
    g = approx.graph
    values, _steps = _propagate(system)
    out = []
    for inst in rows:
        forking, fdetail = _fork_status(cls, approx, inst)
        var = system.var_by_key(instance_key(g, inst))
        cert = None
        audit_value = None
        if var is None:
            zero, zdetail = OPEN, "instance not in the constraint system"
        else:
            cert = certify_zero(system, var.index)
            if cert is not None:
                zero, zdetail = ZERO, f"certified via {len(cert.steps)} steps"
            else:
                zero = OPEN
                if var.index in values:
                    zdetail = f"value forced to {values[var.index]}"
                    audit_value = values[var.index]
                else:
                    zdetail = "no forced value"
        out.append(ForkZeroRow(
            instance=instance_text(inst),
            forking=forking,
            fork_detail=fdetail,
            zero=zero,
            zero_detail=zdetail,
            certificate=cert,
            audit_value=audit_value,
        ))
    return out


@dataclass(frozen=True)
class AuditRow:
    instance: str
    kind: str      # zero-infeasible | open-positive
    ok: bool
    detail: str


def audit_system(
    approx: GenericApproximation,
    cls: ClassSpec,
    rows: list[FormulaInstance],
    system: ConstraintSystem,
    table: list[ForkZeroRow],
    threshold: Fraction = Fraction(1, 1000),
) -> list[AuditRow]:
    """Soundness cross-checks on the zero reports.

    Every ZERO row must make the system infeasible once its variable is
    pushed above the threshold; every OPEN row must admit an explicit
    solution with positive value there.
    """
    g = approx.graph
    out = []
    for inst, row in zip(rows, table):
        var = system.var_by_key(instance_key(g, inst))
        if var is None:
            continue
        floor = Linear(
            "audit", "audit", ((var.index, Fraction(1)),), "ge", threshold,
            "audit floor",
        )
        res = solve_feasible(system, extra=[floor])
        if row.zero == ZERO:
            ok = isinstance(res, Infeasible)
            detail = (
                "system with floor is infeasible"
                if ok else "floor unexpectedly satisfiable"
            )
            out.append(AuditRow(row.instance, "zero-infeasible", ok, detail))
        else:
            ok = isinstance(res, Solution) and res.values[var.index] >= threshold
            detail = (
                f"solution gives {res.values[var.index]} ({res.method})"
                if isinstance(res, Solution)
                else "no positive solution found"
            )
            out.append(AuditRow(row.instance, "open-positive", ok, detail))
    return out
