"""Keisler-measure constraint systems over formula orbits.

One variable per orbit key (formula shape x parameter-tuple orbit), so
invariance under automorphisms is structural rather than axiomatic.  The
system models a single arbitrary ergodic measure; product constraints are
emitted only for weakly algebraically independent parameter pairs with a
resolved closure computation, and the lift from "zero in every ergodic
measure" to "zero in every invariant measure" is the recorded final
certificate step (ergodic decomposition), not re-proven.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .amalgamation import GenericApproximation
from .classes import ClassSpec
from .formulas import (
    FormulaInstance,
    UnsupportedFormula,
    conj,
    disj,
    evaluate_at_infinity,
    instance_key,
    instance_text,
    neg,
)
from .graphs import InvalidInput, ResourceBudget
from .inconsistency import InconsistencyCertificate, certify_inconsistent
from .orbits import vertex_orbit_count
from .predimension import acl_approx, weakly_alg_independent

VAR_CAP = 64


@dataclass
class Variable:
    index: int
    key: object
    texts: tuple[str, ...]
    generic_value: Fraction

    @property
    def name(self) -> str:
        return f"m{self.index}"


@dataclass(frozen=True)
class Linear:
    """sum(coeff * var) relation rhs, relation in {eq, le, ge}."""

    cid: str
    kind: str
    coeffs: tuple[tuple[int, Fraction], ...]
    relation: str
    rhs: Fraction
    justification: str

    def text(self, names) -> str:
        lhs = " + ".join(
            (f"{c}*{names[i]}" if c != 1 else names[i]) for i, c in self.coeffs
        )
        rel = {"eq": "=", "le": "<=", "ge": ">="}[self.relation]
        return f"{lhs} {rel} {self.rhs}"


@dataclass(frozen=True)
class Product:
    cid: str
    kind: str
    prod: int
    left: int
    right: int
    justification: str

    def text(self, names) -> str:
        return f"{names[self.prod]} = {names[self.left]} * {names[self.right]}"


@dataclass
class ConstraintSystem:
    variables: list[Variable]
    linears: list[Linear]
    products: list[Product]
    warning: str | None = None
    certificates: dict[str, InconsistencyCertificate] = field(default_factory=dict)

    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def var_by_key(self, key) -> Variable | None:
        for v in self.variables:
            if v.key == key:
                return v
        return None

    def constraint(self, cid: str):
        for c in self.linears + self.products:
            if c.cid == cid:
                return c
        raise InvalidInput(f"unknown constraint {cid}")

    def dump(self) -> str:
        names = self.names()
        lines = []
        if self.warning:
            lines.append(f"warning {self.warning}")
        for v in self.variables:
            insts = " ; ".join(v.texts)
            lines.append(f"var {v.name} {insts}")
        for c in self.linears + self.products:
            lines.append(
                f"constraint {c.cid} {c.kind} {c.text(names)} "
                f"; {c.justification}"
            )
        return "\n".join(lines) + "\n"


def build_constraint_system(
    approx: GenericApproximation,
    cls: ClassSpec,
    fragment: Iterable[FormulaInstance],
) -> ConstraintSystem:
    """Orbit-keyed variables plus normalization, additivity, fixed-value and
    product constraints for the given instances.

    Additivity and product constraints are emitted only where the needed
    combined instances are themselves in the fragment.
    """
    g = approx.graph
    fragment = list(fragment)
    warning = None
    acl_empty = acl_approx(cls.pre, cls, g, frozenset())
    if acl_empty.vertices or not acl_empty.resolved:
        warning = "acl(empty) is not trivially empty; base-extension handling is out of scope"
    elif vertex_orbit_count(g) != 1:
        warning = "vertices form more than one orbit; type-over-empty surrogate fails"

    variables: list[Variable] = []
    by_key: dict[object, Variable] = {}
    inst_var: dict[int, Variable] = {}

    def var_for(inst: FormulaInstance) -> Variable:
        key = instance_key(g, inst)
        v = by_key.get(key)
        txt = instance_text(inst)
        gen = Fraction(1 if evaluate_at_infinity(inst.shape) else 0)
        if v is None:
            if len(variables) >= VAR_CAP:
                raise ResourceBudget("variable count beyond the configured bound")
            v = Variable(len(variables), key, (txt,), gen)
            variables.append(v)
            by_key[key] = v
        else:
            if v.generic_value != gen:
                raise InvalidInput(
                    f"orbit-merged instances disagree at infinity: {txt}"
                )
            if txt not in v.texts:
                v.texts = tuple(sorted(set(v.texts) | {txt}))
        return v

    for i, inst in enumerate(fragment):
        inst_var[i] = var_for(inst)

    linears: list[Linear] = []
    products: list[Product] = []
    certs: dict[str, InconsistencyCertificate] = {}
    seen: set = set()

    def add_linear(kind, coeffs, relation, rhs, just):
        sig = (kind, tuple(sorted(coeffs)), relation, rhs)
        if sig in seen:
            return
        seen.add(sig)
        cid = f"c{len(linears) + len(products)}"
        linears.append(Linear(cid, kind, tuple(coeffs), relation, rhs, just))

    def add_product(pv, lv, rv, just):
        sig = ("product", pv, tuple(sorted((lv, rv))))
        if sig in seen:
            return
        seen.add(sig)
        cid = f"c{len(linears) + len(products)}"
        products.append(Product(cid, "product", pv, lv, rv, just))

    for v in variables:
        add_linear("nonnegativity", [(v.index, Fraction(1))], "ge", Fraction(0),
                   "measures are nonnegative")
        add_linear("normalization", [(v.index, Fraction(1))], "le", Fraction(1),
                   "measures are bounded by the whole sort")

    # Fixed values: inconsistent instances pin 0; an instance whose
    # complement is certified inconsistent pins 1 (x=x falls out this way).
    for i, inst in enumerate(fragment):
        v = inst_var[i]
        try:
            res = certify_inconsistent(cls, g, inst)
        except UnsupportedFormula:
            res = None
        if res is not None and res.verdict == "INCONSISTENT":
            just = f"conjunction certified inconsistent ({len(res.cases)} cases)"
            add_linear("fixed-zero", [(v.index, Fraction(1))], "eq", Fraction(0), just)
            certs[f"zero:{v.name}"] = res
            continue
        try:
            resc = certify_inconsistent(cls, g, neg(inst))
        except UnsupportedFormula:
            resc = None
        if resc is not None and resc.verdict == "INCONSISTENT":
            just = "complement certified inconsistent"
            add_linear("fixed-one", [(v.index, Fraction(1))], "eq", Fraction(1), just)
            certs[f"one:{v.name}"] = resc

    # Additivity over pairs whose join and meet are in the fragment.
    keys = {instance_key(g, inst): inst_var[i] for i, inst in enumerate(fragment)}

    def lookup(inst: FormulaInstance) -> Variable | None:
        return keys.get(instance_key(g, inst))

    for i, fi in enumerate(fragment):
        for j in range(i + 1, len(fragment)):
            fj = fragment[j]
            v_and = lookup(conj(fi, fj))
            v_or = lookup(disj(fi, fj))
            if v_and is None or v_or is None:
                continue
            coeffs = {}
            for idx, c in [
                (v_or.index, 1), (v_and.index, 1),
                (inst_var[i].index, -1), (inst_var[j].index, -1),
            ]:
                coeffs[idx] = coeffs.get(idx, 0) + c
            add_linear(
                "additivity",
                [(k, Fraction(c)) for k, c in sorted(coeffs.items()) if c],
                "eq",
                Fraction(0),
                f"mu(or) + mu(and) = mu + mu for {instance_text(fi)}, {instance_text(fj)}",
            )

    # Product rule for weakly independent parameter pairs.
    for i, fi in enumerate(fragment):
        for j in range(i + 1, len(fragment)):
            fj = fragment[j]
            if not fi.params or not fj.params:
                continue
            v_and = lookup(conj(fi, fj))
            if v_and is None:
                continue
            wr = weakly_alg_independent(
                cls.pre, cls, g, frozenset(fi.params), frozenset(fj.params)
            )
            if not wr.resolved:
                continue  # omitted, never unsound; logged by caller via dump
            if not wr.independent:
                continue
            add_product(
                v_and.index, inst_var[i].index, inst_var[j].index,
                "parameters weakly algebraically independent over empty set",
            )

    return ConstraintSystem(
        variables=variables,
        linears=linears,
        products=products,
        warning=warning,
        certificates=certs,
    )


# -- zero certification ---------------------------------------------------------


@dataclass(frozen=True)
class Step:
    rule: str
    constraint: str
    equation: str


@dataclass(frozen=True)
class ZeroCertificate:
    target: str     # variable name
    target_text: str
    steps: tuple[Step, ...]

    def text(self) -> str:
        lines = []
        for n, s in enumerate(self.steps, 1):
            lines.append(f"step {n}: {s.rule} using {s.constraint} => {s.equation}")
        lines.append(
            f"conclusion: {self.target} = 0 for every invariant Keisler "
            "measure on the fragment"
        )
        return "\n".join(lines) + "\n"


def _propagate(system: ConstraintSystem, extra: dict[int, Fraction] | None = None):
    """Fixpoint of substitution/additivity/product propagation.

    Returns (values, steps); sound rules only, so any derived value holds
    in every solution extending `extra`.
    """
    values: dict[int, Fraction] = dict(extra or {})
    steps: list[Step] = []
    names = system.names()

    def set_val(idx, val, rule, cid):
        if idx in values:
            if values[idx] != val:
                raise InvalidInput(
                    f"constraint system is inconsistent at {names[idx]}"
                )
            return False
        values[idx] = val
        steps.append(Step(rule, cid, f"{names[idx]} = {val}"))
        return True

    changed = True
    while changed:
        changed = False
        for c in system.linears:
            if c.relation != "eq":
                continue
            unknown = [(i, co) for i, co in c.coeffs if i not in values]
            if len(unknown) == 1:
                i, co = unknown[0]
                acc = sum((values[j] * cj for j, cj in c.coeffs if j != i),
                          Fraction(0))
                rule = "substitution" if len(c.coeffs) == 1 else "additivity"
                changed |= set_val(i, (c.rhs - acc) / co, rule, c.cid)
        for p in system.products:
            lv, rv, pv = p.left, p.right, p.prod
            if lv in values and rv in values:
                changed |= set_val(pv, values[lv] * values[rv], "product", p.cid)
            elif pv in values and values[pv] == 0:
                if lv == rv:
                    changed |= set_val(lv, Fraction(0), "square-root-of-zero", p.cid)
                elif lv in values and values[lv] != 0:
                    changed |= set_val(rv, Fraction(0), "product-split", p.cid)
                elif rv in values and values[rv] != 0:
                    changed |= set_val(lv, Fraction(0), "product-split", p.cid)
            elif pv in values and values[pv] != 0:
                if lv in values and values[lv] != 0:
                    changed |= set_val(rv, values[pv] / values[lv], "product", p.cid)
                elif rv in values and values[rv] != 0:
                    changed |= set_val(lv, values[pv] / values[rv], "product", p.cid)
    return values, steps


def certify_zero(
    system: ConstraintSystem, target: FormulaInstance | int, g=None
) -> ZeroCertificate | None:
    """Replayable derivation that the target is zero in every solution.

    Branching over ambiguous zero-products is depth-bounded; UNKNOWN (None)
    is returned when no derivation closes, never a false positive.
    """
    if isinstance(target, FormulaInstance):
        if g is None:
            raise InvalidInput("certifying by instance needs the host graph")
        v = system.var_by_key(instance_key(g, target))
        if v is None:
            raise InvalidInput("target instance has no variable in the system")
        idx = v.index
    else:
        idx = target
    values, steps = _propagate(system)
    if values.get(idx) == 0:
        cert_steps = _trim_steps(system, steps, idx)
        return _finish(system, idx, cert_steps)
    derived = _branch_zero(system, values, idx, depth=2)
    if derived is None:
        return None
    return _finish(system, idx, tuple(derived))


def _branch_zero(system, values, idx, depth):
    """Prove target = 0 on every branch of an ambiguous zero-product."""
    if depth == 0:
        return None
    for p in system.products:
        if values.get(p.prod) == 0 and p.left != p.right:
            if p.left in values or p.right in values:
                continue
            sides = []
            for side in (p.left, p.right):
                sval, ssteps = _propagate(system, {**values, side: Fraction(0)})
                if sval.get(idx) == 0:
                    sides.append(Step(
                        "branch", p.cid,
                        f"assuming {system.names()[side]} = 0 closes the target",
                    ))
                else:
                    deeper = _branch_zero(system, sval, idx, depth - 1)
                    if deeper is None:
                        sides = None
                        break
                    sides.append(Step(
                        "branch", p.cid,
                        f"assuming {system.names()[side]} = 0, then deeper branching",
                    ))
            if sides is not None:
                return sides
    return None


def _trim_steps(system, steps, idx) -> tuple[Step, ...]:
    """Keep the steps a replay of the target derivation actually needs."""
    needed_vars = {idx}
    kept: list[Step] = []
    for s in reversed(steps):
        var = s.equation.split(" = ")[0]
        vidx = int(var[1:])
        if vidx not in needed_vars:
            continue
        kept.append(s)
        c = system.constraint(s.constraint)
        if isinstance(c, Linear):
            needed_vars |= {i for i, _ in c.coeffs}
        else:
            needed_vars |= {c.prod, c.left, c.right}
    return tuple(reversed(kept))


def _finish(system, idx, steps) -> ZeroCertificate:
    v = system.variables[idx]
    final = Step(
        "ergodic-decomposition", "-",
        "zero for one arbitrary ergodic measure lifts to every invariant "
        "measure by ergodic decomposition",
    )
    return ZeroCertificate(
        target=v.name, target_text=" ; ".join(v.texts), steps=tuple(steps) + (final,)
    )


def replay_zero_certificate(system: ConstraintSystem, cert: ZeroCertificate) -> bool:
    """Re-run each step mechanically against the system."""
    names = system.names()
    values: dict[int, Fraction] = {}

    def name_idx(nm: str) -> int:
        return int(nm[1:])

    for s in cert.steps:
        if s.rule == "ergodic-decomposition":
            continue
        if s.rule == "branch":
            c = system.constraint(s.constraint)
            if not isinstance(c, Product) or values.get(c.prod) != 0:
                return False
            # Re-derive both branches from scratch.
            for side in (c.left, c.right):
                sval, _ = _propagate(system, {**values, side: Fraction(0)})
                if sval.get(name_idx(cert.target)) != 0:
                    ok = _branch_zero(system, sval, name_idx(cert.target), 1)
                    if ok is None:
                        return False
            values[name_idx(cert.target)] = Fraction(0)
            continue
        var, _, val = s.equation.partition(" = ")
        idx = name_idx(var.strip())
        val = Fraction(val.strip())
        c = system.constraint(s.constraint)
        if s.rule in ("substitution", "additivity"):
            if not isinstance(c, Linear) or c.relation != "eq":
                return False
            acc = Fraction(0)
            cv = None
            for i, co in c.coeffs:
                if i == idx:
                    cv = co
                elif i in values:
                    acc += values[i] * co
                else:
                    return False
            if cv is None or (c.rhs - acc) / cv != val:
                return False
        elif s.rule == "product":
            if not isinstance(c, Product):
                return False
            lv, rv, pv = values.get(c.left), values.get(c.right), values.get(c.prod)
            if idx == c.prod:
                if lv is None or rv is None or lv * rv != val:
                    return False
            elif idx == c.left:
                if pv is None or rv in (None, 0) or pv / rv != val:
                    return False
            else:
                if pv is None or lv in (None, 0) or pv / lv != val:
                    return False
        elif s.rule == "square-root-of-zero":
            if not isinstance(c, Product) or c.left != c.right:
                return False
            if values.get(c.prod) != 0 or c.left != idx or val != 0:
                return False
        elif s.rule == "product-split":
            if not isinstance(c, Product) or values.get(c.prod) != 0:
                return False
            other = c.right if idx == c.left else c.left
            if values.get(other) in (None, 0) or val != 0:
                return False
        else:
            return False
        values[idx] = val
    return values.get(int(cert.target[1:])) == 0


# -- feasibility -----------------------------------------------------------------


@dataclass(frozen=True)
class Solution:
    values: dict[int, Fraction]
    method: str


@dataclass(frozen=True)
class Infeasible:
    core: tuple[str, ...]


def _check_solution(system: ConstraintSystem, extra, values) -> bool:
    for c in system.linears + list(extra):
        if isinstance(c, Linear):
            acc = sum((values[i] * co for i, co in c.coeffs), Fraction(0))
            if c.relation == "eq" and acc != c.rhs:
                return False
            if c.relation == "le" and not acc <= c.rhs:
                return False
            if c.relation == "ge" and not acc >= c.rhs:
                return False
    for p in system.products:
        if values[p.prod] != values[p.left] * values[p.right]:
            return False
    return True


def solve_feasible(
    system: ConstraintSystem,
    extra: Iterable[Linear] = (),
    denominator_bound: int = 4096,
) -> Solution | Infeasible | None:
    """Exact rational point satisfying the system, or INFEASIBLE, or None.

    Tries the generic far-point 0/1 assignment first, then exact interval
    branch-and-propagate with bisection candidates of bounded denominator.
    None means the search gave up (acceptable; never claimed infeasible).
    """
    extra = list(extra)
    generic = {v.index: v.generic_value for v in system.variables}
    if _check_solution(system, extra, generic):
        return Solution(generic, "generic-point")

    n = len(system.variables)
    lo = [Fraction(0)] * n
    hi = [Fraction(1)] * n
    used: list[str] = []

    def prop() -> bool:
        changed = True
        while changed:
            changed = False
            for c in list(system.linears) + extra:
                pos = {i: co for i, co in c.coeffs}
                lo_sum = sum(co * (lo[i] if co > 0 else hi[i]) for i, co in pos.items())
                hi_sum = sum(co * (hi[i] if co > 0 else lo[i]) for i, co in pos.items())
                if c.relation in ("eq", "le") and lo_sum > c.rhs:
                    used.append(c.cid)
                    return False
                if c.relation in ("eq", "ge") and hi_sum < c.rhs:
                    used.append(c.cid)
                    return False
                for i, co in pos.items():
                    others_lo = lo_sum - co * (lo[i] if co > 0 else hi[i])
                    others_hi = hi_sum - co * (hi[i] if co > 0 else lo[i])
                    if c.relation in ("eq", "le"):
                        bound = (c.rhs - others_lo) / co
                        if co > 0 and bound < hi[i]:
                            hi[i] = bound
                            changed = True
                            used.append(c.cid)
                        if co < 0 and bound > lo[i]:
                            lo[i] = bound
                            changed = True
                            used.append(c.cid)
                    if c.relation in ("eq", "ge"):
                        bound = (c.rhs - others_hi) / co
                        if co > 0 and bound > lo[i]:
                            lo[i] = bound
                            changed = True
                            used.append(c.cid)
                        if co < 0 and bound < hi[i]:
                            hi[i] = bound
                            changed = True
                            used.append(c.cid)
                    if lo[i] > hi[i]:
                        used.append(c.cid)
                        return False
            for p in system.products:
                nlo, nhi = lo[p.left] * lo[p.right], hi[p.left] * hi[p.right]
                if nlo > lo[p.prod]:
                    lo[p.prod] = nlo
                    changed = True
                    used.append(p.cid)
                if nhi < hi[p.prod]:
                    hi[p.prod] = nhi
                    changed = True
                    used.append(p.cid)
                if lo[p.prod] > hi[p.prod]:
                    used.append(p.cid)
                    return False
                for a, b in ((p.left, p.right), (p.right, p.left)):
                    if lo[p.prod] > 0 and hi[b] > 0:
                        bound = lo[p.prod] / hi[b]
                        if bound > lo[a]:
                            lo[a] = bound
                            changed = True
                            used.append(p.cid)
                    if lo[b] > 0:
                        bound = hi[p.prod] / lo[b]
                        if bound < hi[a]:
                            hi[a] = bound
                            changed = True
                            used.append(p.cid)
                    if lo[a] > hi[a]:
                        used.append(p.cid)
                        return False
        return True

    def search(depth: int):
        state = (list(lo), list(hi))
        try:
            if not prop():
                return Infeasible(tuple(dict.fromkeys(used)))
            free = [i for i in range(n) if lo[i] < hi[i]]
            if not free:
                values = {i: lo[i] for i in range(n)}
                if _check_solution(system, extra, values):
                    return Solution(values, "branch-and-propagate")
                return None
            if depth > 3 * n + 8:
                return None
            i = free[0]
            mid = (lo[i] + hi[i]) / 2
            if mid.denominator > denominator_bound:
                return None
            outcomes = []
            for cand in dict.fromkeys([lo[i], hi[i], mid]):
                inner = (list(lo), list(hi))
                lo[i] = hi[i] = cand
                r = search(depth + 1)
                lo[i], hi[i] = inner[0][i], inner[1][i]
                if isinstance(r, Solution):
                    return r
                outcomes.append(r)
            # Candidate probing is incomplete: a failed probe does not
            # exclude the interval, so infeasibility cannot be concluded
            # here unless propagation itself conflicts.
            return None
        finally:
            lo[:], hi[:] = state

    return search(0)
