"""Exhaustive bounded-witness case analysis for formula conjunctions.

A conjunction in the fragment is refuted by showing that every way its
witnesses (path interiors of exact-distance atoms, plus the path witnesses
the parameter type itself forces) can coincide with each other, with the
parameters, or with the free point leads to a forced forbidden pattern, a
predimension violation, or a clash with an atom.  Refutations use forced
edges only, so they transfer to every class member realizing the layout;
a surviving case yields a concrete class-member witness (its minimal
graph), so verdicts are never guesses.

Negative exact-distance literals cannot always be decided by minimal
graphs (a member may shorten a distance with extra structure); when that
blocks both verdicts the analysis raises UnsupportedFormula rather than
answer unsoundly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .classes import ClassSpec, DeltaViolation, ForbiddenViolation
from .formulas import (
    And,
    Atom,
    FormulaInstance,
    Not,
    Or,
    UnsupportedFormula,
    conj,
    instance_text,
)
from .graphs import (
    FinGraph,
    InvalidInput,
    ResourceBudget,
    distances_from,
    find_embedding,
)

K_MAX = 4
DNF_CAP = 4096
SLOT_CAP = 8
PROFILE_CAP = 200_000


@dataclass(frozen=True)
class Lit:
    positive: bool
    kind: str           # true | eq | edge | dist_eq | dist_le
    vertex: int | None  # bound parameter vertex
    k: int | None = None

    def text(self) -> str:
        if self.kind == "true":
            body = "x=x"
        elif self.kind == "eq":
            body = f"x=v{self.vertex}"
        elif self.kind == "edge":
            body = f"E(x,v{self.vertex})"
        elif self.kind == "dist_eq":
            body = f"dist={self.k}(x,v{self.vertex})"
        else:
            body = f"dist<={self.k}(x,v{self.vertex})"
        return body if self.positive else f"!{body}"


def _nnf_dnf(shape, params) -> list[frozenset[Lit]]:
    """DNF branches of the instance; positive dist<= is expanded away."""

    def lit(atom: Atom, positive: bool) -> list[list[Lit]]:
        v = None if atom.slot is None else params[atom.slot]
        if positive and atom.kind == "dist_le":
            # dist<=k  <=>  x=p | E(x,p) | dist=2 | ... | dist=k
            opts = [[Lit(True, "eq", v)], [Lit(True, "edge", v)]]
            opts += [[Lit(True, "dist_eq", v, d)] for d in range(2, atom.k + 1)]
            return opts
        return [[Lit(positive, atom.kind, v, atom.k)]]

    def go(f, positive: bool) -> list[list[Lit]]:
        if isinstance(f, Atom):
            return lit(f, positive)
        if isinstance(f, Not):
            return go(f.child, not positive)
        disjunctive = isinstance(f, Or) if positive else isinstance(f, And)
        kids = [go(c, positive) for c in f.children]
        if not kids:
            empty_true = isinstance(f, And) if positive else isinstance(f, Or)
            return [[]] if empty_true else []
        if disjunctive:
            return [b for k in kids for b in k]
        out: list[list[Lit]] = [[]]
        for k in kids:
            nxt = []
            for pre in out:
                for b in k:
                    nxt.append(pre + b)
                    if len(nxt) > DNF_CAP:
                        raise ResourceBudget("DNF expansion beyond cap")
            out = nxt
        return out

    return [frozenset(b) for b in go(shape, True)]


@dataclass(frozen=True)
class CaseRecord:
    """One refuted witness profile with its forced-structure refutation."""

    description: str
    graph: FinGraph
    roles: tuple[str, ...]
    kind: str                      # pattern | delta
    pattern_name: str | None = None
    embedding: tuple[tuple[int, int], ...] | None = None
    delta_set: tuple[int, ...] | None = None
    delta_text: str | None = None


@dataclass(frozen=True)
class PrunedRecord:
    description: str
    reason: str


@dataclass(frozen=True)
class ConsistentWitness:
    target_text: str
    graph: FinGraph
    roles: tuple[str, ...]
    description: str
    x_vertex: int

    verdict = "CONSISTENT"

    def __bool__(self):
        return False  # "not inconsistent"


@dataclass(frozen=True)
class InconsistencyCertificate:
    target_text: str
    cases: tuple[CaseRecord, ...]
    pruned: tuple[PrunedRecord, ...]

    verdict = "INCONSISTENT"

    def __bool__(self):
        return True

    def text(self) -> str:
        lines = [f"target {self.target_text}"]
        for i, c in enumerate(self.cases):
            vs = " ".join(f"{v}:{r}" for v, r in enumerate(c.roles))
            es = " ".join(f"{u}-{v}" for u, v in c.graph.sorted_edges())
            if c.kind == "pattern":
                emb = " ".join(f"{p}->{h}" for p, h in c.embedding)
                lines.append(
                    f"case {i}: vertices {vs} edges {es} "
                    f"forbidden {c.pattern_name} at {emb}  # {c.description}"
                )
            else:
                lines.append(
                    f"case {i}: vertices {vs} edges {es} "
                    f"delta-violation {c.delta_text}  # {c.description}"
                )
        for p in self.pruned:
            lines.append(f"pruned: {p.description}  # {p.reason}")
        return "\n".join(lines) + "\n"


def _type_facts(g: FinGraph, params: list[int]):
    """Pairwise distance facts of the parameter tuple, host-evaluated."""
    facts = []
    for i, p in enumerate(params):
        dist = distances_from(g, p)
        for q in params[i + 1:]:
            d = dist[q]
            facts.append((p, q, d if d >= 0 else None))
    return facts


class CaseAnalysis:
    """Shared machinery for certify_inconsistent and the amalgamation test."""

    def __init__(self, cls: ClassSpec, host: FinGraph, inst: FormulaInstance):
        self.cls = cls
        self.host = host
        self.inst = inst
        for v in inst.params:
            host.check_vertex(v)
        self.params = sorted(set(inst.params))
        self.branches = _nnf_dnf(inst.shape, inst.params)
        self.facts = _type_facts(host, self.params)
        self.target_text = instance_text(inst)

    # -- witness slots -------------------------------------------------------

    def branch_chains(self, branch: frozenset[Lit]):
        """Forced paths: each chain is a token list, tokens are
        ("x", None), ("p", vertex) or ("w", slot-name)."""
        slots: list[str] = []
        chains: list[tuple] = []
        for lit in sorted(branch, key=lambda l: l.text()):
            if lit.positive and lit.kind == "dist_eq":
                names = [f"w{len(slots) + j}" for j in range(lit.k - 1)]
                slots.extend(names)
                chains.append(tuple(
                    [("x", None)]
                    + [("w", nm) for nm in names]
                    + [("p", lit.vertex)]
                ))
        for p, q, d in self.facts:
            if d is not None and 2 <= d <= K_MAX:
                names = [f"t{len(slots) + j}" for j in range(d - 1)]
                slots.extend(names)
                chains.append(tuple(
                    [("p", p)] + [("w", nm) for nm in names] + [("p", q)]
                ))
        if len(slots) > SLOT_CAP:
            raise UnsupportedFormula(
                f"witness profile needs {len(slots)} slots; bound is {SLOT_CAP}"
            )
        return slots, chains

    # -- identification profiles ----------------------------------------------

    def enumerate_profiles(self, branch: frozenset[Lit]):
        """Yield (description, x_target, assignment, chains); assignment maps
        slot name -> ("fresh", class), ("p", vertex) or ("x", None)."""
        slots, chains = self.branch_chains(branch)
        eq_pos = {l.vertex for l in branch if l.kind == "eq" and l.positive}
        eq_neg = {l.vertex for l in branch if l.kind == "eq" and not l.positive}
        if len(eq_pos) > 1:
            yield ("x pinned to two parameters", None, None, chains)
            return
        if eq_pos:
            x_options = [next(iter(eq_pos))]
        else:
            x_options = [None] + [p for p in self.params if p not in eq_neg]
        count = 0
        for x_t in x_options:
            for assign in self._assign_slots(slots, {}, 0):
                count += 1
                if count > PROFILE_CAP:
                    raise ResourceBudget("profile enumeration beyond cap")
                desc = "x=" + ("fresh" if x_t is None else f"v{x_t}")
                if slots:
                    desc += "; " + ", ".join(
                        f"{s}->{_token_text(assign[s])}" for s in slots
                    )
                yield (desc, x_t, dict(assign), chains)

    def _assign_slots(self, slots, acc, i):
        if i == len(slots):
            yield acc
            return
        s = slots[i]
        used_classes = sorted({t for t in acc.values() if t[0] == "fresh"})
        used_pins = {t for t in acc.values() if t[0] != "fresh"}
        options: list[tuple] = list(used_classes)
        options.append(("fresh", len(used_classes)))
        options += [("p", p) for p in self.params if ("p", p) not in used_pins]
        if ("x", None) not in used_pins:
            options.append(("x", None))
        for t in options:
            acc[s] = t
            yield from self._assign_slots(slots, acc, i + 1)
            del acc[s]

    # -- minimal graphs ---------------------------------------------------------

    def build_case(self, branch, x_t, assign, chains):
        """Minimal forced graph of a profile, or a degeneracy reason."""
        vid: dict[tuple, int] = {}
        roles: list[str] = []
        for p in self.params:
            vid[("p", p)] = len(roles)
            roles.append(f"v{p}")
        if x_t is None:
            vid[("x", None)] = len(roles)
            roles.append("x")
        else:
            vid[("x", None)] = vid[("p", x_t)]
        fresh = sorted({t for t in assign.values() if t[0] == "fresh"})
        for t in fresh:
            vid[t] = len(roles)
            roles.append(f"w{t[1]}")

        def tok_vertex(tok):
            if tok[0] == "w":
                return vid[assign[tok[1]]]
            return vid[tok]

        edges = set()
        for p, q, d in self.facts:
            if d == 1:
                edges.add(tuple(sorted((vid[("p", p)], vid[("p", q)]))))
        for lit in branch:
            if lit.positive and lit.kind == "edge":
                u, v = vid[("x", None)], vid[("p", lit.vertex)]
                if u == v:
                    return None, None, f"forced {lit.text()} becomes a loop"
                edges.add(tuple(sorted((u, v))))
        for chain in chains:
            pts = [tok_vertex(t) for t in chain]
            for a, b in zip(pts, pts[1:]):
                if a == b:
                    return None, None, "identification forces a loop on a path"
                edges.add(tuple(sorted((a, b))))
        return FinGraph(len(roles), sorted(edges)), tuple(roles), None

    # -- evaluation ---------------------------------------------------------------

    def evaluate_case(self, branch, graph, roles, x_t):
        """(clash reason or None, undecided flag)."""
        vat = {r: i for i, r in enumerate(roles)}
        xv = vat["x"] if x_t is None else vat[f"v{x_t}"]
        dist = distances_from(graph, xv)
        undecided = False
        for lit in sorted(branch, key=lambda l: l.text()):
            if lit.kind == "true":
                if not lit.positive:
                    return "negated tautology", False
                continue
            pv = vat[f"v{lit.vertex}"]
            d = dist[pv] if dist[pv] >= 0 else None
            if lit.kind == "eq":
                if (xv == pv) != lit.positive:
                    return f"{lit.text()} fails", False
            elif lit.kind == "edge":
                has = graph.has_edge(xv, pv) if xv != pv else False
                if has != lit.positive:
                    return f"forced structure contradicts {lit.text()}", False
            elif lit.kind == "dist_eq":
                if lit.positive:
                    if d != lit.k:
                        return (
                            f"forced structure makes dist(x,v{lit.vertex}) "
                            f"{d}, not {lit.k}",
                            False,
                        )
                elif d == lit.k:
                    undecided = True
            else:  # dist_le
                within = d is not None and d <= lit.k
                if within != lit.positive:
                    return f"forced structure contradicts {lit.text()}", False
        for p, q, dd in self.facts:
            dpq = distances_from(graph, vat[f"v{p}"])[vat[f"v{q}"]]
            dpq = dpq if dpq >= 0 else None
            if dd is not None and dd <= K_MAX:
                if dpq != dd:
                    return f"type distance {dd} between v{p},v{q} broken", False
            elif dpq is not None and dpq <= K_MAX:
                return f"type says v{p},v{q} far; forced dist {dpq}", False
        return None, undecided

    # -- driver ---------------------------------------------------------------------

    def run(self):
        """(consistent witnesses, refuted cases, pruned profiles, undecided?)."""
        cases: list[CaseRecord] = []
        pruned: list[PrunedRecord] = []
        witnesses: list[ConsistentWitness] = []
        undecided_any = False
        for branch in self.branches:
            texts = {l.text() for l in branch}
            clash = next(
                (t for t in sorted(texts) if t.startswith("!") and t[1:] in texts),
                None,
            )
            if clash is not None:
                pruned.append(
                    PrunedRecord("whole branch", f"propositional clash on {clash[1:]}")
                )
                continue
            for desc, x_t, assign, chains in self.enumerate_profiles(branch):
                if assign is None:
                    pruned.append(PrunedRecord(desc, "equality atoms clash"))
                    continue
                graph, roles, loop = self.build_case(branch, x_t, assign, chains)
                if loop is not None:
                    pruned.append(PrunedRecord(desc, loop))
                    continue
                reason, und = self.evaluate_case(branch, graph, roles, x_t)
                if reason is not None:
                    pruned.append(PrunedRecord(desc, reason))
                    continue
                if und:
                    undecided_any = True
                    continue
                check = self.cls.in_class(graph)
                if check.ok:
                    xv = roles.index("x") if x_t is None else roles.index(f"v{x_t}")
                    witnesses.append(ConsistentWitness(
                        target_text=self.target_text,
                        graph=graph,
                        roles=roles,
                        description=desc,
                        x_vertex=xv,
                    ))
                    continue
                viol = check.violation
                if isinstance(viol, ForbiddenViolation):
                    cases.append(CaseRecord(
                        description=desc,
                        graph=graph,
                        roles=roles,
                        kind="pattern",
                        pattern_name=viol.pattern_name,
                        embedding=tuple(sorted(viol.embedding.items())),
                    ))
                else:
                    assert isinstance(viol, DeltaViolation)
                    cases.append(CaseRecord(
                        description=desc,
                        graph=graph,
                        roles=roles,
                        kind="delta",
                        delta_set=tuple(sorted(viol.vertices)),
                        delta_text=viol.describe(),
                    ))
        return witnesses, cases, pruned, undecided_any


def _token_text(tok) -> str:
    if tok[0] == "fresh":
        return f"fresh{tok[1]}"
    if tok[0] == "p":
        return f"v{tok[1]}"
    return "x"


def certify_inconsistent(
    cls: ClassSpec, host: FinGraph, insts: Iterable[FormulaInstance] | FormulaInstance
):
    """Decide a conjunction of instances over the host's parameter types.

    Returns a ConsistentWitness or a replayable InconsistencyCertificate.
    """
    if isinstance(insts, FormulaInstance):
        insts = [insts]
    insts = list(insts)
    if not insts:
        raise InvalidInput("empty conjunction")
    inst = insts[0] if len(insts) == 1 else conj(*insts)
    analysis = CaseAnalysis(cls, host, inst)
    witnesses, cases, pruned, undecided = analysis.run()
    if witnesses:
        return witnesses[0]
    if undecided:
        raise UnsupportedFormula(
            "analysis cannot decide this conjunction "
            "(negative exact-distance literal at the boundary)"
        )
    return InconsistencyCertificate(
        target_text=analysis.target_text,
        cases=tuple(cases),
        pruned=tuple(pruned),
    )


def replay_certificate(cls: ClassSpec, cert: InconsistencyCertificate) -> bool:
    """Mechanically re-check every case of a certificate."""
    from .predimension import delta

    patterns = dict(cls.forbidden)
    for c in cert.cases:
        if c.kind == "pattern":
            pat = patterns[c.pattern_name]
            emb = dict(c.embedding)
            for u, v in pat.edges:
                if not c.graph.has_edge(emb[u], emb[v]):
                    return False
            if find_embedding(pat, c.graph) is None:
                return False
        else:
            sub = frozenset(c.delta_set)
            if delta(cls.pre, c.graph, sub) >= cls.f(len(sub)):
                return False
    return True
