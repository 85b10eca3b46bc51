"""Build -> verify -> certify orchestration behind the CLI.

A run builds the approximation, verifies construction properties, runs the
independence-theorem probes, assembles the constraint system for the
configured fragment, compares forking against forced zeros, audits the
zero reports, and writes every artifact under content-derived names.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .amalgamation import (
    GenericApproximation,
    approximation_to_text,
    build_generic,
)
from .classes import ClassSpec, load_class
from .compare import audit_system, compare_fork_vs_zero
from .formulas import (
    FormulaInstance,
    Not,
    _canon_shape,
    conj,
    disj,
    instance_key,
    instance_text,
    parse_shape,
)
from .graphs import InvalidInput, distance
from .independence import STANDARD, STRONG, canonical_quadruple, test_independence_theorem
from .inconsistency import replay_certificate
from .measures import build_constraint_system, replay_zero_certificate
from .report import Report, content_name
from .verify import verify_construction_properties

EXIT_OK = 0
EXIT_PROPERTY_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_RESOURCE = 3


@dataclass
class RunConfig:
    class_path: Path
    budget: int
    seed: int = 0
    outdir: Path = Path("out")
    pair_kind: str = "adjacent"   # adjacent | dist2
    pair_letters: tuple[str, str] = ("a", "b")
    formulas: list[str] = field(default_factory=list)
    headline: str | None = None

    def validate(self):
        if self.budget < 1:
            raise InvalidInput("budget must be at least 1")
        if not self.class_path.exists():
            raise InvalidInput(f"class file {self.class_path} does not exist")
        if self.pair_kind not in ("adjacent", "dist2"):
            raise InvalidInput(f"unknown pair selector {self.pair_kind!r}")
        for f in self.formulas:
            parse_shape(f)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    base = path.parent
    kw: dict = {"formulas": []}
    for ln, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "class":
            kw["class_path"] = base / rest
        elif key == "budget":
            kw["budget"] = int(rest)
        elif key == "seed":
            kw["seed"] = int(rest)
        elif key == "outdir":
            kw["outdir"] = base / rest
        elif key == "pair":
            parts = rest.split()
            if len(parts) != 3:
                raise InvalidInput(f"line {ln}: pair needs kind and two letters")
            kw["pair_kind"] = parts[0]
            kw["pair_letters"] = (parts[1], parts[2])
        elif key == "formula":
            kw["formulas"].append(rest)
        elif key == "headline":
            kw["headline"] = rest
        else:
            raise InvalidInput(f"line {ln}: unknown config key {key!r}")
    missing = {"class_path", "budget"} - set(kw)
    if missing:
        raise InvalidInput(f"config missing keys: {sorted(missing)}")
    cfg = RunConfig(**kw)
    cfg.validate()
    return cfg


def select_pair(g, kind: str) -> tuple[int, int]:
    if kind == "adjacent":
        edges = g.sorted_edges()
        if not edges:
            raise InvalidInput("approximation has no adjacent pair")
        return edges[0]
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if distance(g, u, v) == 2:
                return (u, v)
    raise InvalidInput("approximation has no distance-2 pair")


def expand_fragment(
    cfg_formulas: list[str], va: int, vb: int
) -> tuple[list[FormulaInstance], list[FormulaInstance]]:
    """(full fragment, table rows) for the bound parameter pair.

    Unary templates are instantiated at both parameters; all cross
    conjunctions join an a-instance with a b-instance; syntactic
    complement pairs additionally get their same-parameter meet and join
    so additivity can see them.
    """
    unary: list = []
    rows: list[FormulaInstance] = []
    fragment: list[FormulaInstance] = []
    seen = set()

    def push(inst: FormulaInstance):
        txt = instance_text(inst)
        if txt not in seen:
            seen.add(txt)
            fragment.append(inst)

    for text in cfg_formulas:
        shape, names = parse_shape(text)
        if len(names) > 1:
            raise InvalidInput(
                f"fragment templates take at most one parameter: {text!r}"
            )
        if len(names) == 0:
            inst = FormulaInstance(shape, ())
            push(inst)
            rows.append(inst)
        else:
            ia = FormulaInstance(shape, (va,))
            push(ia)
            push(FormulaInstance(shape, (vb,)))
            rows.append(ia)
            unary.append(shape)
    for i, si in enumerate(unary):
        for j in range(i, len(unary)):
            sj = unary[j]
            push(conj(FormulaInstance(si, (va,)), FormulaInstance(sj, (vb,))))
            if i != j:
                push(conj(FormulaInstance(sj, (va,)), FormulaInstance(si, (vb,))))
    for i, si in enumerate(unary):
        for sj in unary[i + 1:]:
            ci, cj = _canon_shape(si), _canon_shape(sj)
            if ci == _canon_shape(Not(sj)) or cj == _canon_shape(Not(si)):
                push(conj(FormulaInstance(si, (va,)), FormulaInstance(sj, (va,))))
                push(disj(FormulaInstance(si, (va,)), FormulaInstance(sj, (va,))))
    return fragment, rows


def run_pipeline(cfg: RunConfig, fmt: str = "text") -> tuple[Report, int]:
    cfg.validate()
    cls = load_class(cfg.class_path)
    report = Report()
    outdir = cfg.outdir
    outdir.mkdir(parents=True, exist_ok=True)
    failures: list[str] = []

    approx = build_generic(cls, cfg.budget, cfg.seed)
    g = approx.graph
    approx_text = approximation_to_text(approx)
    approx_name = content_name("approx", approx_text, ".g")
    (outdir / approx_name).write_text(approx_text)
    report.add("build", "class", cfg.class_path.name)
    report.add("build", "budget", cfg.budget)
    report.add("build", "seed", cfg.seed)
    report.add("build", "vertices", g.n)
    report.add("build", "edges", len(g.edges))
    report.add("build", "truncated", "yes" if approx.truncated else "no")
    report.add("build", "artifact", approx_name)

    props = verify_construction_properties(cls, approx)
    for c in props.clauses:
        report.add("properties", c.name, f"{c.status} ({c.witness})")
        if c.status != "PASS":
            failures.append(f"property {c.name} is {c.status}")
    for a in props.assumptions:
        report.add("properties", "assumption", a)

    _independence_section(cls, approx, report, outdir, failures)

    va, vb = select_pair(g, cfg.pair_kind)
    report.add("fragment", "pair", f"{cfg.pair_kind} ({va},{vb})")
    fragment, rows = expand_fragment(cfg.formulas, va, vb)
    report.add("fragment", "instances", len(fragment))

    system = build_constraint_system(approx, cls, fragment)
    sys_text = system.dump()
    sys_name = content_name("system", sys_text, ".txt")
    (outdir / sys_name).write_text(sys_text)
    report.add("system", "variables", len(system.variables))
    report.add("system", "constraints", len(system.linears) + len(system.products))
    report.add("system", "artifact", sys_name)
    if system.warning:
        report.add("system", "warning", system.warning)
    for key, cert in sorted(system.certificates.items()):
        ok = replay_certificate(cls, cert)
        nm = content_name(f"cert-inconsistent-{key.replace(':', '-')}",
                          cert.text(), ".txt")
        (outdir / nm).write_text(cert.text())
        report.add("system", f"certificate {key}", f"{nm} replay={'ok' if ok else 'FAIL'}")
        if not ok:
            failures.append(f"inconsistency certificate {key} does not replay")

    table = compare_fork_vs_zero(approx, cls, rows, system)
    for row in table:
        report.add("fork-vs-zero", row.instance, f"{row.forking} {row.zero}")
        report.add("fork-vs-zero", f"  {row.instance} forking",
                   row.fork_detail)
        report.add("fork-vs-zero", f"  {row.instance} zero", row.zero_detail)
        if row.certificate is not None:
            ok = replay_zero_certificate(system, row.certificate)
            nm = content_name("cert-zero", row.certificate.text(), ".txt")
            (outdir / nm).write_text(row.certificate.text())
            report.add("fork-vs-zero", f"  {row.instance} certificate",
                       f"{nm} replay={'ok' if ok else 'FAIL'}")
            if not ok:
                failures.append(f"zero certificate for {row.instance} fails replay")

    if cfg.headline:
        shape, names = parse_shape(cfg.headline)
        want = instance_text(FormulaInstance(shape, (va,) if names else ()))
        hit = next((r for r in table if r.instance == want), None)
        if hit is None:
            failures.append(f"headline instance {want} missing from the table")
            report.add("headline", want, "MISSING")
        else:
            ok = hit.forking == "NONFORKING" and hit.zero == "ZERO"
            report.add("headline", want, f"{hit.forking} {hit.zero}")
            if not ok:
                failures.append(
                    f"headline expected NONFORKING ZERO, got {hit.forking} {hit.zero}"
                )

    audits = audit_system(approx, cls, rows, system, table)
    for a in audits:
        report.add("audit", f"{a.kind} {a.instance}",
                   f"{'ok' if a.ok else 'FAIL'} ({a.detail})")
        if not a.ok:
            failures.append(f"audit {a.kind} failed for {a.instance}")

    verdict = "PASS" if not failures else "FAIL"
    report.add("verdict", "overall", verdict)
    for f in failures:
        report.add("verdict", "failure", f)

    (outdir / "report.txt").write_text(report.render("text"))
    if fmt == "records":
        (outdir / "report.records").write_text(report.render("records"))
    return report, EXIT_OK if verdict == "PASS" else EXIT_PROPERTY_FAILED


def _independence_section(cls, approx, report, outdir, failures):
    quad = canonical_quadruple(cls, approx, 1)
    if quad is None:
        report.add("independence", "strong", "SKIPPED (no adjacent quadruple)")
    else:
        a, b, c0, c1 = quad
        try:
            res = test_independence_theorem(cls, approx, STRONG, [a], [b], [c0], [c1])
            report.add("independence", "strong",
                       f"{res.verdict()} on ({a},{b},{c0},{c1}): {res.reason}")
            if res.certificate is not None:
                nm = content_name("cert-independence", res.certificate.text(), ".txt")
                (outdir / nm).write_text(res.certificate.text())
                report.add("independence", "strong certificate", nm)
        except InvalidInput as e:
            report.add("independence", "strong", f"PRECONDITION ({e})")
    quad2 = canonical_quadruple(cls, approx, 2)
    if quad2 is None:
        report.add("independence", "standard", "SKIPPED (no distance-2 quadruple)")
    else:
        a, b, c0, c1 = quad2
        try:
            res = test_independence_theorem(cls, approx, STANDARD, [a], [b], [c0], [c1])
            report.add("independence", "standard",
                       f"{res.verdict()} on ({a},{b},{c0},{c1}): {res.reason}")
        except InvalidInput as e:
            report.add("independence", "standard", f"PRECONDITION ({e})")
