"""Amalgamation class descriptions and membership checking.

A class is cut out by a predimension bound (delta(B) >= f(|B|) for every
subset B) together with an explicit list of forbidden connected patterns.
The shipped preset P0 forbids C3, C4, C5 and uses f(n) = 2 + ceil(n/2);
under P0 all k-cycles have delta = k, so the bound alone cannot separate
5-cycles from 6-cycles - the forbidden list does the girth work.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Iterable

from ._kernels import min_subset_slack
from .graphs import (
    FinGraph,
    InvalidInput,
    ResourceBudget,
    VertexSet,
    all_embeddings,
    cycle,
    find_embedding,
    from_text,
    mask_of,
    set_of,
)
from .predimension import PredimensionSpec

SUBADD_CHECK_RANGE = 512
FULL_SWEEP_CAP = 20


@dataclass(frozen=True)
class ForbiddenViolation:
    pattern_name: str
    pattern: FinGraph
    embedding: dict[int, int]

    def describe(self) -> str:
        img = " ".join(f"{u}->{v}" for u, v in sorted(self.embedding.items()))
        return f"forbidden {self.pattern_name} at {img}"


@dataclass(frozen=True)
class DeltaViolation:
    vertices: VertexSet
    delta_value: Fraction
    bound: Fraction

    def describe(self) -> str:
        vs = " ".join(str(v) for v in sorted(self.vertices))
        return f"delta {self.delta_value} < f {self.bound} on {{{vs}}}"


@dataclass(frozen=True)
class ClassCheck:
    ok: bool
    violation: ForbiddenViolation | DeltaViolation | None = None

    def __bool__(self):
        return self.ok


class ClassSpec:
    """Predimension weights + control function + forbidden patterns."""

    def __init__(
        self,
        pre: PredimensionSpec,
        f_table: Iterable[Fraction],
        f_slope: Fraction,
        f_offset: Fraction,
        forbidden: Iterable[tuple[str, FinGraph]],
    ):
        self.pre = pre
        self.f_table = tuple(Fraction(x) for x in f_table)
        self.f_slope = Fraction(f_slope)
        self.f_offset = Fraction(f_offset)
        self.forbidden = tuple(forbidden)
        if not self.f_table or self.f_table[0] != 0:
            raise InvalidInput("control function must start with f(0) = 0")
        for i in range(1, len(self.f_table)):
            if self.f_table[i] < self.f_table[i - 1]:
                raise InvalidInput("control function must be non-decreasing")
        if self.f_slope < 0:
            raise InvalidInput("control tail must be non-decreasing")
        k = len(self.f_table)
        if self.f_slope * k + self.f_offset < self.f_table[-1]:
            raise InvalidInput("control tail drops below the table")
        for name, pat in self.forbidden:
            if pat.n == 0 or len(pat.components()) != 1:
                raise InvalidInput(f"forbidden pattern {name} must be connected")
        self._subadditive = self._check_subadditive()

    def f(self, n: int) -> Fraction:
        if n < 0:
            raise InvalidInput("control function argument must be >= 0")
        if n < len(self.f_table):
            return self.f_table[n]
        return self.f_slope * n + self.f_offset

    def _check_subadditive(self) -> bool:
        _, _, fsc = self.scaled_for(SUBADD_CHECK_RANGE)
        for i in range(1, SUBADD_CHECK_RANGE):
            for j in range(i, SUBADD_CHECK_RANGE - i + 1):
                if fsc[i + j] > fsc[i] + fsc[j]:
                    return False
        return True

    @property
    def f_subadditive(self) -> bool:
        """Subadditivity makes minimal delta-violators connected."""
        return self._subadditive

    def scaled_for(self, n: int) -> tuple[int, int, list[int]]:
        """Integer weights (wv, we, fsc[0..n]) on a common denominator."""
        dens = [self.pre.c_v.denominator, self.pre.alpha.denominator]
        fvals = [self.f(k) for k in range(n + 1)]
        dens += [v.denominator for v in fvals]
        d = lcm(*dens)
        return (
            int(self.pre.c_v * d),
            int(self.pre.alpha * d),
            [int(v * d) for v in fvals],
        )

    # -- membership --------------------------------------------------------

    def in_class(
        self, g: FinGraph, new_vertices: Iterable[int] | None = None
    ) -> ClassCheck:
        """Full membership check, or an incremental one.

        With ``new_vertices`` the host minus those vertices is assumed to be
        a verified member: forbidden embeddings and delta violators must
        then touch a new vertex (free amalgamation adds no edges inside the
        old part, and minimal violators of a subadditive f are connected).
        """
        new = None if new_vertices is None else g.check_subset(new_vertices)
        hit = self._find_forbidden(g, new)
        if hit is not None:
            return ClassCheck(False, hit)
        viol = self._find_delta_violation(g, new)
        if viol is not None:
            return ClassCheck(False, viol)
        return ClassCheck(True)

    def _find_forbidden(self, g, new):
        for name, pat in self.forbidden:
            if new is None:
                emb = find_embedding(pat, g)
                if emb is not None:
                    return ForbiddenViolation(name, pat, emb)
            else:
                for v in sorted(new):
                    for p0 in range(pat.n):
                        emb = find_embedding(pat, g, partial={p0: v})
                        if emb is not None:
                            return ForbiddenViolation(name, pat, emb)
        return None

    def _find_delta_violation(self, g, new):
        if g.n == 0:
            return None
        if not self.f_subadditive and g.n > FULL_SWEEP_CAP:
            raise ResourceBudget(
                "full subset sweep needed (control function not subadditive) "
                f"but |V| = {g.n} > {FULL_SWEEP_CAP}"
            )
        wv, we, fsc = self.scaled_for(g.n)
        val, mask = min_subset_slack(
            g.n,
            g.adj,
            wv,
            we,
            fsc,
            must_hit=0 if new is None else mask_of(new),
            connected_only=self.f_subadditive,
            stop_at_negative=True,
        )
        if val < 0:
            B = set_of(mask)
            from .predimension import delta

            return DeltaViolation(frozenset(B), delta(self.pre, g, B), self.f(len(B)))
        return None

    def count_forbidden_hits(self, g: FinGraph) -> dict[str, int]:
        return {
            name: len(all_embeddings(pat, g, limit=0))
            for name, pat in self.forbidden
        }

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        lines = [
            f"cv {_fmt_frac(self.pre.c_v)}",
            f"alpha {_fmt_frac(self.pre.alpha)}",
            "f " + " ".join(_fmt_frac(v) for v in self.f_table),
            f"f_tail {_fmt_frac(self.f_slope)} {_fmt_frac(self.f_offset)}",
        ]
        for name, pat in self.forbidden:
            if name.startswith("C") and name[1:].isdigit() and pat == cycle(int(name[1:])):
                lines.append(f"forbid cycle {name[1:]}")
            else:
                lines.append(f"forbid file {name}")
        return "\n".join(lines) + "\n"


def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_frac(tok: str, where: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"{where}: bad rational {tok!r}") from None


def parse_class_text(text: str, base_dir: Path | None = None) -> ClassSpec:
    cv = alpha = None
    table = None
    slope = offset = None
    forbidden: list[tuple[str, FinGraph]] = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        where = f"line {ln}"
        if key == "cv" and len(parts) == 2:
            cv = _parse_frac(parts[1], where)
        elif key == "alpha" and len(parts) == 2:
            alpha = _parse_frac(parts[1], where)
        elif key == "f" and len(parts) >= 2:
            table = [_parse_frac(t, where) for t in parts[1:]]
        elif key == "f_tail" and len(parts) == 3:
            slope = _parse_frac(parts[1], where)
            offset = _parse_frac(parts[2], where)
        elif key == "forbid" and len(parts) == 3 and parts[1] == "cycle":
            k = int(parts[2])
            forbidden.append((f"C{k}", cycle(k)))
        elif key == "forbid" and len(parts) == 3 and parts[1] == "file":
            p = Path(parts[2])
            if base_dir is not None and not p.is_absolute():
                p = base_dir / p
            forbidden.append((p.stem, from_text(p.read_text())))
        else:
            raise InvalidInput(f"{where}: cannot parse {line!r}")
    if cv is None or alpha is None or table is None or slope is None:
        raise InvalidInput("class file needs cv, alpha, f and f_tail lines")
    return ClassSpec(
        PredimensionSpec(cv, alpha), table, slope, offset, forbidden
    )


def load_class(path: str | Path) -> ClassSpec:
    path = Path(path)
    return parse_class_text(path.read_text(), base_dir=path.parent)


def preset_p0(max_table: int = 64) -> ClassSpec:
    """Girth-6 preset: cv=2, alpha=1, f(n)=2+ceil(n/2), forbid C3,C4,C5."""
    table = [Fraction(0), Fraction(2)]
    table += [2 + Fraction(-(-n // 2)) for n in range(2, max_table + 1)]
    return ClassSpec(
        PredimensionSpec(Fraction(2), Fraction(1)),
        table,
        Fraction(1, 2),
        Fraction(2),
        [("C3", cycle(3)), ("C4", cycle(4)), ("C5", cycle(5))],
    )
