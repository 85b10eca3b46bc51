"""Product-rule sanity checks on the independent-edge random graph.

The measure with independent edge probability p is an invariant Keisler
measure on the random graph, so conjunctions of edge atoms over distinct
parameters must multiply exactly.  EXACT mode computes the closed form;
SAMPLE mode estimates with chunked deterministic draws (the merged
estimate depends only on the chunking, never on how chunks are assigned
to workers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .formulas import And, Atom, FormulaInstance, Not
from .graphs import InvalidInput

CHUNK = 10_000


def _edge_literals(inst: FormulaInstance) -> list[tuple[int, bool]]:
    """(parameter vertex, wanted) pairs; rejects anything but edge atoms."""
    out = []

    def walk(f, positive=True):
        if isinstance(f, Atom):
            if f.kind != "edge":
                raise InvalidInput(
                    "er-check formulas are conjunctions of edge atoms"
                )
            out.append((inst.params[f.slot], positive))
        elif isinstance(f, Not):
            walk(f.child, not positive)
        elif isinstance(f, And):
            for c in f.children:
                walk(c, positive)
        else:
            raise InvalidInput("er-check formulas cannot contain disjunction")

    walk(inst.shape)
    verts = [v for v, _ in out]
    if len(set(verts)) != len(verts):
        raise InvalidInput("er-check parameters must be distinct")
    return out


def _exact_measure(lits, p: Fraction) -> Fraction:
    m = Fraction(1)
    for _, positive in lits:
        m *= p if positive else 1 - p
    return m


@dataclass(frozen=True)
class ProductCheckReport:
    mode: str
    exact_phi: Fraction
    exact_psi: Fraction
    exact_joint: Fraction
    exact_product: Fraction
    deviation: float
    estimate_phi: float | None = None
    estimate_psi: float | None = None
    estimate_joint: float | None = None
    stderr: float | None = None
    band: float | None = None
    passed: bool = True

    def text(self) -> str:
        lines = [
            f"mode {self.mode}",
            f"exact joint={self.exact_joint} product={self.exact_product} "
            f"phi={self.exact_phi} psi={self.exact_psi}",
        ]
        if self.mode == "SAMPLE":
            lines.append(
                f"estimate joint={self.estimate_joint:.6f} "
                f"phi={self.estimate_phi:.6f} psi={self.estimate_psi:.6f}"
            )
            lines.append(f"stderr {self.stderr:.6f}")
        else:
            lines.append("estimate -")
            lines.append("stderr -")
        lines.append(f"deviation {self.deviation:.6g}")
        lines.append(f"pass {'yes' if self.passed else 'no'}")
        return "\n".join(lines) + "\n"


def er_product_check(
    p: Fraction,
    phi: FormulaInstance,
    psi: FormulaInstance,
    sample: int | None = None,
    seed: int = 0,
) -> ProductCheckReport:
    """Compare mu(phi & psi) with mu(phi)*mu(psi) under edge probability p.

    ``sample=None`` is EXACT mode; otherwise ``sample`` independent draws
    are split into fixed chunks seeded by (seed, chunk index).
    """
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise InvalidInput("edge probability must lie in [0,1]")
    lits_phi = _edge_literals(phi)
    lits_psi = _edge_literals(psi)
    if {v for v, _ in lits_phi} & {v for v, _ in lits_psi}:
        raise InvalidInput("er-check formulas must use distinct parameters")
    exact_phi = _exact_measure(lits_phi, p)
    exact_psi = _exact_measure(lits_psi, p)
    exact_joint = _exact_measure(lits_phi + lits_psi, p)
    exact_product = exact_phi * exact_psi

    if sample is None:
        dev = abs(exact_joint - exact_product)
        return ProductCheckReport(
            mode="EXACT",
            exact_phi=exact_phi,
            exact_psi=exact_psi,
            exact_joint=exact_joint,
            exact_product=exact_product,
            deviation=float(dev),
            passed=dev == 0,
        )

    if sample < 1:
        raise InvalidInput("sample size must be positive")
    lits = lits_phi + lits_psi
    n_phi = len(lits_phi)
    want = np.array([w for _, w in lits], dtype=bool)
    pf = float(p)
    count_phi = count_psi = count_joint = 0
    done = 0
    chunk_index = 0
    while done < sample:
        size = min(CHUNK, sample - done)
        rng = np.random.default_rng([seed, chunk_index])
        draws = rng.random((size, len(lits))) < pf
        hit = draws == want
        ok_phi = hit[:, :n_phi].all(axis=1)
        ok_psi = hit[:, n_phi:].all(axis=1)
        count_phi += int(ok_phi.sum())
        count_psi += int(ok_psi.sum())
        count_joint += int((ok_phi & ok_psi).sum())
        done += size
        chunk_index += 1
    est_phi = count_phi / sample
    est_psi = count_psi / sample
    est_joint = count_joint / sample
    q = float(exact_joint)
    stderr = math.sqrt(q * (1 - q) / sample)
    deviation = abs(est_joint - est_phi * est_psi)
    band = 3 * stderr
    return ProductCheckReport(
        mode="SAMPLE",
        exact_phi=exact_phi,
        exact_psi=exact_psi,
        exact_joint=exact_joint,
        exact_product=exact_product,
        deviation=deviation,
        estimate_phi=est_phi,
        estimate_psi=est_psi,
        estimate_joint=est_joint,
        stderr=stderr,
        band=band,
        passed=deviation <= band,
    )
