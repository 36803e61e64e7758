"""Density structures, reducing squares and boundedness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .fincat import FiniteCategory, Square, factors_through, initial_objects, is_isomorphism
from .topology import CdStructure, Verdict, square_morphisms


class DensityStructure:
    """Levels ``D_n(X)`` given explicitly for ``n < stabilization``; from
    ``stabilization`` on every level is exactly the isomorphisms onto ``X``."""

    def __init__(self, cat: FiniteCategory, levels: Mapping[tuple[str, int], frozenset],
                 stabilization: int, name: str = ""):
        self.cat = cat
        self.name = name
        self.stabilization = stabilization
        self.levels = {k: frozenset(v) for k, v in levels.items() if k[1] < stabilization}

    def level(self, x: str, n: int) -> frozenset:
        if n >= self.stabilization:
            return frozenset(f for f in self.cat.morphisms_into(x) if is_isomorphism(self.cat, f))
        return self.levels.get((x, n), frozenset())

    def __repr__(self) -> str:
        return f"<DensityStructure {self.name!r} stabilizes at {self.stabilization}>"


def isomorphism_density(cat: FiniteCategory, bottom_all: bool = True) -> DensityStructure:
    """``D_0`` = every morphism (or just isos), ``D_n`` = isomorphisms for ``n ≥ 1``."""
    levels = {}
    for x in cat.objects:
        if bottom_all:
            levels[(x, 0)] = frozenset(cat.morphisms_into(x))
    return DensityStructure(cat, levels, stabilization=1 if bottom_all else 0, name="iso")


def validate_density(D: DensityStructure) -> list[str]:
    """Every violated instance of the five density conditions."""
    cat = D.cat
    out = []
    inits = initial_objects(cat)
    for x in cat.objects:
        for n in range(D.stabilization + 1):
            lv = D.level(x, n)
            for f in lv:
                if cat.target(f) != x:
                    out.append(f"(1) {f} in D_{n}({x}) does not end at {x}")
            for f in cat.morphisms_into(x):
                if is_isomorphism(cat, f) and f not in lv:
                    out.append(f"(3) isomorphism {f} missing from D_{n}({x})")
            if n + 1 <= D.stabilization:
                extra = D.level(x, n + 1) - lv
                for f in sorted(extra):
                    out.append(f"(4) {f} in D_{n + 1}({x}) but not in D_{n}({x})")
            for jp in lv:
                v = cat.source(jp)
                for j in D.level(v, n):
                    if cat.compose(jp, j) not in lv:
                        out.append(f"(5) {jp}∘{j} missing from D_{n}({x})")
        for i in inits:
            h = cat.hom(i, x)
            if h and h[0] not in D.level(x, 0):
                out.append(f"(2) {h[0]} missing from D_0({x})")
    return out


def dimension(D: DensityStructure, x: str) -> int:
    """Least ``n`` with every element of ``D_{n+1}(x)`` an isomorphism."""
    for n in range(D.stabilization + 1):
        if all(is_isomorphism(D.cat, f) for f in D.level(x, n + 1)):
            return n
    return D.stabilization


def _minimal(cat: FiniteCategory, fams: frozenset) -> list[str]:
    """One representative of each minimal class of ``fams`` under factoring:
    every element has one of these factoring through it."""
    fams = sorted(fams)
    below = {f: {g for g in fams if factors_through(cat, g, f)} for f in fams}
    mins = [f for f in fams if all(f in below[g] for g in below[f])]
    reps = []
    for f in mins:
        if not any(f in below[r] and r in below[f] for r in reps):
            reps.append(f)
    return reps


@dataclass
class ReducingReport:
    ok: bool
    witnesses: list[dict] = field(default_factory=list)
    failure: Optional[dict] = None
    levels_checked: int = 0

    def __bool__(self) -> bool:
        return self.ok


def is_reducing_square(q: Square, D: DensityStructure, P: CdStructure) -> ReducingReport:
    """Search, for each ``i`` up to ``stabilization + 2`` and each minimal
    ``B_0 ∈ D_i(B)``, ``A_0 ∈ D_{i+1}(A)``, ``Y_0 ∈ D_{i+1}(Y)``, for a
    distinguished ``Q'`` over some ``X' ∈ D_{i+1}(X)`` mapping to ``q``."""
    cat = D.cat
    key = ("reducing", D, q)
    if key in P._cache:
        return P._cache[key]
    rep = ReducingReport(True)
    top = D.stabilization + 2
    for i in range(top + 1):
        for b0 in _minimal(cat, D.level(q.b, i)):
            for a0 in _minimal(cat, D.level(q.a, i + 1)):
                for y0 in _minimal(cat, D.level(q.y, i + 1)):
                    w = _reduce_once(cat, q, D, P, i, b0, a0, y0)
                    if w is None:
                        rep.ok = False
                        rep.failure = {"level": i, "B0": b0, "A0": a0, "Y0": y0}
                        rep.levels_checked = i
                        P._cache[key] = rep
                        return rep
                    rep.witnesses.append(w)
    rep.levels_checked = top
    P._cache[key] = rep
    return rep


def _reduce_once(cat, q, D, P, i, b0, a0, y0) -> Optional[dict]:
    for j in sorted(D.level(q.x, i + 1)):
        xp = cat.source(j)
        for q2 in P.orbit():
            if q2.x != xp:
                continue
            for fb, fa, fy, fx in square_morphisms(cat, q2, q):
                if fx != j:
                    continue
                if (factors_through(cat, fb, b0) and factors_through(cat, fa, a0)
                        and factors_through(cat, fy, y0)):
                    return {"level": i, "B0": b0, "A0": a0, "Y0": y0, "X'": j,
                            "square": q2.label(), "map": [fb, fa, fy, fx]}
    return None


def reducing_squares(P: CdStructure, D: DensityStructure) -> CdStructure:
    return CdStructure(P.cat, [q for q in P.squares if is_reducing_square(q, D, P)], name=f"red({P.name})")


def is_bounded(P: CdStructure, D: DensityStructure) -> Verdict:
    """``D`` is a reducing density structure for ``P`` (every square has a
    reducing refinement) and every dimension is finite."""
    bad = validate_density(D)
    if bad:
        return Verdict(False, f"invalid density structure: {bad[0]}", details={"violations": bad})
    cat = P.cat
    refinements = {}
    for q in P.squares:
        found = None
        for q2 in [q] + [s for s in P.orbit() if s.x == q.x and s != q]:
            maps = [m for m in square_morphisms(cat, q2, q) if m[3] == cat.identity(q.x)]
            if maps and is_reducing_square(q2, D, P):
                found = q2
                break
        if found is None:
            return Verdict(False, f"{q.label()} has no reducing refinement", q)
        refinements[q.label()] = found.label()
    dims = {x: dimension(D, x) for x in cat.objects}
    return Verdict(True, "every distinguished square has a reducing refinement",
                   details={"refinements": refinements, "dimensions": dims})
