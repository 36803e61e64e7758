"""Command-line checks on site files.

Every command produces a :class:`Report`.  The text rendering and the JSON
document carry the same content; JSON output uses sorted keys, so equal
reports are byte-identical.  The exit status is 0 when the report has no
failed check and no error, 1 when a check failed and 2 on an error
(including a command that does not apply to the document).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__
from .abelian import AbGroup
from .chunky import (chunky_verdict, compare_with_sheafification, coprojections_are_monic, p_add,
                     radditivize)
from .cohomology import Inapplicable, cohdim_vanishing_check, cohomology, mv_long_exact_check
from .density import dimension, is_bounded, isomorphism_density, validate_density
from .fincat import CategoryError, Square, initial_object, is_coproduct_cocone, is_isomorphism, validate_category
from .presheaves import SetPresheaf
from .sheaves import (ab_sheafify, cd_sheaf_criterion, is_ab_sheaf, is_sheaf, sheafify,
                      verify_mv_short_exact)
from .simplicial import (build_KQ, cech_nerve, check_homotopy, check_simplicial_identities,
                         kq_homotopy_inverse, section_homotopy_witness, wp_pi0_check)
from .siteformat import SiteDocument, SiteParseError, parse
from .topology import (Sieve, Topology, Verdict, cd_topology, check_topology_axioms, complete_criterion,
                       is_complete, is_regular, regular_criterion_derived_square, simple_coverings)

SCHEMA_VERSION = "1"


@dataclass
class Check:
    name: str
    anchor: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "ok": self.ok, "detail": self.detail}


@dataclass
class Report:
    command: str
    site: str
    checks: list[Check] = field(default_factory=list)
    summary: list[str] = field(default_factory=list)
    result: dict = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def status(self) -> str:
        if self.error is not None:
            return "inapplicable" if self.error.startswith("inapplicable:") else "error"
        return "failed" if any(not c.ok for c in self.checks) else "ok"

    @property
    def exit_code(self) -> int:
        return {"ok": 0, "failed": 1}.get(self.status, 2)

    def check(self, name: str, anchor: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, anchor, bool(ok), detail))
        return bool(ok)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "site": self.site,
            "status": self.status,
            "summary": list(self.summary),
            "checks": [c.to_json() for c in self.checks],
            "result": plain(self.result),
            "error": self.error,
        }

    def render_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def render_text(self) -> str:
        out = [f"site: {self.site}", f"command: {self.command}"]
        out += self.summary
        if self.checks:
            out.append("checks:")
            for c in self.checks:
                line = f"  [{'ok' if c.ok else 'FAILED'}] {c.name} ({c.anchor})"
                if c.detail:
                    line += f": {c.detail}"
                out.append(line)
        if self.error is not None:
            out.append(self.error if self.status == "inapplicable" else f"error: {self.error}")
        out.append(f"status: {self.status}")
        return "\n".join(out) + "\n"


def plain(x: Any) -> Any:
    """A JSON-ready copy with deterministic ordering."""
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (set, frozenset)):
        return sorted((plain(v) for v in x), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, Square):
        return x.label()
    if isinstance(x, Sieve):
        return x.sorted_members()
    if isinstance(x, AbGroup):
        return str(x)
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    return str(x)


# -- preconditions -------------------------------------------------------------

def _need_cd(doc: SiteDocument):
    if doc.cd is None:
        raise Inapplicable("the document has no cd block")
    if initial_object(doc.cat) is None:
        raise Inapplicable("the category has no initial object")
    return doc.cd


def _need_density(doc: SiteDocument):
    if doc.density is None:
        raise Inapplicable("the document has no density block")
    return doc.density


def _square(doc: SiteDocument, name: str) -> Square:
    sq = doc.squares()
    if name not in sq:
        raise Inapplicable(f"no distinguished square named {name!r}")
    return sq[name]


def _presheaf(doc: SiteDocument, name: str):
    if name in doc.presheaves:
        return doc.presheaves[name]
    if name in doc.abelian:
        return doc.abelian[name]
    raise Inapplicable(f"no presheaf named {name!r}")


def _needs_valid(F) -> None:
    bad = F.validate()
    if bad:
        raise Inapplicable(f"{F.name} is not a presheaf: {bad[0]}")


def _sieve_text(s: Sieve) -> str:
    return "{" + ", ".join(s.sorted_members()) + "}"


# -- commands ------------------------------------------------------------------

def cmd_validate(doc: SiteDocument, rep: Report, opts) -> None:
    cat = doc.cat
    bad = validate_category(cat)
    rep.check("category", "category axioms", not bad, bad[0] if bad else f"{len(cat.objects)} objects, {len(cat.morphisms)} morphisms")
    if doc.cd is not None:
        probs = [p for q in doc.cd.squares for p in q.check(cat)]
        rep.check("cd squares", "commutative squares of a cd-structure", not probs,
                  probs[0] if probs else f"{len(doc.cd.squares)} squares")
    if doc.density is not None:
        bad = validate_density(doc.density)
        rep.check("density", "density structure axioms", not bad, bad[0] if bad else "")
    for name, F in sorted({**doc.presheaves, **doc.abelian}.items()):
        bad = F.validate()
        rep.check(f"presheaf {name}", "presheaf functoriality", not bad, bad[0] if bad else "")
    if doc.chunky is not None:
        bad = [f"{x} {y}" for (x, y), legs in sorted(doc.chunky.items()) if not is_coproduct_cocone(cat, legs)]
        rep.check("designated sums", "designated sums are coproducts", not bad,
                  f"not a coproduct: {bad[0]}" if bad else f"{len(doc.chunky)} sums")
    rep.result = {"objects": len(cat.objects), "morphisms": len(cat.morphisms),
                  "squares": len(doc.cd.squares) if doc.cd else 0,
                  "presheaves": sorted(doc.presheaves), "abelian": sorted(doc.abelian)}
    rep.summary.append(f"valid: {str(rep.status == 'ok').lower()}")


def cmd_topology(doc: SiteDocument, rep: Report, opts) -> None:
    top = cd_topology(_need_cd(doc))
    bad = check_topology_axioms(top)
    sieves = {x: [s.sorted_members() for s in top.sieves(x)] for x in doc.cat.objects}
    rep.summary.append(f"covering sieves: {top.count()}")
    for x in doc.cat.objects:
        for s in top.sieves(x):
            rep.summary.append(f"  {x}: {_sieve_text(s)}")
    rep.check("topology axioms", "Grothendieck topology generated by a cd-structure", not bad,
              bad[0] if bad else f"{top.count()} covering sieves")
    rep.result = {"count": top.count(), "sieves": sieves}


def cmd_simple_coverings(doc: SiteDocument, rep: Report, opts) -> None:
    fams = simple_coverings(_need_cd(doc))
    out = {x: sorted(f.sorted_legs() for f in fams.get(x, ())) for x in doc.cat.objects}
    total = sum(len(v) for v in out.values())
    rep.summary.append(f"simple coverings: {total}")
    for x in doc.cat.objects:
        for legs in out[x]:
            rep.summary.append(f"  {x}: {{{', '.join(legs)}}}")
    rep.result = {"count": total, "families": out}


def cmd_check(doc: SiteDocument, rep: Report, opts, what: str) -> None:
    if what not in ("complete", "regular", "bounded"):
        raise ValueError(f"check expects complete, regular or bounded, not {what!r}")
    P = _need_cd(doc)
    if what == "complete":
        v, c = is_complete(P), complete_criterion(P)
        rep.summary += [f"complete: {str(v.ok).lower()}", f"certificate: {v.reason}",
                        f"criterion: {str(c.ok).lower()} ({c.reason})"]
        rep.check("complete", "completeness of a cd-structure", v.ok, v.reason)
        rep.check("criterion agrees", "completeness criterion via pulled-back square sieves",
                  v.ok == c.ok, f"criterion {str(c.ok).lower()}: {c.reason}")
        rep.result = {"complete": v.ok, "reason": v.reason, "witness": v.witness,
                      "criterion": c.ok, "criterion_reason": c.reason}
    elif what == "regular":
        v, c = is_regular(P), regular_criterion_derived_square(P)
        rep.summary += [f"regular: {str(v.ok).lower()}", f"certificate: {v.reason}",
                        f"derived-square criterion: {str(c.ok).lower()} ({c.reason})"]
        rep.check("regular", "regularity of a cd-structure", v.ok, v.reason)
        rep.check("criterion implies regular", "derived-square criterion for regularity",
                  v.ok or not c.ok, c.reason)
        rep.result = {"regular": v.ok, "reason": v.reason, "witness": v.witness,
                      "criterion": c.ok, "criterion_reason": c.reason}
    else:
        D = _need_density(doc)
        v = is_bounded(P, D)
        dims = {x: dimension(D, x) for x in doc.cat.objects}
        rep.summary += [f"bounded: {str(v.ok).lower()}", f"certificate: {v.reason}"]
        rep.summary += [f"  dim({x}) = {d}" for x, d in dims.items()]
        rep.check("bounded", "bounded cd-structure with a reducing density structure", v.ok, v.reason)
        rep.result = {"bounded": v.ok, "reason": v.reason, "dimensions": dims,
                      "refinements": v.details.get("refinements", {})}


def cmd_sheaf_check(doc: SiteDocument, rep: Report, opts, name: str) -> None:
    P = _need_cd(doc)
    F = _presheaf(doc, name)
    _needs_valid(F)
    top = cd_topology(P)
    if isinstance(F, SetPresheaf):
        v, c = is_sheaf(F, top), cd_sheaf_criterion(F, P)
        comp, reg = is_complete(P), is_regular(P)
        rep.summary += [f"sheaf: {str(v.ok).lower()}", f"certificate: {v.reason}",
                        f"cd criterion: {str(c.ok).lower()} ({c.reason})"]
        if comp and reg:
            rep.check("criterion agrees", "sheaf criterion for complete regular cd-structures",
                      v.ok == c.ok, f"criterion {str(c.ok).lower()}")
        elif comp:
            rep.check("sheaf implies criterion", "sheaves on a complete cd-structure send squares to pull-backs",
                      c.ok or not v.ok, f"criterion {str(c.ok).lower()}")
        rep.result = {"kind": "set", "sheaf": v.ok, "reason": v.reason, "criterion": c.ok,
                      "criterion_reason": c.reason, "sizes": F.sizes()}
    else:
        v = is_ab_sheaf(F, top)
        rep.summary += [f"sheaf: {str(v.ok).lower()}", f"certificate: {v.reason}"]
        rep.result = {"kind": "abelian", "sheaf": v.ok, "reason": v.reason,
                      "groups": {x: str(g) for x, g in F.at.items()}}


def cmd_sheafify(doc: SiteDocument, rep: Report, opts, name: str) -> None:
    P = _need_cd(doc)
    F = _presheaf(doc, name)
    _needs_valid(F)
    top = cd_topology(P)
    if isinstance(F, SetPresheaf):
        aF, unit = sheafify(F, top)
        rep.summary.append("a(F): " + ", ".join(f"{x} -> {n}" for x, n in aF.sizes().items()))
        rep.check("result is a sheaf", "sheafification by the plus construction", is_sheaf(aF, top).ok)
        rep.check("unit is natural", "sheafification by the plus construction", not unit.validate())
        rep.result = {"kind": "set", "sizes": F.sizes(), "sheafified_sizes": aF.sizes(),
                      "unit_iso": unit.is_iso()}
    else:
        a = ab_sheafify(F, top)
        groups = {x: str(g) for x, g in a.sheaf.at.items()}
        rep.summary.append("a(F): " + ", ".join(f"{x} -> {g}" for x, g in groups.items()))
        rep.check("result is a sheaf", "sheafification by the plus construction", is_ab_sheaf(a.sheaf, top).ok)
        rep.result = {"kind": "abelian", "groups": {x: str(g) for x, g in F.at.items()},
                      "sheafified_groups": groups}


def cmd_mv(doc: SiteDocument, rep: Report, opts, sq: str, name: str) -> None:
    P = _need_cd(doc)
    q = _square(doc, sq)
    F = _presheaf(doc, name)
    if isinstance(F, SetPresheaf):
        raise Inapplicable(f"{name} is not an abelian presheaf")
    _needs_valid(F)
    if not is_ab_sheaf(F, cd_topology(P)):
        raise Inapplicable(f"{name} is not a sheaf")
    if not is_regular(P):
        raise Inapplicable("the cd-structure is not regular")
    s = verify_mv_short_exact(q, P)
    top = opts.max_degree
    lv = mv_long_exact_check(q, F, P, top=top)
    rep.summary += [f"short exact: {str(s.ok).lower()}", f"long exact in degrees 0..{top}: {str(lv.ok).lower()}"]
    rep.check("short exact", "Mayer–Vietoris short exact sequence of free sheaves", s.ok, s.reason)
    rep.check("long exact", "Mayer–Vietoris long exact sequence in cohomology", lv.ok, lv.reason)
    rep.result = {"square": q.label(), "sheaf": name, "top_degree": top,
                  "backend": lv.details.get("backend", ""), "groups": lv.details.get("groups", {})}


def cmd_cohomology(doc: SiteDocument, rep: Report, opts, x: str, name: str, degree: str) -> None:
    P = _need_cd(doc)
    if x not in doc.cat.objects:
        raise Inapplicable(f"no object named {x!r}")
    try:
        n = int(degree)
    except ValueError:
        raise ValueError(f"degree must be an integer, not {degree!r}") from None
    if not 0 <= n <= opts.max_degree:
        raise ValueError(f"degree {n} is outside 0..{opts.max_degree} (see --max-degree)")
    F = _presheaf(doc, name)
    if isinstance(F, SetPresheaf):
        raise Inapplicable(f"{name} is not an abelian presheaf")
    _needs_valid(F)
    g, backend = cohomology(x, F, n, P)
    guarantee = "exact in all degrees" if backend == "poset" else "exact in degrees ≤ 1"
    rep.summary += [f"H^{n}({x}, {name}) = {g}", f"backend: {backend} ({guarantee})"]
    rep.result = {"object": x, "sheaf": name, "degree": n, "group": str(g),
                  "invariants": {"rank": g.invariants()[0], "torsion": list(g.invariants()[1])},
                  "backend": backend, "guarantee": guarantee}


def cmd_cohdim(doc: SiteDocument, rep: Report, opts) -> None:
    P = _need_cd(doc)
    D = _need_density(doc)
    top = cd_topology(P)
    sheaves, skipped = [], []
    for name, G in sorted(doc.abelian.items()):
        (sheaves if not G.validate() and is_ab_sheaf(G, top) else skipped).append(G)
    if not sheaves:
        raise Inapplicable("the document has no abelian sheaves")
    rows = {}
    for x in doc.cat.objects:
        d = dimension(D, x)
        extra = opts.max_degree - d
        if extra <= 0:
            rows[x] = {"dimension": d, "degrees": []}
            continue
        v = cohdim_vanishing_check(P, D, sheaves, x, extra=extra)
        degrees = list(range(d + 1, opts.max_degree + 1))
        rep.check(f"vanishing on {x}", "cohomological dimension bound", v.ok, v.reason)
        if v.ok:
            rep.summary += [f"H^{n}({x}, −) = 0 for all supplied sheaves" for n in degrees]
        rows[x] = {"dimension": d, "degrees": degrees, "backend": v.details.get("backend", ""),
                   "guarantee": v.details.get("guarantee", "")}
    rep.summary.append(f"sheaves: {len(sheaves)}" + (f" ({len(skipped)} non-sheaves skipped)" if skipped else ""))
    rep.result = {"objects": rows, "sheaves": [G.name for G in sheaves], "skipped": [G.name for G in skipped]}


def cmd_kq(doc: SiteDocument, rep: Report, opts, sq: str) -> None:
    P = _need_cd(doc)
    q = _square(doc, sq)
    cat = doc.cat
    K = build_KQ(q, cat, opts.truncation)
    bad = check_simplicial_identities(K.obj)
    rep.check("simplicial identities", "simplicial identities of K_Q", not bad, bad[0] if bad else "")
    bad = K.to_constant().check()
    rep.check("augmentation", "augmentation of K_Q over X", not bad, bad[0] if bad else "")
    v = wp_pi0_check(q, P)
    rep.check("sheafified pi0", "sheafified π0 of K_Q is ρ(X)", v.ok, v.reason)
    inverse = is_isomorphism(cat, q.e) and is_isomorphism(cat, q.b_to_y)
    if inverse:
        g, H = kq_homotopy_inverse(K)
        bad = g.check() + check_homotopy(H)
        rep.check("homotopy inverse", "K_Q is homotopy equivalent to X when e is invertible", not bad,
                  bad[0] if bad else "")
    levels = [list(lv) for lv in K.obj.levels]
    rep.summary.append(f"K_Q({q.label()}) truncated at {opts.truncation}")
    rep.summary += [f"  level {n}: {' + '.join(lv)}" for n, lv in enumerate(levels)]
    rep.result = {"square": q.label(), "truncation": opts.truncation, "levels": levels,
                  "homotopy_inverse": inverse}


def cmd_cech_nerve(doc: SiteDocument, rep: Report, opts, f: str) -> None:
    cat = doc.cat
    if f not in cat.morphisms:
        raise Inapplicable(f"no morphism named {f!r}")
    C = cech_nerve(cat, f, opts.truncation)
    bad = check_simplicial_identities(C.obj)
    rep.check("simplicial identities", "simplicial identities of the Čech nerve", not bad, bad[0] if bad else "")
    bad = C.augmentation().check()
    rep.check("augmentation", "augmentation of the Čech nerve", not bad, bad[0] if bad else "")
    y = cat.target(f)
    sections = [s for s in cat.hom(y, cat.source(f)) if cat.compose(f, s) == cat.identity(y)]
    for s in sections:
        sigma, H, _ = section_homotopy_witness(cat, f, s, opts.truncation)
        bad = sigma.check() + check_homotopy(H)
        rep.check(f"section {s}", "a section makes the Čech nerve homotopy equivalent to the base",
                  not bad, bad[0] if bad else "")
    levels = [lv[0] for lv in C.obj.levels]
    rep.summary.append(f"Čech nerve of {f}: " + ", ".join(levels))
    rep.summary.append(f"sections: {len(sections)}")
    rep.result = {"morphism": f, "truncation": opts.truncation, "levels": levels, "sections": sections}


def _chunky_witness(doc: SiteDocument):
    w, reason = chunky_verdict(doc.cat, doc.chunky)
    return w, reason


def cmd_chunky(doc: SiteDocument, rep: Report, opts) -> None:
    w, reason = _chunky_witness(doc)
    rep.summary.append(f"chunky: {str(w is not None).lower()}" + ("" if w else f" ({reason})"))
    rep.check("chunky", "chunky category", w is not None, reason)
    if w is None:
        rep.result = {"chunky": False, "reason": reason}
        return
    P = p_add(w)
    comp, reg = is_complete(P), is_regular(P)
    bnd = is_bounded(P, isomorphism_density(w.cat))
    mono = coprojections_are_monic(w)
    rep.check("p_add complete", "the additive cd-structure is complete", comp.ok, comp.reason)
    rep.check("p_add regular", "the additive cd-structure is regular", reg.ok, reg.reason)
    rep.check("p_add bounded", "the additive cd-structure is bounded", bnd.ok, bnd.reason)
    rep.check("coprojections monic", "coprojections of a chunky category are monic", mono.ok, mono.reason)
    rep.summary.append(f"sums: {len(w.sums)}, additive squares: {len(P.squares)}")
    rep.result = {"chunky": True, "reason": reason, "sizes": w.sizes, "sums": len(w.sums),
                  "squares": len(P.squares)}


def cmd_radditivize(doc: SiteDocument, rep: Report, opts, name: str) -> None:
    F = _presheaf(doc, name)
    if not isinstance(F, SetPresheaf):
        raise Inapplicable(f"{name} is not a set-valued presheaf")
    _needs_valid(F)
    w, reason = _chunky_witness(doc)
    if w is None:
        raise Inapplicable(f"the category is not chunky: {reason}")
    R, _ = radditivize(F, w)
    v = compare_with_sheafification(F, w)
    rep.summary.append("r(F): " + ", ".join(f"{x} -> {n}" for x, n in R.sizes().items()))
    rep.check("agrees with sheafification", "radditivization is sheafification for the additive topology",
              v.ok, v.reason)
    rep.result = {"sizes": F.sizes(), "radditive_sizes": R.sizes()}


COMMANDS: dict[str, tuple[Callable, int]] = {
    "validate": (cmd_validate, 0),
    "topology": (cmd_topology, 0),
    "simple-coverings": (cmd_simple_coverings, 0),
    "check": (cmd_check, 1),
    "sheaf-check": (cmd_sheaf_check, 1),
    "sheafify": (cmd_sheafify, 1),
    "mv": (cmd_mv, 2),
    "cohomology": (cmd_cohomology, 3),
    "cohdim": (cmd_cohdim, 0),
    "kq": (cmd_kq, 1),
    "cech-nerve": (cmd_cech_nerve, 1),
    "chunky": (cmd_chunky, 0),
    "radditivize": (cmd_radditivize, 1),
    "suite": (None, 0),
}


@dataclass
class Options:
    truncation: int = 3
    max_degree: int = 3


def run(doc: SiteDocument, command: Sequence[str], opts: Optional[Options] = None) -> Report:
    """Run one command (``["check", "complete"]``, ``["kq", "main"]``, …)."""
    opts = opts or Options()
    if not command:
        return Report("", doc.name, error="no command given")
    name, args = command[0], list(command[1:])
    rep = Report(" ".join(command), doc.name)
    if name not in COMMANDS:
        rep.error = f"unknown command {name!r}"
        return rep
    fn, nargs = COMMANDS[name]
    if len(args) != nargs:
        rep.error = f"{name} takes {nargs} argument{'s' if nargs != 1 else ''}, got {len(args)}"
        return rep
    if name == "suite":
        return run_suite(doc, opts)
    try:
        fn(doc, rep, opts, *args)
    except Inapplicable as exc:
        rep.error = f"inapplicable: {exc}"
    except (CategoryError, ValueError) as exc:
        rep.error = str(exc)
    return rep


def suite_commands(doc: SiteDocument) -> list[list[str]]:
    """Every command that applies to ``doc``, as argument lists."""
    cmds = [["validate"]]
    if doc.cd is not None and initial_object(doc.cat) is not None:
        cmds += [["topology"], ["simple-coverings"], ["check", "complete"], ["check", "regular"]]
        if doc.density is not None:
            cmds.append(["check", "bounded"])
            if doc.abelian:
                cmds.append(["cohdim"])
        for name in sorted({**doc.presheaves, **doc.abelian}):
            cmds.append(["sheaf-check", name])
        for q in doc.cd.squares:
            cmds.append(["kq", q.name])
            for name in sorted(doc.abelian):
                cmds.append(["mv", q.name, name])
    for f in doc.cat.morphisms:
        if not doc.cat.is_identity(f):
            cmds.append(["cech-nerve", f])
    if doc.chunky is not None:
        cmds.append(["chunky"])
        for name in sorted(doc.presheaves):
            cmds.append(["radditivize", name])
    return cmds


def run_suite(doc: SiteDocument, opts: Options) -> Report:
    rep = Report("suite", doc.name)
    subs = []
    for cmd in suite_commands(doc):
        sub = run(doc, cmd, opts)
        subs.append(sub)
        for c in sub.checks:
            rep.checks.append(Check(f"{sub.command}: {c.name}", c.anchor, c.ok, c.detail))
        if sub.status == "error":
            rep.checks.append(Check(f"{sub.command}: runs", "command execution", False, sub.error or ""))
    rep.checks.sort(key=lambda c: c.name)
    subs.sort(key=lambda r: r.command)
    counts = {s: sum(r.status == s for r in subs) for s in ("ok", "failed", "error", "inapplicable")}
    rep.summary.append(f"commands: {len(subs)} ({', '.join(f'{k} {v}' for k, v in counts.items())})")
    rep.summary += [f"  {r.command}: {r.status}" for r in subs]
    rep.result = {"reports": [dict(r.to_json(), site=None) for r in subs], "counts": counts}
    return rep


# -- entry point ---------------------------------------------------------------

def bundled_sites() -> list[str]:
    data = resources.files("cdsite") / "data"
    return sorted(p.name[:-5] for p in data.iterdir() if p.name.endswith(".site"))


def read_site(path: str) -> tuple[str, str]:
    """Text of a site file; a bare name like ``toy`` means the bundled fixture."""
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8"), p.stem
    if path in bundled_sites():
        return (resources.files("cdsite") / "data" / f"{path}.site").read_text(encoding="utf-8"), path
    raise FileNotFoundError(f"no such site file: {path}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cdsite", description="Checks on cd-structures over finite categories.")
    ap.add_argument("site", help="site file, or the name of a bundled fixture (" + ", ".join(bundled_sites()) + ")")
    ap.add_argument("command", nargs=argparse.REMAINDER, help="command and its arguments")
    ap.add_argument("--truncation", type=int, default=3, help="simplicial truncation level (default 3)")
    ap.add_argument("--max-degree", type=int, default=3, help="highest cohomological degree (default 3)")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--version", action="version", version=f"cdsite {__version__}")
    return ap


def _split_flags(argv: Sequence[str]) -> list[str]:
    """Move option flags in front so they may follow the command."""
    flags, rest = [], []
    it = iter(argv)
    for a in it:
        if a in ("--truncation", "--max-degree", "--format"):
            flags += [a, next(it, "")]
        elif any(a.startswith(f + "=") for f in ("--truncation", "--max-degree", "--format")):
            flags.append(a)
        else:
            rest.append(a)
    return flags + rest


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_split_flags(argv))
    opts = Options(truncation=args.truncation, max_degree=args.max_degree)
    command = " ".join(args.command)
    if opts.truncation < 1 or opts.max_degree < 0:
        rep = Report(command, args.site, error="--truncation must be at least 1 and --max-degree at least 0")
        sys.stdout.write(rep.render_json() if args.format == "json" else rep.render_text())
        return rep.exit_code
    try:
        text, stem = read_site(args.site)
        doc = parse(text)
        rep = run(doc, args.command, opts)
    except FileNotFoundError as exc:
        rep = Report(command, args.site, error=str(exc))
    except SiteParseError as exc:
        rep = Report(command, args.site, error=f"parse error: {exc}")
    sys.stdout.write(rep.render_json() if args.format == "json" else rep.render_text())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
