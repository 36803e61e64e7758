"""Reading and writing site-description files.

A site file is line oriented.  Blank lines and lines whose first non-blank
character is ``#`` are ignored.  Every other line is either a section header
``[kind]`` / ``[kind NAME]`` or an entry of the current section.  Tokens are
separated by whitespace; the punctuation tokens ``:`` ``->`` ``=`` ``*``
``,`` ``;`` ``+`` only have meaning at the positions shown below.

::

    document  ::= [ "site" NAME ] category { section }
    category  ::= "[category]" { cat-entry }
    cat-entry ::= "objects" NAME+
                | "morphism" NAME ":" NAME "->" NAME
                | "compose" NAME "=" NAME "*" NAME
    section   ::= "[cd]" { "square" NAME ":" NAME NAME NAME NAME "via" NAME NAME NAME NAME }
                | "[density]" { "stabilization" INT | "level" NAME INT ":" NAME* }
                | "[presheaf" NAME "]" { "at" NAME ":" NAME* | "restrict" NAME ":" pairs }
                | "[abelian" NAME "]" { "at" NAME ":" group | "restrict" NAME ":" rows }
                | "[chunky]" { "sum" NAME NAME ":" NAME NAME }
    pairs     ::= [ NAME "->" NAME { "," NAME "->" NAME } ]
    group     ::= "0" | summand { "+" summand }
    summand   ::= "Z" | "Z^" INT | "Z/" INT
    rows      ::= INT+ { ";" INT+ }

Identities are implicit: the identity of ``X`` is called ``id_X``.  The
composition table lists ``h = g * f`` (``h = g∘f``) for every composable
pair of non-identity morphisms.  A square line names the corners
``B A Y X`` and then the edges ``B -> A``, ``B -> Y``, ``A -> X``,
``Y -> X``.  In a presheaf block, ``restrict f`` for ``f: U -> V`` maps
elements of ``F(V)`` to elements of ``F(U)``; in an abelian block it is the
integer matrix with one row per generator of ``F(U)`` and one column per
generator of ``F(V)``, generators ordered free part first.  Restrictions
with an empty domain may be omitted.  ``sum X Y : i j`` designates
``i: X -> S``, ``j: Y -> S`` as the binary sum of ``X`` and ``Y``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .abelian import AbGroup, describe, eye, int_solve, mat, smith_normal_form
from .density import DensityStructure
from .fincat import FiniteCategory, Square
from .presheaves import AbPresheaf, SetPresheaf
from .topology import CdStructure

PUNCT = frozenset({":", "->", "=", "*", ",", ";", "+"})


class SiteParseError(ValueError):
    """A diagnostic for the first problem found, with 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}" if line else message)


@dataclass
class SiteDocument:
    name: str
    cat: FiniteCategory
    cd: Optional[CdStructure] = None
    density: Optional[DensityStructure] = None
    presheaves: dict[str, SetPresheaf] = field(default_factory=dict)
    abelian: dict[str, AbPresheaf] = field(default_factory=dict)
    chunky: Optional[dict[tuple[str, str], tuple[str, str]]] = None

    def squares(self) -> dict[str, Square]:
        return {q.name: q for q in self.cd.squares} if self.cd else {}

    def canonical(self) -> dict:
        """A plain-data view used to compare documents."""
        cat = self.cat
        out = {
            "name": self.name,
            "objects": list(cat.objects),
            "morphisms": {m: [cat.source(m), cat.target(m)] for m in cat.morphisms if not cat.is_identity(m)},
            "compose": {f"{g} * {f}": h for (g, f), h in sorted(cat.composition_entries().items())},
            "cd": None, "density": None, "chunky": None, "presheaves": {}, "abelian": {},
        }
        if self.cd is not None:
            out["cd"] = [[q.name, list(q.corners), [q.b_to_a, q.b_to_y, q.e, q.p]] for q in self.cd.squares]
        if self.density is not None:
            D = self.density
            out["density"] = {"stabilization": D.stabilization,
                              "levels": {f"{x} {n}": sorted(v) for (x, n), v in sorted(D.levels.items())}}
        for name, F in self.presheaves.items():
            out["presheaves"][name] = {
                "at": {x: list(F.at[x]) for x in cat.objects},
                "restrict": {f: {str(s): str(t) for s, t in F.maps[f].items()}
                             for f in cat.morphisms if not cat.is_identity(f)},
            }
        for name, G in self.abelian.items():
            out["abelian"][name] = {
                "at": {x: [G.at[x].ngens, [list(r) for r in G.at[x].relations]] for x in cat.objects},
                "restrict": {f: G.maps[f].tolist() for f in cat.morphisms if not cat.is_identity(f)},
            }
        if self.chunky is not None:
            out["chunky"] = {f"{x} {y}": list(v) for (x, y), v in sorted(self.chunky.items())}
        return out


# -- tokenizing ---------------------------------------------------------------

@dataclass(frozen=True)
class _Tok:
    text: str
    line: int
    col: int


def _tokens(raw: str, lineno: int) -> list[_Tok]:
    return [_Tok(m.group(), lineno, m.start() + 1) for m in re.finditer(r"\S+", raw)]


def _err(msg: str, tok: _Tok) -> SiteParseError:
    return SiteParseError(msg, tok.line, tok.col)


def _expect(toks: list[_Tok], i: int, text: str, after: _Tok) -> None:
    if i >= len(toks):
        raise SiteParseError(f"expected {text!r}", after.line, after.col + len(after.text))
    if toks[i].text != text:
        raise _err(f"expected {text!r}, found {toks[i].text!r}", toks[i])


def _name(toks: list[_Tok], i: int, what: str, after: _Tok) -> _Tok:
    if i >= len(toks):
        raise SiteParseError(f"expected {what}", after.line, after.col + len(after.text))
    t = toks[i]
    if t.text in PUNCT or t.text.startswith("["):
        raise _err(f"expected {what}, found {t.text!r}", t)
    return t


def _int(tok: _Tok, what: str) -> int:
    if not re.fullmatch(r"-?\d+", tok.text):
        raise _err(f"expected an integer {what}, found {tok.text!r}", tok)
    return int(tok.text)


def _end(toks: list[_Tok], i: int) -> None:
    if i < len(toks):
        raise _err(f"unexpected {toks[i].text!r}", toks[i])


# -- parsing ------------------------------------------------------------------

_SECTIONS = {"category", "cd", "density", "presheaf", "abelian", "chunky"}
_NAMED = {"presheaf", "abelian"}


def _sections(text: str):
    """Split into (header token, kind, name, entry lines) plus the site name."""
    site_name = None
    sections = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        toks = _tokens(raw, lineno)
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise _err("section header must end with ']'", toks[-1])
            inner = _tokens(raw.replace("[", " ", 1)[::-1].replace("]", " ", 1)[::-1], lineno)
            if not inner:
                raise _err("empty section header", toks[0])
            kind = inner[0].text
            if kind not in _SECTIONS:
                raise _err(f"unknown section {kind!r}", inner[0])
            if kind in _NAMED:
                if len(inner) != 2:
                    raise _err(f"section [{kind}] needs exactly one name", inner[0])
                sec_name = inner[1]
            else:
                if len(inner) != 1:
                    raise _err(f"section [{kind}] takes no name", inner[1])
                sec_name = None
            sections.append((toks[0], kind, sec_name, []))
            continue
        if not sections:
            if toks[0].text == "site":
                if site_name is not None:
                    raise _err("site name given twice", toks[0])
                site_name = _name(toks, 1, "a site name", toks[0]).text
                _end(toks, 2)
                continue
            raise _err(f"entry {toks[0].text!r} outside any section", toks[0])
        sections[-1][3].append(toks)
    return site_name, sections


def parse(text: str) -> SiteDocument:
    """Parse a site file, raising :class:`SiteParseError` on the first problem."""
    site_name, sections = _sections(text)
    if not sections or sections[0][1] != "category":
        if any(s[1] == "category" for s in sections):
            tok = next(s[0] for s in sections if s[1] == "category")
            raise _err("the category block must come first", tok)
        raise SiteParseError("missing category block", 1, 1)
    cat = _parse_category(sections[0][0], sections[0][3], site_name or "")
    doc = SiteDocument(site_name or "", cat)
    seen = {"category"}
    for head, kind, sec_name, lines in sections[1:]:
        if kind in _NAMED:
            key = (kind, sec_name.text)
            if sec_name.text in doc.presheaves or sec_name.text in doc.abelian:
                raise _err(f"presheaf {sec_name.text!r} defined twice", sec_name)
        else:
            key = kind
            if key in seen:
                raise _err(f"section [{kind}] given twice", head)
        seen.add(key)
        if kind == "category":
            raise _err("section [category] given twice", head)
        if kind == "cd":
            doc.cd = _parse_cd(cat, lines, doc.name)
        elif kind == "density":
            doc.density = _parse_density(cat, head, lines)
        elif kind == "presheaf":
            doc.presheaves[sec_name.text] = _parse_presheaf(cat, sec_name, lines)
        elif kind == "abelian":
            doc.abelian[sec_name.text] = _parse_abelian(cat, sec_name, lines)
        elif kind == "chunky":
            doc.chunky = _parse_chunky(cat, lines)
    return doc


def _parse_category(head: _Tok, lines, name: str) -> FiniteCategory:
    objects: dict[str, _Tok] = {}
    morphisms: dict[str, tuple[str, str]] = {}
    where: dict[str, _Tok] = {}
    pending = []
    table: dict[tuple[str, str], str] = {}
    for toks in lines:
        key = toks[0].text
        if key == "objects":
            if len(toks) == 1:
                raise SiteParseError("expected at least one object name", toks[0].line, toks[0].col + 7)
            for i in range(1, len(toks)):
                t = _name(toks, i, "an object name", toks[i - 1])
                if t.text in objects:
                    raise _err(f"object {t.text!r} declared twice", t)
                objects[t.text] = t
        elif key == "morphism":
            m = _name(toks, 1, "a morphism name", toks[0])
            _expect(toks, 2, ":", m)
            s = _name(toks, 3, "a source object", toks[2])
            _expect(toks, 4, "->", s)
            t = _name(toks, 5, "a target object", toks[4])
            _end(toks, 6)
            if m.text in morphisms:
                raise _err(f"morphism {m.text!r} declared twice", m)
            if m.text.startswith("id_"):
                raise _err(f"names beginning with 'id_' are reserved for identities: {m.text!r}", m)
            for end in (s, t):
                if end.text not in objects:
                    raise _err(f"unknown object {end.text!r}", end)
            morphisms[m.text] = (s.text, t.text)
            where[m.text] = m
        elif key == "compose":
            h = _name(toks, 1, "a morphism name", toks[0])
            _expect(toks, 2, "=", h)
            g = _name(toks, 3, "a morphism name", toks[2])
            _expect(toks, 4, "*", g)
            f = _name(toks, 5, "a morphism name", toks[4])
            _end(toks, 6)
            pending.append((h, g, f))
        else:
            raise _err(f"unknown category entry {key!r}", toks[0])
    identities = {x: f"id_{x}" for x in objects}
    ends = dict(morphisms)
    ends.update({i: (x, x) for x, i in identities.items()})
    for h, g, f in pending:
        for t in (h, g, f):
            if t.text not in ends:
                raise _err(f"unknown morphism {t.text!r}", t)
        if ends[f.text][1] != ends[g.text][0]:
            raise _err(f"{g.text} * {f.text} is not composable", g)
        if ends[h.text] != (ends[f.text][0], ends[g.text][1]):
            raise _err(f"{h.text} does not run {ends[f.text][0]} -> {ends[g.text][1]}", h)
        if g.text in identities.values() or f.text in identities.values():
            want = f.text if g.text in identities.values() else g.text
            if h.text != want:
                raise _err(f"identity law violated by {h.text} = {g.text} * {f.text}", h)
            continue
        if (g.text, f.text) in table:
            raise _err(f"composite {g.text} * {f.text} given twice", g)
        table[(g.text, f.text)] = h.text
    for f in sorted(morphisms):
        for g in sorted(morphisms):
            if morphisms[f][1] == morphisms[g][0] and (g, f) not in table:
                raise _err(f"composition is not total: no entry for {g} * {f}", head)
    return FiniteCategory(objects, morphisms, identities, table, name=name)


def _resolve_morphism(cat: FiniteCategory, tok: _Tok) -> str:
    if tok.text not in cat._src:
        raise _err(f"unknown morphism {tok.text!r}", tok)
    return tok.text


def _resolve_object(cat: FiniteCategory, tok: _Tok) -> str:
    if tok.text not in cat.objects:
        raise _err(f"unknown object {tok.text!r}", tok)
    return tok.text


def _parse_cd(cat: FiniteCategory, lines, name: str) -> CdStructure:
    squares = []
    names = set()
    for toks in lines:
        if toks[0].text != "square":
            raise _err(f"unknown cd entry {toks[0].text!r}", toks[0])
        n = _name(toks, 1, "a square name", toks[0])
        if n.text in names:
            raise _err(f"square {n.text!r} declared twice", n)
        _expect(toks, 2, ":", n)
        corners = [_resolve_object(cat, _name(toks, 3 + k, "a corner object", toks[2 + k])) for k in range(4)]
        _expect(toks, 7, "via", toks[6])
        edges = [_resolve_morphism(cat, _name(toks, 8 + k, "an edge morphism", toks[7 + k])) for k in range(4)]
        _end(toks, 12)
        q = Square(*corners, *edges, name=n.text)
        problems = q.check(cat)
        if problems:
            raise _err(f"malformed square {n.text!r}: {problems[0]}", n)
        names.add(n.text)
        squares.append(q)
    return CdStructure(cat, squares, name=name)


def _parse_density(cat: FiniteCategory, head: _Tok, lines) -> DensityStructure:
    stab = None
    levels: dict[tuple[str, int], set] = {}
    for toks in lines:
        key = toks[0].text
        if key == "stabilization":
            t = _name(toks, 1, "an integer", toks[0])
            stab = _int(t, "stabilization index")
            if stab < 0:
                raise _err("stabilization index must be non-negative", t)
            _end(toks, 2)
        elif key == "level":
            x = _resolve_object(cat, _name(toks, 1, "an object", toks[0]))
            nt = _name(toks, 2, "a level index", toks[1])
            n = _int(nt, "level index")
            _expect(toks, 3, ":", nt)
            if (x, n) in levels:
                raise _err(f"level {x} {n} given twice", toks[0])
            members = set()
            for t in toks[4:]:
                f = _resolve_morphism(cat, t)
                if cat.target(f) != x:
                    raise _err(f"{f} does not end at {x}", t)
                members.add(f)
            levels[(x, n)] = members
        else:
            raise _err(f"unknown density entry {key!r}", toks[0])
    if stab is None:
        raise _err("density block needs a stabilization index", head)
    for (x, n) in levels:
        if n >= stab:
            raise _err(f"level {x} {n} is at or past the stabilization index {stab}", head)
    return DensityStructure(cat, levels, stab)


def _parse_presheaf(cat: FiniteCategory, head: _Tok, lines) -> SetPresheaf:
    name = head.text
    at: dict[str, list[str]] = {}
    restrict: dict[str, tuple[_Tok, dict]] = {}
    for toks in lines:
        key = toks[0].text
        if key == "at":
            x = _resolve_object(cat, _name(toks, 1, "an object", toks[0]))
            _expect(toks, 2, ":", toks[1])
            if x in at:
                raise _err(f"F({x}) given twice", toks[1])
            elems = []
            for i in range(3, len(toks)):
                t = _name(toks, i, "an element", toks[i - 1])
                e = t.text
                if e in elems:
                    raise _err(f"element {e!r} repeated", t)
                elems.append(e)
            at[x] = elems
        elif key == "restrict":
            ft = _name(toks, 1, "a morphism", toks[0])
            f = _resolve_morphism(cat, ft)
            _expect(toks, 2, ":", ft)
            if f in restrict:
                raise _err(f"restriction along {f} given twice", ft)
            table = {}
            i = 3
            while i < len(toks):
                s = _name(toks, i, "an element", toks[i - 1])
                _expect(toks, i + 1, "->", s)
                t = _name(toks, i + 2, "an element", toks[i + 1])
                if s.text in table:
                    raise _err(f"element {s.text!r} mapped twice", s)
                table[s.text] = t
                i += 3
                if i < len(toks):
                    _expect(toks, i, ",", t)
                    i += 1
                    if i == len(toks):
                        raise _err("dangling ','", toks[i - 1])
            restrict[f] = (ft, table)
        else:
            raise _err(f"unknown presheaf entry {key!r}", toks[0])
    for x in cat.objects:
        at.setdefault(x, [])
    maps = {}
    for f in cat.morphisms:
        u, v = cat.source(f), cat.target(f)
        if f not in restrict:
            if cat.is_identity(f):
                continue
            if at[v]:
                raise _err(f"presheaf {name!r}: no restriction along {f}", head)
            maps[f] = {}
            continue
        ft, table = restrict[f]
        for s, t in table.items():
            if s not in at[v]:
                raise _err(f"unknown element {s!r} of F({v})", ft)
            if t.text not in at[u]:
                raise _err(f"unknown element {t.text!r} of F({u})", t)
        missing = [s for s in at[v] if s not in table]
        if missing:
            raise _err(f"restriction along {f} is not defined on {missing[0]!r}", ft)
        maps[f] = {s: t.text for s, t in table.items()}
    return SetPresheaf(cat, at, maps, name=name)


_SUMMAND = re.compile(r"Z(?:\^(\d+)|/(\d+))?")


def _parse_group(toks: list[_Tok]) -> AbGroup:
    if not toks:
        raise SiteParseError("expected a group", 0, 0)
    if len(toks) == 1 and toks[0].text == "0":
        return AbGroup.free(0)
    rank, torsion = 0, []
    for k, t in enumerate(toks):
        if k % 2:
            if t.text != "+":
                raise _err(f"expected '+', found {t.text!r}", t)
            continue
        m = _SUMMAND.fullmatch(t.text)
        if not m:
            raise _err(f"expected Z, Z^n or Z/n, found {t.text!r}", t)
        if m.group(2) is not None:
            d = int(m.group(2))
            if d < 2:
                raise _err(f"torsion order must be at least 2: {t.text!r}", t)
            torsion.append(d)
        else:
            if torsion:
                raise _err("free summands must come before torsion summands", t)
            rank += int(m.group(1)) if m.group(1) else 1
    if len(toks) % 2 == 0:
        raise _err("dangling '+'", toks[-1])
    return AbGroup.from_invariants(rank, torsion)


def _parse_abelian(cat: FiniteCategory, head: _Tok, lines) -> AbPresheaf:
    name = head.text
    at: dict[str, AbGroup] = {}
    rows: dict[str, tuple[_Tok, list[list[int]]]] = {}
    for toks in lines:
        key = toks[0].text
        if key == "at":
            x = _resolve_object(cat, _name(toks, 1, "an object", toks[0]))
            _expect(toks, 2, ":", toks[1])
            if x in at:
                raise _err(f"F({x}) given twice", toks[1])
            if len(toks) == 3:
                raise SiteParseError("expected a group", toks[2].line, toks[2].col + 1)
            at[x] = _parse_group(toks[3:])
        elif key == "restrict":
            ft = _name(toks, 1, "a morphism", toks[0])
            f = _resolve_morphism(cat, ft)
            _expect(toks, 2, ":", ft)
            if f in rows:
                raise _err(f"restriction along {f} given twice", ft)
            m = [[]]
            for t in toks[3:]:
                if t.text == ";":
                    m.append([])
                else:
                    m[-1].append(_int(t, "matrix entry"))
            rows[f] = (ft, m)
        else:
            raise _err(f"unknown abelian entry {key!r}", toks[0])
    for x in cat.objects:
        at.setdefault(x, AbGroup.free(0))
    maps = {}
    for f in cat.morphisms:
        u, v = cat.source(f), cat.target(f)
        shape = (at[u].ngens, at[v].ngens)
        if f not in rows:
            if cat.is_identity(f):
                continue
            if shape[0] and shape[1]:
                raise _err(f"abelian presheaf {name!r}: no restriction along {f}", head)
            maps[f] = np.zeros(shape, dtype=object)
            continue
        ft, m = rows[f]
        if len(m) != shape[0] or any(len(r) != shape[1] for r in m):
            raise _err(f"restriction along {f} must be a {shape[0]} x {shape[1]} matrix", ft)
        maps[f] = mat(m, shape)
    return AbPresheaf(cat, at, maps, name=name)


def _parse_chunky(cat: FiniteCategory, lines) -> dict:
    sums = {}
    for toks in lines:
        if toks[0].text != "sum":
            raise _err(f"unknown chunky entry {toks[0].text!r}", toks[0])
        x = _resolve_object(cat, _name(toks, 1, "an object", toks[0]))
        y = _resolve_object(cat, _name(toks, 2, "an object", toks[1]))
        _expect(toks, 3, ":", toks[2])
        legs = []
        for k, obj in enumerate((x, y)):
            t = _name(toks, 4 + k, "a coprojection", toks[3 + k])
            f = _resolve_morphism(cat, t)
            if cat.source(f) != obj:
                raise _err(f"{f} does not start at {obj}", t)
            legs.append(f)
        _end(toks, 6)
        if cat.target(legs[0]) != cat.target(legs[1]):
            raise _err("coprojections must share a target", toks[5])
        if (x, y) in sums:
            raise _err(f"sum {x} {y} given twice", toks[0])
        sums[(x, y)] = tuple(legs)
    return sums


# -- serializing --------------------------------------------------------------

def serialize(doc: SiteDocument) -> str:
    """The site file of ``doc``; ``parse(serialize(doc))`` reproduces it."""
    cat = doc.cat
    for x in cat.objects:
        if cat.identity(x) != f"id_{x}":
            raise ValueError(f"identity of {x} must be named id_{x}; use document_from")
    out = []
    if doc.name:
        out.append(f"site {doc.name}")
    out += ["", "[category]", "objects " + " ".join(cat.objects)]
    for m in cat.morphisms:
        if not cat.is_identity(m):
            out.append(f"morphism {m} : {cat.source(m)} -> {cat.target(m)}")
    for (g, f), h in sorted(cat.composition_entries().items(), key=lambda kv: (kv[0][1], kv[0][0])):
        out.append(f"compose {h} = {g} * {f}")
    if doc.cd is not None:
        out += ["", "[cd]"]
        for q in doc.cd.squares:
            out.append(f"square {q.name} : {' '.join(q.corners)} via {q.b_to_a} {q.b_to_y} {q.e} {q.p}")
    if doc.density is not None:
        D = doc.density
        out += ["", "[density]", f"stabilization {D.stabilization}"]
        for (x, n), v in sorted(D.levels.items()):
            out.append(f"level {x} {n} :" + "".join(f" {f}" for f in sorted(v)))
    for name, F in doc.presheaves.items():
        out += ["", f"[presheaf {name}]"]
        for x in cat.objects:
            out.append(f"at {x} :" + "".join(f" {s}" for s in F.at[x]))
        for f in cat.morphisms:
            if cat.is_identity(f) or not F.at[cat.target(f)]:
                continue
            pairs = " , ".join(f"{s} -> {F.maps[f][s]}" for s in F.at[cat.target(f)])
            out.append(f"restrict {f} : {pairs}")
    for name, G in doc.abelian.items():
        out += ["", f"[abelian {name}]"]
        for x in cat.objects:
            out.append(f"at {x} : {_group_text(G.at[x])}")
        for f in cat.morphisms:
            m = G.maps[f]
            if cat.is_identity(f) or 0 in m.shape:
                continue
            out.append(f"restrict {f} : " + " ; ".join(" ".join(str(int(v)) for v in row) for row in m))
    if doc.chunky is not None:
        out += ["", "[chunky]"]
        for (x, y), (i, j) in sorted(doc.chunky.items()):
            out.append(f"sum {x} {y} : {i} {j}")
    return "\n".join(out) + "\n"


def _group_text(g: AbGroup) -> str:
    rank = g.ngens - len(g.relations)
    want = AbGroup.from_invariants(rank, [r[rank + k] for k, r in enumerate(g.relations)])
    if want != g:
        raise ValueError(f"group {g} is not in invariant-factor presentation; use document_from")
    return describe((rank, tuple(r[rank + k] for k, r in enumerate(g.relations))))


# -- building documents from in-memory objects --------------------------------

def canonical_identities(cat: FiniteCategory, name: str = "") -> tuple[FiniteCategory, dict[str, str]]:
    """A copy of ``cat`` whose identities are called ``id_X``, with the renaming."""
    ren = {m: m for m in cat.morphisms}
    for x in cat.objects:
        ren[cat.identity(x)] = f"id_{x}"
    morphisms = {m: (cat.source(m), cat.target(m)) for m in cat.morphisms if not cat.is_identity(m)}
    table = {(ren[g], ren[f]): ren[h] for (g, f), h in cat.composition_entries().items()}
    new = FiniteCategory(cat.objects, morphisms, {x: f"id_{x}" for x in cat.objects}, table,
                         name=name or cat.name)
    return new, ren


def normalize_abelian(G: AbPresheaf, cat: Optional[FiniteCategory] = None,
                      ren: Optional[Mapping[str, str]] = None) -> AbPresheaf:
    """An isomorphic presheaf whose groups are in invariant-factor form
    ``Z^r + Z/d_1 + …`` with the free generators first."""
    cat = cat or G.cat
    ren = ren or {m: m for m in G.cat.morphisms}
    to_new, from_new, groups = {}, {}, {}
    for x in G.cat.objects:
        g = G.at[x]
        n = g.ngens
        if not g.relations:
            to_new[x] = eye(n)
            from_new[x] = eye(n)
            groups[x] = AbGroup.free(n)
            continue
        s = smith_normal_form(g.relation_matrix())
        k = s.rank
        keep = list(range(k, n)) + [i for i in range(k) if s.diagonal[i] != 1]
        torsion = [s.diagonal[i] for i in range(k) if s.diagonal[i] != 1]
        U = mat(s.U, (n, n))
        Uinv = np.zeros((n, n), dtype=object)
        for c in range(n):
            e = np.zeros(n, dtype=object)
            e[c] = 1
            Uinv[:, c] = int_solve(U, e)
        to_new[x] = U[keep, :]
        from_new[x] = Uinv[:, keep]
        groups[x] = AbGroup.from_invariants(n - k, torsion)
    maps = {}
    for f in G.cat.morphisms:
        u, v = G.cat.source(f), G.cat.target(f)
        m = to_new[u].dot(G.maps[f]).dot(from_new[v])
        m = mat(m, (groups[u].ngens, groups[v].ngens))
        rank = groups[u].ngens - len(groups[u].relations)
        for k, r in enumerate(groups[u].relations):
            m[rank + k, :] = [int(val) % r[rank + k] for val in m[rank + k, :]]
        maps[ren[f]] = m
    return AbPresheaf(cat, groups, maps, name=G.name)


def _token_name(s) -> str:
    text = re.sub(r"\s+", "_", str(s))
    return text if text not in PUNCT and not text.startswith("[") else f"_{text}"


def document_from(name: str, cat: FiniteCategory, cd: Optional[CdStructure] = None,
                  density: Optional[DensityStructure] = None,
                  presheaves: Iterable[SetPresheaf] = (), abelian: Iterable[AbPresheaf] = (),
                  chunky: Optional[Mapping[tuple[str, str], Sequence[str]]] = None) -> SiteDocument:
    """Bring in-memory objects into file form: identities renamed ``id_X``,
    set elements relabelled by position, groups in invariant-factor form."""
    new, ren = canonical_identities(cat, name)
    doc = SiteDocument(name, new)
    if cd is not None:
        doc.cd = CdStructure(new, [Square(*q.corners, ren[q.b_to_a], ren[q.b_to_y], ren[q.e], ren[q.p],
                                          name=_token_name(q.name or f"q{k}"))
                                   for k, q in enumerate(cd.squares)], name=name)
    if density is not None:
        levels = {k: {ren[f] for f in v} for k, v in density.levels.items()}
        doc.density = DensityStructure(new, levels, density.stabilization)
    for k, F in enumerate(presheaves):
        label = {}
        for x in cat.objects:
            names = [_token_name(s) for s in F.at[x]]
            if len(set(names)) < len(names):
                names = [str(i) for i in range(len(names))]
            label[x] = dict(zip(F.at[x], names))
        at = {x: [label[x][s] for s in F.at[x]] for x in cat.objects}
        maps = {ren[f]: {label[cat.target(f)][s]: label[cat.source(f)][t] for s, t in F.maps[f].items()}
                for f in cat.morphisms}
        pname = _token_name(F.name or f"F{k}")
        doc.presheaves[pname] = SetPresheaf(new, at, maps, name=pname)
    for k, G in enumerate(abelian):
        gname = _token_name(G.name or f"G{k}")
        H = normalize_abelian(G, new, ren)
        H.name = gname
        doc.abelian[gname] = H
    if chunky is not None:
        doc.chunky = {xy: (ren[legs[0]], ren[legs[1]]) for xy, legs in chunky.items()}
    return doc
