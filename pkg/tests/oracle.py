"""Brute-force reference computations, written independently of the library.

These only use the raw category data (objects, morphisms, source, target,
compose) so that agreement with the library is evidence, not tautology.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import chain, combinations, product


def close_under_composition(objects, generators):
    """Morphisms of the free thin category on ``generators`` (pairs), with identities."""
    arrows = {(x, x) for x in objects} | set(generators)
    while True:
        new = {(a, d) for (a, b) in arrows for (c, d) in arrows if b == c} - arrows
        if not new:
            return arrows
        arrows |= new


def composable(cat, f, g):
    return cat.target(f) == cat.source(g)


def all_sieves(cat, x):
    into = list(cat.morphisms_into(x))
    out = []
    for r in range(len(into) + 1):
        for sub in combinations(into, r):
            s = set(sub)
            if all(cat.compose(f, g) in s for f in s for g in cat.morphisms_into(cat.source(f))):
                out.append(frozenset(s))
    return out


def pull(cat, f, s):
    return frozenset(g for g in cat.morphisms_into(cat.source(f)) if cat.compose(f, g) in s)


def topology_fixed_point(cat, generators):
    """Close ``{(x, sieve)}`` under maximality, stability and transitivity by
    repeated full passes over every sieve of every object."""
    sieves = {x: all_sieves(cat, x) for x in cat.objects}
    cov = {(x, frozenset(cat.morphisms_into(x))) for x in cat.objects} | set(generators)
    changed = True
    while changed:
        changed = False
        for x, r in list(cov):
            for f in cat.morphisms_into(x):
                item = (cat.source(f), pull(cat, f, r))
                if item not in cov:
                    cov.add(item)
                    changed = True
        for x in cat.objects:
            for s in sieves[x]:
                if (x, s) in cov:
                    continue
                for xr, r in list(cov):
                    if xr == x and all((cat.source(f), pull(cat, f, s)) in cov for f in r):
                        cov.add((x, s))
                        changed = True
                        break
    return cov


def matching_families(F, members, cat):
    members = sorted(members)
    for choice in product(*[F(cat.source(f)) for f in members]):
        fam = dict(zip(members, choice))
        ok = True
        for f in members:
            for g in cat.morphisms_into(cat.source(f)):
                fg = cat.compose(f, g)
                if F.res(g, fam[f]) != fam[fg]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield fam


def is_sheaf(F, cov, cat):
    """Unique amalgamation for every compatible family on every covering sieve."""
    for x, s in cov:
        fams = list(matching_families(F, s, cat))
        for fam in fams:
            glue = [t for t in F(x) if all(F.res(f, t) == v for f, v in fam.items())]
            if len(glue) != 1:
                return False
    return True


def is_mono(cat, f):
    for g in cat.morphisms_into(cat.source(f)):
        for h in cat.hom(cat.source(g), cat.source(f)):
            if g != h and cat.compose(f, g) == cat.compose(f, h):
                return False
    return True


def pullback_objects(cat, f, g):
    """Every ``w`` with legs making ``(w, a, b)`` a limit of ``f, g``."""
    out = []
    for w in cat.objects:
        for a in cat.hom(w, cat.source(f)):
            for b in cat.hom(w, cat.source(g)):
                if cat.compose(f, a) != cat.compose(g, b):
                    continue
                good = True
                for v in cat.objects:
                    cones = [(a2, b2) for a2 in cat.hom(v, cat.source(f)) for b2 in cat.hom(v, cat.source(g))
                             if cat.compose(f, a2) == cat.compose(g, b2)]
                    for a2, b2 in cones:
                        med = [m for m in cat.hom(v, w) if cat.compose(a, m) == a2 and cat.compose(b, m) == b2]
                        if len(med) != 1:
                            good = False
                            break
                    if not good:
                        break
                if good:
                    out.append((w, a, b))
    return out


def rational_rank(rows):
    """Rank over Q by exact Gaussian elimination."""
    m = [[Fraction(v) for v in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                c = m[i][col] / m[rank][col]
                m[i] = [a - c * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def chains(points, less, n):
    """Strict chains ``x_0 < … < x_n``."""
    out = [(p,) for p in points]
    for _ in range(n):
        out = [c + (q,) for c in out for q in points if (c[-1], q) in less]
    return out


def poset_betti_constant_z(points, less, n):
    """Rank of ``H^n`` of the order complex (constant coefficients)."""
    def coboundary(k):
        src, dst = chains(points, less, k), chains(points, less, k + 1)
        idx = {c: i for i, c in enumerate(src)}
        rows = []
        for c in dst:
            row = [0] * len(src)
            for i in range(len(c)):
                face = c[:i] + c[i + 1:]
                row[idx[face]] += (-1) ** i
            rows.append(row)
        return rows, len(src), len(dst)

    d_n, cn, _ = coboundary(n)
    rank_out = rational_rank(d_n) if d_n and cn else 0
    if n == 0:
        rank_in = 0
    else:
        d_prev, _, _ = coboundary(n - 1)
        rank_in = rational_rank(d_prev) if d_prev and d_prev[0] else 0
    return cn - rank_out - rank_in


def powerset(xs):
    xs = list(xs)
    return chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))
