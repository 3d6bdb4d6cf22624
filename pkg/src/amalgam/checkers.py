"""Bounded, certificate-producing checks of JEP, AP, CAP, WAP and t-isolation.

Every universal quantifier is restricted to a finite pool of groups and an
order bound; reports record these bounds and never claim an unbounded verdict.
"""

from __future__ import annotations

from .abelian import abelian_amalgam
from .catalog import Catalog
from .completion import Completion, full_table_group, candidate_groups, complete_within, group_labelings
from .diagrams import Diagram, check_partial_consistency, default_labels, diagram_of, extends, relabel
from .errors import (
    CatalogCoverage,
    IncompatiblePredicates,
    NoCompletionAtBound,
    PreconditionFailed,
    UnsupportedVariety,
)
from .groups import FiniteGroup, Morphism, direct_sum, identity_morphism, sum_injections
from .nil2 import embed_into_amalg_base, nil2_amalgam
from .report import COUNTEREXAMPLE, UNKNOWN, WITNESSED, Certificate, PropertyReport
from .varieties import VarietySpec, enumerate_words, evaluate_word, format_word


def pool_fingerprint(pool, V: VarietySpec) -> str:
    if isinstance(pool, Catalog):
        return pool.fingerprint
    return Catalog(tuple(pool), 0, V.name).fingerprint


def _pool_list(pool):
    return list(pool.groups if isinstance(pool, Catalog) else pool)


def _fresh_labels(n: int, fixed: dict, start: int) -> list[int]:
    """Labels for elements ``0..n-1``: ``fixed[i]`` where given, else counting up from ``start``."""
    out = []
    nxt = start
    for i in range(n):
        if i in fixed:
            out.append(fixed[i])
        else:
            out.append(nxt)
            nxt += 1
    return out


def _diagram_json(D: Diagram) -> dict:
    return D.to_json()


# ---------------------------------------------------------------------------
# joint embedding


def check_jep_at(V: VarietySpec, pool) -> PropertyReport:
    """Joint embedding of every pair of pool tables into their direct sum."""
    groups = [G for G in _pool_list(pool)]
    bad = [G for G in groups if not V.holds_in(G)]
    if bad:
        raise PreconditionFailed(f"pool group {bad[0]!r} violates {V.name}")
    cert = Certificate()
    pairs = 0
    for i, G in enumerate(groups):
        for H in groups[i:]:
            L1, L2 = default_labels(G), default_labels(H)
            S = direct_sum(G, H)
            i1, i2 = sum_injections(G, H, S)
            L3 = _fresh_labels(S.order, {i1(x): L1[x] for x in range(G.order)}, max(L1) + 1)
            alpha = {L2[h]: L3[i2(h)] for h in range(H.order)}
            D1, D2, D3 = diagram_of(G, (), L1), diagram_of(H, (), L2), diagram_of(S, (), L3)
            if not (extends(D1, D3) and extends(relabel(D2, alpha), D3)):
                raise AssertionError("direct sum does not extend both tables")
            cert.add("extends", small=cert.labeled(G, L1), big=cert.labeled(S, L3))
            cert.add("extends", small=cert.labeled(H, L2), big=cert.labeled(S, L3), alpha=sorted(alpha.items()), fixed=[1])
            pairs += 1
    return PropertyReport(
        "JEP",
        WITNESSED,
        {"pool_fingerprint": pool_fingerprint(pool, V), "pool_size": len(groups), "variety": V.name},
        {"pairs": pairs},
        cert,
    )


# ---------------------------------------------------------------------------
# amalgamation search


def _restrict(pts, dom, keep):
    return tuple(x for lab, x in zip(dom, pts) if lab in keep)


def find_amalgam(D1: Diagram, D2: Diagram, fixed, V: VarietySpec, order_bound: int, pool=None, disjoint: bool = False):
    """Least (group, labels of D3, alpha) with D1 and alpha(D2) inside a full table.

    ``alpha`` fixes every label in ``fixed``. With ``disjoint`` the labels of
    D1 and D2 outside ``fixed`` must land on distinct elements.
    """
    fixed = set(fixed)
    dom1, dom2 = list(D1.domain), list(D2.domain)
    for G in candidate_groups(V, order_bound, pool):
        lab1 = sorted(group_labelings(D1, G))
        if not lab1:
            continue
        lab2 = sorted(group_labelings(D2, G))
        index: dict = {}
        for q in lab2:
            index.setdefault(_restrict(q, dom2, fixed), []).append(q)
        for p in lab1:
            for q in index.get(_restrict(p, dom1, fixed), []):
                where1 = dict(zip(dom1, p))
                where2 = dict(zip(dom2, q))
                if disjoint:
                    own1 = {where1[x] for x in dom1 if x not in fixed}
                    if any(where2[x] in own1 for x in dom2 if x not in fixed):
                        continue
                return _assemble(G, where1, where2, fixed)
    return None


def _assemble(G: FiniteGroup, where1: dict, where2: dict, fixed):
    """Labels of D3 (D1's labels kept) and the relabelling alpha of D2."""
    taken = {v: k for k, v in where1.items()}
    start = max(list(where1) + list(where2)) + 1
    labels = _fresh_labels(G.order, taken, start)
    alpha = {x: labels[g] for x, g in where2.items()}
    return G, labels, alpha


def check_ap_instance(
    D0: Diagram, D1: Diagram, D2: Diagram, V: VarietySpec, order_bound: int, pool=None, disjoint: bool = False
) -> PropertyReport:
    if not (extends(D0, D1) and extends(D0, D2)):
        raise PreconditionFailed("D1 and D2 must both extend D0")
    bounds = {"order_bound": order_bound, "variety": V.name, "disjoint": disjoint}
    if pool is not None:
        bounds["pool_fingerprint"] = pool_fingerprint(pool, V)
    try:
        found = find_amalgam(D1, D2, D0.domain, V, order_bound, pool, disjoint)
    except CatalogCoverage as exc:
        return PropertyReport("AP", UNKNOWN, bounds, {"reason": str(exc)})
    if found is None:
        return PropertyReport("AP", UNKNOWN, bounds, {"reason": "no amalgam within the bound"})
    G, labels, alpha = found
    cert = Certificate()
    _ap_certificate(cert, D0, D1, D2, G, labels, alpha, D0.domain, V)
    return PropertyReport("AP", WITNESSED, bounds, {"amalgam_order": G.order, "alpha": sorted(alpha.items())}, cert)


def _ap_certificate(cert, D0, D1, D2, G, labels, alpha, fixed, V):
    D3 = diagram_of(G, (), labels)
    if not (extends(D1, D3) and extends(relabel(D2, alpha), D3)):
        raise AssertionError("assembled amalgam does not extend both sides")
    if any(alpha.get(x, x) != x for x in fixed):
        raise AssertionError("alpha moves a fixed label")
    big = cert.labeled(G, labels)
    if D0 is not None:
        cert.add("extends", small=_diagram_json(D0), big=_diagram_json(D1))
        cert.add("extends", small=_diagram_json(D0), big=_diagram_json(D2))
    cert.add("extends", small=_diagram_json(D1), big=big)
    cert.add("extends", small=_diagram_json(D2), big=big, alpha=sorted(alpha.items()), fixed=sorted(fixed))
    cert.add("completion", diagram=_diagram_json(D3), group=cert.group(G), assignment=[[l, i] for i, l in enumerate(labels)], variety=V.name)


# ---------------------------------------------------------------------------
# weak / cofinal amalgamation


def _engine_amalgam(c1: Completion, c2: Completion, D0p: Diagram, V: VarietySpec):
    """Amalgam of two full-table extensions of a full table via the abelian or nil-2 engine."""
    G0 = full_table_group(D0p)
    if G0 is None:
        return None
    G0, lab0 = G0
    e = []
    for c in (c1, c2):
        m = c.mapping
        e.append(Morphism(G0, c.algebra, [m[lab0[x]] for x in range(G0.order)]))
    if V.abelian:
        am = abelian_amalgam(e[0], e[1])
    elif V.is_nil2_expp():
        try:
            am = nil2_amalgam(e[0], e[1], p=V.exponent)
        except IncompatiblePredicates:
            return None
    else:
        return None
    return G0, e, am


def _full_table_extensions(D0p: Diagram, V, order_bound, pool):
    out = []
    for c in complete_within(D0p, V, order_bound, pool):
        m = c.mapping
        labels = _fresh_labels(c.order, {v: k for k, v in m.items()}, max(D0p.domain) + 1)
        out.append((c, diagram_of(c.algebra, (), labels), labels))
    return out


def check_wap_witness(
    D0: Diagram,
    D0p: Diagram,
    V: VarietySpec,
    order_bound: int,
    mode: str = "WAP",
    pool=None,
    extensions=None,
    amalgam_bound: int | None = None,
) -> PropertyReport:
    """Do all pairs of extensions of D0p amalgamate, fixing Dom(D0) (WAP) or Dom(D0p) (CAP)?

    Extensions default to the full tables of the completions of D0p within the
    bound. Amalgams come from the abelian or nil-2 engine when D0p is a full
    table, otherwise from a search up to ``amalgam_bound`` (default: order_bound).
    """
    if mode not in ("WAP", "CAP"):
        raise ValueError("mode is WAP or CAP")
    if not extends(D0, D0p):
        raise PreconditionFailed("D0p must extend D0")
    fixed = set(D0.domain if mode == "WAP" else D0p.domain)
    bounds = {"order_bound": order_bound, "variety": V.name, "mode": mode}
    if pool is not None:
        bounds["pool_fingerprint"] = pool_fingerprint(pool, V)
    if amalgam_bound is not None:
        bounds["amalgam_bound"] = amalgam_bound
    if extensions is None:
        exts = _full_table_extensions(D0p, V, order_bound, pool)
    else:
        exts = []
        for D in extensions:
            if not extends(D0p, D):
                raise PreconditionFailed("every supplied extension must extend D0p")
            exts.append((None, D, None))
    cert = Certificate()
    max_order = 0
    for i, (c1, D1, L1) in enumerate(exts):
        for c2, D2, L2 in exts[i:]:
            witness = None
            if c1 is not None and c2 is not None:
                eng = _engine_amalgam(c1, c2, D0p, V)
                if eng is not None:
                    _, (e1, e2), am = eng
                    where1 = {lab: am.j1(x) for x, lab in enumerate(L1)}
                    where2 = {lab: am.j2(x) for x, lab in enumerate(L2)}
                    witness = _assemble(am.group, where1, where2, fixed)
            if witness is None:
                witness = find_amalgam(D1, D2, fixed, V, amalgam_bound or order_bound, pool)
            if witness is None:
                summary = {"failing_pair": [D1.to_json(), D2.to_json()], "pairs_checked": i}
                return PropertyReport(mode, COUNTEREXAMPLE, bounds, summary, None)
            G, labels, alpha = witness
            max_order = max(max_order, G.order)
            _ap_certificate(cert, None, D1, D2, G, labels, alpha, fixed, V)
    n = len(exts)
    return PropertyReport(mode, WITNESSED, bounds, {"extensions": n, "pairs": n * (n + 1) // 2, "largest_amalgam": max_order}, cert)


# ---------------------------------------------------------------------------
# t-isolation


def _word_partition(G: FiniteGroup, pts, words):
    return tuple(evaluate_word(G, w, pts) for w in words)


def _separating_pair(words, va, vb):
    first_a: dict = {}
    for i, x in enumerate(va):
        first_a.setdefault(x, i)
    first_b: dict = {}
    for i, x in enumerate(vb):
        first_b.setdefault(x, i)
    for i in range(len(words)):
        ja, jb = first_a[va[i]], first_b[vb[i]]
        if ja != jb:
            j = min(ja, jb)
            return words[j], words[i]
    return None


def t_isolation_check(D: Diagram, c, V: VarietySpec, order_bound: int, word_length: int, pool=None) -> PropertyReport:
    """Do all completions within the bound agree on word equalities over the tuple c?"""
    c = tuple(c)
    if any(x not in D.domain for x in c):
        raise PreconditionFailed("the tuple must lie in the diagram's domain")
    comps = complete_within(D, V, order_bound, pool)
    if not comps:
        raise NoCompletionAtBound(f"no completion of order <= {order_bound}")
    words = enumerate_words(len(c), word_length)
    bounds = {"order_bound": order_bound, "word_length": word_length, "variety": V.name}
    if pool is not None:
        bounds["pool_fingerprint"] = pool_fingerprint(pool, V)
    ref = comps[0]
    ref_pts = [ref.mapping[x] for x in c]
    ref_vals = _word_partition(ref.algebra, ref_pts, words)
    cert = Certificate()
    _completion_check(cert, D, ref, V)
    for comp in comps[1:]:
        pts = [comp.mapping[x] for x in c]
        vals = _word_partition(comp.algebra, pts, words)
        sep = _separating_pair(words, ref_vals, vals)
        if sep is not None:
            w1, w2 = sep
            _completion_check(cert, D, comp, V)
            cert.add(
                "word_separation",
                group_a=cert.group(ref.algebra),
                tuple_a=ref_pts,
                group_b=cert.group(comp.algebra),
                tuple_b=pts,
                w1=[list(x) for x in w1],
                w2=[list(x) for x in w2],
            )
            names = [f"c{i}" for i in range(len(c))]
            summary = {
                "completions": [_describe(ref), _describe(comp)],
                "words": [format_word(w1, names), format_word(w2, names)],
                "equal_in": _describe(ref) if ref_vals[words.index(w1)] == ref_vals[words.index(w2)] else _describe(comp),
            }
            return PropertyReport("TIsolation", COUNTEREXAMPLE, bounds, summary, cert)
        _completion_check(cert, D, comp, V)
    return PropertyReport("TIsolation", WITNESSED, bounds, {"completions": len(comps), "words": len(words)}, cert)


def _completion_check(cert, D, comp: Completion, V):
    cert.add("completion", diagram=D.to_json(), group=cert.group(comp.algebra), assignment=[list(x) for x in comp.assignment], variety=V.name)


def _describe(comp: Completion) -> str:
    return f"{comp.algebra.name or 'order ' + str(comp.order)}"


# ---------------------------------------------------------------------------
# non-amalgamation pattern


def non_wap_pattern_check(Dp: Diagram, atom, V: VarietySpec, order_bound: int, pool=None) -> PropertyReport:
    """Extend Dp by an atom and by its negation; witnessed when both have completions."""
    op, args, value = atom
    args = tuple(args)
    if any(a not in Dp.domain for a in args):
        raise PreconditionFailed("the atom's operands must lie in the domain")
    bounds = {"order_bound": order_bound, "variety": V.name}
    if Dp.value(op, *args) is not None:
        return PropertyReport("NonWapPattern", UNKNOWN, bounds, {"reason": "the atom is already decided"})
    fresh = max(list(Dp.domain) + [value]) + 1
    yes = Dp.with_cells([(op, args, value)], [value])
    no = Dp.with_cells([(op, args, fresh)], [fresh])
    comps = []
    for D in (yes, no):
        if not check_partial_consistency(D).ok:
            return PropertyReport("NonWapPattern", UNKNOWN, bounds, {"reason": "an extension is inconsistent"})
        found = complete_within(D, V, order_bound, pool)
        if not found:
            return PropertyReport("NonWapPattern", UNKNOWN, bounds, {"reason": "an extension has no completion"})
        comps.append((D, found[0]))
    cert = Certificate()
    for D, comp in comps:
        cert.add("extends", small=Dp.to_json(), big=D.to_json())
        _completion_check(cert, D, comp, V)
    summary = {"with_atom": _describe(comps[0][1]), "with_negation": _describe(comps[1][1]), "fresh_label": fresh}
    return PropertyReport("NonWapPattern", WITNESSED, bounds, summary, cert)


# ---------------------------------------------------------------------------
# group-level reductions


def _extension_classes(H: FiniteGroup, V, order_bound, pool):
    """Embeddings of H into pool groups, one per isomorphism class over H."""
    labels = default_labels(H)
    D = diagram_of(H, (), labels)
    out = []
    for comp in complete_within(D, V, order_bound, pool):
        m = comp.mapping
        out.append(Morphism(H, comp.algebra, [m[labels[x]] for x in range(H.order)]))
    return out


def wap_via_groups(G0: FiniteGroup, V: VarietySpec, pool, order_bound: int) -> PropertyReport:
    """Extend G0 to G1 and amalgamate every pair of pool extensions of G1 over G0."""
    if not V.holds_in(G0):
        raise UnsupportedVariety(f"G0 does not satisfy {V.name}")
    if V.abelian:
        G1, iota = G0, identity_morphism(G0)
    elif V.is_nil2_expp():
        G1, iota = embed_into_amalg_base(G0, V.exponent)
    else:
        raise UnsupportedVariety(f"no amalgam engine for {V.name}")
    exts = _extension_classes(G1, V, order_bound, pool)
    cert = Certificate()
    cert.morphism(iota)
    if not V.abelian:
        cert.add("base", group=cert.group(G1))
    orders = []
    for i, e1 in enumerate(exts):
        for e2 in exts[i:]:
            f1, f2 = e1.compose(iota), e2.compose(iota)
            am = abelian_amalgam(f1, f2) if V.abelian else nil2_amalgam(f1, f2, p=V.exponent)
            m = [cert.morphism(x) for x in (iota, e1, e2, am.j1, am.j2)]
            cert.add("commutes", paths=[[m[3], m[1], m[0]], [m[4], m[2], m[0]]])
            orders.append(am.group.order)
    bounds = {"order_bound": order_bound, "variety": V.name, "pool_fingerprint": pool_fingerprint(pool, V)}
    summary = {"G0": G0.order, "G1": G1.order, "extensions": len(exts), "amalgams": len(orders), "largest_amalgam": max(orders, default=0)}
    return PropertyReport("WAP", WITNESSED, bounds, summary, cert)


def gamma_stabilizer_search(G0: FiniteGroup, V: VarietySpec, pool, order_bound: int) -> PropertyReport:
    """Chain of pool extensions maximising |Gamma_{k+1} cap G0|, then a stability check."""
    c = 1 if V.abelian and V.nil_class is None else V.nil_class
    if c is None:
        raise UnsupportedVariety("gamma stabilisation needs a nilpotent variety")
    if not V.holds_in(G0):
        raise UnsupportedVariety(f"G0 does not satisfy {V.name}")
    iota = identity_morphism(G0)
    steps = []
    for k in range(1, c):
        best = None
        for e in _extension_classes(iota.target, V, order_bound, pool):
            through = e.compose(iota)
            size = len(through.preimage(e.target.gamma(k + 1)))
            if best is None or size > best[0]:
                best = (size, through)
        iota = best[1]
        steps.append({"k": k, "order": iota.target.order, "gamma_meet": best[0]})
    G1 = iota.target
    cert = Certificate()
    base = cert.morphism(iota)
    checked = 0
    meets = [len(iota.preimage(G1.gamma(i))) for i in range(1, c + 2)]
    bounds = {"order_bound": order_bound, "variety": V.name, "pool_fingerprint": pool_fingerprint(pool, V)}
    for e in _extension_classes(G1, V, order_bound, pool):
        through = e.compose(iota)
        for i in range(1, c + 1):
            if iota.preimage(G1.gamma(i)) != through.preimage(e.target.gamma(i)):
                summary = {"G1": G1.order, "steps": steps, "unstable_extension": e.target.order, "level": i}
                return PropertyReport("GammaStable", COUNTEREXAMPLE, bounds, summary, None)
        cert.add("gamma_stable", base=base, ext=cert.morphism(e), levels=c)
        checked += 1
    summary = {"G1": G1.order, "steps": steps, "extensions_checked": checked, "gamma_meets": meets}
    return PropertyReport("GammaStable", WITNESSED, bounds, summary, cert)
