"""Ground-truth pronormality decisions by exhaustive search.

H is pronormal in G when, for every g in G, H and H^g are conjugate in
<H, H^g>.  The scans below visit g in canonical order, so a reported
witness is always the smallest failing element.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .criteria import Decision, Reason, Verdict, not_applicable, not_pronormal, pronormal
from .errors import AmbientMismatch, BudgetExceeded, HypothesisViolated, SylowNotContained
from .group import (
    DEFAULT_BUDGET,
    QuotientGroup,
    Subgroup,
    _same_ambient,
    all_subgroups,
    as_subgroup,
    commutator_subgroup,
    conjugate_rows,
    coset_table,
    generate,
    in_class_Xp,
    intersection,
    is_normal,
    join,
    normalizer,
    overgroups_of,
    p_part,
    quotient,
    sylow_p,
)
from .perm import CosetAction


def _check_budget(G: Subgroup, budget: int):
    if G.order > budget:
        raise BudgetExceeded(f"group of order {G.order} exceeds budget {budget}")


def _conj_indices(amb, H: Subgroup, g: int) -> np.ndarray:
    return np.sort(amb.index_of(conjugate_rows(amb, H.indices, g)))


def _conjugate_in_join(amb, H: Subgroup, Hg_idx: np.ndarray, Hg_gens: list[int]) -> bool:
    """Is H^g conjugate to H inside <H, H^g>?

    Walks the orbit of H under conjugation by the generators of the join,
    without materializing the join itself.
    """
    target = Hg_idx.tobytes()
    gens = list(H.gens) + list(Hg_gens)
    seen = {H.key}
    frontier = [H.indices]
    while frontier:
        nxt = []
        for X in frontier:
            for s in gens:
                Y = np.sort(amb.index_of(conjugate_rows(amb, X, s)))
                k = Y.tobytes()
                if k == target:
                    return True
                if k not in seen:
                    seen.add(k)
                    nxt.append(Y)
        frontier = nxt
    return False


def _scan(H: Subgroup, G: Subgroup, candidates, skip_classes: Subgroup | None) -> Decision:
    amb = H.ambient
    done = np.zeros(amb.order, dtype=bool)
    seen_ok: set[bytes] = {H.key}
    checked = 0
    for g in candidates:
        g = int(g)
        if done[g]:
            continue
        if skip_classes is not None:
            # H^g only depends on the right coset N_G(H) g
            done[amb.mul(skip_classes.indices, g)] = True
        Hg = _conj_indices(amb, H, g)
        k = Hg.tobytes()
        if k in seen_ok:
            continue
        checked += 1
        Hg_gens = [int(x) for x in amb.index_of(conjugate_rows(amb, np.asarray(H.gens, dtype=np.int64), g))] if H.gens else []
        if not _conjugate_in_join(amb, H, Hg, Hg_gens):
            return not_pronormal(
                Reason("definition", None, f"H and H^g are not conjugate in <H, H^g> for g = element {g}"),
                witness=g,
            )
        seen_ok.add(k)
    return pronormal(Reason("definition", None, f"all {checked} distinct conjugates checked"))


def prn_definition(H: Subgroup, G, budget: int = DEFAULT_BUDGET) -> Decision:
    """Brute-force pronormality test straight from the definition."""
    G = as_subgroup(G)
    _same_ambient(G, H)
    if not H.issubset(G):
        raise AmbientMismatch("H is not a subgroup of G")
    _check_budget(G, budget)
    N = normalizer(G, H)
    if N.order == G.order:
        return pronormal(Reason("normal", None, "H is normal in G"))
    return _scan(H, G, G.indices, N)


def prn_lemma4(H: Subgroup, G, S: Subgroup, budget: int = DEFAULT_BUDGET) -> Decision:
    """Same test with g restricted to N_G(S) for a Sylow subgroup S <= H."""
    G = as_subgroup(G)
    _same_ambient(G, H, S)
    if not S.issubset(H):
        raise SylowNotContained("S is not contained in H")
    if not H.issubset(G):
        raise AmbientMismatch("H is not a subgroup of G")
    primes = _prime_factors(S.order)
    if len(primes) > 1 or (primes and S.order != p_part(G.order, primes[0])):
        raise HypothesisViolated("S is not a Sylow subgroup of G")
    _check_budget(G, budget)
    NS = normalizer(G, S)
    return _scan(H, G, NS.indices, normalizer(NS, H))


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --------------------------------------------------------------------------
# abelian normal supplement


def invariant_subgroups(V: Subgroup, H: Subgroup) -> list[Subgroup]:
    """All H-invariant subgroups of an abelian group V.

    Each invariant subgroup is a join of closures <v^H>, so saturating
    from the trivial group by adding one element's H-orbit at a time
    reaches all of them.
    """
    amb = _same_ambient(V, H)
    found = {amb.trivial().key: amb.trivial()}
    queue = [amb.trivial()]
    hgens = H.gens
    while queue:
        U = queue.pop()
        for v in V.indices:
            if U.mask[v]:
                continue
            W = _invariant_join(amb, U, int(v), hgens)
            if W.key not in found:
                found[W.key] = W
                queue.append(W)
    return sorted(found.values(), key=Subgroup.sort_key)


def _invariant_join(amb, U: Subgroup, v: int, hgens: list[int]) -> Subgroup:
    W = generate(amb, [v], start=U)
    changed = True
    while changed:
        changed = False
        for h in hgens:
            imgs = amb.conj(np.asarray(W.gens, dtype=np.int64), h)
            new = [int(x) for x in np.atleast_1d(imgs) if not W.mask[int(x)]]
            if new:
                W = generate(amb, new, start=W)
                changed = True
    return W


def _is_abelian(A: Subgroup) -> bool:
    amb = A.ambient
    gens = A.gens
    return all(amb.mul(a, b) == amb.mul(b, a) for a in gens for b in gens)


def prn_lemma6(H: Subgroup, V: Subgroup, G, v_cap: int = 1024) -> Decision:
    """Pronormality of H in G = HV for V abelian and normal.

    H is pronormal iff every H-invariant U <= V equals N_U(H)[H, U].
    """
    G = as_subgroup(G)
    amb = _same_ambient(G, H, V)
    if not _is_abelian(V):
        raise HypothesisViolated("V is not abelian")
    if not is_normal(V, G):
        raise HypothesisViolated("V is not normal in G")
    if not H.issubset(G):
        raise HypothesisViolated("H is not contained in G")
    HV = H.order * V.order // intersection(H, V).order
    if HV != G.order:
        raise HypothesisViolated(f"|HV| = {HV} differs from |G| = {G.order}")
    if V.order > v_cap:
        raise BudgetExceeded(f"|V| = {V.order} exceeds cap {v_cap}")
    NH = normalizer(G, H)
    for U in invariant_subgroups(V, H):
        lhs = join(intersection(U, NH), commutator_subgroup(H, U))
        if lhs.order != U.order:
            return not_pronormal(
                Reason("abelian-supplement", None,
                       f"invariant U of order {U.order} has N_U(H)[H,U] of order {lhs.order}"),
                witness=U,
            )
    return pronormal(Reason("abelian-supplement", None, "U = N_U(H)[H,U] for every H-invariant U <= V"))


# --------------------------------------------------------------------------
# transitive-action check


def _conjugacy_cover(G: Subgroup, Ks: Sequence[Subgroup]) -> set[bytes]:
    amb = G.ambient
    keys = set()
    for K in Ks:
        reps, _ = coset_table(G, normalizer(G, K))
        for g in reps:
            keys.add(_conj_indices(amb, K, g).tobytes())
    return keys


def hall_check(H: Subgroup, G, Ks: Sequence[Subgroup], complete: bool | None = None,
               budget: int = DEFAULT_BUDGET) -> Decision:
    """In each action of G on the cosets of K, N_G(H) must be transitive on fix(H).

    Only a list of K covering every conjugacy class of subgroups certifies
    pronormality; otherwise a pass is reported as partial.  With
    ``complete=None`` coverage is checked against the full subgroup list.
    """
    G = as_subgroup(G)
    amb = _same_ambient(G, H, *Ks)
    if not H.issubset(G) or not all(K.issubset(G) for K in Ks):
        raise AmbientMismatch("H and every K must lie in G")
    N = normalizer(G, H)
    for K in Ks:
        act = CosetAction(G, K)
        hrows = act.image_rows(H.gens) if H.gens else np.empty((0, act.degree), dtype=np.int64)
        fixed = np.flatnonzero((hrows == np.arange(act.degree)).all(axis=0))
        if len(fixed) <= 1:
            continue
        nrows = act.image_rows(N.indices)
        orbit = set(int(x) for x in np.unique(nrows[:, fixed[0]]))
        if not set(fixed.tolist()) <= orbit:
            return not_pronormal(
                Reason("fixed-point-transitivity", None,
                       f"N_G(H) is not transitive on the {len(fixed)} fixed points in the action of degree {act.degree}"),
                witness=K,
            )
    if complete is None:
        subs = all_subgroups(G, budget)
        complete = {S.key for S in subs} <= _conjugacy_cover(G, Ks)
    if complete:
        return pronormal(Reason("fixed-point-transitivity", None, "transitive on fix(H) in every coset action"))
    return not_applicable(Reason("partial", None, "consistent with pronormality on the given actions only"))


# --------------------------------------------------------------------------
# reduction through a normal subgroup


@dataclass
class ReducedInstance:
    T: Subgroup
    Y: Subgroup
    Z: Subgroup
    H_star: Subgroup
    K_star: Subgroup
    N_Y_T: Subgroup
    quotient_form: QuotientGroup | None = None
    reasons: list[Reason] = field(default_factory=list)

    @property
    def strict(self) -> bool:
        return self.K_star.order < self.K_star.ambient.order


def prop3_reduce(G, A: Subgroup, H: Subgroup, p: int, budget: int = DEFAULT_BUDGET,
                 with_quotient: bool = False, a_check: Decision | None = None) -> ReducedInstance:
    """Reduce pronormality of H in G to that of N_H(T) in N_H(T) N_Y(T).

    Requires A normal in G with G/A having self-normalizing Sylow
    p-subgroups, and H containing a Sylow p-subgroup S of G.  Here
    T = A meet S and Y = N_A(H meet A).  The reduction also needs A to lie
    in the class where overgroups of Sylow p-subgroups are pronormal; it
    is checked when A fits the budget and recorded as an assumption
    otherwise.  A previous ``class_Yp_check(A, p)`` result may be passed
    as ``a_check`` to avoid repeating it.
    """
    G = as_subgroup(G)
    _same_ambient(G, A, H)
    if not is_normal(A, G):
        raise HypothesisViolated("A is not normal in G")
    if not H.issubset(G):
        raise HypothesisViolated("H is not contained in G")
    if not in_class_Xp(quotient(G, A), p):
        raise HypothesisViolated(f"G/A does not have self-normalizing Sylow {p}-subgroups")
    S = sylow_p(H, p)
    if S.order != p_part(G.order, p):
        raise HypothesisViolated(f"H does not contain a Sylow {p}-subgroup of G")
    reasons = []
    if a_check is not None or A.order <= budget:
        check = a_check if a_check is not None else class_Yp_check(A, p, budget)
        if not check.pronormal:
            raise HypothesisViolated(f"A has a non-pronormal overgroup of a Sylow {p}-subgroup")
        reasons.append(Reason("sylow-overgroups-pronormal", None, "verified for A by enumeration"))
    else:
        reasons.append(Reason("sylow-overgroups-pronormal", None, "assumed for A (too large to enumerate)"))
    T = intersection(A, S)
    HA = intersection(H, A)
    Y = normalizer(A, HA)
    Z = normalizer(HA, T)
    H_star = normalizer(H, T)
    NYT = normalizer(Y, T)
    K_star = join(H_star, NYT)
    if not (is_normal(Z, H_star) and is_normal(Z, NYT)):
        raise HypothesisViolated("Z is not normal in N_H(T) and N_Y(T)")
    if K_star.order >= G.order:
        reasons.append(Reason("not-strict", None, f"|K*| = {K_star.order} is not smaller than |G|"))
    qf = quotient(K_star, Z) if with_quotient else None
    return ReducedInstance(T, Y, Z, H_star, K_star, NYT, qf, reasons)


def class_Yp_check(G, p: int, budget: int = DEFAULT_BUDGET) -> Decision:
    """Are all overgroups of a Sylow p-subgroup of G pronormal?"""
    G = as_subgroup(G)
    _check_budget(G, budget)
    S = sylow_p(G, p)
    overs = overgroups_of(S, G, budget)
    for H in overs:
        d = prn_lemma4(H, G, S, budget)
        if not d.pronormal:
            return not_pronormal(
                Reason("sylow-overgroup", None, f"overgroup of order {H.order} is not pronormal"), witness=H)
    return pronormal(Reason("sylow-overgroup", None, f"all {len(overs)} overgroups of a Sylow {p}-subgroup are pronormal"))
