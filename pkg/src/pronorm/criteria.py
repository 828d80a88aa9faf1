"""Fast pronormality criteria for odd-index subgroups of products of
wreath products Z_p wr Sym_n, plus the arithmetic predicates that govern
the symplectic case.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import gcd
from typing import Any, Sequence

from .errors import AmbientMismatch, BadPrimePower
from .group import Subgroup, has_odd_index
from .wreath import WreathGroup, WreathProduct


class Verdict(str, Enum):
    PRONORMAL = "Pronormal"
    NOT_PRONORMAL = "NotPronormal"
    NOT_APPLICABLE = "NotApplicable"

    @property
    def exit_code(self) -> int:
        return {"Pronormal": 0, "NotPronormal": 1, "NotApplicable": 2}[self.value]


@dataclass(frozen=True)
class Reason:
    criterion: str
    factor: int | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"criterion": self.criterion, "factor": self.factor, "detail": self.detail}


@dataclass
class Decision:
    verdict: Verdict
    reasons: list[Reason] = field(default_factory=list)
    witness: Any = None  # ambient element index or Subgroup, depending on the producer

    def __post_init__(self):
        if self.verdict is Verdict.NOT_APPLICABLE and not self.reasons:
            raise ValueError("NotApplicable needs at least one reason")

    @property
    def pronormal(self) -> bool:
        return self.verdict is Verdict.PRONORMAL

    @property
    def exit_code(self) -> int:
        return self.verdict.exit_code

    def __repr__(self):
        tags = ", ".join(r.criterion for r in self.reasons)
        return f"Decision({self.verdict.value}; {tags})"


def pronormal(*reasons: Reason, witness=None) -> Decision:
    return Decision(Verdict.PRONORMAL, list(reasons), witness)


def not_pronormal(*reasons: Reason, witness=None) -> Decision:
    return Decision(Verdict.NOT_PRONORMAL, list(reasons), witness)


def not_applicable(*reasons: Reason) -> Decision:
    return Decision(Verdict.NOT_APPLICABLE, list(reasons))


# --------------------------------------------------------------------------
# decision procedure for products of Z_p wr Sym_n


def _factor_view(G):
    """(p, n, factor group, projection) for each wreath factor of G."""
    if isinstance(G, WreathProduct):
        return [(G.p, G.n, G, lambda H: H)]
    if isinstance(G, WreathGroup):
        return [(p, n, G.components[i], (lambda H, i=i: G.project(i, H))) for i, (p, n) in enumerate(G.spec)]
    raise AmbientMismatch("expected a product of wreath products Z_p wr Sym_n")


def thm2_decide(spec, K: Subgroup, H: Subgroup) -> Decision:
    """Decide whether H is pronormal in K for H of odd index with full top image.

    ``spec`` is the ambient wreath group or its list of (p, n) factors; in
    the latter case it must match the ambient of H.
    """
    G = H.ambient
    if K.ambient is not G:
        raise AmbientMismatch("H and K live in different groups")
    if not isinstance(spec, (WreathGroup, WreathProduct)):
        shape = [(int(p), int(n)) for p, n in spec]
        actual = G.spec if isinstance(G, WreathGroup) else [(G.p, G.n)] if isinstance(G, WreathProduct) else None
        if actual != shape:
            raise AmbientMismatch(f"subgroups do not live in the wreath group {shape}")
    elif spec is not G:
        raise AmbientMismatch("subgroups do not live in the given wreath group")
    if not H.issubset(K):
        raise AmbientMismatch("H is not contained in K")
    factors = _factor_view(G)

    gate = []
    if not has_odd_index(G, H):
        gate.append(Reason("odd-index-gate", None, f"|G:H| = {G.order // H.order} is even"))
    projections = []
    for i, (p, n, Gi, proj) in enumerate(factors):
        Hi = proj(H)
        projections.append(Hi)
        top = Gi.bar(Hi).order
        if top != Gi.nfact:
            gate.append(Reason("surjective-top-gate", i, f"top image of factor {i} has order {top}, not {Gi.nfact}"))
    if gate:
        return not_applicable(*gate)

    reasons = []
    verdict = Verdict.PRONORMAL
    for i, (p, n, Gi, proj) in enumerate(factors):
        Hi, Ki = projections[i], proj(K)
        if n == 1:
            reasons.append(Reason("trivial-top", i, f"factor {i} is abelian Z_{p}"))
        elif p == 2:
            reasons.append(Reason("self-normalizing-2-factor", i,
                                  "Z_2 wr Sym_n has self-normalizing Sylow 2-subgroups"))
        elif Ki.order != Gi.order:
            reasons.append(Reason("proper-overgroup", i, f"projection of K onto factor {i} is proper"))
        elif n % p:
            reasons.append(Reason("coprime-degree", i, f"p = {p} does not divide n = {n}"))
        elif all(Hi.contains_index(g) for g in Gi.v_minus_gens):
            reasons.append(Reason("sum-zero-containment", i, f"V^- of factor {i} lies in the projection of H"))
        else:
            reasons.append(Reason("sum-zero-containment", i,
                                  f"V^- of factor {i} is not contained in the projection of H"))
            verdict = Verdict.NOT_PRONORMAL
    return Decision(verdict, reasons)


# --------------------------------------------------------------------------
# arithmetic predicates


def lemma14_predicate(orderA: int, n: int) -> bool:
    """Complement criterion for A wr Sym_n with A abelian: (|A|, n) = 1."""
    return gcd(orderA, n) == 1


def _is_power_of_two(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def lemma15_predicate(orderA: int, ns: Sequence[int]) -> bool:
    """(|A|, m) is a power of 2 for every m up to the largest n_i."""
    top = max(ns, default=0)
    return all(_is_power_of_two(gcd(orderA, m)) for m in range(1, top + 1))


def special_form(n: int) -> bool:
    """n is a power of 2 or 2^w (2^(2k) + 1)."""
    if n < 1:
        raise ValueError("n must be positive")
    while n % 2 == 0:
        n //= 2
    if n == 1:
        return True
    m = n - 1
    return _is_power_of_two(m) and (m.bit_length() - 1) % 2 == 0


def odd_prime_power(q: int) -> tuple[int, int]:
    """(r, e) with q = r^e, r an odd prime; BadPrimePower otherwise."""
    from sympy import isprime, perfect_power

    q = int(q)
    if q < 3 or q % 2 == 0:
        raise BadPrimePower(f"{q} is not an odd prime power")
    if isprime(q):
        return q, 1
    pp = perfect_power(q)
    if pp:
        r, e = pp
        # perfect_power may return a composite base for prime powers like 3^6 = 27^2
        while not isprime(r):
            pp = perfect_power(r)
            if not pp:
                raise BadPrimePower(f"{q} is not an odd prime power")
            r, e = pp[0], e * pp[1]
        return int(r), int(e)
    raise BadPrimePower(f"{q} is not an odd prime power")


def theorem1_predicate(factors: Sequence[tuple[int, int]]) -> bool:
    """Odd-index pronormality condition for products of PSp_{2n}(q).

    ``factors`` holds (n, q) pairs with n the symplectic rank; q = +-3 mod 8
    forces n to have special form.
    """
    ok = True
    for n, q in factors:
        if int(n) < 1:
            raise ValueError("symplectic rank must be positive")
        odd_prime_power(q)
        if q % 8 in (3, 5) and not special_form(int(n)):
            ok = False
    return ok


def binary_dominance(m: int, n: int) -> bool:
    """Every binary digit of m is at most the matching digit of n."""
    if m < 0 or n < 0:
        raise ValueError("binary dominance is defined for non-negative integers")
    return m & ~n == 0
