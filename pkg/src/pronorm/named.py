"""Named groups available by string, as used by the command line."""
from __future__ import annotations

import re
from functools import lru_cache

from sympy import isprime

from .group import Group, alternating_group, closure, symmetric_group
from .perm import Perm


@lru_cache(maxsize=None)
def psl2(q: int) -> Group:
    """PSL_2(q) acting on the projective line; the point q stands for infinity."""
    if not isprime(q):
        raise ValueError("only prime fields are supported")
    inf = q
    shift = Perm(tuple((x + 1) % q for x in range(q)) + (inf,))
    inv = [0] * (q + 1)
    for x in range(1, q):
        inv[x] = (-pow(x, -1, q)) % q
    inv[0], inv[inf] = inf, 0
    return closure([shift, Perm(tuple(inv))], name=f"PSL2({q})")


def builtin(name: str) -> Group:
    from .matgrp import build_sp2, sp2_3_wr_sym3

    fixed = {
        "sp2_3": lambda: build_sp2(3),
        "sp2_3_wr_sym3": sp2_3_wr_sym3,
        "alt5": lambda: alternating_group(5),
    }
    if name in fixed:
        return fixed[name]()
    m = re.fullmatch(r"(sym|alt)(\d+)", name)
    if m:
        n = int(m.group(2))
        if n < 1:
            raise KeyError(name)
        return symmetric_group(n) if m.group(1) == "sym" else alternating_group(n)
    m = re.fullmatch(r"psl2_(\d+)", name)
    if m:
        return psl2(int(m.group(1)))
    raise KeyError(name)


BUILTIN_NAMES = ("sp2_3", "sp2_3_wr_sym3", "alt5", "psl2_5", "psl2_7", "symN", "altN", "psl2_P")
